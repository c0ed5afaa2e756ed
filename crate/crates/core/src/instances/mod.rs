//! Problem instances: graphs and spin glasses, their random generators and
//! the text file format.

mod generators;
mod graph;
mod io;
mod spin;

pub use generators::{
    cubic_bonds, gen_erdos_renyi, gen_geometric, gen_pm_j_cubic, geometric_from_points,
    geometric_radius, lattice_index, GeneratorSpec,
};
pub use graph::GraphInstance;
pub use io::{format_instance, parse_instance, read_instance, write_instance};
pub use spin::{Bond, SpinGlassInstance};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instance {
    Graph(GraphInstance),
    SpinGlass(SpinGlassInstance),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Graph(g) => g.n(),
            Instance::SpinGlass(sg) => sg.n(),
        }
    }
}
