use std::f64::consts::PI;

use rand::{Rng, SeedableRng};

use super::{Bond, GraphInstance, Instance, SpinGlassInstance};
use crate::{Error, Result, SearchRng};

/// Recipe for a random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    ErdosRenyi { n: usize, c: f64, seed: u64 },
    Geometric { n: usize, c: f64, seed: u64 },
    PmJCubic { l: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Instance> {
        match *self {
            GeneratorSpec::ErdosRenyi { n, c, seed } => gen_erdos_renyi(n, c, seed).map(Instance::Graph),
            GeneratorSpec::Geometric { n, c, seed } => gen_geometric(n, c, seed).map(Instance::Graph),
            GeneratorSpec::PmJCubic { l, seed } => gen_pm_j_cubic(l, seed, None).map(Instance::SpinGlass),
        }
    }
}

fn check_graph_args(n: usize, c: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("connectivity must be >= 0, got {c}")));
    }
    Ok(())
}

/// G(n, p) with `p = c / (n - 1)`, so the expected mean degree is `c`.
///
/// Uses geometric skipping over the `n(n-1)/2` vertex pairs, which costs
/// O(n + m) instead of O(n²).
pub fn gen_erdos_renyi(n: usize, c: f64, seed: u64) -> Result<GraphInstance> {
    check_graph_args(n, c)?;
    let p = c / (n - 1) as f64;
    if p > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "connectivity {c} exceeds n - 1 = {}",
            n - 1
        )));
    }
    if p <= 0.0 {
        return Ok(GraphInstance::empty(n));
    }
    if p >= 1.0 {
        return Ok(GraphInstance::complete(n));
    }
    let mut rng = SearchRng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    GraphInstance::from_edges(n, edges)
}

/// Connection radius giving expected mean degree `c` on the unit torus.
pub fn geometric_radius(n: usize, c: f64) -> f64 {
    (c / (PI * (n - 1) as f64)).sqrt()
}

/// Random geometric graph: `n` uniform points on the unit torus, linked when
/// their wrap-around distance is at most [`geometric_radius`].
pub fn gen_geometric(n: usize, c: f64, seed: u64) -> Result<GraphInstance> {
    check_graph_args(n, c)?;
    if c == 0.0 {
        return Ok(GraphInstance::empty(n));
    }
    let mut rng = SearchRng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    Ok(geometric_from_points(&points, geometric_radius(n, c)))
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Links every pair of `points` (in the unit torus) at distance `<= radius`.
pub fn geometric_from_points(points: &[(f64, f64)], radius: f64) -> GraphInstance {
    let n = points.len();
    let r2 = radius * radius;
    let close = |i: usize, j: usize| {
        let dx = torus_gap(points[i].0, points[j].0);
        let dy = torus_gap(points[i].1, points[j].1);
        dx * dx + dy * dy <= r2
    };
    let cells = if radius > 0.0 { (1.0 / radius).floor() as usize } else { usize::MAX };
    let mut edges = Vec::new();
    if cells < 3 {
        for i in 0..n {
            for j in i + 1..n {
                if close(i, j) {
                    edges.push((i, j));
                }
            }
        }
    } else {
        let cells = cells.min(4096);
        let cell_of = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
        for (i, &(x, y)) in points.iter().enumerate() {
            grid[cell_of(x) + cells * cell_of(y)].push(i);
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            let (cx, cy) = (cell_of(x), cell_of(y));
            for dy in [cells - 1, 0, 1] {
                for dx in [cells - 1, 0, 1] {
                    let cell = (cx + dx) % cells + cells * ((cy + dy) % cells);
                    for &j in &grid[cell] {
                        if j > i && close(i, j) {
                            edges.push((i, j));
                        }
                    }
                }
            }
        }
    }
    GraphInstance::from_edges(n, edges).expect("each pair is visited once")
}

/// Index of lattice site `(x, y, z)` on a cube of side `l`.
pub fn lattice_index(l: usize, x: usize, y: usize, z: usize) -> usize {
    x + l * (y + l * z)
}

/// Periodic cubic lattice of side `l` with `J = ±1` drawn with probability ½.
///
/// Every site contributes its bonds in the +x, +y and +z directions, giving
/// exactly `3 l³` bonds.
pub fn gen_pm_j_cubic(l: usize, seed: u64, fields: Option<Vec<i32>>) -> Result<SpinGlassInstance> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("need L >= 2, got {l}")));
    }
    let mut rng = SearchRng::seed_from_u64(seed);
    let bonds = cubic_bonds(l, || if rng.random::<bool>() { 1 } else { -1 });
    let n = l * l * l;
    SpinGlassInstance::new(n, bonds, fields.unwrap_or_else(|| vec![0; n]))
}

/// Bonds of the periodic cubic lattice, couplings supplied by `coupling`
/// in site-major, direction-minor order.
pub fn cubic_bonds(l: usize, mut coupling: impl FnMut() -> i32) -> Vec<Bond> {
    let mut bonds = Vec::with_capacity(3 * l * l * l);
    for z in 0..l {
        for y in 0..l {
            for x in 0..l {
                let i = lattice_index(l, x, y, z);
                for j in [
                    lattice_index(l, (x + 1) % l, y, z),
                    lattice_index(l, x, (y + 1) % l, z),
                    lattice_index(l, x, y, (z + 1) % l),
                ] {
                    bonds.push(Bond {
                        i,
                        j,
                        coupling: coupling(),
                    });
                }
            }
        }
    }
    bonds
}
