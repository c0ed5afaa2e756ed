//! Extremal optimization for combinatorial problems.
//!
//! The crate is organised around a generic search loop ([`engine`]) that
//! repeatedly picks a poorly adapted variable by its fitness rank and forces
//! it to change, accepting every move. Problem adapters ([`problems`]) supply
//! per-variable fitnesses and legal moves for graph bipartitioning,
//! MAX-K-COL coloring and ±J spin glasses. The remaining modules hold the
//! experimental apparatus: instance generators and file formats
//! ([`instances`]), a simulated-annealing baseline ([`sa`]), statistical
//! post-processing ([`analysis`]) and the Bak–Sneppen and jamming models
//! ([`models`]).

pub mod analysis;
pub mod engine;
mod error;
pub mod instances;
pub mod models;
pub mod problems;
pub mod sa;

pub use error::{Error, Result};

/// Random generator used throughout the crate.
///
/// ChaCha is seedable, portable across platforms and supports independent
/// streams, which the engine uses to derive per-restart generators.
pub type SearchRng = rand_chacha::ChaCha8Rng;
