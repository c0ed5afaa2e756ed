//! The generic EO / τ-EO search loop.
//!
//! Each update ranks the variables by fitness (worst first), draws a rank
//! from `P(k) ∝ k^-tau`, lets the problem adapter force the variable at that
//! rank to change and accepts the result unconditionally. The best
//! configuration seen is retained.

mod config;
mod ledger;
mod policy;
mod search;
mod trace;

pub use config::Configuration;
pub use ledger::FitnessLedger;
pub use policy::TauPolicy;
pub use search::{restart_rng, run, EoSearch, RunParams};
pub use trace::{RunTrace, TraceSample, FULL_RESOLUTION_STEPS, THINNING_FACTOR, TRACE_CSV_HEADER};

pub(crate) use trace::TraceRecorder;
