//! Problem adapters binding the generic search to concrete problems.
//!
//! Each adapter defines per-variable fitness `λ_i` such that the total cost
//! is `C(S) = -Σ λ_i`, a random initial configuration and a move in which
//! the rank-selected variable is forced to change.

mod bipartition;
mod coloring;
mod spinglass;

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

pub use bipartition::{Bipartition, PartnerRule};
pub use coloring::Coloring;
pub use spinglass::SpinGlass;

use crate::engine::{Configuration, FitnessLedger, TauPolicy};
use crate::Result;

pub trait ProblemAdapter {
    type State: Copy + Eq + Ord + Hash + Debug + Send + Sync;

    /// Number of variables.
    fn size(&self) -> usize;

    /// A fresh random configuration satisfying all global constraints.
    fn initial_states<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Self::State>;

    /// `2 λ_i` for variable `i` under `states`.
    fn doubled_fitness(&self, i: usize, states: &[Self::State]) -> i64;

    /// Cost computed straight from the objective definition, without going
    /// through fitnesses. Used as an oracle for the incremental bookkeeping.
    fn direct_cost(&self, states: &[Self::State]) -> f64;

    /// Rank-selects a variable through `ledger`, changes it (and any partner
    /// required by a global constraint) and refreshes every affected fitness.
    fn propose_and_apply<R: Rng + ?Sized>(
        &self,
        config: &mut Configuration<Self::State>,
        ledger: &mut FitnessLedger,
        policy: &TauPolicy,
        rng: &mut R,
    ) -> Result<()>;

    /// Maps `states` onto a fixed representative of its symmetry class.
    fn canonicalize(&self, states: &mut [Self::State]);

    /// Whether `states` satisfies the problem's global constraints.
    fn is_feasible(&self, _states: &[Self::State]) -> bool {
        true
    }
}
