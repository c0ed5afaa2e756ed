use rand::Rng;

use super::ProblemAdapter;
use crate::engine::{Configuration, FitnessLedger, TauPolicy};
use crate::instances::SpinGlassInstance;
use crate::Result;

/// Ising spin glass ground states, `H = -Σ_bonds J_ij x_i x_j - Σ h_i x_i`.
///
/// Spin fitness is its local energy share `λ_i = x_i (½ Σ_j J_ij x_j + h_i)`,
/// so `H = -Σ λ_i`. A move flips the selected spin.
#[derive(Debug, Clone)]
pub struct SpinGlass<'a> {
    instance: &'a SpinGlassInstance,
    couplings: Vec<Vec<(usize, i32)>>,
}

impl<'a> SpinGlass<'a> {
    pub fn new(instance: &'a SpinGlassInstance) -> Self {
        let mut couplings = vec![Vec::new(); instance.n()];
        for b in instance.bonds() {
            couplings[b.i].push((b.j, b.coupling));
            couplings[b.j].push((b.i, b.coupling));
        }
        Self {
            instance,
            couplings,
        }
    }

    pub fn instance(&self) -> &'a SpinGlassInstance {
        self.instance
    }

    /// Coupled spins of `i` with their couplings, one entry per bond.
    pub fn couplings(&self, i: usize) -> &[(usize, i32)] {
        &self.couplings[i]
    }

    /// `Σ_j J_ij x_j`
    pub fn local_field(&self, i: usize, states: &[i8]) -> i64 {
        self.couplings[i]
            .iter()
            .map(|&(j, c)| c as i64 * states[j] as i64)
            .sum()
    }
}

impl ProblemAdapter for SpinGlass<'_> {
    type State = i8;

    fn size(&self) -> usize {
        self.instance.n()
    }

    fn initial_states<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i8> {
        (0..self.instance.n())
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect()
    }

    fn doubled_fitness(&self, i: usize, states: &[i8]) -> i64 {
        let h = self.instance.fields()[i] as i64;
        states[i] as i64 * (self.local_field(i, states) + 2 * h)
    }

    fn direct_cost(&self, states: &[i8]) -> f64 {
        let bonds: i64 = self
            .instance
            .bonds()
            .iter()
            .map(|b| b.coupling as i64 * states[b.i] as i64 * states[b.j] as i64)
            .sum();
        let fields: i64 = self
            .instance
            .fields()
            .iter()
            .zip(states)
            .map(|(&h, &x)| h as i64 * x as i64)
            .sum();
        -(bonds + fields) as f64
    }

    fn propose_and_apply<R: Rng + ?Sized>(
        &self,
        config: &mut Configuration<i8>,
        ledger: &mut FitnessLedger,
        policy: &TauPolicy,
        rng: &mut R,
    ) -> Result<()> {
        let v = ledger.select_by_rank(policy.draw_rank(rng), rng);
        config.set_state(v, -config.state(v));
        config.refresh(self, ledger, v);
        for &(u, _) in &self.couplings[v] {
            config.refresh(self, ledger, u);
        }
        Ok(())
    }

    /// With zero fields, fixes spin 0 to +1 (global flip symmetry).
    fn canonicalize(&self, states: &mut [i8]) {
        if !self.instance.has_fields() && states.first() == Some(&-1) {
            states.iter_mut().for_each(|s| *s = -*s);
        }
    }

    fn is_feasible(&self, states: &[i8]) -> bool {
        states.iter().all(|&s| s == 1 || s == -1)
    }
}
