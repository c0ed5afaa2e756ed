use rand::Rng;

use super::ProblemAdapter;
use crate::engine::{Configuration, FitnessLedger, TauPolicy};
use crate::instances::GraphInstance;
use crate::{Error, Result};

/// MAX-K-COL: color vertices with `K` colors, minimizing monochromatic edges.
///
/// `λ_i = -b_i / 2` with `b_i` the monochromatic edges at `i`. A move gives
/// the selected vertex a uniformly random color different from its own.
#[derive(Debug, Clone, Copy)]
pub struct Coloring<'a> {
    graph: &'a GraphInstance,
    colors: u8,
}

impl<'a> Coloring<'a> {
    pub fn new(graph: &'a GraphInstance, colors: u8) -> Result<Self> {
        if colors < 2 {
            return Err(Error::InvalidParameter(format!(
                "coloring needs at least 2 colors, got {colors}"
            )));
        }
        Ok(Self { graph, colors })
    }

    pub fn graph(&self) -> &'a GraphInstance {
        self.graph
    }

    pub fn colors(&self) -> u8 {
        self.colors
    }

    pub fn conflicts(&self, i: usize, states: &[u8]) -> usize {
        self.graph
            .neighbors(i)
            .iter()
            .filter(|&&j| states[j] == states[i])
            .count()
    }
}

impl ProblemAdapter for Coloring<'_> {
    type State = u8;

    fn size(&self) -> usize {
        self.graph.n()
    }

    fn initial_states<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        (0..self.graph.n())
            .map(|_| rng.random_range(0..self.colors))
            .collect()
    }

    fn doubled_fitness(&self, i: usize, states: &[u8]) -> i64 {
        -(self.conflicts(i, states) as i64)
    }

    fn direct_cost(&self, states: &[u8]) -> f64 {
        self.graph.edges().filter(|&(u, v)| states[u] == states[v]).count() as f64
    }

    fn propose_and_apply<R: Rng + ?Sized>(
        &self,
        config: &mut Configuration<u8>,
        ledger: &mut FitnessLedger,
        policy: &TauPolicy,
        rng: &mut R,
    ) -> Result<()> {
        let v = ledger.select_by_rank(policy.draw_rank(rng), rng);
        let old = config.state(v);
        let mut new = rng.random_range(0..self.colors - 1);
        if new >= old {
            new += 1;
        }
        config.set_state(v, new);
        config.refresh(self, ledger, v);
        for &u in self.graph.neighbors(v) {
            config.refresh(self, ledger, u);
        }
        Ok(())
    }

    /// Relabels colors in order of first appearance, the lexicographically
    /// smallest member of the color-permutation class.
    fn canonicalize(&self, states: &mut [u8]) {
        let mut map = [u8::MAX; 256];
        let mut next = 0u8;
        for s in states.iter_mut() {
            let slot = &mut map[*s as usize];
            if *slot == u8::MAX {
                *slot = next;
                next += 1;
            }
            *s = *slot;
        }
    }

    fn is_feasible(&self, states: &[u8]) -> bool {
        states.iter().all(|&s| s < self.colors)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::SearchRng;

    #[test]
    fn proper_coloring_costs_nothing() {
        let g = GraphInstance::complete(3);
        let p = Coloring::new(&g, 3).unwrap();
        let c = Configuration::evaluate(&p, vec![0, 1, 2]);
        assert_eq!(c.cost(), 0.0);
        assert!((0..3).all(|i| c.fitness(i) == 0.0));
    }

    #[test]
    fn k4_with_three_colors_best_is_one() {
        let g = GraphInstance::complete(4);
        let p = Coloring::new(&g, 3).unwrap();
        let mut best = f64::MAX;
        for code in 0..81u32 {
            let s: Vec<u8> = (0..4).map(|i| (code / 3u32.pow(i) % 3) as u8).collect();
            let c = Configuration::evaluate(&p, s.clone());
            assert_eq!(c.cost(), p.direct_cost(&s));
            best = best.min(c.cost());
        }
        assert_eq!(best, 1.0);
    }

    #[test]
    fn two_colors_flip_deterministically() {
        let g = GraphInstance::cycle(6);
        let p = Coloring::new(&g, 2).unwrap();
        let policy = TauPolicy::new(1.4, 6, 0).unwrap();
        let mut rng = SearchRng::seed_from_u64(5);
        let mut c = Configuration::evaluate(&p, vec![0, 0, 1, 0, 1, 1]);
        let mut ledger = FitnessLedger::new(c.doubled_fitnesses());
        for _ in 0..100 {
            let before = c.clone();
            p.propose_and_apply(&mut c, &mut ledger, &policy, &mut rng).unwrap();
            let changed: Vec<usize> = (0..6).filter(|&i| c.state(i) != before.state(i)).collect();
            assert_eq!(changed.len(), 1);
            assert_eq!(c.state(changed[0]), 1 - before.state(changed[0]));
        }
    }

    #[test]
    fn recolor_never_keeps_color() {
        let g = GraphInstance::empty(3);
        let p = Coloring::new(&g, 4).unwrap();
        let policy = TauPolicy::new(0.0, 3, 0).unwrap();
        let mut rng = SearchRng::seed_from_u64(8);
        let mut c = Configuration::evaluate(&p, vec![0, 1, 2]);
        let mut ledger = FitnessLedger::new(c.doubled_fitnesses());
        for _ in 0..200 {
            let before = c.clone();
            p.propose_and_apply(&mut c, &mut ledger, &policy, &mut rng).unwrap();
            assert_eq!((0..3).filter(|&i| c.state(i) != before.state(i)).count(), 1);
            // isolated vertices: recoloring never changes the cost
            assert_eq!(c.cost(), 0.0);
        }
    }

    #[test]
    fn canonical_form_is_first_appearance() {
        let g = GraphInstance::empty(5);
        let p = Coloring::new(&g, 3).unwrap();
        let mut s = vec![2, 2, 0, 1, 0];
        p.canonicalize(&mut s);
        assert_eq!(s, vec![0, 0, 1, 2, 1]);
        let again = s.clone();
        p.canonicalize(&mut s);
        assert_eq!(s, again);
        assert!(Coloring::new(&g, 1).is_err());
    }
}
