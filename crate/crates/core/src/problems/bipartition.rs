use rand::seq::SliceRandom;
use rand::Rng;

use super::ProblemAdapter;
use crate::engine::{Configuration, FitnessLedger, TauPolicy};
use crate::instances::GraphInstance;
use crate::{Error, Result};

/// How the second vertex of a 1-exchange is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartnerRule {
    /// Draw a second rank from the same power law, redrawing until the
    /// vertex lies in the opposite set.
    #[default]
    Ranked,
    /// Uniformly random vertex of the opposite set.
    Uniform,
}

/// Graph bipartitioning into two sets of exactly `n/2` vertices, minimizing
/// the number of cut edges.
///
/// Vertex fitness is `λ_i = -b_i / 2` with `b_i` the cut edges at `i`, so
/// `-Σ λ_i` is the cutsize. Moves are 1-exchanges.
#[derive(Debug, Clone, Copy)]
pub struct Bipartition<'a> {
    graph: &'a GraphInstance,
    partner: PartnerRule,
}

impl<'a> Bipartition<'a> {
    pub fn new(graph: &'a GraphInstance, partner: PartnerRule) -> Result<Self> {
        let n = graph.n();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInstance(format!(
                "bipartitioning needs an even vertex count >= 2, got {n}"
            )));
        }
        Ok(Self { graph, partner })
    }

    pub fn graph(&self) -> &'a GraphInstance {
        self.graph
    }

    pub fn partner(&self) -> PartnerRule {
        self.partner
    }

    /// Cut edges at `i`.
    pub fn cut_degree(&self, i: usize, sides: &[bool]) -> usize {
        self.graph
            .neighbors(i)
            .iter()
            .filter(|&&j| sides[j] != sides[i])
            .count()
    }

    fn max_attempts(&self) -> usize {
        64 * self.graph.n()
    }

    fn pick_partner<R: Rng + ?Sized>(
        &self,
        first: usize,
        sides: &[bool],
        ledger: &FitnessLedger,
        policy: &TauPolicy,
        rng: &mut R,
    ) -> Result<usize> {
        let n = self.graph.n();
        for _ in 0..self.max_attempts() {
            let candidate = match self.partner {
                PartnerRule::Ranked => ledger.select_by_rank(policy.draw_rank(rng), rng),
                PartnerRule::Uniform => rng.random_range(0..n),
            };
            if sides[candidate] != sides[first] {
                return Ok(candidate);
            }
        }
        Err(Error::AdapterMoveImpossible {
            attempts: self.max_attempts(),
        })
    }
}

impl ProblemAdapter for Bipartition<'_> {
    type State = bool;

    fn size(&self) -> usize {
        self.graph.n()
    }

    fn initial_states<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let n = self.graph.n();
        let mut sides: Vec<bool> = (0..n).map(|i| i < n / 2).collect();
        sides.shuffle(rng);
        sides
    }

    fn doubled_fitness(&self, i: usize, states: &[bool]) -> i64 {
        -(self.cut_degree(i, states) as i64)
    }

    fn direct_cost(&self, states: &[bool]) -> f64 {
        self.graph.edges().filter(|&(u, v)| states[u] != states[v]).count() as f64
    }

    fn propose_and_apply<R: Rng + ?Sized>(
        &self,
        config: &mut Configuration<bool>,
        ledger: &mut FitnessLedger,
        policy: &TauPolicy,
        rng: &mut R,
    ) -> Result<()> {
        let first = ledger.select_by_rank(policy.draw_rank(rng), rng);
        let second = self.pick_partner(first, config.states(), ledger, policy, rng)?;
        let (a, b) = (config.state(first), config.state(second));
        config.set_state(first, b);
        config.set_state(second, a);
        for v in [first, second] {
            config.refresh(self, ledger, v);
            for &u in self.graph.neighbors(v) {
                config.refresh(self, ledger, u);
            }
        }
        Ok(())
    }

    /// Puts vertex 0 in the `false` set.
    fn canonicalize(&self, states: &mut [bool]) {
        if states.first() == Some(&true) {
            states.iter_mut().for_each(|s| *s = !*s);
        }
    }

    fn is_feasible(&self, states: &[bool]) -> bool {
        2 * states.iter().filter(|&&s| s).count() == states.len()
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::engine::{run, RunParams};
    use crate::SearchRng;

    #[test]
    fn isolated_vertex_has_zero_fitness() {
        let g = GraphInstance::from_edges(4, [(0, 1)]).unwrap();
        let p = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let c = Configuration::evaluate(&p, vec![false, true, false, true]);
        assert_eq!(c.fitness(2), 0.0);
        assert_eq!(c.fitness(0), -0.5);
    }

    #[test]
    fn three_cut_edges() {
        let g = GraphInstance::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let c = Configuration::evaluate(&p, vec![false, true, true, true]);
        assert_eq!(c.fitness(0), -1.5);
        assert!(!p.is_feasible(c.states()));
    }

    #[test]
    fn four_cycle_partitions() {
        // the 3 balanced splits of C4 (vertex 0 fixed on one side)
        let g = GraphInstance::cycle(4);
        let p = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let cuts: Vec<f64> = [[false, false, true, true], [false, true, false, true], [false, true, true, false]]
            .into_iter()
            .map(|s| {
                let c = Configuration::evaluate(&p, s.to_vec());
                assert_eq!(c.cost(), p.direct_cost(&s));
                c.cost()
            })
            .collect();
        assert_eq!(cuts, vec![2.0, 4.0, 2.0]);
    }

    #[test]
    fn rejects_odd_graphs() {
        let g = GraphInstance::empty(5);
        assert!(Bipartition::new(&g, PartnerRule::Ranked).is_err());
    }

    #[test]
    fn uniform_partner_covers_opposite_set() {
        // basic EO: rank 1 is vertex 0, partner uniform over the other side
        let g = GraphInstance::from_edges(6, [(0, 3), (0, 4), (0, 5)]).unwrap();
        let p = Bipartition::new(&g, PartnerRule::Uniform).unwrap();
        let policy = TauPolicy::greedy(6, 0);
        let start = vec![false, false, false, true, true, true];
        let mut rng = SearchRng::seed_from_u64(2);
        let mut hits = [0usize; 6];
        for _ in 0..30_000 {
            let mut c = Configuration::evaluate(&p, start.clone());
            let mut ledger = FitnessLedger::new(c.doubled_fitnesses());
            p.propose_and_apply(&mut c, &mut ledger, &policy, &mut rng).unwrap();
            assert!(c.state(0));
            let partner = (3..6).find(|&v| !c.state(v)).unwrap();
            hits[partner] += 1;
        }
        for h in &hits[3..] {
            assert!((*h as i64 - 10_000).abs() < 400, "{hits:?}");
        }
    }

    #[test]
    fn degenerate_pair_swaps() {
        let g = GraphInstance::from_edges(2, [(0, 1)]).unwrap();
        let p = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let policy = TauPolicy::new(1.4, 2, 0).unwrap();
        let trace = run(&p, &policy, RunParams::new(10, 1)).unwrap();
        assert_eq!(trace.best_cost(), 1.0);
    }

    #[test]
    fn zero_edges_best_at_step_zero() {
        let g = GraphInstance::empty(10);
        let p = Bipartition::new(&g, PartnerRule::Ranked).unwrap();
        let policy = TauPolicy::new(1.4, 10, 0).unwrap();
        let trace = run(&p, &policy, RunParams::new(50, 1)).unwrap();
        assert_eq!(trace.best_cost(), 0.0);
        assert_eq!(trace.steps_to_best, 0);
        assert_eq!(trace.samples[0].best_cost, 0.0);
    }
}
