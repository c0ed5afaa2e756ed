use crate::engine::FitnessLedger;
use crate::problems::ProblemAdapter;

/// Variable states with cached per-variable fitness and total cost.
///
/// Fitnesses are multiples of ½ for every bundled adapter, so they are kept
/// as doubled integers and the cost `C = -Σ λ_i` is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration<S> {
    states: Vec<S>,
    fitness2: Vec<i64>,
    cost2: i64,
}

impl<S: Copy> Configuration<S> {
    /// Evaluates every fitness of `states` from scratch.
    pub fn evaluate<P>(problem: &P, states: Vec<S>) -> Self
    where
        P: ProblemAdapter<State = S> + ?Sized,
    {
        let fitness2: Vec<i64> = (0..states.len())
            .map(|i| problem.doubled_fitness(i, &states))
            .collect();
        let cost2 = -fitness2.iter().sum::<i64>();
        Self {
            states,
            fitness2,
            cost2,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> S {
        self.states[i]
    }

    pub fn into_states(self) -> Vec<S> {
        self.states
    }

    /// λ_i
    pub fn fitness(&self, i: usize) -> f64 {
        self.fitness2[i] as f64 / 2.0
    }

    /// 2λ_i
    pub fn doubled_fitness(&self, i: usize) -> i64 {
        self.fitness2[i]
    }

    pub fn doubled_fitnesses(&self) -> &[i64] {
        &self.fitness2
    }

    /// C(S) = -Σ λ_i
    pub fn cost(&self) -> f64 {
        self.cost2 as f64 / 2.0
    }

    pub fn doubled_cost(&self) -> i64 {
        self.cost2
    }

    /// Overwrites one state without touching cached fitnesses; follow with
    /// [`refresh`](Self::refresh) on every variable whose fitness depends on it.
    pub fn set_state(&mut self, i: usize, state: S) {
        self.states[i] = state;
    }

    /// Re-evaluates the fitness of `i`, adjusts the cost and re-files `i`.
    pub fn refresh<P>(&mut self, problem: &P, ledger: &mut FitnessLedger, i: usize)
    where
        P: ProblemAdapter<State = S> + ?Sized,
    {
        let new = problem.doubled_fitness(i, &self.states);
        self.cost2 -= new - self.fitness2[i];
        self.fitness2[i] = new;
        ledger.refile(i, new);
    }
}
