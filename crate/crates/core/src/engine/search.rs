use rand::SeedableRng;

use crate::engine::trace::TraceRecorder;
use crate::engine::{Configuration, FitnessLedger, RunTrace, TauPolicy};
use crate::problems::ProblemAdapter;
use crate::{Error, Result, SearchRng};

/// Generator for restart `restart` of a run seeded with `seed`.
///
/// Every restart reads its own ChaCha stream, so restarts are independent of
/// the order in which they execute.
pub fn restart_rng(seed: u64, restart: usize) -> SearchRng {
    let mut rng = SearchRng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// A single EO trajectory: one configuration, its ledger and the best
/// configuration seen so far.
#[derive(Debug, Clone)]
pub struct EoSearch<'a, P: ProblemAdapter> {
    problem: &'a P,
    policy: &'a TauPolicy,
    rng: SearchRng,
    config: Configuration<P::State>,
    ledger: FitnessLedger,
    best: Configuration<P::State>,
    best_step: u64,
    step: u64,
}

impl<'a, P: ProblemAdapter> EoSearch<'a, P> {
    /// Starts from a random initial configuration drawn from `rng`.
    pub fn new(problem: &'a P, policy: &'a TauPolicy, mut rng: SearchRng) -> Result<Self> {
        let states = problem.initial_states(&mut rng);
        Self::from_states(problem, policy, states, rng)
    }

    pub fn from_states(
        problem: &'a P,
        policy: &'a TauPolicy,
        states: Vec<P::State>,
        rng: SearchRng,
    ) -> Result<Self> {
        if policy.n() != problem.size() {
            return Err(Error::InvalidParameter(format!(
                "rank policy built for n={} but the problem has {} variables",
                policy.n(),
                problem.size()
            )));
        }
        if states.len() != problem.size() {
            return Err(Error::InvalidParameter(format!(
                "expected {} states, got {}",
                problem.size(),
                states.len()
            )));
        }
        let config = Configuration::evaluate(problem, states);
        let ledger = FitnessLedger::new(config.doubled_fitnesses());
        Ok(Self {
            problem,
            policy,
            rng,
            best: config.clone(),
            config,
            ledger,
            best_step: 0,
            step: 0,
        })
    }

    /// One update: select by rank, move unconditionally, keep the best.
    ///
    /// Returns whether the best cost strictly improved.
    pub fn step(&mut self) -> Result<bool> {
        self.ledger.clear_touched();
        self.problem
            .propose_and_apply(&mut self.config, &mut self.ledger, self.policy, &mut self.rng)?;
        self.step += 1;
        if self.config.doubled_cost() < self.best.doubled_cost() {
            self.best.clone_from(&self.config);
            self.best_step = self.step;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn config(&self) -> &Configuration<P::State> {
        &self.config
    }

    pub fn ledger(&self) -> &FitnessLedger {
        &self.ledger
    }

    pub fn best(&self) -> &Configuration<P::State> {
        &self.best
    }

    pub fn best_step(&self) -> u64 {
        self.best_step
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn rng(&mut self) -> &mut SearchRng {
        &mut self.rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunParams {
    pub max_steps: u64,
    pub restarts: usize,
}

impl RunParams {
    pub fn new(max_steps: u64, restarts: usize) -> Self {
        Self {
            max_steps,
            restarts,
        }
    }
}

/// Runs `params.restarts` independent searches of `params.max_steps` updates
/// each and returns the trace of the restart that found the lowest cost
/// (the earliest one on ties).
pub fn run<P: ProblemAdapter>(
    problem: &P,
    policy: &TauPolicy,
    params: RunParams,
) -> Result<RunTrace<P::State>> {
    if params.max_steps == 0 || params.restarts == 0 {
        return Err(Error::InvalidParameter(
            "max_steps and restarts must both be at least 1".into(),
        ));
    }
    let mut winner: Option<RunTrace<P::State>> = None;
    let mut restart_best_costs = Vec::with_capacity(params.restarts);
    for restart in 0..params.restarts {
        let trace = run_single(problem, policy, params.max_steps, restart)?;
        restart_best_costs.push(trace.best_cost());
        let better = winner
            .as_ref()
            .is_none_or(|w| trace.best_config.doubled_cost() < w.best_config.doubled_cost());
        if better {
            winner = Some(trace);
        }
    }
    let mut trace = winner.expect("at least one restart");
    trace.restart_best_costs = restart_best_costs;
    Ok(trace)
}

fn run_single<P: ProblemAdapter>(
    problem: &P,
    policy: &TauPolicy,
    max_steps: u64,
    restart: usize,
) -> Result<RunTrace<P::State>> {
    let mut search = EoSearch::new(problem, policy, restart_rng(policy.seed(), restart))?;
    let mut recorder = TraceRecorder::new();
    recorder.observe(0, search.config().cost(), search.best().cost(), true);
    for _ in 0..max_steps {
        let improved = search.step()?;
        recorder.observe(
            search.steps(),
            search.config().cost(),
            search.best().cost(),
            improved,
        );
    }
    let samples = recorder.finish(search.steps(), search.config().cost(), search.best().cost());
    Ok(RunTrace {
        samples,
        steps_to_best: search.best_step,
        best_restart: restart,
        best_config: search.best,
        restart_best_costs: Vec::new(),
    })
}
