//! Simulated annealing baseline with a geometric temperature schedule.
//!
//! Moves change one uniformly random variable and are accepted by the
//! Metropolis rule. Bipartitioning drops the exact balance constraint during
//! the anneal and instead pays a quadratic imbalance penalty; the result is
//! repaired to exact balance before its cutsize is reported.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use crate::engine::{restart_rng, Configuration, EoSearch, RunTrace, TauPolicy, TraceRecorder};
use crate::problems::{Bipartition, Coloring, ProblemAdapter, SpinGlass};
use crate::{Error, Result, SearchRng};

/// Trials used to pick the starting temperature.
const TUNING_PROPOSALS: usize = 1_000;
/// Initial acceptance rate targeted by the automatic starting temperature.
const TARGET_ACCEPTANCE: f64 = 0.9;
/// Default imbalance weight, relative to the mean degree.
const IMBALANCE_WEIGHT_PER_DEGREE: f64 = 0.05;
/// Stages for the default cooling factor 0.95 to lower the temperature 1000-fold.
pub const COOLING_STAGES: u64 = 135;

#[derive(Debug, Clone, PartialEq)]
pub struct SaSchedule {
    /// Starting temperature; `None` tunes it for ~90% initial acceptance.
    pub initial_temperature: Option<f64>,
    /// Cooling factor applied after every stage.
    pub alpha: f64,
    /// Trials per temperature stage.
    pub stage_length: u64,
    pub max_trials: u64,
    /// Stop early once the temperature drops below this.
    pub min_temperature: f64,
    /// Bipartitioning only: weight of `(|A| - |B|)²`; `None` uses 0.05 × mean degree.
    pub imbalance_weight: Option<f64>,
}

impl SaSchedule {
    /// Stages of `64 n` trials cooled by 0.95, for `stages` stages.
    pub fn for_size(n: usize, stages: u64) -> Self {
        let stage_length = 64 * n.max(1) as u64;
        Self {
            initial_temperature: None,
            alpha: 0.95,
            stage_length,
            max_trials: stage_length * stages,
            min_temperature: 0.0,
            imbalance_weight: None,
        }
    }

    /// Schedule spending exactly `trials` trials. Stages are `64 n` long
    /// unless that would leave fewer than [`COOLING_STAGES`] stages, in which
    /// case they shrink so the temperature still falls by about `10^3`.
    pub fn for_budget(n: usize, trials: u64) -> Self {
        let mut schedule = Self::for_size(n, 1).with_max_trials(trials.max(1));
        schedule.stage_length = schedule.stage_length.min((trials / COOLING_STAGES).max(1));
        schedule
    }

    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.stage_length == 0 || self.max_trials == 0 {
            return Err(Error::InvalidParameter(
                "stage length and trial budget must be positive".into(),
            ));
        }
        if let Some(t) = self.initial_temperature {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("temperature must be > 0, got {t}")));
            }
        }
        Ok(())
    }
}

/// Single-variable Metropolis moves for a problem.
pub trait Annealable: ProblemAdapter {
    type Walker: Clone;

    fn start<R: Rng + ?Sized>(&self, schedule: &SaSchedule, rng: &mut R) -> Self::Walker;

    fn walker_states<'w>(&self, walker: &'w Self::Walker) -> &'w [Self::State];

    /// A random variable and the state it would move to.
    fn propose<R: Rng + ?Sized>(&self, walker: &Self::Walker, rng: &mut R) -> (usize, Self::State);

    /// Change of the annealed objective if the proposal were applied.
    fn delta(&self, walker: &Self::Walker, var: usize, state: Self::State) -> f64;

    fn commit(&self, walker: &mut Self::Walker, var: usize, state: Self::State, delta: f64);

    /// Current annealed objective (cost plus any penalty).
    fn objective(&self, walker: &Self::Walker) -> f64;

    /// A feasible configuration derived from the walker.
    fn legalize(&self, walker: &Self::Walker) -> Vec<Self::State>;
}

#[derive(Debug, Clone)]
pub struct PlainWalker<S> {
    states: Vec<S>,
    objective: f64,
}

impl Annealable for Coloring<'_> {
    type Walker = PlainWalker<u8>;

    fn start<R: Rng + ?Sized>(&self, _: &SaSchedule, rng: &mut R) -> Self::Walker {
        let states = self.initial_states(rng);
        let objective = self.direct_cost(&states);
        PlainWalker { states, objective }
    }

    fn walker_states<'w>(&self, walker: &'w Self::Walker) -> &'w [u8] {
        &walker.states
    }

    fn propose<R: Rng + ?Sized>(&self, walker: &Self::Walker, rng: &mut R) -> (usize, u8) {
        let v = rng.random_range(0..walker.states.len());
        let mut c = rng.random_range(0..self.colors() - 1);
        if c >= walker.states[v] {
            c += 1;
        }
        (v, c)
    }

    fn delta(&self, walker: &Self::Walker, v: usize, color: u8) -> f64 {
        let s = &walker.states;
        let (mut gained, mut lost) = (0i64, 0i64);
        for &u in self.graph().neighbors(v) {
            gained += i64::from(s[u] == color);
            lost += i64::from(s[u] == s[v]);
        }
        (gained - lost) as f64
    }

    fn commit(&self, walker: &mut Self::Walker, v: usize, color: u8, delta: f64) {
        walker.states[v] = color;
        walker.objective += delta;
    }

    fn objective(&self, walker: &Self::Walker) -> f64 {
        walker.objective
    }

    fn legalize(&self, walker: &Self::Walker) -> Vec<u8> {
        walker.states.clone()
    }
}

impl Annealable for SpinGlass<'_> {
    type Walker = PlainWalker<i8>;

    fn start<R: Rng + ?Sized>(&self, _: &SaSchedule, rng: &mut R) -> Self::Walker {
        let states = self.initial_states(rng);
        let objective = self.direct_cost(&states);
        PlainWalker { states, objective }
    }

    fn walker_states<'w>(&self, walker: &'w Self::Walker) -> &'w [i8] {
        &walker.states
    }

    fn propose<R: Rng + ?Sized>(&self, walker: &Self::Walker, rng: &mut R) -> (usize, i8) {
        let v = rng.random_range(0..walker.states.len());
        (v, -walker.states[v])
    }

    fn delta(&self, walker: &Self::Walker, v: usize, _: i8) -> f64 {
        let x = walker.states[v] as i64;
        let h = self.instance().fields()[v] as i64;
        (2 * x * (self.local_field(v, &walker.states) + h)) as f64
    }

    fn commit(&self, walker: &mut Self::Walker, v: usize, spin: i8, delta: f64) {
        walker.states[v] = spin;
        walker.objective += delta;
    }

    fn objective(&self, walker: &Self::Walker) -> f64 {
        walker.objective
    }

    fn legalize(&self, walker: &Self::Walker) -> Vec<i8> {
        walker.states.clone()
    }
}

/// Bipartition under single-vertex moves with an imbalance penalty.
#[derive(Debug, Clone)]
pub struct PenaltyWalker {
    states: Vec<bool>,
    cut: i64,
    ones: i64,
    weight: f64,
}

impl PenaltyWalker {
    fn imbalance(&self) -> i64 {
        2 * self.ones - self.states.len() as i64
    }

    pub fn cut(&self) -> i64 {
        self.cut
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl Bipartition<'_> {
    fn flip_cut_delta(&self, states: &[bool], v: usize) -> i64 {
        let mut delta = 0;
        for &u in self.graph().neighbors(v) {
            delta += if states[u] == states[v] { 1 } else { -1 };
        }
        delta
    }

    /// Imbalance weight used when the schedule leaves it unset.
    pub fn default_imbalance_weight(&self) -> f64 {
        IMBALANCE_WEIGHT_PER_DEGREE * self.graph().mean_connectivity()
    }
}

impl Annealable for Bipartition<'_> {
    type Walker = PenaltyWalker;

    fn start<R: Rng + ?Sized>(&self, schedule: &SaSchedule, rng: &mut R) -> Self::Walker {
        let states = self.initial_states(rng);
        let cut = self.direct_cost(&states) as i64;
        let ones = states.iter().filter(|&&s| s).count() as i64;
        PenaltyWalker {
            states,
            cut,
            ones,
            weight: schedule
                .imbalance_weight
                .unwrap_or_else(|| self.default_imbalance_weight()),
        }
    }

    fn walker_states<'w>(&self, walker: &'w Self::Walker) -> &'w [bool] {
        &walker.states
    }

    fn propose<R: Rng + ?Sized>(&self, walker: &Self::Walker, rng: &mut R) -> (usize, bool) {
        let v = rng.random_range(0..walker.states.len());
        (v, !walker.states[v])
    }

    fn delta(&self, walker: &Self::Walker, v: usize, side: bool) -> f64 {
        let d = walker.imbalance();
        let d_new = if side { d + 2 } else { d - 2 };
        self.flip_cut_delta(&walker.states, v) as f64 + walker.weight * (d_new * d_new - d * d) as f64
    }

    fn commit(&self, walker: &mut Self::Walker, v: usize, side: bool, _: f64) {
        walker.cut += self.flip_cut_delta(&walker.states, v);
        walker.ones += if side { 1 } else { -1 };
        walker.states[v] = side;
    }

    fn objective(&self, walker: &Self::Walker) -> f64 {
        let d = walker.imbalance();
        walker.cut as f64 + walker.weight * (d * d) as f64
    }

    /// Greedy repair: moves the cheapest vertex off the larger side until the
    /// two sides are equal.
    fn legalize(&self, walker: &Self::Walker) -> Vec<bool> {
        let mut states = walker.states.clone();
        let n = states.len();
        let mut ones = walker.ones as usize;
        while 2 * ones != n {
            let heavy = 2 * ones > n;
            let v = (0..n)
                .filter(|&v| states[v] == heavy)
                .min_by_key(|&v| (self.flip_cut_delta(&states, v), v))
                .expect("larger side is non-empty");
            states[v] = !heavy;
            if heavy {
                ones -= 1;
            } else {
                ones += 1;
            }
        }
        states
    }
}

/// Outcome of an annealing run.
#[derive(Debug, Clone)]
pub struct SaOutcome<S> {
    /// Samples hold the annealed objective; `best_config` is the feasible
    /// configuration reported as the result.
    pub trace: RunTrace<S>,
    pub trials: u64,
    pub accepted: u64,
    pub initial_temperature: f64,
    pub final_temperature: f64,
}

impl<S: Copy> SaOutcome<S> {
    pub fn best_cost(&self) -> f64 {
        self.trace.best_cost()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.trials.max(1) as f64
    }
}

/// Metropolis rule: downhill and flat moves always pass.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp())
}

/// Starting temperature giving roughly 90% acceptance of uphill proposals
/// from `walker`.
pub fn tune_initial_temperature<P: Annealable, R: Rng + ?Sized>(
    problem: &P,
    walker: &P::Walker,
    rng: &mut R,
) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for _ in 0..TUNING_PROPOSALS {
        let (v, s) = problem.propose(walker, rng);
        let d = problem.delta(walker, v, s);
        if d > 0.0 {
            sum += d;
            count += 1;
        }
    }
    if count == 0 {
        1.0
    } else {
        -(sum / count as f64) / TARGET_ACCEPTANCE.ln()
    }
}

pub fn sa_run<P: Annealable>(problem: &P, schedule: &SaSchedule, seed: u64) -> Result<SaOutcome<P::State>> {
    schedule.validate()?;
    let mut rng = SearchRng::seed_from_u64(seed);
    let mut walker = problem.start(schedule, &mut rng);
    let initial_temperature = match schedule.initial_temperature {
        Some(t) => t,
        None => tune_initial_temperature(problem, &walker, &mut rng),
    };
    let mut temperature = initial_temperature;
    let mut best = walker.clone();
    let mut best_objective = problem.objective(&walker);
    let mut recorder = TraceRecorder::new();
    recorder.observe(0, best_objective, best_objective, true);
    let (mut trials, mut accepted) = (0u64, 0u64);
    while trials < schedule.max_trials && temperature >= schedule.min_temperature {
        let (v, s) = problem.propose(&walker, &mut rng);
        let delta = problem.delta(&walker, v, s);
        let u: f64 = rng.random();
        if metropolis_accept(delta, temperature, u) {
            problem.commit(&mut walker, v, s, delta);
            accepted += 1;
        }
        trials += 1;
        let objective = problem.objective(&walker);
        let improved = objective < best_objective - 1e-9;
        if improved {
            best_objective = objective;
            best.clone_from(&walker);
        }
        recorder.observe(trials, objective, best_objective, improved);
        if trials % schedule.stage_length == 0 {
            temperature *= schedule.alpha;
        }
    }
    let samples = recorder.finish(trials, problem.objective(&walker), best_objective);

    let mut candidates = [problem.legalize(&best), problem.legalize(&walker)];
    candidates.iter_mut().for_each(|c| debug_assert!(problem.is_feasible(c)));
    let [from_best, from_final] = candidates;
    let chosen = if problem.direct_cost(&from_final) < problem.direct_cost(&from_best) {
        from_final
    } else {
        from_best
    };
    Ok(SaOutcome {
        trace: RunTrace {
            samples,
            best_config: Configuration::evaluate(problem, chosen),
            steps_to_best: 0,
            best_restart: 0,
            restart_best_costs: Vec::new(),
        },
        trials,
        accepted,
        initial_temperature,
        final_temperature: temperature,
    })
}

/// Runs a fixed-temperature Metropolis chain, calling `visit` after every trial.
pub fn sample_at_temperature<P: Annealable>(
    problem: &P,
    temperature: f64,
    trials: u64,
    seed: u64,
    mut visit: impl FnMut(&[P::State]),
) {
    let mut rng = SearchRng::seed_from_u64(seed);
    let schedule = SaSchedule::for_size(problem.size(), 1);
    let mut walker = problem.start(&schedule, &mut rng);
    for _ in 0..trials {
        let (v, s) = problem.propose(&walker, &mut rng);
        let delta = problem.delta(&walker, v, s);
        if metropolis_accept(delta, temperature, rng.random()) {
            problem.commit(&mut walker, v, s, delta);
        }
        visit(problem.walker_states(&walker));
    }
}

/// Measured cost of one EO update and one SA trial on the same instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub eo_ns_per_step: f64,
    pub sa_ns_per_trial: f64,
    /// Operations timed per pass.
    pub ops: u64,
    /// `(eo, sa)` nanoseconds per operation for each pass.
    pub passes: Vec<(f64, f64)>,
}

impl Calibration {
    pub fn from_rates(eo_ns_per_step: f64, sa_ns_per_trial: f64) -> Self {
        Self {
            eo_ns_per_step,
            sa_ns_per_trial,
            ops: 0,
            passes: Vec::new(),
        }
    }

    /// How many SA trials fit in the time of one EO step.
    pub fn ratio(&self) -> f64 {
        self.eo_ns_per_step / self.sa_ns_per_trial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub eo_steps: u64,
    pub sa_trials: u64,
}

/// Pairs an EO step budget with the SA trial count taking the same time.
pub fn equalize_budgets(eo_steps: u64, calibration: &Calibration) -> Budget {
    Budget {
        eo_steps,
        sa_trials: ((eo_steps as f64) * calibration.ratio()).round().max(1.0) as u64,
    }
}

/// Largest tolerated relative difference between calibration passes.
pub const CALIBRATION_TOLERANCE: f64 = 0.2;

/// Slices per calibration pass. EO and SA slices alternate so that a
/// change in host speed during the measurement affects both sides alike.
const CALIBRATION_SLICES: u64 = 10;

/// Times two passes of `ops` operations for each side. Fails when the SA
/// per EO budget ratio of the two passes disagrees by more than 20%.
pub fn calibrate(
    ops: u64,
    mut eo_pass: impl FnMut(u64) -> Duration,
    mut sa_pass: impl FnMut(u64) -> Duration,
) -> Result<Calibration> {
    let slices = CALIBRATION_SLICES.min(ops.max(1));
    let slice = ops.max(1) / slices;
    let timed = slice * slices;
    let per_op = |d: Duration| d.as_nanos() as f64 / timed as f64;
    let mut passes = Vec::with_capacity(2);
    for _ in 0..2 {
        let (mut eo, mut sa) = (Duration::ZERO, Duration::ZERO);
        for _ in 0..slices {
            eo += eo_pass(slice);
            sa += sa_pass(slice);
        }
        passes.push((per_op(eo), per_op(sa)));
    }
    let ratio = |(eo, sa): (f64, f64)| eo / sa.max(f64::MIN_POSITIVE);
    let (r0, r1) = (ratio(passes[0]), ratio(passes[1]));
    let change = (r0 - r1).abs() / r0.min(r1).max(f64::MIN_POSITIVE);
    if !(change <= CALIBRATION_TOLERANCE) {
        return Err(Error::CalibrationUnstable {
            relative_change: 100.0 * change,
        });
    }
    Ok(Calibration {
        eo_ns_per_step: (passes[0].0 + passes[1].0) / 2.0,
        sa_ns_per_trial: (passes[0].1 + passes[1].1) / 2.0,
        ops: timed,
        passes,
    })
}

/// Calibrates by actually running EO (with `policy`) and SA trials on
/// `problem`, after one untimed slice of each side to warm caches.
pub fn calibrate_problem<P: Annealable>(problem: &P, policy: &TauPolicy, ops: u64) -> Result<Calibration> {
    let schedule = SaSchedule::for_size(problem.size(), 1);
    let mut search = EoSearch::new(problem, policy, restart_rng(policy.seed(), 0)).expect("policy matches problem");
    let mut sa_rng = SearchRng::seed_from_u64(policy.seed());
    let mut walker = problem.start(&schedule, &mut sa_rng);
    let mut eo_slice = |ops: u64| {
        let start = Instant::now();
        for _ in 0..ops {
            search.step().expect("calibration move");
        }
        start.elapsed()
    };
    let mut sa_trials = |trials: u64| {
        let start = Instant::now();
        for _ in 0..trials {
            let (v, s) = problem.propose(&walker, &mut sa_rng);
            let delta = problem.delta(&walker, v, s);
            if metropolis_accept(delta, 1.0, sa_rng.random()) {
                problem.commit(&mut walker, v, s, delta);
            }
        }
        start.elapsed()
    };
    let warm = (ops / CALIBRATION_SLICES).max(1);
    let eo_warm = eo_slice(warm);
    let sa_warm = sa_trials(warm);
    // stretch SA slices to the wall time of EO slices
    let stretch = (eo_warm.as_secs_f64() / sa_warm.as_secs_f64().max(1e-9)).round().clamp(1.0, 1e3) as u32;
    let sa_slice = |ops: u64| sa_trials(ops * u64::from(stretch)) / stretch;
    calibrate(ops, eo_slice, sa_slice)
}
