use eo_core::analysis::Enumerable;
use eo_core::engine::{run, RunParams, RunTrace, TauPolicy};
use eo_core::instances::{GeneratorSpec, Instance};
use eo_core::problems::{Bipartition, Coloring, PartnerRule, SpinGlass};
use eo_core::sa::{sa_run, Annealable, SaSchedule};
use sha2::{Digest, Sha256};

use crate::args::{Algo, GenKind, ProblemKind, SolverArgs};
use crate::error::{CliError, CliResult};
use crate::values::StepSpec;

/// Independent seed for one purpose (`stream`) and position `(a, b)`.
pub fn derive_seed(seed: u64, stream: &str, a: u64, b: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.as_bytes());
    h.update(a.to_le_bytes());
    h.update(b.to_le_bytes());
    let bytes = h.finalize();
    u64::from_le_bytes(bytes[..8].try_into().expect("digest is 32 bytes"))
}

pub fn generate(gen: GenKind, n: Option<usize>, l: Option<usize>, c: Option<f64>, seed: u64) -> CliResult<(String, Instance)> {
    let need_n = || n.ok_or_else(|| CliError::usage("--n is required for graph generators"));
    let need_c = || c.ok_or_else(|| CliError::usage("--c is required for graph generators"));
    let (label, spec) = match gen {
        GenKind::Er => {
            let (n, c) = (need_n()?, need_c()?);
            (format!("er n={n} c={c} seed={seed}"), GeneratorSpec::ErdosRenyi { n, c, seed })
        }
        GenKind::Geo => {
            let (n, c) = (need_n()?, need_c()?);
            (format!("geo n={n} c={c} seed={seed}"), GeneratorSpec::Geometric { n, c, seed })
        }
        GenKind::Pmj => {
            let l = l.ok_or_else(|| CliError::usage("--L is required for the pmj generator"))?;
            (format!("pmj L={l} seed={seed}"), GeneratorSpec::PmJCubic { l, seed })
        }
    };
    Ok((label, spec.generate()?))
}

pub fn check_generator(problem: ProblemKind, gen: GenKind) -> CliResult<()> {
    match (problem, gen) {
        (ProblemKind::Spinglass, GenKind::Pmj) | (ProblemKind::Gbp | ProblemKind::Color, GenKind::Er | GenKind::Geo) => Ok(()),
        _ => Err(CliError::usage(format!("generator {gen:?} does not produce {problem:?} instances"))),
    }
}

/// How a configuration value is written to a solution file.
pub trait StateText: Copy {
    fn text(self) -> String;
}

impl StateText for bool {
    fn text(self) -> String {
        u8::from(self).to_string()
    }
}

impl StateText for u8 {
    fn text(self) -> String {
        self.to_string()
    }
}

impl StateText for i8 {
    fn text(self) -> String {
        self.to_string()
    }
}

pub fn solution_text<S: StateText>(trace: &RunTrace<S>) -> String {
    let mut out = format!("# cost {}\n", trace.best_cost());
    for (i, s) in trace.best_config.states().iter().enumerate() {
        out.push_str(&format!("{i} {}\n", s.text()));
    }
    out
}

/// Code that runs against whichever adapter the flags select.
pub trait Visitor {
    type Output;

    fn visit<P>(self, problem: &P) -> CliResult<Self::Output>
    where
        P: Annealable + Enumerable,
        P::State: StateText;
}

pub fn with_problem<V: Visitor>(
    kind: ProblemKind,
    colors: u8,
    partner: PartnerRule,
    instance: &Instance,
    visitor: V,
) -> CliResult<V::Output> {
    match (kind, instance) {
        (ProblemKind::Gbp, Instance::Graph(g)) => visitor.visit(&Bipartition::new(g, partner)?),
        (ProblemKind::Color, Instance::Graph(g)) => visitor.visit(&Coloring::new(g, colors)?),
        (ProblemKind::Spinglass, Instance::SpinGlass(s)) => visitor.visit(&SpinGlass::new(s)),
        _ => Err(CliError::usage(format!("instance does not match problem {kind:?}"))),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Solver {
    pub algo: Algo,
    pub tau: Option<f64>,
    pub steps: StepSpec,
    pub restarts: usize,
}

impl Solver {
    pub fn from_args(args: &SolverArgs) -> CliResult<Self> {
        match (args.algo, args.tau) {
            (Algo::EoTau, None) => return Err(CliError::usage("--algo eo-tau needs --tau")),
            (Algo::Eo | Algo::Sa, Some(_)) => {
                return Err(CliError::usage("--tau only applies to --algo eo-tau"))
            }
            _ => {}
        }
        if args.restarts == 0 {
            return Err(CliError::usage("--restarts must be at least 1"));
        }
        Ok(Self {
            algo: args.algo,
            tau: args.tau,
            steps: args.steps,
            restarts: args.restarts,
        })
    }

    /// Basic EO pairs the worst vertex with a uniformly random partner.
    pub fn partner(&self) -> PartnerRule {
        match self.algo {
            Algo::Eo => PartnerRule::Uniform,
            _ => PartnerRule::Ranked,
        }
    }

    pub fn solve<P: Annealable>(&self, problem: &P, seed: u64) -> CliResult<RunTrace<P::State>> {
        let n = problem.size();
        let steps = self.steps.resolve(n);
        if steps == 0 {
            return Err(CliError::usage("--steps resolves to zero updates"));
        }
        let params = RunParams::new(steps, self.restarts);
        match self.algo {
            Algo::Eo => Ok(run(problem, &TauPolicy::greedy(n, seed), params)?),
            Algo::EoTau => Ok(run(problem, &TauPolicy::new(self.tau.expect("checked"), n, seed)?, params)?),
            Algo::Sa => {
                let schedule = SaSchedule::for_budget(n, steps);
                let mut best: Option<RunTrace<P::State>> = None;
                let mut costs = Vec::with_capacity(self.restarts);
                for r in 0..self.restarts {
                    let trace = sa_run(problem, &schedule, derive_seed(seed, "sa", r as u64, 0))?.trace;
                    costs.push(trace.best_cost());
                    if best.as_ref().is_none_or(|b| trace.best_cost() < b.best_cost()) {
                        best = Some(RunTrace { best_restart: r, ..trace });
                    }
                }
                let mut best = best.expect("at least one restart");
                best.restart_best_costs = costs;
                Ok(best)
            }
        }
    }
}
