use std::fmt::Write as _;
use eo_core::engine::{run as eo_run, RunParams, TauPolicy};
use eo_core::instances::{format_instance, read_instance, Instance};
use eo_core::analysis::Enumerable;
use eo_core::sa::{calibrate_problem, equalize_budgets, sa_run, Annealable, Calibration, SaSchedule};
use serde_json::json;

use crate::args::{Algo, CompareArgs, GenKind, GenerateArgs, ProblemKind, RunArgs, SweepArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{ensure_dir, Manifest};
use crate::solve::{check_generator, derive_seed, generate, solution_text, with_problem, Solver, StateText, Visitor};

pub fn generate_cmd(args: &GenerateArgs, argv: &[String]) -> CliResult<()> {
    let seed = args.common.seed;
    let (label, instance) = generate(args.generator, args.n, args.l, args.c, seed)?;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(argv, seed, json!({ "generator": label }));
    manifest.add_instance(label, &instance);
    let path = manifest.write_file(&args.common.out, &args.name, &format_instance(&instance))?;
    manifest.append(&args.common.out)?;
    println!("{}", path.display());
    Ok(())
}

struct RunOnce {
    solver: Solver,
    seed: u64,
}

impl Visitor for RunOnce {
    type Output = (String, String, f64);

    fn visit<P>(self, problem: &P) -> CliResult<Self::Output>
    where
        P: Annealable + Enumerable,
        P::State: StateText,
    {
        let trace = self.solver.solve(problem, self.seed)?;
        Ok((trace.to_csv(), solution_text(&trace), trace.best_cost()))
    }
}

pub fn run_cmd(args: &RunArgs, argv: &[String]) -> CliResult<()> {
    let solver = Solver::from_args(&args.solver)?;
    let seed = args.common.seed;
    let (label, instance) = match (&args.instance, args.generator) {
        (Some(path), _) => (path.display().to_string(), read_instance(path)?),
        (None, Some(gen)) => {
            check_generator(args.solver.problem, gen)?;
            generate(gen, args.n, args.l, args.c, derive_seed(seed, "instance", 0, 0))?
        }
        (None, None) => return Err(CliError::usage("give either --instance or --gen")),
    };
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({
            "problem": format!("{:?}", args.solver.problem),
            "algo": format!("{:?}", solver.algo),
            "tau": solver.tau,
            "colors": args.solver.colors,
            "steps": solver.steps.resolve(instance.n()),
            "restarts": solver.restarts,
        }),
    );
    manifest.add_instance(label, &instance);
    let visitor = RunOnce {
        solver,
        seed: derive_seed(seed, "search", 0, 0),
    };
    let (csv, solution, best) = with_problem(args.solver.problem, args.solver.colors, solver.partner(), &instance, visitor)?;
    manifest.write_csv(&args.common.out, "trace.csv", &csv)?;
    manifest.write_file(&args.common.out, "best.txt", &solution)?;
    manifest.append(&args.common.out)?;
    println!("best_cost {best}");
    Ok(())
}

/// Sizes of an ensemble: `--n` for graphs, `--L` for lattices.
fn ensemble_sizes(gen: GenKind, n: &[usize], l: &[usize]) -> CliResult<Vec<usize>> {
    let sizes = if gen == GenKind::Pmj { l } else { n };
    if sizes.is_empty() {
        let flag = if gen == GenKind::Pmj { "--L" } else { "--n" };
        return Err(CliError::usage(format!("{flag} is required")));
    }
    Ok(sizes.to_vec())
}

fn ensemble_instance(gen: GenKind, size: usize, c: Option<f64>, seed: u64) -> CliResult<(String, Instance)> {
    match gen {
        GenKind::Pmj => generate(gen, None, Some(size), None, seed),
        _ => generate(gen, Some(size), None, c, seed),
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

struct BestCost {
    solver: Solver,
    seed: u64,
}

impl Visitor for BestCost {
    type Output = f64;

    fn visit<P>(self, problem: &P) -> CliResult<f64>
    where
        P: Annealable + Enumerable,
        P::State: StateText,
    {
        Ok(self.solver.solve(problem, self.seed)?.best_cost())
    }
}

pub fn sweep_cmd(args: &SweepArgs, argv: &[String]) -> CliResult<()> {
    if args.solver.algo != Algo::EoTau || args.solver.tau.is_some() {
        return Err(CliError::usage("sweep-tau runs eo-tau over --tau-grid; drop --algo and --tau"));
    }
    let ens = &args.ensemble;
    check_generator(args.solver.problem, ens.generator)?;
    let sizes = ensemble_sizes(ens.generator, &ens.n, &ens.l)?;
    if ens.instances == 0 || ens.runs == 0 || args.solver.restarts == 0 {
        return Err(CliError::usage("--instances, --runs and --restarts must be at least 1"));
    }
    let seed = args.common.seed;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({
            "problem": format!("{:?}", args.solver.problem),
            "taus": args.tau_grid.0,
            "steps": args.solver.steps.to_string(),
            "restarts": args.solver.restarts,
            "instances": ens.instances,
            "runs": ens.runs,
        }),
    );
    let mut csv = String::from("tau,n,mean_best_cost,stderr\n");
    for &size in &sizes {
        let instances: Vec<(String, Instance)> = (0..ens.instances)
            .map(|i| ensemble_instance(ens.generator, size, args.c, derive_seed(seed, "instance", size as u64, i as u64)))
            .collect::<CliResult<_>>()?;
        for (label, inst) in &instances {
            manifest.add_instance(label.clone(), inst);
        }
        let n = instances[0].1.n();
        for &tau in &args.tau_grid.0 {
            let solver = Solver {
                algo: Algo::EoTau,
                tau: Some(tau),
                steps: args.solver.steps,
                restarts: args.solver.restarts,
            };
            let mut costs = Vec::with_capacity(ens.instances * ens.runs);
            for (i, (_, inst)) in instances.iter().enumerate() {
                for r in 0..ens.runs {
                    let visitor = BestCost {
                        solver,
                        seed: derive_seed(seed, "run", (size * 1_000_003 + i) as u64, r as u64),
                    };
                    costs.push(with_problem(args.solver.problem, args.solver.colors, solver.partner(), inst, visitor)?);
                }
            }
            let (mean, err) = mean_and_stderr(&costs);
            writeln!(csv, "{tau},{n},{mean},{err}").expect("writing to a String");
        }
    }
    let path = manifest.write_csv(&args.common.out, "sweep_tau.csv", &csv)?;
    manifest.append(&args.common.out)?;
    println!("{}", path.display());
    Ok(())
}

const CALIBRATION_OPS: u64 = 200_000;

/// Runs of EO and its opponent on one instance at matched budgets.
struct Duel {
    tau: f64,
    eo_steps: u64,
    sa_trials: Option<u64>,
    self_check: bool,
    runs: usize,
    seed: u64,
}

struct DuelResult {
    eo: Vec<f64>,
    other: Vec<f64>,
    sa_trials: u64,
    calibration: Option<Calibration>,
}

impl Visitor for Duel {
    type Output = DuelResult;

    fn visit<P>(self, problem: &P) -> CliResult<DuelResult>
    where
        P: Annealable + Enumerable,
        P::State: StateText,
    {
        let n = problem.size();
        let policy = TauPolicy::new(self.tau, n, self.seed)?;
        let (sa_trials, calibration) = match self.sa_trials {
            Some(t) => (t, None),
            None if self.self_check => (self.eo_steps, None),
            None => {
                let cal = calibrate_problem(problem, &policy, CALIBRATION_OPS)?;
                (equalize_budgets(self.eo_steps, &cal).sa_trials, Some(cal))
            }
        };
        let mut eo = Vec::with_capacity(self.runs);
        let mut other = Vec::with_capacity(self.runs);
        for r in 0..self.runs {
            let run_seed = derive_seed(self.seed, "duel", r as u64, 0);
            eo.push(eo_run(problem, &policy.with_seed(run_seed), RunParams::new(self.eo_steps, 1))?.best_cost());
            let opponent_seed = derive_seed(self.seed, "duel", r as u64, 1);
            other.push(if self.self_check {
                eo_run(problem, &policy.with_seed(opponent_seed), RunParams::new(self.eo_steps, 1))?.best_cost()
            } else {
                sa_run(problem, &SaSchedule::for_budget(n, sa_trials), opponent_seed)?.best_cost()
            });
        }
        Ok(DuelResult {
            eo,
            other,
            sa_trials,
            calibration,
        })
    }
}

pub fn compare_cmd(args: &CompareArgs, argv: &[String]) -> CliResult<()> {
    let ens = &args.ensemble;
    if args.problem == ProblemKind::Spinglass {
        return Err(CliError::usage("compare runs on graph problems (gbp or color)"));
    }
    check_generator(args.problem, ens.generator)?;
    let sizes = ensemble_sizes(ens.generator, &ens.n, &ens.l)?;
    if ens.instances == 0 || ens.runs == 0 {
        return Err(CliError::usage("--instances and --runs must be at least 1"));
    }
    let seed = args.common.seed;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({
            "problem": format!("{:?}", args.problem),
            "tau": args.tau,
            "steps": args.steps.to_string(),
            "sa_trials": args.sa_trials.map(|s| s.to_string()),
            "self_check": args.self_check,
            "connectivities": args.c.0,
        }),
    );
    let mut csv = String::from("c,n,eo_steps,sa_trials,eo_mean,sa_mean,relative_error\n");
    for (ci, &c) in args.c.0.iter().enumerate() {
        for &size in &sizes {
            let (mut eo, mut other) = (Vec::new(), Vec::new());
            let mut matched: Option<u64> = None;
            for i in 0..ens.instances {
                let inst_seed = derive_seed(seed, "instance", (size * 1_000 + ci) as u64, i as u64);
                let (label, inst) = ensemble_instance(ens.generator, size, Some(c), inst_seed)?;
                let n = inst.n();
                let duel = Duel {
                    tau: args.tau,
                    eo_steps: args.steps.resolve(n),
                    sa_trials: args.sa_trials.map(|s| s.resolve(n)).or(matched),
                    self_check: args.self_check,
                    runs: ens.runs,
                    seed: derive_seed(seed, "search", (size * 1_000 + ci) as u64, i as u64),
                };
                let result = with_problem(args.problem, args.colors, eo_core::problems::PartnerRule::Ranked, &inst, duel)?;
                if let Some(cal) = &result.calibration {
                    manifest.set_calibration(label.clone(), cal);
                }
                manifest.add_instance(label, &inst);
                eo.extend(result.eo);
                other.extend(result.other);
                matched = Some(result.sa_trials);
            }
            let eo_mean = mean_and_stderr(&eo).0;
            let sa_mean = mean_and_stderr(&other).0;
            let rel = (sa_mean - eo_mean) / eo_mean.max(1.0);
            let n = size;
            let sa_trials = matched.expect("at least one instance");
            writeln!(csv, "{c},{n},{},{sa_trials},{eo_mean},{sa_mean},{rel}", args.steps.resolve(n))
                .expect("writing to a String");
        }
    }
    let path = manifest.write_csv(&args.common.out, "compare.csv", &csv)?;
    manifest.append(&args.common.out)?;
    println!("{}", path.display());
    Ok(())
}
