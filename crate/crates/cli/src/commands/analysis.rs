use std::fmt::Write as _;
use std::path::Path;

use eo_core::analysis::{
    backbone_fraction, brute_force, enumerate_ground_states, fit_convergence_samples, scaling_collapse, write_fit_rows,
    CollapsePoint, Enumerable, FitRow,
};
use eo_core::engine::{TauPolicy, TraceSample};
use eo_core::instances::read_instance;
use eo_core::sa::Annealable;
use serde_json::json;

use crate::args::{CollapseArgs, ConvergenceArgs, GroundStateArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{ensure_dir, Manifest};
use crate::solve::{derive_seed, with_problem, StateText, Visitor};

fn csv_reader(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))
}

fn field(record: &csv::StringRecord, idx: usize, path: &Path) -> CliResult<f64> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse()
        .map_err(|_| CliError::io(path, format!("line {}: bad number `{raw}`", record.position().map_or(0, |p| p.line()))))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::io(path, format!("missing column `{name}`")))
}

fn read_trace(path: &Path) -> CliResult<Vec<TraceSample>> {
    let mut reader = csv_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let (step, cost, best) = (
        column(&headers, "step", path)?,
        column(&headers, "cost", path)?,
        column(&headers, "best_cost", path)?,
    );
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        samples.push(TraceSample {
            step: field(&record, step, path)? as u64,
            cost: field(&record, cost, path)?,
            best_cost: field(&record, best, path)?,
        });
    }
    if samples.is_empty() {
        return Err(CliError::io(path, "trace has no samples"));
    }
    Ok(samples)
}

fn fit_table(rows: &[FitRow]) -> String {
    let mut buf = Vec::new();
    write_fit_rows(rows, &mut buf).expect("writing to a Vec");
    String::from_utf8(buf).expect("csv is ascii")
}

pub fn convergence_cmd(args: &ConvergenceArgs, argv: &[String]) -> CliResult<()> {
    let traces = args.traces.iter().map(|p| read_trace(p)).collect::<CliResult<Vec<_>>>()?;
    let slices: Vec<&[TraceSample]> = traces.iter().map(Vec::as_slice).collect();
    let fit = fit_convergence_samples(&slices, args.from)?;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(argv, args.common.seed, json!({ "traces": args.traces, "from": args.from }));
    manifest.write_csv(&args.common.out, "convergence_fit.csv", &fit_table(&fit.rows()))?;
    let mut curve = String::from("t,mean_best_cost\n");
    for (t, c) in &fit.curve {
        writeln!(curve, "{t},{c}").expect("writing to a String");
    }
    manifest.write_csv(&args.common.out, "convergence_curve.csv", &curve)?;
    manifest.append(&args.common.out)?;
    println!("gamma {} +- {}", fit.gamma, fit.gamma_stderr);
    Ok(())
}

fn read_collapse(path: &Path) -> CliResult<Vec<CollapsePoint>> {
    let mut reader = csv_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let (n, c) = (column(&headers, "n", path)?, column(&headers, "c", path)?);
    let cost = column(&headers, "mean_cost", path)?;
    let stderr = headers.iter().position(|h| h == "stderr");
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        points.push(CollapsePoint {
            n: field(&record, n, path)? as usize,
            c: field(&record, c, path)?,
            mean_cost: field(&record, cost, path)?,
            stderr: match stderr {
                Some(i) => field(&record, i, path)?,
                None => 0.0,
            },
        });
    }
    Ok(points)
}

pub fn collapse_cmd(args: &CollapseArgs, argv: &[String]) -> CliResult<()> {
    let points = read_collapse(&args.data)?;
    let fit = scaling_collapse(&points)?;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(argv, args.common.seed, json!({ "data": args.data }));
    manifest.write_csv(&args.common.out, "collapse_fit.csv", &fit_table(&fit.rows()))?;
    let mut curves = String::from("n,x,y\n");
    for (n, curve) in &fit.curves {
        for (x, y) in curve {
            writeln!(curves, "{n},{x},{y}").expect("writing to a String");
        }
    }
    manifest.write_csv(&args.common.out, "collapse_curves.csv", &curves)?;
    manifest.append(&args.common.out)?;
    println!("c_crit {} nu {}", fit.c_crit, fit.nu);
    Ok(())
}

struct GroundStates {
    tau: f64,
    steps: crate::values::StepSpec,
    runs: usize,
    exact: bool,
    seed: u64,
}

struct GroundStateReport {
    summary: String,
    states: String,
}

impl Visitor for GroundStates {
    type Output = GroundStateReport;

    fn visit<P>(self, problem: &P) -> CliResult<GroundStateReport>
    where
        P: Annealable + Enumerable,
        P::State: StateText,
    {
        let n = problem.size();
        let policy = TauPolicy::new(self.tau, n, self.seed)?;
        let set = enumerate_ground_states(problem, &policy, self.steps.resolve(n), self.runs)?;
        let mut summary = String::from("quantity,value\n");
        writeln!(summary, "cost,{}", set.cost).expect("writing to a String");
        writeln!(summary, "states,{}", set.len()).expect("writing to a String");
        writeln!(summary, "saturated,{}", set.saturated).expect("writing to a String");
        writeln!(summary, "backbone,{}", backbone_fraction(&set)?).expect("writing to a String");
        if self.exact {
            let (cost, exact) = brute_force(problem)?;
            writeln!(summary, "exact_cost,{cost}").expect("writing to a String");
            writeln!(summary, "exact_states,{}", exact.len()).expect("writing to a String");
        }
        let mut states = String::new();
        for s in &set.states {
            let line: Vec<String> = s.iter().map(|v| v.text()).collect();
            writeln!(states, "{}", line.join(" ")).expect("writing to a String");
        }
        Ok(GroundStateReport { summary, states })
    }
}

pub fn ground_states_cmd(args: &GroundStateArgs, argv: &[String]) -> CliResult<()> {
    let instance = read_instance(&args.instance)?;
    let seed = args.common.seed;
    let visitor = GroundStates {
        tau: args.tau,
        steps: args.steps,
        runs: args.runs,
        exact: args.exact,
        seed: derive_seed(seed, "search", 0, 0),
    };
    let report = with_problem(
        args.problem,
        args.colors,
        eo_core::problems::PartnerRule::Ranked,
        &instance,
        visitor,
    )?;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({ "tau": args.tau, "steps": args.steps.to_string(), "runs": args.runs, "exact": args.exact }),
    );
    manifest.add_instance(args.instance.display().to_string(), &instance);
    manifest.write_csv(&args.common.out, "ground_states.csv", &report.summary)?;
    manifest.write_file(&args.common.out, "ground_states.txt", &report.states)?;
    manifest.append(&args.common.out)?;
    print!("{}", report.summary);
    Ok(())
}
