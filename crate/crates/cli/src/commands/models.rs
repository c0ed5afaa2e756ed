use std::fmt::Write as _;

use eo_core::models::{
    argmin_tau, bs_run, fit_tau_opt, jam_evolve, ks_two_sample, threshold_from_histogram, write_sweep_csv, FlowModel,
    JamMode, JamState, JamSweep,
};
use serde_json::json;

use crate::args::{BsArgs, JamArgs, KernelKind};
use crate::error::{CliError, CliResult};
use crate::manifest::{ensure_dir, Manifest};

pub fn bs_cmd(args: &BsArgs, argv: &[String]) -> CliResult<()> {
    let steps = args.steps.resolve(args.n);
    let burn_in = args.burn_in.map_or(steps / 10, |b| b.resolve(args.n));
    let seed = args.common.seed;
    let run = bs_run(args.n, steps, burn_in, args.bins, seed)?;
    let threshold = threshold_from_histogram(&run.histogram);
    // neighbouring minima are correlated, so compare one per sweep
    let thinned: Vec<f64> = run.minima.iter().step_by(args.n).copied().collect();
    let (first, second) = thinned.split_at(thinned.len() / 2);
    let (ks_d, ks_p) = if first.is_empty() { (f64::NAN, f64::NAN) } else { ks_two_sample(first, second) };

    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({ "n": args.n, "steps": steps, "burn_in": burn_in, "bins": args.bins }),
    );
    let bins = run.histogram.len() as f64;
    let mut hist = String::from("bin_lower,bin_upper,count\n");
    for (i, count) in run.histogram.iter().enumerate() {
        writeln!(hist, "{},{},{count}", i as f64 / bins, (i + 1) as f64 / bins).expect("writing to a String");
    }
    manifest.write_csv(&args.common.out, "bs_histogram.csv", &hist)?;
    let summary = format!("quantity,value\nthreshold,{threshold}\nks_d,{ks_d}\nks_p,{ks_p}\n");
    manifest.write_csv(&args.common.out, "bs_summary.csv", &summary)?;
    manifest.append(&args.common.out)?;
    println!("threshold {threshold}");
    println!("ks_p {ks_p}");
    Ok(())
}

pub fn jam_cmd(args: &JamArgs, argv: &[String]) -> CliResult<()> {
    let model = match args.kernel {
        KernelKind::Catalyzed => FlowModel::CatalyzedEscape {
            catalysis: args.catalysis,
        },
        KernelKind::Barrier => FlowModel::fixed_barrier(),
    };
    model.validate()?;
    if args.tau_grid.0.is_empty() {
        return Err(CliError::usage("--tau-grid is empty"));
    }
    let sweep = JamSweep {
        sweeps: args.sweeps,
        model,
        ..JamSweep::default()
    };
    let seed = args.common.seed;
    ensure_dir(&args.common.out)?;
    let mut manifest = Manifest::new(
        argv,
        seed,
        json!({
            "kernel": format!("{model:?}"),
            "sweeps": args.sweeps,
            "sizes": args.n,
            "taus": args.tau_grid.0,
            "stochastic": args.stochastic,
        }),
    );

    let mut points = Vec::new();
    let mut optima = Vec::new();
    for &n in &args.n {
        let row = if args.stochastic {
            args.tau_grid
                .0
                .iter()
                .map(|&tau| {
                    let state = JamState::new(sweep.initial_rho, n, tau)?;
                    let traj = jam_evolve(&state, &model, sweep.sweeps * n as u64, JamMode::Stochastic { seed })?;
                    Ok(eo_core::models::SweepPoint {
                        tau,
                        n,
                        cost: traj.final_cost(),
                    })
                })
                .collect::<eo_core::Result<Vec<_>>>()?
        } else {
            sweep.run(n, &args.tau_grid.0)?
        };
        if let Some(tau) = argmin_tau(&row) {
            println!("n {n} tau_opt {tau}");
            optima.push((n, tau));
        }
        points.extend(row);
    }
    let mut body = Vec::new();
    write_sweep_csv(&points, &mut body).expect("writing to a Vec");
    manifest.write_csv(&args.common.out, "jam_sweep.csv", &String::from_utf8(body).expect("csv is ascii"))?;

    if optima.len() >= 2 {
        if let Ok((a, rms)) = fit_tau_opt(&optima) {
            println!("fit A {a} rms_relative_residual {rms}");
        }
    }

    if let Some(tau) = args.trajectory_tau {
        let n = args.n[0];
        let mode = if args.stochastic {
            JamMode::Stochastic { seed }
        } else {
            JamMode::MeanField
        };
        let traj = jam_evolve(&JamState::new(sweep.initial_rho, n, tau)?, &model, sweep.sweeps * n as u64, mode)?;
        let mut body = Vec::new();
        traj.write_csv(&mut body).expect("writing to a Vec");
        manifest.write_csv(&args.common.out, "jam_trajectory.csv", &String::from_utf8(body).expect("csv is ascii"))?;
    }
    manifest.append(&args.common.out)?;
    Ok(())
}
