use crate::engine::{RunTrace, TraceSample};
use crate::{Error, Result};

/// Minimum number of traces accepted by [`fit_convergence`].
pub const MIN_TRACES: usize = 20;
/// Minimum span of the time axis, in decades.
pub const MIN_DECADES: f64 = 3.0;

const POINTS_PER_DECADE: usize = 10;
/// `C_inf` grid step as a fraction of the averaged cost range.
const GRID_STEP: f64 = 0.005;
/// How far below the smallest averaged cost `C_inf` is scanned, in ranges.
const GRID_DEPTH: f64 = 2.0;

/// `<C>(t) ≈ C_inf + A t^-gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceFit {
    pub c_inf: f64,
    pub amplitude: f64,
    pub gamma: f64,
    /// Standard error of `gamma` from the log-log regression at the chosen `C_inf`.
    pub gamma_stderr: f64,
    /// Sum of squared residuals of the fitted curve.
    pub residual: f64,
    /// The averaged curve the fit was made to.
    pub curve: Vec<(f64, f64)>,
}

/// Log-spaced integer times from `first` to `last`, both included.
pub fn log_time_grid(first: u64, last: u64, per_decade: usize) -> Vec<u64> {
    let first = first.max(1);
    if last < first {
        return Vec::new();
    }
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    let mut grid = vec![first];
    let mut t = first as f64;
    while *grid.last().unwrap() < last {
        t *= ratio;
        let step = (t.round() as u64).min(last);
        if step > *grid.last().unwrap() {
            grid.push(step);
        }
    }
    grid
}

/// Averages the best-cost curves of `traces` on a log time grid and fits a
/// power-law decay to it. The fit starts after one sweep (`t = n`) so that
/// the initial quench from the random start does not enter it.
pub fn fit_convergence<S: Copy>(traces: &[RunTrace<S>]) -> Result<ConvergenceFit> {
    let n = traces.iter().map(|t| t.best_config.len()).max().unwrap_or(1);
    let samples: Vec<&[TraceSample]> = traces.iter().map(|t| t.samples.as_slice()).collect();
    fit_convergence_samples(&samples, n as u64)
}

/// [`fit_convergence`] on bare sample lists, e.g. read back from trace CSVs,
/// fitting from step `first` on.
pub fn fit_convergence_samples(traces: &[&[TraceSample]], first: u64) -> Result<ConvergenceFit> {
    if traces.len() < MIN_TRACES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_TRACES} traces, got {}",
            traces.len()
        )));
    }
    let last = traces.iter().map(|t| t.last().map_or(0, |s| s.step)).min().unwrap_or(0);
    if last == 0 || (last as f64).log10() < MIN_DECADES {
        return Err(Error::InvalidParameter(format!(
            "traces must span {MIN_DECADES} decades of steps, shortest ends at {last}"
        )));
    }
    let first = first.max(1);
    if first >= last {
        return Err(Error::InvalidParameter(format!("fit window starts at {first}, past the end {last}")));
    }
    let curve: Vec<(f64, f64)> = log_time_grid(first, last, POINTS_PER_DECADE)
        .into_iter()
        .map(|t| {
            let mean = traces.iter().map(|tr| best_cost_at(tr, t)).sum::<f64>() / traces.len() as f64;
            (t as f64, mean)
        })
        .collect();
    fit_power_law(&curve)
}

/// Best cost up to and including `step`, from samples that record every
/// improvement.
fn best_cost_at(samples: &[TraceSample], step: u64) -> f64 {
    match samples.partition_point(|s| s.step <= step) {
        0 => samples[0].best_cost,
        i => samples[i - 1].best_cost,
    }
}

/// Fits `y = C_inf + A t^-gamma` to `(t, y)` points, scanning `C_inf` on a
/// grid below the smallest `y`.
pub fn fit_power_law(curve: &[(f64, f64)]) -> Result<ConvergenceFit> {
    let (lo, hi) = curve
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
    let range = hi - lo;
    if curve.len() < 3 || !(range > 0.0) {
        return Err(Error::FitDegenerate);
    }
    let step = GRID_STEP * range;
    let steps = (GRID_DEPTH / GRID_STEP).round() as usize;
    // log-space residuals shrink as C_inf moves away from the data, so
    // candidates are compared by their residual on the original scale
    let mut best: Option<(f64, LineFit, f64)> = None;
    for k in 1..=steps {
        let c_inf = lo - k as f64 * step;
        let pts: Vec<(f64, f64)> = curve.iter().map(|&(t, y)| (t.ln(), (y - c_inf).ln())).collect();
        let Some(line) = least_squares(&pts) else { continue };
        let sse: f64 = curve
            .iter()
            .map(|&(t, y)| (y - c_inf - (line.intercept + line.slope * t.ln()).exp()).powi(2))
            .sum();
        if best.as_ref().is_none_or(|b| sse < b.2) {
            best = Some((c_inf, line, sse));
        }
    }
    let (c_inf, line, sse) = best.ok_or(Error::FitDegenerate)?;
    Ok(ConvergenceFit {
        c_inf,
        amplitude: line.intercept.exp(),
        gamma: -line.slope,
        gamma_stderr: line.slope_stderr,
        residual: sse,
        curve: curve.to_vec(),
    })
}

#[derive(Debug, Clone, Copy)]
struct LineFit {
    slope: f64,
    intercept: f64,
    slope_stderr: f64,
}

fn least_squares(pts: &[(f64, f64)]) -> Option<LineFit> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = (pts.len() as f64 - 2.0).max(1.0);
    Some(LineFit {
        slope,
        intercept,
        slope_stderr: (sse / dof / sxx).sqrt(),
    })
}
