use std::collections::BTreeMap;

use crate::{Error, Result};

/// Search box for the critical connectivity.
pub const C_CRIT_RANGE: (f64, f64) = (3.0, 6.0);
/// Search box for the window exponent.
pub const NU_RANGE: (f64, f64) = (0.5, 3.0);

const COARSE_STEP: f64 = 0.05;
const REFINE_ROUNDS: usize = 4;
/// Fraction of points that must overlap another curve for a collapse to count.
const MIN_OVERLAP: f64 = 0.5;

/// One measured `<C>` at size `n` and connectivity `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapsePoint {
    pub n: usize,
    pub c: f64,
    pub mean_cost: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub c_crit: f64,
    pub nu: f64,
    pub collapse_residual: f64,
    /// `(n, [(x, y)])` with `x = (c - c_crit) n^(1/nu)` and `y = <C>/n`, sorted by `x`.
    pub curves: Vec<(usize, Vec<(f64, f64)>)>,
}

struct Series {
    n: usize,
    /// `(c, <C>/n)` sorted by `c`.
    points: Vec<(f64, f64)>,
}

fn group(data: &[CollapsePoint]) -> Vec<Series> {
    let mut by_n: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for p in data {
        by_n.entry(p.n).or_default().push((p.c, p.mean_cost / p.n as f64));
    }
    by_n
        .into_iter()
        .map(|(n, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            Series { n, points }
        })
        .collect()
}

fn rescale(series: &Series, c_crit: f64, nu: f64) -> Vec<(f64, f64)> {
    let s = (series.n as f64).powf(1.0 / nu);
    series.points.iter().map(|&(c, y)| ((c - c_crit) * s, y)).collect()
}

fn interpolate(curve: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (curve.first()?.0, curve.last()?.0);
    if x < first || x > last {
        return None;
    }
    let i = curve.partition_point(|p| p.0 < x);
    if i == 0 {
        return Some(curve[0].1);
    }
    let (a, b) = (curve[i - 1], curve[i]);
    if b.0 == a.0 {
        return Some((a.1 + b.1) / 2.0);
    }
    Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
}

/// Mean squared vertical distance between every rescaled point and the
/// piecewise-linear curves of the other sizes it overlaps with.
fn objective(series: &[Series], c_crit: f64, nu: f64) -> f64 {
    let curves: Vec<Vec<(f64, f64)>> = series.iter().map(|s| rescale(s, c_crit, nu)).collect();
    let total: usize = curves.iter().map(Vec::len).sum();
    let (mut sum, mut terms, mut overlapping) = (0.0, 0usize, 0usize);
    for (i, curve) in curves.iter().enumerate() {
        for &(x, y) in curve {
            let mut hit = false;
            for (j, other) in curves.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(yo) = interpolate(other, x) {
                    sum += (y - yo).powi(2);
                    terms += 1;
                    hit = true;
                }
            }
            overlapping += usize::from(hit);
        }
    }
    if terms == 0 || (overlapping as f64) < MIN_OVERLAP * total as f64 {
        return f64::INFINITY;
    }
    sum / terms as f64
}

fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(move |k| lo + k as f64 * step)
}

/// Finds `(c_crit, nu)` that best collapse `<C>/n` against
/// `(c - c_crit) n^(1/nu)` onto a single curve.
pub fn scaling_collapse(data: &[CollapsePoint]) -> Result<ScalingFit> {
    let series = group(data);
    if series.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "collapse needs at least 3 sizes, got {}",
            series.len()
        )));
    }
    if let Some(short) = series.iter().find(|s| s.points.len() < 8) {
        return Err(Error::InvalidParameter(format!(
            "collapse needs at least 8 connectivities per size, n = {} has {}",
            short.n,
            short.points.len()
        )));
    }

    let mut best = (f64::INFINITY, C_CRIT_RANGE.0, NU_RANGE.0);
    for c in grid(C_CRIT_RANGE.0, C_CRIT_RANGE.1, COARSE_STEP) {
        for nu in grid(NU_RANGE.0, NU_RANGE.1, COARSE_STEP) {
            let value = objective(&series, c, nu);
            if value < best.0 {
                best = (value, c, nu);
            }
        }
    }
    let on_edge = |v: f64, (lo, hi): (f64, f64)| v <= lo + 1e-9 || v >= hi - 1e-9;
    if !best.0.is_finite() || on_edge(best.1, C_CRIT_RANGE) || on_edge(best.2, NU_RANGE) {
        return Err(Error::CollapseUnstable {
            c_crit: best.1,
            nu: best.2,
        });
    }

    let mut step = COARSE_STEP;
    for _ in 0..REFINE_ROUNDS {
        let (c0, nu0) = (best.1, best.2);
        step /= 5.0;
        for c in grid(c0 - 5.0 * step, c0 + 5.0 * step, step) {
            for nu in grid(nu0 - 5.0 * step, nu0 + 5.0 * step, step) {
                let value = objective(&series, c, nu);
                if value < best.0 {
                    best = (value, c, nu);
                }
            }
        }
    }

    let (collapse_residual, c_crit, nu) = best;
    Ok(ScalingFit {
        c_crit,
        nu,
        collapse_residual,
        curves: series.iter().map(|s| (s.n, rescale(s, c_crit, nu))).collect(),
    })
}
