use std::io::{self, Write};

use rand::{Rng, SeedableRng};

use crate::{Error, Result, SearchRng};

/// Tolerance on `Σρ = 1`.
const MASS_TOLERANCE: f64 = 1e-9;

pub const SWEEP_CSV_HEADER: &str = "tau,n,mean_cost";
pub const TRAJECTORY_CSV_HEADER: &str = "step,rho0,rho1,rho2,cost";

/// Occupations of the three fitness states `λ = 0, -1, -2` (indices 0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JamState {
    rho: [f64; 3],
    n: usize,
    tau: f64,
}

impl JamState {
    pub fn new(rho: [f64; 3], n: usize, tau: f64) -> Result<Self> {
        if n < 1 || !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("need n >= 1 and tau >= 0, got n = {n}, tau = {tau}")));
        }
        if rho.iter().any(|&r| !(r >= 0.0)) || (rho.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("occupations must be >= 0 and sum to 1, got {rho:?}")));
        }
        Ok(Self { rho, n, tau })
    }

    pub fn rho(&self) -> [f64; 3] {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `C = Σ_α α ρ_α`, the cost per variable.
    pub fn cost(&self) -> f64 {
        cost_of(&self.rho)
    }
}

fn cost_of(rho: &[f64; 3]) -> f64 {
    rho[1] + 2.0 * rho[2]
}

/// Cumulative rank weights `W(k) = Σ_{j<=k} j^-tau` for one `(n, tau)`.
#[derive(Debug, Clone)]
pub struct SelectionTable {
    cum: Vec<f64>,
}

impl SelectionTable {
    pub fn new(n: usize, tau: f64) -> Self {
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).powf(-tau);
            cum.push(acc);
        }
        Self { cum }
    }

    pub fn n(&self) -> usize {
        self.cum.len() - 1
    }

    /// Weight of ranks `1..=x`, counting a fractional last rank proportionally.
    fn weight_up_to(&self, x: f64) -> f64 {
        let n = self.n();
        let x = x.clamp(0.0, n as f64);
        let whole = x.floor() as usize;
        if whole >= n {
            return self.cum[n];
        }
        self.cum[whole] + (x - whole as f64) * (self.cum[whole + 1] - self.cum[whole])
    }

    /// Selection probability of each fitness state. Ranks are filled worst
    /// first: state 2 holds ranks `(0, nρ2]`, state 1 the next `nρ1`.
    pub fn probabilities(&self, rho: &[f64; 3]) -> [f64; 3] {
        let n = self.n() as f64;
        let z = self.cum[self.n()];
        let w2 = self.weight_up_to(n * rho[2]);
        let w1 = self.weight_up_to(n * (rho[2] + rho[1]));
        [(z - w1) / z, (w1 - w2) / z, w2 / z]
    }
}

/// Probabilities `[Q0, Q1, Q2]` of selecting a variable in each fitness state.
pub fn jam_selection_probabilities(state: &JamState) -> [f64; 3] {
    SelectionTable::new(state.n, state.tau).probabilities(&state.rho)
}

/// Where a selected variable goes, per fitness state of the selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowModel {
    /// Row `α` is the destination distribution for a selected state `α`.
    Fixed([[f64; 3]; 3]),
    /// A selected `0` drops to `-1` and a selected `-1` recovers to `0`.
    /// A selected `-2` escapes straight to `0` with probability
    /// `min(1, catalysis · ρ1)` and stays put otherwise, so deep variables
    /// are freed only while enough of their neighbours sit at `-1`.
    CatalyzedEscape { catalysis: f64 },
}

impl Default for FlowModel {
    fn default() -> Self {
        FlowModel::CatalyzedEscape { catalysis: 4.0 }
    }
}

impl FlowModel {
    /// Fixed three-way barrier: `-2 → -1` (0.9) or `0` (0.1), `-1 → -2`
    /// (0.97) or `0` (0.03), `0 → -1`.
    pub fn fixed_barrier() -> Self {
        FlowModel::Fixed([[0.0, 1.0, 0.0], [0.03, 0.0, 0.97], [0.1, 0.9, 0.0]])
    }

    pub fn absorbing() -> Self {
        FlowModel::Fixed([[1.0, 0.0, 0.0]; 3])
    }

    pub fn identity() -> Self {
        FlowModel::Fixed([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn row(&self, from: usize, rho: &[f64; 3]) -> [f64; 3] {
        match *self {
            FlowModel::Fixed(rows) => rows[from],
            FlowModel::CatalyzedEscape { catalysis } => match from {
                0 => [0.0, 1.0, 0.0],
                1 => [1.0, 0.0, 0.0],
                _ => {
                    let escape = (catalysis * rho[1]).clamp(0.0, 1.0);
                    [escape, 0.0, 1.0 - escape]
                }
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FlowModel::Fixed(rows) => {
                for (a, row) in rows.iter().enumerate() {
                    let sum: f64 = row.iter().sum();
                    if row.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidParameter(format!(
                            "kernel row {a} must be a probability distribution, got {row:?}"
                        )));
                    }
                }
                Ok(())
            }
            FlowModel::CatalyzedEscape { catalysis } if catalysis >= 0.0 => Ok(()),
            FlowModel::CatalyzedEscape { catalysis } => Err(Error::InvalidParameter(format!(
                "catalysis must be >= 0, got {catalysis}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamMode {
    /// Deterministic expected flow of mass `Q_α / n` per update.
    MeanField,
    /// One variable of a finite system moves per update.
    Stochastic { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JamSample {
    pub step: u64,
    pub rho: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamTrajectory {
    /// Thinned `ρ(t)`, always including the first and last update.
    pub samples: Vec<JamSample>,
    /// Cost averaged over all updates.
    pub mean_cost: f64,
    pub final_state: JamState,
}

impl JamTrajectory {
    pub fn final_cost(&self) -> f64 {
        self.final_state.cost()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(out, "{},{},{},{},{}", s.step, s.rho[0], s.rho[1], s.rho[2], cost_of(&s.rho))?;
        }
        Ok(())
    }
}

/// Number of trajectory samples kept by [`jam_evolve`].
const TRAJECTORY_POINTS: u64 = 1_000;

/// Applies `updates` selections to `state`, each moving mass `1/n` by the
/// kernel row of the selected fitness state.
pub fn jam_evolve(state: &JamState, model: &FlowModel, updates: u64, mode: JamMode) -> Result<JamTrajectory> {
    model.validate()?;
    let n = state.n;
    let table = SelectionTable::new(n, state.tau);
    let stride = (updates / TRAJECTORY_POINTS).max(1);
    let mut rho = state.rho;
    let mut samples = vec![JamSample { step: 0, rho }];
    let mut cost_sum = 0.0;

    let mut rng = match mode {
        JamMode::Stochastic { seed } => Some(SearchRng::seed_from_u64(seed)),
        JamMode::MeanField => None,
    };
    let mut counts = [0usize; 3];
    if rng.is_some() {
        counts[1] = (rho[1] * n as f64).round() as usize;
        counts[2] = (rho[2] * n as f64).round() as usize;
        counts[0] = n.saturating_sub(counts[1] + counts[2]);
        rho = counts.map(|c| c as f64 / n as f64);
    }

    for t in 1..=updates {
        let q = table.probabilities(&rho);
        match rng.as_mut() {
            None => {
                let mut next = rho;
                for a in 0..3 {
                    let out = (q[a] / n as f64).min(rho[a]);
                    let row = model.row(a, &rho);
                    next[a] -= out;
                    for b in 0..3 {
                        next[b] += out * row[b];
                    }
                }
                rho = next;
            }
            Some(rng) => {
                let from = pick(&q, rng.random());
                let to = pick(&model.row(from, &rho), rng.random());
                counts[from] -= 1;
                counts[to] += 1;
                rho = counts.map(|c| c as f64 / n as f64);
            }
        }
        let mass: f64 = rho.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::MassNotConserved { sum: mass });
        }
        cost_sum += cost_of(&rho);
        if t % stride == 0 || t == updates {
            samples.push(JamSample { step: t, rho });
        }
    }
    Ok(JamTrajectory {
        samples,
        mean_cost: if updates == 0 { cost_of(&rho) } else { cost_sum / updates as f64 },
        final_state: JamState { rho, ..*state },
    })
}

/// Index drawn from a discrete distribution by a uniform `u`, skipping
/// empty entries.
fn pick(probabilities: &[f64; 3], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Leading-order optimal exponent `1 + A / ln n`.
pub fn predict_tau_opt(n: usize, a: f64) -> f64 {
    1.0 + a / (n as f64).ln()
}

/// Least-squares `A` for `tau_opt(n) = 1 + A / ln n` and the root mean
/// square relative deviation of the fitted values.
pub fn fit_tau_opt(points: &[(usize, f64)]) -> Result<(f64, f64)> {
    if points.is_empty() || points.iter().any(|&(n, _)| n < 2) {
        return Err(Error::InvalidParameter("need points with n >= 2".into()));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(n, tau) in points {
        let x = 1.0 / (n as f64).ln();
        sxy += x * (tau - 1.0);
        sxx += x * x;
    }
    let a = sxy / sxx;
    let rms = (points
        .iter()
        .map(|&(n, tau)| ((predict_tau_opt(n, a) - tau) / tau).powi(2))
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    Ok((a, rms))
}

/// Settings of a mean-field τ-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct JamSweep {
    pub initial_rho: [f64; 3],
    /// Updates per variable.
    pub sweeps: u64,
    pub model: FlowModel,
}

impl Default for JamSweep {
    fn default() -> Self {
        Self {
            initial_rho: [0.5, 0.0, 0.5],
            sweeps: 10,
            model: FlowModel::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub n: usize,
    /// Cost after `sweeps · n` updates.
    pub cost: f64,
}

impl JamSweep {
    pub fn run(&self, n: usize, taus: &[f64]) -> Result<Vec<SweepPoint>> {
        taus.iter()
            .map(|&tau| {
                let state = JamState::new(self.initial_rho, n, tau)?;
                let traj = jam_evolve(&state, &self.model, self.sweeps * n as u64, JamMode::MeanField)?;
                Ok(SweepPoint { tau, n, cost: traj.final_cost() })
            })
            .collect()
    }
}

/// `tau` of the lowest cost; ties go to the smaller `tau`.
pub fn argmin_tau(points: &[SweepPoint]) -> Option<f64> {
    points
        .iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.tau.total_cmp(&b.tau)))
        .map(|p| p.tau)
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for p in points {
        writeln!(out, "{},{},{}", p.tau, p.n, p.cost)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_deep_selects_deep() {
        let q = jam_selection_probabilities(&JamState::new([0.0, 0.0, 1.0], 50, 1.4).unwrap());
        assert_eq!(q, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn uniform_ranks_follow_occupation() {
        let rho = [0.25, 0.35, 0.4];
        let q = jam_selection_probabilities(&JamState::new(rho, 37, 0.0).unwrap());
        for a in 0..3 {
            assert!((q[a] - rho[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_summation() {
        // n = 100, rho = (0.5, 0.3, 0.2): state 2 holds ranks 1..=20,
        // state 1 ranks 21..=50, state 0 ranks 51..=100
        let w = |k: usize| (k as f64).powf(-1.4);
        let z: f64 = (1..=100).map(w).sum();
        let expect = [
            (51..=100).map(w).sum::<f64>() / z,
            (21..=50).map(w).sum::<f64>() / z,
            (1..=20).map(w).sum::<f64>() / z,
        ];
        let q = jam_selection_probabilities(&JamState::new([0.5, 0.3, 0.2], 100, 1.4).unwrap());
        for a in 0..3 {
            assert!((q[a] - expect[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn fractional_boundary_rank_is_split() {
        // n = 4, rho2 = 0.3 covers 1.2 ranks
        let w = |k: i32| (k as f64).powf(-2.0);
        let z = w(1) + w(2) + w(3) + w(4);
        let q = SelectionTable::new(4, 2.0).probabilities(&[0.7, 0.0, 0.3]);
        assert!((q[2] - (w(1) + 0.2 * w(2)) / z).abs() < 1e-12);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn absorbing_and_identity_kernels() {
        let start = JamState::new([0.2, 0.3, 0.5], 100, 1.2).unwrap();
        let absorbed = jam_evolve(&start, &FlowModel::absorbing(), 5_000, JamMode::MeanField).unwrap();
        assert!(absorbed.final_cost() < 1e-6);
        let still = jam_evolve(&start, &FlowModel::identity(), 500, JamMode::MeanField).unwrap();
        assert_eq!(still.final_state.rho(), start.rho());
        assert!((still.mean_cost - start.cost()).abs() < 1e-12);
    }

    #[test]
    fn kernel_rows_are_distributions() {
        for model in [FlowModel::default(), FlowModel::fixed_barrier()] {
            model.validate().unwrap();
            for rho1 in [0.0, 0.1, 0.3, 1.0] {
                for a in 0..3 {
                    let row = model.row(a, &[1.0 - rho1, rho1, 0.0]);
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(FlowModel::Fixed([[0.5, 0.0, 0.0]; 3]).validate().is_err());
    }

    #[test]
    fn stochastic_mode_moves_whole_variables() {
        let start = JamState::new([0.5, 0.0, 0.5], 20, 1.5).unwrap();
        let traj = jam_evolve(&start, &FlowModel::default(), 400, JamMode::Stochastic { seed: 3 }).unwrap();
        for s in &traj.samples {
            for r in s.rho {
                assert!((r * 20.0 - (r * 20.0).round()).abs() < 1e-9);
            }
        }
        let again = jam_evolve(&start, &FlowModel::default(), 400, JamMode::Stochastic { seed: 3 }).unwrap();
        assert_eq!(traj, again);
    }

    #[test]
    fn tau_opt_prediction() {
        assert!((predict_tau_opt(10, 4.0) - 2.737).abs() < 1e-3);
        assert!((predict_tau_opt(10_000, 4.0) - 1.434).abs() < 1e-3);
        assert!(predict_tau_opt(usize::MAX, 4.0) < 1.1);
        let pts: Vec<(usize, f64)> = [10, 100, 1000].iter().map(|&n| (n, predict_tau_opt(n, 3.0))).collect();
        let (a, rms) = fit_tau_opt(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && rms < 1e-12);
    }

    #[test]
    fn sweep_csv() {
        let pts = [SweepPoint { tau: 1.5, n: 10, cost: 0.25 }];
        let mut buf = Vec::new();
        write_sweep_csv(&pts, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tau,n,mean_cost\n1.5,10,0.25\n");
        assert_eq!(argmin_tau(&pts), Some(1.5));
    }
}
