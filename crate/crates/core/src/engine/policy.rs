use rand::Rng;

use crate::{Error, Result};

/// Power-law rank selection, `P(k) ∝ k^-tau` over ranks `1..=n`.
///
/// Rank 1 is the worst variable. `tau = 0` degenerates to a uniform random
/// walk over ranks; the greedy policy (`tau = ∞`) always returns rank 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPolicy {
    tau: f64,
    cum_weights: Vec<f64>,
    seed: u64,
}

impl TauPolicy {
    pub fn new(tau: f64, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("rank policy needs n >= 1".into()));
        }
        if tau.is_nan() || tau < 0.0 {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
        }
        if tau.is_infinite() {
            return Ok(Self::greedy(n, seed));
        }
        let mut cum_weights = Vec::with_capacity(n);
        let mut total = 0.0;
        for k in 1..=n {
            total += (k as f64).powf(-tau);
            cum_weights.push(total);
        }
        for c in &mut cum_weights {
            *c /= total;
        }
        cum_weights[n - 1] = 1.0;
        Ok(Self {
            tau,
            cum_weights,
            seed,
        })
    }

    /// The `tau -> ∞` limit: every draw lands on rank 1.
    pub fn greedy(n: usize, seed: u64) -> Self {
        assert!(n >= 1, "rank policy needs n >= 1");
        Self {
            tau: f64::INFINITY,
            cum_weights: vec![1.0; n],
            seed,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.cum_weights.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_greedy(&self) -> bool {
        self.tau.is_infinite()
    }

    /// Same rank distribution, different master seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Normalized probability of rank `k` (1-based).
    pub fn probability(&self, k: usize) -> f64 {
        assert!((1..=self.n()).contains(&k), "rank {k} out of 1..={}", self.n());
        if k == 1 {
            self.cum_weights[0]
        } else {
            self.cum_weights[k - 1] - self.cum_weights[k - 2]
        }
    }

    /// Maps a uniform variate `u ∈ [0, 1)` to a rank by inverting the
    /// cumulative distribution.
    pub fn sample_rank(&self, u: f64) -> usize {
        if self.is_greedy() {
            return 1;
        }
        let idx = self.cum_weights.partition_point(|&c| c <= u);
        idx.min(self.n() - 1) + 1
    }

    pub fn draw_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.is_greedy() {
            return 1;
        }
        self.sample_rank(rng.random::<f64>())
    }
}
