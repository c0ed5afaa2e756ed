use std::collections::BTreeSet;

use crate::engine::{restart_rng, EoSearch, TauPolicy};
use crate::problems::{Bipartition, Coloring, ProblemAdapter, SpinGlass};
use crate::{Error, Result};

/// Largest state space [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 24;

/// Optimal configurations found for one instance, in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateSet<S> {
    pub instance: String,
    pub cost: f64,
    pub states: BTreeSet<Vec<S>>,
    /// No new state turned up during the last quarter of the budget.
    pub saturated: bool,
}

impl<S> GroundStateSet<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }
}

/// Runs `runs` independent EO runs of `steps` updates each and collects
/// every configuration that attains the lowest cost seen.
pub fn enumerate_ground_states<P: ProblemAdapter>(
    problem: &P,
    policy: &TauPolicy,
    steps: u64,
    runs: usize,
) -> Result<GroundStateSet<P::State>> {
    if runs == 0 {
        return Err(Error::InvalidParameter("ground-state budget must be at least one run".into()));
    }
    let mut cost = f64::INFINITY;
    let mut states = BTreeSet::new();
    let mut last_new_run = 0;
    for r in 0..runs {
        let mut search = EoSearch::new(problem, policy, restart_rng(policy.seed(), r))?;
        for step in 0..=steps {
            if step > 0 {
                search.step()?;
            }
            let current = search.config().cost();
            if current > cost {
                continue;
            }
            if current < cost {
                cost = current;
                states.clear();
            }
            let mut canonical = search.config().states().to_vec();
            problem.canonicalize(&mut canonical);
            if states.insert(canonical) {
                last_new_run = r;
            }
        }
    }
    let quiet_from = runs - runs / 4;
    Ok(GroundStateSet {
        instance: String::new(),
        cost,
        states,
        saturated: last_new_run < quiet_from,
    })
}

/// Fraction of variable pairs whose relation (same or different state) is
/// identical in every member of `gs`.
pub fn backbone_fraction<S: Eq>(gs: &GroundStateSet<S>) -> Result<f64> {
    let mut iter = gs.states.iter();
    let first = iter.next().ok_or(Error::EmptySet)?;
    let n = first.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut fixed = vec![true; n * n];
    for s in iter {
        for i in 0..n {
            for j in i + 1..n {
                if (s[i] == s[j]) != (first[i] == first[j]) {
                    fixed[i * n + j] = false;
                }
            }
        }
    }
    let pairs = n * (n - 1) / 2;
    let count = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| fixed[i * n + j]).count();
    Ok(count as f64 / pairs as f64)
}

/// Problems whose state space can be enumerated exhaustively.
pub trait Enumerable: ProblemAdapter {
    /// Values a single variable can take.
    fn domain(&self) -> Vec<Self::State>;

    /// Value variable 0 may be fixed to without losing any optimum up to
    /// symmetry.
    fn pinned_first(&self) -> Option<Self::State>;
}

impl Enumerable for Bipartition<'_> {
    fn domain(&self) -> Vec<bool> {
        vec![false, true]
    }

    fn pinned_first(&self) -> Option<bool> {
        Some(false)
    }
}

impl Enumerable for Coloring<'_> {
    fn domain(&self) -> Vec<u8> {
        (0..self.colors()).collect()
    }

    fn pinned_first(&self) -> Option<u8> {
        Some(0)
    }
}

impl Enumerable for SpinGlass<'_> {
    fn domain(&self) -> Vec<i8> {
        vec![-1, 1]
    }

    fn pinned_first(&self) -> Option<i8> {
        (!self.instance().has_fields()).then_some(1)
    }
}

/// Exact optimum and all canonical optimal configurations.
pub fn brute_force<P: Enumerable>(problem: &P) -> Result<(f64, BTreeSet<Vec<P::State>>)> {
    let n = problem.size();
    let domain = problem.domain();
    let pinned = problem.pinned_first().filter(|_| n > 0);
    let free = n - usize::from(pinned.is_some());
    let states_count = (domain.len() as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if states_count > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { states: states_count });
    }
    let offset = n - free;
    let mut digits = vec![0usize; free];
    let mut states: Vec<P::State> = match pinned {
        Some(s) => std::iter::once(s).chain(std::iter::repeat_n(domain[0], free)).collect(),
        None => vec![domain[0]; n],
    };
    let mut best = f64::INFINITY;
    let mut optima = BTreeSet::new();
    loop {
        if problem.is_feasible(&states) {
            let cost = problem.direct_cost(&states);
            if cost < best {
                best = cost;
                optima.clear();
            }
            if cost == best {
                let mut canonical = states.clone();
                problem.canonicalize(&mut canonical);
                optima.insert(canonical);
            }
        }
        let mut k = 0;
        loop {
            if k == free {
                return Ok((best, optima));
            }
            digits[k] += 1;
            if digits[k] < domain.len() {
                states[offset + k] = domain[digits[k]];
                break;
            }
            digits[k] = 0;
            states[offset + k] = domain[0];
            k += 1;
        }
    }
}
