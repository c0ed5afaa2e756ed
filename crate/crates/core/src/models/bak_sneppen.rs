use rand::{Rng, SeedableRng};

use crate::{Error, Result, SearchRng};

/// Bak–Sneppen chain: `n` species on a ring with fitness in `[0, 1]`.
///
/// Each step replaces the least fit species and both of its neighbours with
/// fresh uniform draws. A segment tree keeps the minimum at `O(log n)`.
#[derive(Debug, Clone)]
pub struct BsChain {
    fitness: Vec<f64>,
    /// Index of the minimum below each tree node; leaves start at `size`.
    tree: Vec<usize>,
    size: usize,
    steps: u64,
}

/// What happened in one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsStep {
    pub site: usize,
    /// Fitness of the selected species before it was replaced.
    pub min_value: f64,
}

impl BsChain {
    pub fn new<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("a ring needs at least 3 species, got {n}")));
        }
        let fitness: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        Ok(Self::from_fitness(fitness))
    }

    fn from_fitness(fitness: Vec<f64>) -> Self {
        let size = fitness.len().next_power_of_two();
        let mut tree = vec![usize::MAX; 2 * size];
        for (i, slot) in tree[size..size + fitness.len()].iter_mut().enumerate() {
            *slot = i;
        }
        let mut chain = Self {
            fitness,
            tree,
            size,
            steps: 0,
        };
        for node in (1..size).rev() {
            chain.pull(node);
        }
        chain
    }

    fn better(&self, a: usize, b: usize) -> usize {
        match (a, b) {
            (usize::MAX, _) => b,
            (_, usize::MAX) => a,
            _ if self.fitness[b] < self.fitness[a] => b,
            _ => a,
        }
    }

    fn pull(&mut self, node: usize) {
        self.tree[node] = self.better(self.tree[2 * node], self.tree[2 * node + 1]);
    }

    fn set(&mut self, i: usize, value: f64) {
        self.fitness[i] = value;
        let mut node = (self.size + i) / 2;
        while node >= 1 {
            self.pull(node);
            node /= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn min_site(&self) -> usize {
        self.tree[1]
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BsStep {
        let n = self.len();
        let site = self.min_site();
        let min_value = self.fitness[site];
        for i in [(site + n - 1) % n, site, (site + 1) % n] {
            self.set(i, rng.random());
        }
        self.steps += 1;
        BsStep { site, min_value }
    }
}

/// Fitness snapshot histogram and minimum record of a long run.
#[derive(Debug, Clone, PartialEq)]
pub struct BsRun {
    /// Counts of final fitness values in equal bins over `[0, 1]`.
    pub histogram: Vec<u64>,
    /// Selected minimum of every step after burn-in.
    pub minima: Vec<f64>,
}

/// Runs `burn_in + steps` updates; the histogram accumulates the whole
/// fitness vector every `n` steps after burn-in.
pub fn bs_run(n: usize, steps: u64, burn_in: u64, bins: usize, seed: u64) -> Result<BsRun> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let mut rng = SearchRng::seed_from_u64(seed);
    let mut chain = BsChain::new(n, &mut rng)?;
    for _ in 0..burn_in {
        chain.step(&mut rng);
    }
    let mut histogram = vec![0u64; bins];
    let mut minima = Vec::with_capacity(steps as usize);
    for t in 1..=steps {
        minima.push(chain.step(&mut rng).min_value);
        if t % n as u64 == 0 {
            for &f in chain.fitness() {
                histogram[((f * bins as f64) as usize).min(bins - 1)] += 1;
            }
        }
    }
    Ok(BsRun { histogram, minima })
}

/// Location of the knee of a fitness histogram: the lower edge of the first
/// bin whose count reaches half the mean count of the top fifth.
pub fn threshold_from_histogram(histogram: &[u64]) -> f64 {
    let bins = histogram.len();
    let top = (bins / 5).max(1);
    let plateau = histogram[bins - top..].iter().sum::<u64>() as f64 / top as f64;
    let knee = histogram
        .iter()
        .position(|&h| h as f64 >= plateau / 2.0)
        .unwrap_or(bins);
    knee as f64 / bins as f64
}

/// Lengths of the runs of consecutive minima below `threshold`.
pub fn avalanche_sizes(minima: &[f64], threshold: f64) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut current = 0;
    for &m in minima {
        if m < threshold {
            current += 1;
        } else if current > 0 {
            sizes.push(current);
            current = 0;
        }
    }
    if current > 0 {
        sizes.push(current);
    }
    sizes
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d))
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_of_three_redraws_everything() {
        let mut rng = SearchRng::seed_from_u64(1);
        let mut chain = BsChain::new(3, &mut rng).unwrap();
        for _ in 0..100 {
            let before = chain.fitness().to_vec();
            chain.step(&mut rng);
            assert!(chain.fitness().iter().zip(&before).all(|(a, b)| a != b));
            assert!(chain.fitness().iter().all(|f| (0.0..=1.0).contains(f)));
        }
        assert_eq!(chain.steps(), 100);
        assert!(BsChain::new(2, &mut rng).is_err());
    }

    #[test]
    fn tree_tracks_the_minimum() {
        let mut rng = SearchRng::seed_from_u64(2);
        let mut chain = BsChain::new(37, &mut rng).unwrap();
        for _ in 0..5_000 {
            let f = chain.fitness();
            let site = (0..f.len()).min_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
            assert_eq!(chain.step(&mut rng).site, site);
        }
    }

    #[test]
    fn avalanches() {
        assert_eq!(avalanche_sizes(&[0.1, 0.2, 0.9, 0.5, 0.1, 0.9], 0.6), vec![2, 2]);
        assert_eq!(avalanche_sizes(&[0.1], 0.6), vec![1]);
    }

    #[test]
    fn ks_statistic() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
        let shifted: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let (d, p) = ks_two_sample(&a, &shifted);
        assert!((d - 0.5).abs() <= 1e-3);
        assert!(p < 1e-10);
        // tabulated: Q(1.36) ≈ 0.049
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
    }

    #[test]
    fn knee_of_a_step_histogram() {
        let mut h = vec![0u64; 100];
        h[67..].iter_mut().for_each(|x| *x = 1000);
        assert!((threshold_from_histogram(&h) - 0.67).abs() < 1e-12);
    }
}
