use std::io::{self, Write};

use crate::engine::Configuration;

/// Steps below this are recorded one by one; later steps are thinned.
pub const FULL_RESOLUTION_STEPS: u64 = 10_000;
/// Growth factor between consecutive thinned samples.
pub const THINNING_FACTOR: f64 = 1.1;

pub const TRACE_CSV_HEADER: &str = "step,cost,best_cost";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub step: u64,
    pub cost: f64,
    pub best_cost: f64,
}

/// Cost history of a run together with the best configuration it found.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<S> {
    pub samples: Vec<TraceSample>,
    pub best_config: Configuration<S>,
    /// Step at which `best_config` was first reached, counted within its restart.
    pub steps_to_best: u64,
    /// Index of the restart that produced `best_config`.
    pub best_restart: usize,
    /// Best cost of every restart, in restart order.
    pub restart_best_costs: Vec<f64>,
}

impl<S: Copy> RunTrace<S> {
    pub fn best_cost(&self) -> f64 {
        self.best_config.cost()
    }

    /// Best cost seen up to and including `step`.
    ///
    /// Exact because every improvement of the best cost is sampled.
    pub fn best_cost_at(&self, step: u64) -> f64 {
        let idx = self.samples.partition_point(|s| s.step <= step);
        match idx {
            0 => self.samples[0].best_cost,
            i => self.samples[i - 1].best_cost,
        }
    }

    pub fn last_step(&self) -> u64 {
        self.samples.last().map_or(0, |s| s.step)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRACE_CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", s.step, s.cost, s.best_cost)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Decides which steps of a run end up in the trace.
#[derive(Debug, Clone)]
pub(crate) struct TraceRecorder {
    samples: Vec<TraceSample>,
    next_thinned: f64,
}

impl TraceRecorder {
    pub(crate) fn new() -> Self {
        Self {
            samples: Vec::new(),
            next_thinned: FULL_RESOLUTION_STEPS as f64 * THINNING_FACTOR,
        }
    }

    pub(crate) fn observe(&mut self, step: u64, cost: f64, best_cost: f64, improved: bool) {
        let due = step <= FULL_RESOLUTION_STEPS || step as f64 >= self.next_thinned;
        if step as f64 >= self.next_thinned {
            while self.next_thinned <= step as f64 {
                self.next_thinned *= THINNING_FACTOR;
            }
        }
        if due || improved {
            self.samples.push(TraceSample {
                step,
                cost,
                best_cost,
            });
        }
    }

    /// Makes sure the final step is present.
    pub(crate) fn finish(mut self, step: u64, cost: f64, best_cost: f64) -> Vec<TraceSample> {
        if self.samples.last().map(|s| s.step) != Some(step) {
            self.samples.push(TraceSample {
                step,
                cost,
                best_cost,
            });
        }
        self.samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thinning_keeps_improvements() {
        let mut rec = TraceRecorder::new();
        let mut best = 100.0;
        for step in 0..=200_000u64 {
            let improved = step % 50_001 == 7;
            if improved {
                best -= 1.0;
            }
            rec.observe(step, best + 1.0, best, improved);
        }
        let samples = rec.finish(200_000, 0.0, best);
        assert!(samples.iter().take(10_001).enumerate().all(|(i, s)| s.step == i as u64));
        assert!(samples.iter().any(|s| s.step == 50_008));
        assert!(samples.iter().any(|s| s.step == 150_010));
        assert_eq!(samples.last().unwrap().step, 200_000);
        // ~ ln(20) / ln(1.1) thinned samples beyond the full-resolution window
        assert!(samples.len() < 10_001 + 40, "{}", samples.len());
        assert!(samples.windows(2).all(|w| w[0].step < w[1].step));
    }
}
