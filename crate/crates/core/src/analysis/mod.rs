//! Post-processing of run outputs: convergence fits, finite-size scaling,
//! ground-state sets and exhaustive oracles.

mod collapse;
mod convergence;
mod ground_states;

use std::io::{self, Write};

pub use collapse::{scaling_collapse, CollapsePoint, ScalingFit, C_CRIT_RANGE, NU_RANGE};
pub use convergence::{fit_convergence, fit_convergence_samples, fit_power_law, log_time_grid, ConvergenceFit, MIN_DECADES, MIN_TRACES};
pub use ground_states::{
    backbone_fraction, brute_force, enumerate_ground_states, Enumerable, GroundStateSet, BRUTE_FORCE_LIMIT,
};

pub const FIT_CSV_HEADER: &str = "quantity,value,stderr";

/// One row of a fit-results table.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub quantity: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

impl FitRow {
    pub fn new(quantity: impl Into<String>, value: f64, stderr: Option<f64>) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            stderr,
        }
    }
}

/// Writes rows as `quantity,value,stderr`; a missing error is left empty.
pub fn write_fit_rows<W: Write>(rows: &[FitRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{FIT_CSV_HEADER}")?;
    for r in rows {
        match r.stderr {
            Some(e) => writeln!(out, "{},{},{}", r.quantity, r.value, e)?,
            None => writeln!(out, "{},{},", r.quantity, r.value)?,
        }
    }
    Ok(())
}

impl ConvergenceFit {
    pub fn rows(&self) -> Vec<FitRow> {
        vec![
            FitRow::new("c_inf", self.c_inf, None),
            FitRow::new("amplitude", self.amplitude, None),
            FitRow::new("gamma", self.gamma, Some(self.gamma_stderr)),
            FitRow::new("residual", self.residual, None),
        ]
    }
}

impl ScalingFit {
    pub fn rows(&self) -> Vec<FitRow> {
        vec![
            FitRow::new("c_crit", self.c_crit, None),
            FitRow::new("nu", self.nu, None),
            FitRow::new("collapse_residual", self.collapse_residual, None),
        ]
    }
}
