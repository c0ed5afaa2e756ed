//! Dynamical models behind extremal selection: the Bak–Sneppen ecology and
//! a three-state jamming model of τ-EO.

mod bak_sneppen;
mod jamming;

pub use bak_sneppen::{avalanche_sizes, bs_run, ks_two_sample, threshold_from_histogram, BsChain, BsRun, BsStep};
pub use jamming::{
    argmin_tau, fit_tau_opt, jam_evolve, jam_selection_probabilities, predict_tau_opt, write_sweep_csv, FlowModel,
    JamMode, JamSample, JamState, JamSweep, JamTrajectory, SelectionTable, SweepPoint, SWEEP_CSV_HEADER,
    TRAJECTORY_CSV_HEADER,
};
