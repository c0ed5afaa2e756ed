mod analysis;
mod experiments;
mod models;

use crate::args::{AnalysisCommand, Command, ModelsCommand};
use crate::error::CliResult;

pub fn dispatch(command: &Command, argv: &[String]) -> CliResult<()> {
    match command {
        Command::Generate(a) => experiments::generate_cmd(a, argv),
        Command::Run(a) => experiments::run_cmd(a, argv),
        Command::SweepTau(a) => experiments::sweep_cmd(a, argv),
        Command::Compare(a) => experiments::compare_cmd(a, argv),
        Command::Models(ModelsCommand::Bs(a)) => models::bs_cmd(a, argv),
        Command::Models(ModelsCommand::Jam(a)) => models::jam_cmd(a, argv),
        Command::Analysis(AnalysisCommand::Convergence(a)) => analysis::convergence_cmd(a, argv),
        Command::Analysis(AnalysisCommand::Collapse(a)) => analysis::collapse_cmd(a, argv),
        Command::Analysis(AnalysisCommand::GroundStates(a)) => analysis::ground_states_cmd(a, argv),
    }
}
