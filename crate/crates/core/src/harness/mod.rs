//! Presets, run configuration, time stepping with output, and accuracy studies.

pub mod accuracy;
pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use accuracy::{
    reversal_accuracy_study, reversal_run, time_refinement_study, write_convergence, ConvergenceRow, FieldErrors,
    TimeRefinement,
};
pub use config::{parse_config, RunManifest};
pub use presets::{weibel_initial_state, Preset, WeibelParams};
pub use run::{run_in_memory, run_simulation, RunSummary, Simulation};
