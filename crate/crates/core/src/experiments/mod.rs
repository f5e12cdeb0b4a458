//! Parameter sweeps, figure datasets, power-law fits and resource estimates.

pub mod figures;
pub mod fit;
pub mod output;
pub mod resources;
pub mod sweep;
pub mod verify;

pub use figures::{
    figure_dataset, figure_ids, scaling_fit, scaling_grid, FigureOutput, ScalingPlot,
};
pub use fit::{fit_power, fit_power_min, FitResult};
pub use output::{CurveEntry, FigureManifest, StyleRole};
pub use resources::{family, resources, CouplingSchedule, ResourceEstimate, ResourcePoint};
pub use sweep::{run_sweep, Axis, SweepOutput, SweepResult, SweepSpec};
pub use verify::{run_suite, Suite, SuiteReport};
