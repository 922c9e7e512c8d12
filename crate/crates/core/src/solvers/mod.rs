//! Variational solvers: quotient minimization, Hardy-quotient minimization,
//! translation scans, the mountain pass and concentration diagnostics.

mod concentration;
mod gauge;
mod hardy;
mod minimize;
mod mountain_pass;
mod translate_scan;

pub use gauge::Gauge;
pub use minimize::{
    boundary_mass_fraction, minimize_quotient, HistoryEntry, MinimizeOutput, MinimizerConfig,
    MinimizerStatus,
};
pub use concentration::{concentration, ConcentrationReport};
pub use translate_scan::{monotone_from, representable_shifts, retained_power_mass, translate_scan, ScanRow};
pub use hardy::{minimize_hardy_ratio, HardyConfig, HardyOutput};
pub use mountain_pass::{
    estimate_constants, mountain_pass, MountainPassConfig, MountainPassReport, PassGeometry,
    PassHistoryEntry, ThresholdConstants,
};
