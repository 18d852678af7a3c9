//! Cycle-level model of the multi-core accelerator.

pub mod config;
pub mod engine;
pub mod schedule;

pub use config::{ArchConfig, EnergyParams, Features, PipelineSpec};
pub use engine::{
    energy_of, lower_bound_latency, scaling_sweep, simulate, sweep_csv, ActivityCounts, BankAccess,
    SimReport, StallCounts, SweepRow,
};
pub use schedule::{bank_of, family_units, placement, schedule, WorkUnit};
