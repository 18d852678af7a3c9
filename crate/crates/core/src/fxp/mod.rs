//! Bit-faithful Q20.12 model of the accelerator arithmetic.

pub mod datapath;
pub mod fixed;
pub mod tables;

pub use datapath::{
    compute_mi_map_fxp, compute_mi_map_fxp_stats, contribution_fxp, scan_line_fxp,
    step_expectations_fxp, step_with_alu, FxpMiResult, FxpState, RayConsts,
};
pub use fixed::{Alu, Fxp, FRAC_BITS};
pub use tables::{
    lsq_exp_fit, lsq_exp_intercept, CapConstants, FxpTables, OccLut, OccLutEntry, PwlExpTable,
    PwlSegment, PWL_SEGMENTS,
};
