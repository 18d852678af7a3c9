//! Map-wide continuous mutual information (MI) for 2D occupancy grids.
//!
//! * [`fcmi`]: floating-point reference recursion, generic over [`Real`].
//! * [`fxp`]: bit-faithful Q20.12 datapath with lookup tables and a
//!   piecewise-linear exponential.
//! * [`sim`]: cycle-level model of the multi-core banked accelerator.
//! * [`explore`]: exploration harness that consumes MI maps.

pub mod error;
pub mod explore;
pub mod fcmi;
pub mod fxp;
pub mod grid;
pub mod io;
pub mod line;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use fcmi::{
    compute_mi_map, entropy_pair, gamma_lower, map_entropy, scan_line, step_expectations, CellKind,
    CellParams, EntropyPair, ExpectationState, StepTerms,
};
pub use fxp::{compute_mi_map_fxp, Fxp, FxpTables};
pub use grid::{CellCoord, FcmiParams, GridDims, MiMap, OccLevel, OccupancyGrid, SensorConfig};
pub use line::{bresenham_line, cell_width, line_families, LineScan};
pub use scalar::Real;
pub use sim::{scaling_sweep, simulate, sweep_csv, ArchConfig, SimReport};

/// Double-precision reference types.
pub type MiMapF64 = MiMap<f64>;
pub type MiMapF32 = MiMap<f32>;
pub type ExpectationStateF64 = ExpectationState<f64>;
pub type FcmiParamsF64 = FcmiParams<f64>;
/// Q20.12 MI map produced by the fixed-point datapath and the simulator.
pub type MiMapFxp = MiMap<Fxp>;
