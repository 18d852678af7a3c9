//! The recursion step and map computation on Q20.12 arithmetic.

use super::fixed::{Alu, Fxp};
use super::tables::FxpTables;
use crate::fcmi::{CellKind, ExpectationState};
use crate::grid::{FcmiParams, MiMap, OccLevel, OccupancyGrid, SensorConfig};
use crate::line::{chord_factor, line_families, LineScan};

pub type FxpState = ExpectationState<Fxp>;

/// Per-ray constants fed to every step of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayConsts {
    pub width: Fxp,
    pub delta_theta: Fxp,
}

impl RayConsts {
    pub fn new(angle: f64, sensor: &SensorConfig) -> Self {
        Self {
            width: Fxp::from_real(chord_factor(angle)),
            delta_theta: Fxp::from_real(sensor.delta_theta()),
        }
    }
}

pub fn step_expectations_fxp(
    prev: &FxpState,
    level: OccLevel,
    w: Fxp,
    tables: &FxpTables,
) -> FxpState {
    step_with_alu(prev, level, w, tables, &Alu::default())
}

pub fn step_with_alu(
    prev: &FxpState,
    level: OccLevel,
    w: Fxp,
    tables: &FxpTables,
    alu: &Alu,
) -> FxpState {
    let entry = tables.lut.get(level);
    match entry.kind {
        CellKind::Free => FxpState {
            a1: alu.add(prev.a1, alu.mul(w, prev.a0)),
            b1: alu.add(prev.b1, alu.mul(w, prev.b0)),
            a0: prev.a0,
            b0: prev.b0,
        },
        CellKind::Occupied => FxpState {
            a1: tables.cap.occupied_a1,
            b1: tables.cap.occupied_b1,
            a0: tables.cap.occupied_a0,
            b0: tables.cap.occupied_b0,
        },
        CellKind::Regular => {
            let one = Fxp::ONE;
            let two = Fxp::from_raw(2 * Fxp::ONE.raw());
            let x = alu.mul(entry.lambda, w);
            let e = tables.pwl.exp(-x);
            let g1 = alu.sub(one, e);
            let g2 = alu.sub(one, alu.mul(e, alu.add(one, x)));
            let poly = alu.add(alu.add(alu.mul(x, x), alu.mul(two, x)), two);
            let g3 = alu.sub(two, alu.mul(e, poly));
            let nl = entry.neg_log_lambda;
            let inv = entry.inv_lambda;

            let q = alu.add(prev.a0, alu.mul(x, prev.b0));
            let carry_a1 = alu.add(alu.add(prev.a1, alu.mul(x, prev.b1)), alu.mul(w, q));
            let carry_b1 = alu.add(prev.b1, alu.mul(w, prev.b0));
            FxpState {
                a1: alu.add(
                    alu.mul(e, carry_a1),
                    alu.mul(alu.add(g3, alu.mul(g2, nl)), inv),
                ),
                b1: alu.add(alu.mul(e, carry_b1), alu.mul(g2, inv)),
                a0: alu.add(alu.add(alu.mul(e, q), g2), alu.mul(g1, nl)),
                b0: alu.add(alu.mul(e, prev.b0), g1),
            }
        }
    }
}

/// `h - h_cond` of the beam summarized by `state`.
pub fn contribution_fxp(state: &FxpState, delta_theta: Fxp, tables: &FxpTables, alu: &Alu) -> Fxp {
    let h = alu.mul(state.a1, delta_theta);
    let h_cond = alu.mul(alu.mul(tables.cap.one_minus_log_cap, state.b1), delta_theta);
    alu.sub(h, h_cond)
}

/// Fixed-point MI map plus the number of saturation events seen.
#[derive(Debug, Clone, PartialEq)]
pub struct FxpMiResult {
    pub map: MiMap<Fxp>,
    pub saturations: u64,
}

pub fn scan_line_fxp(
    line: &LineScan,
    grid: &OccupancyGrid,
    ray: RayConsts,
    tables: &FxpTables,
    mi: &mut MiMap<Fxp>,
    alu: &Alu,
) {
    let mut state = FxpState::default();
    for &c in &line.cells {
        state = step_with_alu(&state, grid.get(c), ray.width, tables, alu);
        let v = contribution_fxp(&state, ray.delta_theta, tables, alu);
        let slot = mi.slot(c);
        *slot = alu.add(*slot, v);
    }
}

pub fn compute_mi_map_fxp_stats(
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    tables: &FxpTables,
) -> FxpMiResult {
    let mut map = MiMap::zeros(grid.dims());
    let alu = Alu::default();
    for angle in sensor.angles() {
        let ray = RayConsts::new(angle, sensor);
        for line in line_families(angle, grid.dims(), grid.resolution()) {
            scan_line_fxp(&line, grid, ray, tables, &mut map, &alu);
        }
    }
    FxpMiResult {
        map,
        saturations: alu.saturations(),
    }
}

pub fn compute_mi_map_fxp(
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    params: &FcmiParams<f64>,
) -> MiMap<Fxp> {
    compute_mi_map_fxp_stats(grid, sensor, &FxpTables::build(params)).map
}
