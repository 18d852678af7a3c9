//! Floating-point reference of the continuous MI recursion.
//!
//! Each family line is scanned anti-parallel to its beam direction, so the
//! "previous" cell of the recursion is the neighbour farther along the beam
//! and the state after a cell summarizes the beam leaving that cell. The
//! contribution emitted at a cell is `h - h_cond` of that beam.

use crate::error::{Error, Result};
use crate::grid::{FcmiParams, MiMap, OccLevel, OccupancyGrid, SensorConfig};
use crate::line::{chord_factor, line_families, LineScan};
use crate::scalar::Real;

/// Lower incomplete gamma `γ(s, x)` for integer order `s ∈ {1, 2, 3}`.
///
/// Uses the power series below x = 1 (the closed forms cancel badly there)
/// and the closed forms `1 - e^-x`, `1 - e^-x (1 + x)`, `2 - e^-x (x² + 2x + 2)`
/// above.
pub fn gamma_lower<T: Real>(s: u32, x: T) -> Result<T> {
    if !(1..=3).contains(&s) {
        return Err(Error::GammaOrder(s));
    }
    debug_assert!(x >= T::zero(), "gamma_lower needs x >= 0");
    let one = T::one();
    let two = T::of(2.0);
    let s_t = T::of(f64::from(s));
    if x < one {
        if x <= T::zero() {
            return Ok(T::zero());
        }
        // γ(s, x) = x^s e^-x Σ_k x^k / (s (s+1) ... (s+k))
        let mut term = one / s_t;
        let mut sum = term;
        let mut k = one;
        while term > sum * T::epsilon() {
            term = term * x / (s_t + k);
            sum = sum + term;
            k = k + one;
        }
        return Ok(x.powi(s as i32) * (-x).exp() * sum);
    }
    let e = (-x).exp();
    if e == T::zero() {
        return Ok(match s {
            1 => one,
            2 => one,
            _ => two,
        });
    }
    Ok(match s {
        1 => -(-x).exp_m1(),
        2 => one - e * (one + x),
        _ => two - e * (x * x + two * x + two),
    })
}

/// The four running expectations of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpectationState<T> {
    pub a1: T,
    pub b1: T,
    pub a0: T,
    pub b0: T,
}

impl<T: Real> ExpectationState<T> {
    pub fn zero() -> Self {
        Self {
            a1: T::zero(),
            b1: T::zero(),
            a0: T::zero(),
            b0: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a1.is_finite() && self.b1.is_finite() && self.a0.is_finite() && self.b0.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Regular,
    /// o = 0
    Free,
    /// o = 1
    Occupied,
}

/// Occupancy-derived inputs of one recursion step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams<T> {
    /// `-ln(1 - o)`; infinite for an occupied cell.
    pub lambda: T,
    /// `min(lambda, Λ)`.
    pub lambda_m: T,
    /// Step chord in cell units.
    pub width: T,
    pub kind: CellKind,
}

impl<T: Real> CellParams<T> {
    pub fn from_probability(o: T, width: T, params: &FcmiParams<T>) -> Self {
        let kind = if o <= T::zero() {
            CellKind::Free
        } else if o >= T::one() {
            CellKind::Occupied
        } else {
            CellKind::Regular
        };
        let lambda = match kind {
            CellKind::Free => T::zero(),
            CellKind::Occupied => T::infinity(),
            CellKind::Regular => -(-o).ln_1p(),
        };
        Self {
            lambda,
            lambda_m: lambda.min(params.lambda_cap()),
            width,
            kind,
        }
    }

    pub fn from_level(level: OccLevel, width: T, params: &FcmiParams<T>) -> Self {
        Self::from_probability(T::of(level.probability()), width, params)
    }
}

/// Per-cell factors of one step that do not depend on the incoming state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTerms<T> {
    kind: CellKind,
    width: T,
    /// `λ w`, with λ replaced by the cap for an occupied cell
    lambda_w: T,
    /// `λ_m w`
    x: T,
    e: T,
    /// `(γ3 - γ2 ln λ_m) / λ_m`
    k_a1: T,
    /// `γ2 / λ_m`
    k_b1: T,
    /// `γ2 - γ1 ln λ_m`
    k_a0: T,
    /// `γ1`
    k_b0: T,
}

impl<T: Real> StepTerms<T> {
    pub fn new(cell: &CellParams<T>, params: &FcmiParams<T>) -> Self {
        let w = cell.width;
        let zero = T::zero();
        if cell.kind == CellKind::Free {
            return Self {
                kind: cell.kind,
                width: w,
                lambda_w: zero,
                x: zero,
                e: T::one(),
                k_a1: zero,
                k_b1: zero,
                k_a0: zero,
                k_b0: zero,
            };
        }
        let lm = cell.lambda_m;
        // An occupied cell has λ = ∞; the term it multiplies is scaled by
        // e^{-Λw}, which vanishes, so λ is replaced by the cap.
        let lambda = match cell.kind {
            CellKind::Occupied => params.lambda_cap(),
            _ => cell.lambda,
        };
        let x = lm * w;
        let g1 = gamma_lower(1, x).expect("order 1");
        let g2 = gamma_lower(2, x).expect("order 2");
        let g3 = gamma_lower(3, x).expect("order 3");
        let log_lm = lm.ln();
        Self {
            kind: cell.kind,
            width: w,
            lambda_w: lambda * w,
            x,
            e: (-x).exp(),
            k_a1: (g3 - g2 * log_lm) / lm,
            k_b1: g2 / lm,
            k_a0: g2 - g1 * log_lm,
            k_b0: g1,
        }
    }

    pub fn apply(&self, prev: &ExpectationState<T>) -> ExpectationState<T> {
        let w = self.width;
        if self.kind == CellKind::Free {
            return ExpectationState {
                a1: prev.a1 + w * prev.a0,
                b1: prev.b1 + w * prev.b0,
                a0: prev.a0,
                b0: prev.b0,
            };
        }
        let e = self.e;
        ExpectationState {
            a1: e * ((prev.a1 + self.lambda_w * prev.b1) + w * (prev.a0 + self.x * prev.b0))
                + self.k_a1,
            b1: e * (prev.b1 + w * prev.b0) + self.k_b1,
            a0: e * (prev.a0 + self.x * prev.b0) + self.k_a0,
            b0: e * prev.b0 + self.k_b0,
        }
    }
}

/// One step of the recursion: the state of the current cell from the state of
/// the cell behind it along the beam.
pub fn step_expectations<T: Real>(
    prev: &ExpectationState<T>,
    cell: &CellParams<T>,
    params: &FcmiParams<T>,
) -> ExpectationState<T> {
    StepTerms::new(cell, params).apply(prev)
}

/// Step terms of every occupancy level for one chord width.
pub fn level_terms<T: Real>(width: T, params: &FcmiParams<T>) -> Vec<StepTerms<T>> {
    (0..=OccLevel::MAX)
        .map(|l| {
            let level = OccLevel::new(l).expect("level in range");
            StepTerms::new(&CellParams::from_level(level, width, params), params)
        })
        .collect()
}

/// Beam entropy and conditional entropy of one ray.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EntropyPair<T> {
    pub h: T,
    pub h_cond: T,
}

impl<T: Real> EntropyPair<T> {
    pub fn from_state(state: &ExpectationState<T>, delta_theta: T, params: &FcmiParams<T>) -> Self {
        Self {
            h: state.a1 * delta_theta,
            h_cond: (T::one() - params.log_lambda_cap()) * state.b1 * delta_theta,
        }
    }

    pub fn mutual_information(&self) -> T {
        self.h - self.h_cond
    }
}

pub fn entropy_pair<T: Real>(
    state: &ExpectationState<T>,
    sensor: &SensorConfig,
    params: &FcmiParams<T>,
) -> EntropyPair<T> {
    EntropyPair::from_state(state, T::of(sensor.delta_theta()), params)
}

/// Runs the recursion along one line, adding each cell's beam MI to `mi`.
pub fn scan_line<T: Real>(
    line: &LineScan,
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    params: &FcmiParams<T>,
    mi: &mut MiMap<T>,
) {
    let terms = level_terms(T::of(chord_factor(line.angle)), params);
    scan_line_with(line, grid, &terms, T::of(sensor.delta_theta()), params, mi);
}

fn scan_line_with<T: Real>(
    line: &LineScan,
    grid: &OccupancyGrid,
    terms: &[StepTerms<T>],
    dtheta: T,
    params: &FcmiParams<T>,
    mi: &mut MiMap<T>,
) {
    let mut state = ExpectationState::zero();
    for &c in &line.cells {
        state = terms[usize::from(grid.get(c).level())].apply(&state);
        let slot = mi.slot(c);
        *slot = *slot + EntropyPair::from_state(&state, dtheta, params).mutual_information();
    }
}

/// MI of a full range scan at every cell of the grid.
pub fn compute_mi_map<T: Real>(
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    params: &FcmiParams<T>,
) -> MiMap<T> {
    let mut mi = MiMap::zeros(grid.dims());
    let dtheta = T::of(sensor.delta_theta());
    for angle in sensor.angles() {
        let terms = level_terms(T::of(chord_factor(angle)), params);
        for line in line_families(angle, grid.dims(), grid.resolution()) {
            scan_line_with(&line, grid, &terms, dtheta, params, &mut mi);
        }
    }
    mi
}

/// Shannon entropy of the map in nats, `Σ -o ln o - (1-o) ln(1-o)`.
pub fn map_entropy<T: Real>(grid: &OccupancyGrid) -> T {
    grid.cells()
        .iter()
        .map(|&l| cell_entropy::<T>(l))
        .fold(T::zero(), |a, b| a + b)
}

pub fn cell_entropy<T: Real>(level: OccLevel) -> T {
    let o = T::of(level.probability());
    let v = T::one() - o;
    let xlnx = |p: T| {
        if p > T::zero() {
            -p * p.ln()
        } else {
            T::zero()
        }
    };
    xlnx(o) + xlnx(v)
}
