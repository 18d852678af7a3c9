use std::fmt::Write as _;

use super::fixed::Fxp;
use crate::fcmi::CellKind;
use crate::grid::{FcmiParams, OccLevel};

pub const LUT_LEN: usize = 101;
pub const PWL_SEGMENTS: usize = 16;
pub const PWL_LO: f64 = -8.0;
pub const PWL_WIDTH: f64 = 0.5;

/// Per-level entry of the occupancy lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccLutEntry {
    pub lambda: Fxp,
    pub neg_log_lambda: Fxp,
    pub inv_lambda: Fxp,
    /// `Free` for level 0, `Occupied` for level 100; the numeric fields are zero there.
    pub kind: CellKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccLut {
    entries: Vec<OccLutEntry>,
}

impl OccLut {
    pub fn build() -> Self {
        let entries = (0..=100u8)
            .map(|l| {
                let kind = match l {
                    0 => CellKind::Free,
                    100 => CellKind::Occupied,
                    _ => CellKind::Regular,
                };
                if kind != CellKind::Regular {
                    return OccLutEntry {
                        lambda: Fxp::ZERO,
                        neg_log_lambda: Fxp::ZERO,
                        inv_lambda: Fxp::ZERO,
                        kind,
                    };
                }
                let lambda = -(-f64::from(l) / 100.0).ln_1p();
                OccLutEntry {
                    lambda: Fxp::from_real(lambda),
                    neg_log_lambda: Fxp::from_real(-lambda.ln()),
                    inv_lambda: Fxp::from_real(1.0 / lambda),
                    kind,
                }
            })
            .collect();
        Self { entries }
    }

    pub fn get(&self, level: OccLevel) -> &OccLutEntry {
        &self.entries[usize::from(level.level())]
    }

    pub fn entries(&self) -> &[OccLutEntry] {
        &self.entries
    }
}

/// Continuous least-squares line through `e^x` on `[a, b]`, as `(m, c)`.
pub fn lsq_exp_fit(a: f64, b: f64) -> (f64, f64) {
    let h = b - a;
    let mid = 0.5 * (a + b);
    let ea = a.exp();
    let eb = b.exp();
    // ∫ (x - mid) e^x dx = [(x - 1 - mid) e^x]
    let int_ue = (b - 1.0 - mid) * eb - (a - 1.0 - mid) * ea;
    let int_uu = h * h * h / 12.0;
    let m = int_ue / int_uu;
    (m, lsq_exp_intercept(a, b, m))
}

/// Least-squares intercept on `[a, b]` for a given slope.
pub fn lsq_exp_intercept(a: f64, b: f64, m: f64) -> f64 {
    (b.exp() - a.exp()) / (b - a) - m * 0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PwlSegment {
    pub m: Fxp,
    pub c: Fxp,
}

/// 16 uniform segments of width 0.5 covering [-8, 0].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwlExpTable {
    segments: [PwlSegment; PWL_SEGMENTS],
}

impl PwlExpTable {
    pub fn build() -> Self {
        let segments = std::array::from_fn(|k| {
            let (a, b) = Self::segment_bounds(k);
            let m = Fxp::from_real(lsq_exp_fit(a, b).0);
            // the intercept is refit to the rounded slope, which moves the
            // slope's rounding error to the segment midpoint; with the
            // plain rounded intercept it grows with |x| up to 4 ulp at -8
            PwlSegment {
                m,
                c: Fxp::from_real(lsq_exp_intercept(a, b, m.to_real())),
            }
        });
        Self { segments }
    }

    pub fn segment_bounds(k: usize) -> (f64, f64) {
        let a = PWL_LO + PWL_WIDTH * k as f64;
        (a, a + PWL_WIDTH)
    }

    pub fn segments(&self) -> &[PwlSegment; PWL_SEGMENTS] {
        &self.segments
    }

    /// Segment covering `x`, which must already be clamped to [-8, 0].
    pub fn segment_index(x: Fxp) -> usize {
        // -8 is raw -32768 and each segment spans 2048 raw steps
        (((x.raw() + 32768) >> 11) as usize).min(PWL_SEGMENTS - 1)
    }

    /// `e^x` approximated in fixed point; `x` is clamped to [-8, 0].
    pub fn exp(&self, x: Fxp) -> Fxp {
        let x = x.clamp(Fxp::from_raw(-32768), Fxp::ZERO);
        let seg = self.segments[Self::segment_index(x)];
        seg.m * x + seg.c
    }

    /// Same as [`exp`](Self::exp) on the unrounded coefficients.
    pub fn exp_unrounded(x: f64) -> f64 {
        let x = x.clamp(PWL_LO, 0.0);
        let k = (((x - PWL_LO) / PWL_WIDTH) as usize).min(PWL_SEGMENTS - 1);
        let (a, b) = Self::segment_bounds(k);
        let (m, c) = lsq_exp_fit(a, b);
        m * x + c
    }
}

/// Λ-dependent constants and the fully occupied limit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapConstants {
    /// `1 - ln Λ`
    pub one_minus_log_cap: Fxp,
    pub occupied_a1: Fxp,
    pub occupied_b1: Fxp,
    pub occupied_a0: Fxp,
    pub occupied_b0: Fxp,
}

impl CapConstants {
    pub fn build(params: &FcmiParams<f64>) -> Self {
        let cap = params.lambda_cap();
        let log_cap = params.log_lambda_cap();
        Self {
            one_minus_log_cap: Fxp::from_real(1.0 - log_cap),
            occupied_a1: Fxp::from_real((2.0 - log_cap) / cap),
            occupied_b1: Fxp::from_real(1.0 / cap),
            occupied_a0: Fxp::from_real(1.0 - log_cap),
            occupied_b0: Fxp::ONE,
        }
    }
}

/// Everything the fixed-point datapath reads besides the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FxpTables {
    pub lut: OccLut,
    pub pwl: PwlExpTable,
    pub cap: CapConstants,
}

impl FxpTables {
    pub fn build(params: &FcmiParams<f64>) -> Self {
        Self {
            lut: OccLut::build(),
            pwl: PwlExpTable::build(),
            cap: CapConstants::build(params),
        }
    }

    /// Text dump: `index raw_lambda raw_neglog raw_inv` per level, then
    /// `segment raw_m raw_c` per PWL segment.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.lut.entries().iter().enumerate() {
            let _ = writeln!(
                out,
                "{i} {} {} {}",
                e.lambda.raw(),
                e.neg_log_lambda.raw(),
                e.inv_lambda.raw()
            );
        }
        for (k, s) in self.pwl.segments().iter().enumerate() {
            let _ = writeln!(out, "{k} {} {}", s.m.raw(), s.c.raw());
        }
        out
    }
}
