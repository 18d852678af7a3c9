use std::cell::Cell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Number of fractional bits.
pub const FRAC_BITS: u32 = 12;
const SCALE: f64 = (1u32 << FRAC_BITS) as f64;

/// Q20.12 fixed-point value: `raw / 4096`, saturating at both ends.
///
/// The operator impls saturate silently. The `*_sat` methods also report
/// whether saturation happened, which the datapath uses to count events.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fxp(i32);

impl Fxp {
    pub const ZERO: Fxp = Fxp(0);
    pub const ONE: Fxp = Fxp(1 << FRAC_BITS);
    pub const MAX: Fxp = Fxp(i32::MAX);
    pub const MIN: Fxp = Fxp(i32::MIN);
    /// Smallest positive step, 2^-12.
    pub const ULP: f64 = 1.0 / SCALE;

    pub const fn from_raw(raw: i32) -> Self {
        Fxp(raw)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    /// Round-to-nearest, ties to even. NaN encodes as zero.
    pub fn from_real(x: f64) -> Self {
        Self::from_real_sat(x).0
    }

    pub fn from_real_sat(x: f64) -> (Self, bool) {
        if x.is_nan() {
            return (Fxp::ZERO, false);
        }
        let r = (x * SCALE).round_ties_even();
        if r > i32::MAX as f64 {
            (Fxp::MAX, true)
        } else if r < i32::MIN as f64 {
            (Fxp::MIN, true)
        } else {
            (Fxp(r as i32), false)
        }
    }

    pub fn to_real(self) -> f64 {
        f64::from(self.0) / SCALE
    }

    fn clamp_wide(v: i64) -> (Self, bool) {
        if v > i64::from(i32::MAX) {
            (Fxp::MAX, true)
        } else if v < i64::from(i32::MIN) {
            (Fxp::MIN, true)
        } else {
            (Fxp(v as i32), false)
        }
    }

    pub fn add_sat(self, rhs: Self) -> (Self, bool) {
        Self::clamp_wide(i64::from(self.0) + i64::from(rhs.0))
    }

    pub fn sub_sat(self, rhs: Self) -> (Self, bool) {
        Self::clamp_wide(i64::from(self.0) - i64::from(rhs.0))
    }

    /// Exact 64-bit product, dropped bits rounded to nearest (ties to even).
    pub fn mul_sat(self, rhs: Self) -> (Self, bool) {
        let p = i64::from(self.0) * i64::from(rhs.0);
        let q = p >> FRAC_BITS;
        let rem = p & ((1 << FRAC_BITS) - 1);
        let half = 1 << (FRAC_BITS - 1);
        let q = if rem > half || (rem == half && q & 1 == 1) {
            q + 1
        } else {
            q
        };
        Self::clamp_wide(q)
    }

    pub fn abs_diff(self, rhs: Self) -> u32 {
        self.0.abs_diff(rhs.0)
    }
}

impl Add for Fxp {
    type Output = Fxp;
    fn add(self, rhs: Fxp) -> Fxp {
        self.add_sat(rhs).0
    }
}

impl Sub for Fxp {
    type Output = Fxp;
    fn sub(self, rhs: Fxp) -> Fxp {
        self.sub_sat(rhs).0
    }
}

impl Mul for Fxp {
    type Output = Fxp;
    fn mul(self, rhs: Fxp) -> Fxp {
        self.mul_sat(rhs).0
    }
}

impl Neg for Fxp {
    type Output = Fxp;
    fn neg(self) -> Fxp {
        Fxp::ZERO - self
    }
}

impl fmt::Debug for Fxp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fxp({} = {})", self.0, self.to_real())
    }
}

impl fmt::Display for Fxp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_real(), f)
    }
}

/// Saturating ALU that counts how often it clipped.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Alu {
    saturations: Cell<u64>,
}

impl Alu {
    pub fn saturations(&self) -> u64 {
        self.saturations.get()
    }

    fn note(&self, (v, s): (Fxp, bool)) -> Fxp {
        self.saturations.set(self.saturations.get() + u64::from(s));
        v
    }

    pub fn add(&self, a: Fxp, b: Fxp) -> Fxp {
        self.note(a.add_sat(b))
    }

    pub fn sub(&self, a: Fxp, b: Fxp) -> Fxp {
        self.note(a.sub_sat(b))
    }

    pub fn mul(&self, a: Fxp, b: Fxp) -> Fxp {
        self.note(a.mul_sat(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert_eq!(Fxp::from_real(1.0).raw(), 4096);
        assert_eq!(Fxp::from_real(2f64.powi(-13)).raw(), 0);
        assert_eq!(Fxp::from_real(3.0 * 2f64.powi(-13)).raw(), 2);
        assert_eq!(Fxp::from_real(-2f64.powi(-13)).raw(), 0);
        assert_eq!(Fxp::from_real_sat(1e6), (Fxp::MAX, true));
        assert_eq!(Fxp::MAX.to_real(), 524288.0 - Fxp::ULP);
        assert_eq!(Fxp::from_real(-1e9), Fxp::MIN);
    }

    #[test]
    fn mul_examples() {
        let one = Fxp::ONE;
        assert_eq!(one * one, one);
        let half = Fxp::from_real(0.5);
        assert_eq!((half * half).to_real(), 0.25);
        let third = Fxp::from_real(1.0 / 3.0);
        assert_eq!(third.raw(), 1365);
        assert_eq!((third * Fxp::from_real(3.0)).raw(), 4095);
    }

    #[test]
    fn mul_rounds_ties_to_even() {
        // 1 * 2048 raw = 0.5 ulp exactly; 3 * 2048 raw = 1.5 ulp
        let h = Fxp::from_raw(2048);
        assert_eq!((Fxp::from_raw(1) * h).raw(), 0);
        assert_eq!((Fxp::from_raw(3) * h).raw(), 2);
        assert_eq!((Fxp::from_raw(-1) * h).raw(), 0);
        assert_eq!((Fxp::from_raw(-3) * h).raw(), -2);
    }

    #[test]
    fn alu_counts() {
        let alu = Alu::default();
        alu.add(Fxp::MAX, Fxp::ONE);
        alu.sub(Fxp::MIN, Fxp::ONE);
        alu.mul(Fxp::ONE, Fxp::ONE);
        assert_eq!(alu.saturations(), 2);
        assert_eq!(-Fxp::MIN, Fxp::MAX);
    }
}
