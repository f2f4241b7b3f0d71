//! Floating-point scalar abstraction shared by all numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// floating point: f32 or f64
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        // f32/f64 conversions from f64 never fail, they only round
        Self::from_f64(v).unwrap()
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).unwrap()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sine and cosine of an angle in degrees.
///
/// The angle is reduced by whole quarter turns before the trigonometric
/// call, so `sin_cos_deg(a - 90)` is an exact signed permutation of
/// `sin_cos_deg(a)` whenever `a - 90` is exact. Quarter-turn rotations of
/// integer-degree directions therefore permute Cartesian components
/// bit-exactly.
pub fn sin_cos_deg<T: Scalar>(deg: T) -> (T, T) {
    let ninety = T::lit(90.0);
    let quadrant = (deg / ninety + T::lit(0.5)).floor();
    let rem = deg - quadrant * ninety;
    let half = T::lit(45.0);
    // at the ±45° tie the quadrant choice differs between a and -a; equal
    // magnitudes keep both branches consistent
    let (s, c) = if rem.abs() == half {
        let h = T::FRAC_1_SQRT_2();
        (if rem > T::zero() { h } else { -h }, h)
    } else {
        rem.to_radians().sin_cos()
    };
    let q = quadrant.to_i64().unwrap_or(0).rem_euclid(4);
    match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_cos_deg_matches_std() {
        for i in -720..=720 {
            let d = i as f64 * 0.5;
            let (s, c) = sin_cos_deg(d);
            assert!((s - d.to_radians().sin()).abs() < 1e-14, "{d}");
            assert!((c - d.to_radians().cos()).abs() < 1e-14, "{d}");
        }
    }

    #[test]
    fn quarter_shift_is_exact_permutation() {
        for i in -360..360 {
            let d = i as f64 + 0.25;
            let (s, c) = sin_cos_deg(d);
            let (s2, c2) = sin_cos_deg(d - 90.0);
            assert_eq!(s2, -c);
            assert_eq!(c2, s);
        }
    }

    #[test]
    fn negation_is_exact() {
        for i in -720..=720 {
            let d = i as f64 * 0.25;
            let (s, c) = sin_cos_deg(d);
            let (s2, c2) = sin_cos_deg(-d);
            assert_eq!(s2, -s, "{d}");
            assert_eq!(c2, c, "{d}");
        }
    }

    #[test]
    fn works_for_f32() {
        let (s, c) = sin_cos_deg(30.0f32);
        assert!((s - 0.5).abs() < 1e-6);
        assert!((c - 0.866_025_4).abs() < 1e-6);
    }
}
