//! Floating-point scalar abstraction for the exact-geometry layer.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar used by polytope arithmetic, the LP and the volume engine.
///
/// Tolerances are given as `f64` literals and widened to a small multiple of
/// machine epsilon for narrow types, so `f32` geometry degrades gracefully
/// instead of chasing thresholds below its resolution.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Bit pattern with `-0.0` folded onto `+0.0`, for exact set membership.
    fn canonical_bits(self) -> u64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn tol(base: f64) -> Self {
        Self::of(base).max(Self::epsilon() * Self::of(64.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn canonical_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

impl Scalar for f32 {
    fn canonical_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            u64::from(self.to_bits())
        }
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn max_abs<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_has_canonical_bits() {
        assert_eq!((-0.0f64).canonical_bits(), 0.0f64.canonical_bits());
        assert_eq!((-0.0f32).canonical_bits(), 0.0f32.canonical_bits());
        assert_ne!((-1.0f64).canonical_bits(), 1.0f64.canonical_bits());
    }

    #[test]
    fn tolerance_widens_for_f32() {
        assert_eq!(<f64 as Scalar>::tol(1e-9), 1e-9);
        assert!(<f32 as Scalar>::tol(1e-9) > 1e-6);
    }
}
