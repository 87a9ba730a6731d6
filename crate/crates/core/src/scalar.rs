//! Scalar abstraction shared by every solver.
//!
//! All measure arithmetic and fixed-point iterations are written against
//! [`Real`], which is implemented for `f32` and `f64`. Complex quantities use
//! [`num_complex::Complex`] over the same scalar.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar usable by the solvers.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Default solver tolerance for this precision.
    const DEFAULT_TOLERANCE: f64;

    /// Converts an `f64` constant, saturating through `FromPrimitive`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy widening used for diagnostics and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `max(x, k * epsilon)`: an absolute tolerance that is never tighter than
    /// a few ulps of this precision.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {
    const DEFAULT_TOLERANCE: f64 = 1e-4;
}

impl Real for f64 {
    const DEFAULT_TOLERANCE: f64 = 1e-10;
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn is_finite<T: Real>(c: C<T>) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_tracks_precision() {
        assert_eq!(f64::tol(1e-12), 1e-12);
        assert!(f32::tol(1e-12) > 1e-6);
    }
}
