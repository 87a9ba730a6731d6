//! Stieltjes transforms of atom measures and their inversion.
//!
//! The convention throughout is `G(z) = E[1 / (X - z)]` for `z` in the open
//! upper half-plane, so `Im G(z) > 0` and `G(z) ~ -1/z` at infinity.

use crate::error::{Error, Result};
use crate::measures::SpectralMeasure;
use crate::scalar::{Real, C};

/// A transform value `G(z)`.
pub type TransformValue<T = f64> = C<T>;

/// A point `z` with `Im z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint<T: Real = f64>(C<T>);

impl<T: Real> HalfPlanePoint<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        if re.is_finite() && im.is_finite() && im > T::zero() {
            Ok(Self(C::new(re, im)))
        } else {
            Err(Error::InvalidPoint { re: re.as_f64(), im: im.as_f64() })
        }
    }

    pub fn from_complex(z: C<T>) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn re(&self) -> T {
        self.0.re
    }

    pub fn im(&self) -> T {
        self.0.im
    }

    pub fn value(&self) -> C<T> {
        self.0
    }

    /// `z - c` for real `c`; stays in the half-plane.
    pub fn shifted(&self, c: T) -> Self {
        Self(C::new(self.0.re - c, self.0.im))
    }

    pub fn with_im(&self, im: T) -> Result<Self> {
        Self::new(self.0.re, im)
    }
}

/// `G_m(z) = sum_k w_k / (x_k - z)`.
pub fn transform<T: Real>(m: &SpectralMeasure<T>, z: HalfPlanePoint<T>) -> TransformValue<T> {
    resolvent_mean(m, z.value())
}

/// `E[1 / (X - z)]` at an arbitrary complex `z` off the support.
#[inline]
pub(crate) fn resolvent_mean<T: Real>(m: &SpectralMeasure<T>, z: C<T>) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for (x, w) in m.atoms() {
        acc += (C::new(x, T::zero()) - z).inv() * w;
    }
    acc
}

/// Density values `Im g(x + i eps) / pi` on `x_grid`.
///
/// Tiny negative values from rounding (down to `-1e-12`) are clipped to
/// zero; anything more negative means `g` is not a Stieltjes transform and
/// is reported as [`Error::InversionFailed`].
pub fn invert_density<T, F>(mut g: F, x_grid: &[T], epsilon: T) -> Result<Vec<(T, T)>>
where
    T: Real,
    F: FnMut(HalfPlanePoint<T>) -> Result<TransformValue<T>>,
{
    if !(epsilon > T::zero() && epsilon.is_finite()) {
        return Err(Error::InvalidGrid(format!("inversion epsilon {epsilon} must be positive")));
    }
    let clip = T::tol(1e-12);
    x_grid
        .iter()
        .map(|&x| {
            let fail = |reason: String| Error::InversionFailed { x: x.as_f64(), reason };
            let z = HalfPlanePoint::new(x, epsilon).map_err(|e| fail(e.to_string()))?;
            let value = g(z).map_err(|e| fail(e.to_string()))?;
            let density = value.im / T::PI();
            if !density.is_finite() {
                return Err(fail("non-finite transform".into()));
            }
            if density < -clip {
                return Err(fail(format!("negative density {density}")));
            }
            Ok((x, density.max(T::zero())))
        })
        .collect()
}

/// Cumulative trapezoid integral of a density sampled on an increasing grid,
/// clipped to `[0, 1]`.
pub fn cdf_from_density<T: Real>(points: &[(T, T)]) -> Result<Vec<(T, T)>> {
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidGrid("x values must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(points.len());
    let mut acc = T::zero();
    let half = T::lit(0.5);
    for (i, &(x, d)) in points.iter().enumerate() {
        if i > 0 {
            let (x0, d0) = points[i - 1];
            acc += half * (d + d0) * (x - x0);
        }
        out.push((x, acc.max(T::zero()).min(T::one())));
    }
    Ok(out)
}

/// Re-discretizes a sampled CDF onto `atom_count` equal-weight atoms at the
/// quantile midpoints, normalizing by the total captured mass.
pub fn quantile_atoms<T: Real>(cdf: &[(T, T)], atom_count: usize) -> Result<SpectralMeasure<T>> {
    let total = cdf.last().map(|p| p.1).unwrap_or_else(T::zero);
    if atom_count == 0 || !(total > T::zero()) {
        return Err(Error::InvalidGrid("cdf carries no mass".into()));
    }
    let m = T::from_usize(atom_count).unwrap();
    let w = T::one() / m;
    let mut atoms = Vec::with_capacity(atom_count);
    let mut seg = 1;
    for k in 1..=atom_count {
        let u = (T::from_usize(k).unwrap() - T::lit(0.5)) / m * total;
        while seg < cdf.len() - 1 && cdf[seg].1 < u {
            seg += 1;
        }
        let (x0, f0) = cdf[seg - 1];
        let (x1, f1) = cdf[seg.min(cdf.len() - 1)];
        let x = if f1 > f0 { x0 + (x1 - x0) * ((u - f0) / (f1 - f0)).max(T::zero()).min(T::one()) } else { x1 };
        atoms.push((x, w));
    }
    SpectralMeasure::from_atoms(atoms)
}

/// Largest gap between two CDFs tabulated on the same grid.
pub fn kolmogorov_distance<T: Real>(a: &[(T, T)], b: &[(T, T)]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (p, q)| m.max((p.1 - q.1).abs()))
}
