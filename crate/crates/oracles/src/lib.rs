//! Closed-form reference values for tests. Nothing here calls the solvers.

use num_complex::Complex64;

fn upper(a: Complex64, b: Complex64) -> Complex64 {
    if a.im >= b.im {
        a
    } else {
        b
    }
}

/// Upper half-plane root of `a x^2 + b x + c = 0`. The small root comes from
/// the product of the roots to avoid cancellation.
fn upper_root(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let (p, m) = (-b + disc, -b - disc);
    let big = if p.norm() >= m.norm() { p } else { m } / (2.0 * a);
    upper(big, c / (a * big))
}

/// Transform of the semicircle law of variance `v`:
/// root of `v G^2 + z G + 1 = 0` in the upper half-plane.
pub fn semicircle_transform(v: f64, z: Complex64) -> Complex64 {
    upper_root(Complex64::new(v, 0.0), z, Complex64::new(1.0, 0.0))
}

/// CDF of the semicircle law of variance `v`.
pub fn semicircle_cdf(v: f64, x: f64) -> f64 {
    let r = 2.0 * v.sqrt();
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    let t = x / r;
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
}

/// Transform of the arcsine law on `[-2, 2]` (free sum of two symmetric
/// Bernoulli(+-1) laws): `G = +-1/sqrt(z^2 - 4)`.
pub fn arcsine_transform(z: Complex64) -> Complex64 {
    let g = (z * z - 4.0).sqrt().inv();
    upper(g, -g)
}

/// CDF of the arcsine law on `[-2, 2]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// MMSE `rho` for one class of i.i.d. signatures, load `alpha`, power `p`,
/// unit channel and noise `s2`: positive root of
/// `s2 p rho^2 + (s2 + alpha p - p) rho - 1 = 0`.
pub fn tse_hanly_rho(alpha: f64, p: f64, s2: f64) -> f64 {
    let b = s2 + alpha * p - p;
    (-b + (b * b + 4.0 * s2 * p).sqrt()) / (2.0 * s2 * p)
}

/// `G(z)` of `S S^H` for an `N x alpha N` matrix with i.i.d. entries of
/// variance `1/N` (Marchenko-Pastur). With `rho` the upper root of
/// `z rho^2 - (alpha - 1 - z) rho + 1 = 0`, `G = -(1/z)(1 - alpha rho/(1 + rho))`.
pub fn marchenko_pastur_transform(alpha: f64, z: Complex64) -> Complex64 {
    let rho = upper_root(z, z - (alpha - 1.0), Complex64::new(1.0, 0.0));
    -(Complex64::new(1.0, 0.0) - rho * alpha / (rho + 1.0)) / z
}

/// Transform of a point mass at `a`.
pub fn point_mass_transform(a: f64, z: Complex64) -> Complex64 {
    (Complex64::new(a, 0.0) - z).inv()
}

/// Largest gap between tabulated CDF values and a reference CDF.
pub fn kolmogorov_to(cdf: &[(f64, f64)], reference: impl Fn(f64) -> f64) -> f64 {
    cdf.iter().fold(0.0, |m, &(x, f)| m.max((f - reference(x)).abs()))
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let i = Complex64::new(0.0, 1.0);
        assert!((arcsine_transform(i) - Complex64::new(0.0, 1.0 / 5f64.sqrt())).norm() < 1e-15);
        assert!((tse_hanly_rho(1.0, 1.0, 0.1) - (41f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!((semicircle_cdf(1.0, 0.0) - 0.5).abs() < 1e-15);
        let g = semicircle_transform(1.0, Complex64::new(0.0, 1e6));
        assert!((g * Complex64::new(0.0, 1e6) + 1.0).norm() < 1e-9);
        // MP with alpha = 1 at large |z| behaves like -1/z
        let z = Complex64::new(0.0, 1e6);
        assert!((marchenko_pastur_transform(1.0, z) * z + 1.0).norm() < 1e-5);
    }
}
