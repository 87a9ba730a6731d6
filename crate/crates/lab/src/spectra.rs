//! Sum and product ensembles and their empirical Stieltjes transforms.

use faer::complex_native::c64;
use faer::{Mat, Side};
use num_complex::Complex64;
use rand::Rng;
use stieltjes_core::{HalfPlanePoint, SpectralMeasure};

use crate::error::{LabError, Result};
use crate::instance::EnsembleInstance;

/// Largest entry of `M - M^H`, relative to `max(1, max |M_ij|)`.
pub fn hermitian_defect(m: &Mat<c64>) -> f64 {
    let mut defect = 0.0f64;
    let mut scale = 1.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let a = m.read(i, j);
            scale = scale.max(a.norm());
            defect = defect.max((a - m.read(j, i).conj()).norm());
        }
    }
    defect / scale
}

fn symmetrized(m: &Mat<c64>) -> Result<Mat<c64>> {
    if m.nrows() != m.ncols() {
        return Err(LabError::InvalidDimensions(format!("{} x {} matrix is not square", m.nrows(), m.ncols())));
    }
    let defect = hermitian_defect(m);
    if defect > 1e-10 {
        return Err(LabError::NotHermitian { defect });
    }
    Ok(Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m.read(i, j) + m.read(j, i).conj()) * 0.5))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    Ok(symmetrized(m)?.selfadjoint_eigenvalues(Side::Lower))
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub(crate) fn eigendecomposition(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let eig = symmetrized(m)?.selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let values = (0..s.nrows()).map(|i| s.read(i).re).collect();
    Ok((values, eig.u().to_owned()))
}

/// `(1/N) sum_k 1/(lambda_k - z)` over a spectrum.
pub fn spectrum_transform(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    let sum: Complex64 = eigenvalues.iter().map(|&l| (Complex64::new(l, 0.0) - z).inv()).sum();
    sum / eigenvalues.len() as f64
}

/// `(1/N) tr[(M - z I)^{-1}]` for Hermitian `M`.
pub fn empirical_stieltjes(m: &Mat<c64>, z: HalfPlanePoint) -> Result<Complex64> {
    Ok(spectrum_transform(&eigenvalues(m)?, z.value()))
}

/// `V diag(d) V^H`.
pub(crate) fn conjugate_diagonal(v: &Mat<c64>, d: &[f64]) -> Mat<c64> {
    let vd = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v.read(i, j) * d[j]);
    &vd * v.adjoint()
}

/// `sum_j V_j D_j V_j^H` with independent Haar `V_j` and `D_j` holding `n`
/// i.i.d. draws from `measures[j]`.
pub fn build_sum<R: Rng + ?Sized>(measures: &[SpectralMeasure], n: usize, rng: &mut R) -> Result<Mat<c64>> {
    Ok(EnsembleInstance::sample_sum(measures, n, rng)?.signal_matrix())
}

/// A Hermitian matrix isospectral to `X_1 X_2`.
///
/// `X_2^{1/2} X_1 X_2^{1/2}` with `X_i = V_i D_i V_i^H` is unitarily
/// equivalent to `B B^H`, `B = D_2^{1/2} W D_1^{1/2}`, where `W = V_2^H V_1`
/// is again Haar; that form is built directly.
pub fn build_product_hermitized<R: Rng + ?Sized>(
    m1: &SpectralMeasure,
    m2: &SpectralMeasure,
    n: usize,
    rng: &mut R,
) -> Result<Mat<c64>> {
    Ok(EnsembleInstance::sample_product(m1, m2, n, rng)?.signal_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sample::sample_haar;

    fn z(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn trivial_transforms() {
        let id = Mat::<c64>::identity(5, 5);
        let g = empirical_stieltjes(&id, z(0.0, 1.0)).unwrap();
        assert!((g - Complex64::new(0.5, 0.5)).norm() < 1e-14);
        let g = empirical_stieltjes(&Mat::<c64>::zeros(4, 4), z(0.0, 1.0)).unwrap();
        assert!((g - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m.write(0, 1, c64::new(1.0, 0.0));
        assert!(matches!(empirical_stieltjes(&m, z(0.0, 1.0)), Err(LabError::NotHermitian { .. })));
    }

    #[test]
    fn conjugated_signs_keep_their_spectrum() {
        let mut rng = RngStream::new(5, 0).rng();
        let n = 32;
        let d: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let m = conjugate_diagonal(&sample_haar(n, &mut rng).unwrap(), &d);
        let g = empirical_stieltjes(&m, z(0.0, 1.0)).unwrap();
        assert!((g - Complex64::new(0.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn point_mass_sums_and_products() {
        let mut rng = RngStream::new(6, 0).rng();
        let pm = |a: f64| SpectralMeasure::point_mass(a).unwrap();
        let s = build_sum(&[pm(2.0), pm(3.0)], 16, &mut rng).unwrap();
        assert!(eigenvalues(&s).unwrap().iter().all(|l| (l - 5.0).abs() < 1e-12));
        let p = build_product_hermitized(&pm(2.0), &pm(3.0), 16, &mut rng).unwrap();
        assert!(eigenvalues(&p).unwrap().iter().all(|l| (l - 6.0).abs() < 1e-12));
        assert!(matches!(
            build_product_hermitized(&pm(-1.0), &pm(3.0), 4, &mut rng),
            Err(LabError::UnsupportedFactorSign { index: 0 })
        ));
    }
}
