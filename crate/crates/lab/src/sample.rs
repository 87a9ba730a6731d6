//! Random draws: Haar unitaries, signature matrices and i.i.d. spectra.

use faer::complex_native::c64;
use faer::Mat;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_distr::StandardNormal;
use stieltjes_core::{SignatureKind, SpectralMeasure};

use crate::error::{LabError, Result};

/// Complex Gaussian with independent real and imaginary parts of variance
/// `variance / 2` each.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> c64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64::new(s * re, s * im)
}

/// The first `k` columns of an `n x n` Haar unitary: thin QR of a complex
/// Ginibre matrix with the phases of `diag(R)` moved into `Q`.
pub fn sample_haar_columns<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Mat<c64>> {
    if n == 0 || k == 0 || k > n {
        return Err(LabError::InvalidDimensions(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let g = Mat::<c64>::from_fn(n, k, |_, _| complex_gaussian(rng, 1.0));
    let qr = g.qr();
    let mut q = qr.compute_thin_q();
    let r = qr.compute_thin_r();
    for j in 0..k {
        let d = r.read(j, j);
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c64::new(1.0, 0.0) };
        for i in 0..n {
            q.write(i, j, q.read(i, j) * phase);
        }
    }
    Ok(q)
}

/// An `n x n` Haar-distributed unitary.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mat<c64>> {
    sample_haar_columns(n, n, rng)
}

/// `n x k` signature matrix: isometric columns of a Haar unitary, or i.i.d.
/// entries of variance `1/n`.
pub fn sample_signatures<R: Rng + ?Sized>(kind: SignatureKind, n: usize, k: usize, rng: &mut R) -> Result<Mat<c64>> {
    match kind {
        SignatureKind::Isometric => sample_haar_columns(n, k, rng),
        SignatureKind::Iid => {
            if n == 0 || k == 0 {
                return Err(LabError::InvalidDimensions(format!("need n, k >= 1, got n = {n}, k = {k}")));
            }
            let var = 1.0 / n as f64;
            Ok(Mat::from_fn(n, k, |_, _| complex_gaussian(rng, var)))
        }
    }
}

/// Sampler of atom indices weighted by a measure.
pub(crate) struct AtomSampler(WeightedIndex<f64>);

impl AtomSampler {
    pub fn new(weights: &[f64]) -> Self {
        Self(WeightedIndex::new(weights).expect("measures carry positive total weight"))
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.0.sample(rng)
    }
}

/// `n` i.i.d. draws from `measure`.
pub fn draw_spectrum<R: Rng + ?Sized>(measure: &SpectralMeasure, n: usize, rng: &mut R) -> Vec<f64> {
    let sampler = AtomSampler::new(measure.weights());
    (0..n).map(|_| measure.locations()[sampler.draw(rng)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    pub(crate) fn unitarity_defect(q: &Mat<c64>) -> f64 {
        let g = q.adjoint() * q;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.read(i, j) - c64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = RngStream::new(1, 0).rng();
        for n in [1, 2, 17, 64] {
            let q = sample_haar(n, &mut rng).unwrap();
            assert!(unitarity_defect(&q) < 1e-12);
        }
        let q = sample_haar(1, &mut rng).unwrap();
        assert!((q.read(0, 0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_first_moment() {
        let mut rng = RngStream::new(2, 0).rng();
        let draws = 2000;
        let mean: f64 =
            (0..draws).map(|_| sample_haar(8, &mut rng).unwrap().read(0, 0).norm_sqr()).sum::<f64>() / draws as f64;
        assert!((mean - 0.125).abs() < 0.01, "{mean}");
    }

    #[test]
    fn signatures() {
        let mut rng = RngStream::new(3, 0).rng();
        let s = sample_signatures(SignatureKind::Isometric, 40, 13, &mut rng).unwrap();
        assert!(unitarity_defect(&s) < 1e-10);
        assert!(matches!(
            sample_signatures(SignatureKind::Isometric, 4, 5, &mut rng),
            Err(LabError::InvalidDimensions(_))
        ));
        let s = sample_signatures(SignatureKind::Iid, 256, 128, &mut rng).unwrap();
        let mean_norm: f64 =
            (0..128).map(|k| (0..256).map(|i| s.read(i, k).norm_sqr()).sum::<f64>()).sum::<f64>() / 128.0;
        assert!((mean_norm - 1.0).abs() < 0.05, "{mean_norm}");
    }

    #[test]
    fn spectrum_draws_follow_weights() {
        let m = SpectralMeasure::from_atoms([(0.0, 0.25), (1.0, 0.75)]).unwrap();
        let d = draw_spectrum(&m, 20_000, &mut RngStream::new(4, 0).rng());
        let frac = d.iter().filter(|&&x| x == 1.0).count() as f64 / d.len() as f64;
        assert!((frac - 0.75).abs() < 0.02);
    }
}
