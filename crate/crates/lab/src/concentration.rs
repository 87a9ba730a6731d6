//! Concentration of quadratic forms in random vectors independent of the
//! matrix: `s^H X s` against its normalized trace.

use faer::complex_native::c64;
use faer::Mat;
use rand::Rng;
use stieltjes_core::SpectralMeasure;

use crate::error::{LabError, Result};
use crate::sample::{complex_gaussian, draw_spectrum, sample_haar, sample_haar_columns};
use crate::spectra::conjugate_diagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationStats {
    pub max: f64,
    pub mean: f64,
    pub trials: usize,
}

impl ConcentrationStats {
    fn from_deviations(d: &[f64]) -> Self {
        let max = d.iter().fold(0.0f64, |m, v| m.max(*v));
        Self { max, mean: d.iter().sum::<f64>() / d.len() as f64, trials: d.len() }
    }
}

/// `X = V diag(d) V^H` with `d` drawn from `measure`.
fn fixed_matrix<R: Rng + ?Sized>(measure: &SpectralMeasure, n: usize, rng: &mut R) -> Result<Mat<c64>> {
    let d = draw_spectrum(measure, n, rng);
    Ok(conjugate_diagonal(&sample_haar(n, rng)?, &d))
}

fn form(x: &Mat<c64>, xq: &Mat<c64>, q: &Mat<c64>, col: usize) -> f64 {
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        acc += q.read(i, col).conj() * xq.read(i, col);
    }
    acc.re
}

/// Deviation `|s^H X s - tr[P X]/(n - k)|` over `trials` draws, where
/// `[S s]` are the first `k + 1` columns of a fresh Haar unitary and
/// `P = I - S S^H`. `X` is sampled once and held fixed.
pub fn concentration_check<R: Rng + ?Sized>(
    measure: &SpectralMeasure,
    n: usize,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<ConcentrationStats> {
    if k >= n || trials == 0 {
        return Err(LabError::InvalidDimensions(format!("need k < n and trials >= 1, got n = {n}, k = {k}")));
    }
    let x = fixed_matrix(measure, n, rng)?;
    let trace: f64 = (0..n).map(|i| x.read(i, i).re).sum();
    let mut dev = Vec::with_capacity(trials);
    for _ in 0..trials {
        let q = sample_haar_columns(n, k + 1, rng)?;
        let xq = &x * &q;
        let used: f64 = (0..k).map(|c| form(&x, &xq, &q, c)).sum();
        let s_form = form(&x, &xq, &q, k);
        dev.push((s_form - (trace - used) / (n - k) as f64).abs());
    }
    Ok(ConcentrationStats::from_deviations(&dev))
}

/// Deviation `|y^H X y - tr[X]/n|` for `y` with i.i.d. entries of variance
/// `1/n`.
pub fn concentration_check_iid<R: Rng + ?Sized>(
    measure: &SpectralMeasure,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<ConcentrationStats> {
    if n == 0 || trials == 0 {
        return Err(LabError::InvalidDimensions("need n >= 1 and trials >= 1".into()));
    }
    let x = fixed_matrix(measure, n, rng)?;
    let trace: f64 = (0..n).map(|i| x.read(i, i).re).sum();
    let var = 1.0 / n as f64;
    let mut dev = Vec::with_capacity(trials);
    for _ in 0..trials {
        let y = Mat::from_fn(n, 1, |_, _| complex_gaussian(rng, var));
        let xy = &x * &y;
        dev.push((form(&x, &xy, &y, 0) - trace / n as f64).abs());
    }
    Ok(ConcentrationStats::from_deviations(&dev))
}
