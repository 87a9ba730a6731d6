//! Seeded Monte Carlo drivers. Trial `t` draws from `RngStream(seed, t)`, so
//! results do not depend on scheduling.

use num_complex::Complex64;
use rayon::prelude::*;
use stieltjes_core::{CdmaScenario, HalfPlanePoint, SpectralMeasure};

use crate::error::{LabError, Result};
use crate::instance::{build_cdma, CdmaSpectrum, EnsembleInstance};
use crate::rng::RngStream;
use crate::spectra::{eigenvalues, spectrum_transform};

/// Empirical transform values, `per_trial[t][i]` at the `i`-th point.
#[derive(Debug, Clone, PartialEq)]
pub struct McSamples {
    pub per_trial: Vec<Vec<Complex64>>,
}

impl McSamples {
    pub fn mean(&self) -> Vec<Complex64> {
        let t = self.per_trial.len() as f64;
        let points = self.per_trial.first().map_or(0, Vec::len);
        (0..points).map(|i| self.per_trial.iter().map(|row| row[i]).sum::<Complex64>() / t).collect()
    }

    /// Trial-averaged `|empirical - target|` per point.
    pub fn mean_abs_gap(&self, target: &[Complex64]) -> Vec<f64> {
        let t = self.per_trial.len() as f64;
        target
            .iter()
            .enumerate()
            .map(|(i, g)| self.per_trial.iter().map(|row| (row[i] - g).norm()).sum::<f64>() / t)
            .collect()
    }
}

fn check_trials(trials: usize, n: usize) -> Result<()> {
    if trials == 0 || n == 0 {
        return Err(LabError::InvalidDimensions("need n >= 1 and trials >= 1".into()));
    }
    Ok(())
}

fn run_trials<F>(trials: usize, seed: u64, z_list: &[HalfPlanePoint], sample: F) -> Result<McSamples>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<EnsembleInstance> + Sync,
{
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let inst = sample(&mut RngStream::new(seed, t as u64).rng())?;
            let ev = eigenvalues(&inst.signal_matrix())?;
            Ok(z_list.iter().map(|z| spectrum_transform(&ev, z.value())).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(McSamples { per_trial })
}

pub fn mc_sum_transform(
    measures: &[SpectralMeasure],
    n: usize,
    z_list: &[HalfPlanePoint],
    trials: usize,
    seed: u64,
) -> Result<McSamples> {
    check_trials(trials, n)?;
    run_trials(trials, seed, z_list, |rng| EnsembleInstance::sample_sum(measures, n, rng))
}

pub fn mc_product_transform(
    m1: &SpectralMeasure,
    m2: &SpectralMeasure,
    n: usize,
    z_list: &[HalfPlanePoint],
    trials: usize,
    seed: u64,
) -> Result<McSamples> {
    check_trials(trials, n)?;
    run_trials(trials, seed, z_list, |rng| EnsembleInstance::sample_product(m1, m2, n, rng))
}

/// Empirical `G_R^N` of the noiseless CDMA signal matrix.
pub fn mc_cdma_transform(
    scenario: &CdmaScenario,
    n: usize,
    z_list: &[HalfPlanePoint],
    trials: usize,
    seed: u64,
) -> Result<McSamples> {
    check_trials(trials, n)?;
    run_trials(trials, seed, z_list, |rng| build_cdma(scenario, n, rng))
}

/// Stream-averaged MMSE quantities of one trial at one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSummary {
    pub mean_rho: Vec<f64>,
    pub mean_sinr: Vec<f64>,
    pub rho_trace: Vec<Option<f64>>,
}

/// `per_trial[t][i]` at the `i`-th noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSamples {
    pub per_trial: Vec<Vec<SinrSummary>>,
}

impl SinrSamples {
    /// Trial-averaged stream-mean SINR, `[point][transmitter]`, linear.
    pub fn mean_sinr(&self) -> Vec<Vec<f64>> {
        self.average(|s| &s.mean_sinr)
    }

    pub fn mean_rho(&self) -> Vec<Vec<f64>> {
        self.average(|s| &s.mean_rho)
    }

    fn average(&self, f: impl Fn(&SinrSummary) -> &Vec<f64>) -> Vec<Vec<f64>> {
        let t = self.per_trial.len() as f64;
        let Some(first) = self.per_trial.first() else { return Vec::new() };
        (0..first.len())
            .map(|i| {
                (0..f(&first[i]).len())
                    .map(|j| self.per_trial.iter().map(|row| f(&row[i])[j]).sum::<f64>() / t)
                    .collect()
            })
            .collect()
    }
}

/// Empirical MMSE SINR at each noise level; each trial samples one instance
/// and evaluates every level on it.
pub fn mc_cdma_sinr(
    scenario: &CdmaScenario,
    n: usize,
    noise_variances: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SinrSamples> {
    check_trials(trials, n)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let inst = build_cdma(scenario, n, &mut RngStream::new(seed, t as u64).rng())?;
            let spec = CdmaSpectrum::new(&inst)?;
            noise_variances
                .iter()
                .map(|&s2| {
                    let out = spec.sinr(s2)?;
                    let j_count = inst.signatures.len();
                    Ok(SinrSummary {
                        mean_rho: (0..j_count).map(|j| out.mean_rho(j)).collect(),
                        mean_sinr: (0..j_count).map(|j| out.mean_sinr(j)).collect(),
                        rho_trace: out.rho_trace,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SinrSamples { per_trial })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_runs() {
        let b = SpectralMeasure::from_atoms([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let z = [HalfPlanePoint::new(0.0, 1.0).unwrap()];
        let a = mc_sum_transform(&[b.clone(), b.clone()], 16, &z, 4, 9).unwrap();
        let c = mc_sum_transform(&[b.clone(), b], 16, &z, 4, 9).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.mean().len(), 1);
    }
}
