//! Sampled finite-N realizations and the CDMA receiver quantities computed
//! on them.

use faer::complex_native::c64;
use faer::prelude::SpSolver;
use faer::Mat;
use num_complex::Complex64;
use rand::Rng;
use stieltjes_core::{CdmaScenario, HalfPlanePoint, SignatureKind, SpectralMeasure};

use crate::error::{LabError, Result};
use crate::sample::{draw_spectrum, sample_haar, sample_signatures, AtomSampler};
use crate::spectra::{conjugate_diagonal, eigendecomposition, spectrum_transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Sum,
    Product,
    Cdma,
}

/// One sampled realization.
///
/// * `Sum`: `factors[j]` is the spectrum of `X_j = V_j diag(factors[j]) V_j^H`.
/// * `Product`: `factors` are the spectra of `X_1`, `X_2`, and the single
///   Haar factor is `V_2^H V_1`.
/// * `Cdma`: `factors[j]` is the diagonal of `D_j` (square roots of the
///   channel gains), `H_j = V D_j` with the single shared `V`; `powers[j]`
///   holds `P_jk = |A_jkk|^2`.
#[derive(Debug, Clone)]
pub struct EnsembleInstance {
    pub n: usize,
    pub kind: EnsembleKind,
    pub factors: Vec<Vec<f64>>,
    pub haar_factors: Vec<Mat<c64>>,
    pub signatures: Vec<Mat<c64>>,
    pub signature_kinds: Vec<SignatureKind>,
    pub powers: Vec<Vec<f64>>,
    pub noise_variance: f64,
}

impl EnsembleInstance {
    pub fn sample_sum<R: Rng + ?Sized>(measures: &[SpectralMeasure], n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || measures.is_empty() {
            return Err(LabError::InvalidDimensions("need n >= 1 and at least one summand".into()));
        }
        let mut factors = Vec::with_capacity(measures.len());
        let mut haar_factors = Vec::with_capacity(measures.len());
        for m in measures {
            factors.push(draw_spectrum(m, n, rng));
            haar_factors.push(sample_haar(n, rng)?);
        }
        Ok(Self::plain(n, EnsembleKind::Sum, factors, haar_factors))
    }

    pub fn sample_product<R: Rng + ?Sized>(
        m1: &SpectralMeasure,
        m2: &SpectralMeasure,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        for (index, m) in [m1, m2].into_iter().enumerate() {
            if !m.is_nonnegative() {
                return Err(LabError::UnsupportedFactorSign { index });
            }
        }
        if n == 0 {
            return Err(LabError::InvalidDimensions("need n >= 1".into()));
        }
        let factors = vec![draw_spectrum(m1, n, rng), draw_spectrum(m2, n, rng)];
        let w = sample_haar(n, rng)?;
        Ok(Self::plain(n, EnsembleKind::Product, factors, vec![w]))
    }

    fn plain(n: usize, kind: EnsembleKind, factors: Vec<Vec<f64>>, haar_factors: Vec<Mat<c64>>) -> Self {
        Self {
            n,
            kind,
            factors,
            haar_factors,
            signatures: Vec::new(),
            signature_kinds: Vec::new(),
            powers: Vec::new(),
            noise_variance: 0.0,
        }
    }

    /// Number of streams `K_j` of each transmitter.
    pub fn loads(&self) -> Vec<usize> {
        self.signatures.iter().map(|s| s.ncols()).collect()
    }

    /// `H_j S_j`: column `k` is the received signature `h_jk` of stream `k`.
    pub fn effective_signatures(&self, j: usize) -> Mat<c64> {
        let d = &self.factors[j];
        let s = &self.signatures[j];
        let ds = Mat::from_fn(self.n, s.ncols(), |i, k| s.read(i, k) * d[i]);
        &self.haar_factors[0] * &ds
    }

    /// The ensemble's Hermitian matrix: the sum, the Hermitized product, or
    /// for CDMA `sum_j (H_j S_j A_j)(H_j S_j A_j)^H` without the noise term.
    pub fn signal_matrix(&self) -> Mat<c64> {
        match self.kind {
            EnsembleKind::Sum => {
                let mut out = Mat::<c64>::zeros(self.n, self.n);
                for (d, v) in self.factors.iter().zip(&self.haar_factors) {
                    out += conjugate_diagonal(v, d);
                }
                out
            }
            EnsembleKind::Product => {
                let (d1, d2) = (&self.factors[0], &self.factors[1]);
                let w = &self.haar_factors[0];
                let b = Mat::from_fn(self.n, self.n, |i, j| w.read(i, j) * (d2[i] * d1[j]).sqrt());
                &b * b.adjoint()
            }
            EnsembleKind::Cdma => {
                let mut out = Mat::<c64>::zeros(self.n, self.n);
                for j in 0..self.signatures.len() {
                    let g = self.effective_signatures(j);
                    let p = &self.powers[j];
                    let y = Mat::from_fn(self.n, g.ncols(), |i, k| g.read(i, k) * p[k].sqrt());
                    out += &y * y.adjoint();
                }
                out
            }
        }
    }

    /// `R = sigma^2 I + signal`.
    pub fn correlation_matrix(&self) -> Mat<c64> {
        let mut r = self.signal_matrix();
        for i in 0..self.n {
            r.write(i, i, r.read(i, i) + c64::new(self.noise_variance, 0.0));
        }
        r
    }
}

/// Samples a CDMA realization: `K_j = round(alpha_j n)`, one joint channel
/// atom per diagonal index, a shared Haar `V`, signatures and powers.
pub fn build_cdma<R: Rng + ?Sized>(scenario: &CdmaScenario, n: usize, rng: &mut R) -> Result<EnsembleInstance> {
    if n == 0 {
        return Err(LabError::InvalidDimensions("need n >= 1".into()));
    }
    let mut loads = Vec::with_capacity(scenario.len());
    for (j, t) in scenario.transmitters().iter().enumerate() {
        let k = (t.alpha * n as f64).round() as usize;
        if k == 0 {
            return Err(LabError::InvalidDimensions(format!("transmitter {j} gets no streams at n = {n}")));
        }
        if t.signature_kind == SignatureKind::Isometric && k > n {
            return Err(LabError::InvalidDimensions(format!("transmitter {j}: {k} isometric columns exceed n = {n}")));
        }
        loads.push(k);
    }
    let channel = scenario.channel();
    let sampler = AtomSampler::new(channel.weights());
    let mut factors = vec![Vec::with_capacity(n); scenario.len()];
    for _ in 0..n {
        let atom = channel.point(sampler.draw(rng));
        for (f, h) in factors.iter_mut().zip(atom) {
            f.push(h.sqrt());
        }
    }
    let v = sample_haar(n, rng)?;
    let mut signatures = Vec::with_capacity(scenario.len());
    let mut powers = Vec::with_capacity(scenario.len());
    for (t, &k) in scenario.transmitters().iter().zip(&loads) {
        signatures.push(sample_signatures(t.signature_kind, n, k, rng)?);
        powers.push(draw_spectrum(&t.power, k, rng));
    }
    Ok(EnsembleInstance {
        n,
        kind: EnsembleKind::Cdma,
        factors,
        haar_factors: vec![v],
        signatures,
        signature_kinds: scenario.transmitters().iter().map(|t| t.signature_kind).collect(),
        powers,
        noise_variance: scenario.noise_variance(),
    })
}

/// Per-stream MMSE quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamSinr {
    pub transmitter: usize,
    pub stream: usize,
    pub rho: f64,
    pub sinr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSinr {
    pub streams: Vec<StreamSinr>,
    /// Trace form of `rho_j`; `None` for an isometric transmitter using all
    /// `N` columns.
    pub rho_trace: Vec<Option<f64>>,
}

impl EmpiricalSinr {
    fn mean_of(&self, j: usize, f: impl Fn(&StreamSinr) -> f64) -> f64 {
        let (sum, count) =
            self.streams.iter().filter(|s| s.transmitter == j).fold((0.0, 0usize), |(a, c), s| (a + f(s), c + 1));
        sum / count as f64
    }

    pub fn mean_rho(&self, j: usize) -> f64 {
        self.mean_of(j, |s| s.rho)
    }

    pub fn mean_sinr(&self, j: usize) -> f64 {
        self.mean_of(j, |s| s.sinr)
    }
}

/// Spectral decomposition of a CDMA instance's signal matrix, from which
/// transforms, SINRs and quadratic forms at any `z` cost `O(N^2)`.
pub struct CdmaSpectrum<'a> {
    instance: &'a EnsembleInstance,
    eigenvalues: Vec<f64>,
    /// `|U^H h_jk|^2` per transmitter, `N x K_j`.
    stream_weights: Vec<Vec<Vec<f64>>>,
    /// `sum_n |(U^H V)_mn|^2 h_j[n]` per transmitter.
    channel_weights: Vec<Vec<f64>>,
}

impl<'a> CdmaSpectrum<'a> {
    pub fn new(instance: &'a EnsembleInstance) -> Result<Self> {
        if instance.kind != EnsembleKind::Cdma {
            return Err(LabError::InvalidDimensions("instance is not a CDMA ensemble".into()));
        }
        let n = instance.n;
        let (eigenvalues, u) = eigendecomposition(&instance.signal_matrix())?;
        let uh = u.adjoint().to_owned();
        let mut stream_weights = Vec::new();
        for j in 0..instance.signatures.len() {
            let w = &uh * instance.effective_signatures(j);
            stream_weights.push((0..w.ncols()).map(|k| (0..n).map(|m| w.read(m, k).norm_sqr()).collect()).collect());
        }
        let b = &uh * &instance.haar_factors[0];
        let channel_weights = instance
            .factors
            .iter()
            .map(|d| (0..n).map(|m| (0..n).map(|i| b.read(m, i).norm_sqr() * d[i] * d[i]).sum()).collect())
            .collect();
        Ok(Self { instance, eigenvalues, stream_weights, channel_weights })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `G_R^N(z)`.
    pub fn transform(&self, z: Complex64) -> Complex64 {
        spectrum_transform(&self.eigenvalues, z)
    }

    fn form(&self, weights: &[f64], z: Complex64) -> Complex64 {
        weights.iter().zip(&self.eigenvalues).map(|(w, l)| (Complex64::new(*l, 0.0) - z).inv() * *w).sum()
    }

    /// `h_jk^H (signal - z I)^{-1} h_jk` for every stream of transmitter `j`.
    pub fn quadratic_forms(&self, j: usize, z: Complex64) -> Vec<Complex64> {
        self.stream_weights[j].iter().map(|w| self.form(w, z)).collect()
    }

    /// MMSE quantities at noise level `noise_variance`.
    pub fn sinr(&self, noise_variance: f64) -> Result<EmpiricalSinr> {
        let top = self.eigenvalues.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        let bottom = self.eigenvalues.iter().fold(f64::INFINITY, |m, l| m.min(*l)) + noise_variance;
        if !(bottom > 1e-12 * top) {
            return Err(LabError::SingularCorrelation);
        }
        let z = Complex64::new(-noise_variance, 0.0);
        let n = self.instance.n;
        let mut streams = Vec::new();
        let mut rho_trace = Vec::new();
        for (j, weights) in self.stream_weights.iter().enumerate() {
            let mut q_sum = 0.0;
            for (k, w) in weights.iter().enumerate() {
                let q = self.form(w, z).re;
                q_sum += q;
                let p = self.instance.powers[j][k];
                // h^H R_d^{-1} h from q = h^H R^{-1} h, R = R_d + p h h^H
                let rho = q / (1.0 - p * q);
                streams.push(StreamSinr { transmitter: j, stream: k, rho, sinr: p * rho });
            }
            let trace = self.form(&self.channel_weights[j], z).re;
            let k = weights.len();
            rho_trace.push(match self.instance.signature_kinds[j] {
                SignatureKind::Iid => Some(trace / n as f64),
                SignatureKind::Isometric if k < n => Some((trace - q_sum) / (n - k) as f64),
                SignatureKind::Isometric => None,
            });
        }
        Ok(EmpiricalSinr { streams, rho_trace })
    }
}

/// Per-stream and per-transmitter MMSE SINR of an instance at its own noise
/// level.
pub fn empirical_sinr(instance: &EnsembleInstance) -> Result<EmpiricalSinr> {
    CdmaSpectrum::new(instance)?.sinr(instance.noise_variance)
}

/// `(1/N) tr[H_j S_j A_j^4 S_j^H H_j^H R^{-1}]` with `R = signal - z I`, by a
/// direct LU solve.
pub fn empirical_tau_iid(instance: &EnsembleInstance, j: usize, z: HalfPlanePoint) -> Result<Complex64> {
    if instance.kind != EnsembleKind::Cdma || j >= instance.signatures.len() {
        return Err(LabError::InvalidDimensions(format!("no CDMA transmitter {j} in this instance")));
    }
    if instance.signature_kinds[j] != SignatureKind::Iid {
        return Err(LabError::UnsupportedDiagnostic { index: j });
    }
    let n = instance.n;
    let zc = c64::new(z.re(), z.im());
    let mut r = instance.signal_matrix();
    for i in 0..n {
        r.write(i, i, r.read(i, i) - zc);
    }
    let g = instance.effective_signatures(j);
    let t = r.partial_piv_lu().solve(&g);
    let p = &instance.powers[j];
    let mut acc = c64::new(0.0, 0.0);
    for (k, pk) in p.iter().enumerate() {
        let mut d = c64::new(0.0, 0.0);
        for i in 0..n {
            d += g.read(i, k).conj() * t.read(i, k);
        }
        acc += d * (pk * pk);
    }
    Ok(acc.to_num_complex() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use stieltjes_core::{JointChannelMeasure, TransmitterSpec};

    fn scenario(alpha: f64, kind: SignatureKind, p: f64, h: &[f64], noise: f64) -> CdmaScenario {
        let tx = h
            .iter()
            .map(|_| TransmitterSpec::new(alpha, kind, SpectralMeasure::point_mass(p).unwrap()).unwrap())
            .collect();
        CdmaScenario::new(tx, JointChannelMeasure::point_mass(h).unwrap(), noise).unwrap()
    }

    #[test]
    fn scalar_instance_has_no_interference() {
        let (h, p, s2) = (2.0f64, 3.0, 0.5);
        let one = Mat::from_fn(1, 1, |_, _| c64::new(1.0, 0.0));
        let inst = EnsembleInstance {
            n: 1,
            kind: EnsembleKind::Cdma,
            factors: vec![vec![h.sqrt()]],
            haar_factors: vec![one.clone()],
            signatures: vec![one],
            signature_kinds: vec![SignatureKind::Iid],
            powers: vec![vec![p]],
            noise_variance: s2,
        };
        let out = empirical_sinr(&inst).unwrap();
        assert!((out.streams[0].rho - h / s2).abs() < 1e-12);
        assert!((out.streams[0].sinr - p * h / s2).abs() < 1e-12);
    }

    #[test]
    fn zero_power_gives_zero_sinr_and_zero_tau() {
        let sc = scenario(0.5, SignatureKind::Iid, 0.0, &[1.0, 2.0], 0.1);
        let inst = build_cdma(&sc, 32, &mut RngStream::new(1, 0).rng()).unwrap();
        let out = empirical_sinr(&inst).unwrap();
        assert!(out.streams.iter().all(|s| s.sinr == 0.0));
        let tau = empirical_tau_iid(&inst, 0, HalfPlanePoint::new(-0.5, 0.5).unwrap()).unwrap();
        assert_eq!(tau, Complex64::new(0.0, 0.0));
        let zero = sc.with_noise_variance(0.0).unwrap();
        let inst = build_cdma(&zero, 8, &mut RngStream::new(1, 0).rng()).unwrap();
        assert!(inst.correlation_matrix().norm_max() == 0.0);
        assert_eq!(empirical_sinr(&inst).unwrap_err(), LabError::SingularCorrelation);
    }

    #[test]
    fn isometric_signatures_are_orthonormal_and_channels_commute() {
        let sc = scenario(0.5, SignatureKind::Isometric, 1.0, &[2.0, 3.0], 0.1);
        let inst = build_cdma(&sc, 24, &mut RngStream::new(2, 0).rng()).unwrap();
        for s in &inst.signatures {
            let g = s.adjoint() * s;
            let id = Mat::<c64>::identity(s.ncols(), s.ncols());
            assert!((&g - &id).norm_max() < 1e-10);
        }
        let v = &inst.haar_factors[0];
        let hh = |j: usize| conjugate_diagonal(v, &inst.factors[j].iter().map(|d| d * d).collect::<Vec<_>>());
        let (a, b) = (hh(0), hh(1));
        assert!((&a * &b - &b * &a).norm_max() < 1e-10);
        assert!(matches!(
            empirical_tau_iid(&inst, 0, HalfPlanePoint::new(0.0, 1.0).unwrap()),
            Err(LabError::UnsupportedDiagnostic { index: 0 })
        ));
    }

    #[test]
    fn tau_trace_matches_stream_sum() {
        let sc = scenario(0.75, SignatureKind::Iid, 1.0, &[1.0], 0.1);
        let inst = build_cdma(&sc, 40, &mut RngStream::new(3, 0).rng()).unwrap();
        let z = HalfPlanePoint::new(-0.3, 0.4).unwrap();
        let tau = empirical_tau_iid(&inst, 0, z).unwrap();
        let spec = CdmaSpectrum::new(&inst).unwrap();
        let k = inst.loads()[0] as f64;
        let alpha = k / inst.n as f64;
        let sum: Complex64 = spec.quadratic_forms(0, z.value()).iter().sum();
        assert!((tau - sum * (alpha / k)).norm() < 1e-10);
    }

    #[test]
    fn marchenko_pastur_support() {
        let sc = scenario(1.0, SignatureKind::Iid, 1.0, &[1.0], 0.1);
        let inst = build_cdma(&sc, 256, &mut RngStream::new(4, 0).rng()).unwrap();
        let ev = crate::spectra::eigenvalues(&inst.correlation_matrix()).unwrap();
        assert!(ev[0] >= 0.1 - 1e-10 && *ev.last().unwrap() <= 0.1 + 4.0 + 0.2, "{:?}", (ev[0], ev.last()));
    }
}
