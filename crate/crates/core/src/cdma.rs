//! Limiting spectrum of the received-signal correlation matrix
//! `R = sum_j (H_j S_j A_j)(H_j S_j A_j)^H` for jointly diagonalizable
//! channels, with i.i.d. or isometric signatures per transmitter, and the
//! MMSE SINR read off its fixed point.
//!
//! With `t_i = alpha_i pbar_i - tau_i` the system is
//!
//! ```text
//! G   = -(1/z) (1 - sum_j alpha_j rho_j P_j)
//! P_j = E[ P / (1 + P rho_j) ]
//! H_j = E[ h_j / (-z + sum_i t_i h_i) ]
//! iid:        rho_j = H_j                         tau_j = alpha_j (pbar_j - P_j)
//! isometric:  rho_j = H_j / (1 - alpha_j rho_j P_j)
//!             tau_j = alpha_j (pbar_j - P_j) - t_j^2 H_j
//! ```
//!
//! For isometric signatures the equations have several roots in the upper
//! half-plane and the admissible one depends on the load. The solver tracks
//! the right root by continuation in `Im z`: it starts far from the real
//! axis, where the map contracts onto the unique solution, and walks `Im z`
//! down geometrically, warm-starting each stage from the last.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{JointChannelMeasure, SpectralMeasure};
use crate::scalar::{is_finite, Real, C};
use crate::solver::{ensure_same, solve_fixed_point, SolverConfig, System};
use crate::stieltjes::{HalfPlanePoint, TransformValue};

/// Default imaginary offset of the SINR evaluation point.
pub const DEFAULT_SINR_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureKind {
    /// i.i.d. entries of variance `1/N`.
    Iid,
    /// `K_j <= N` columns of a Haar unitary.
    Isometric,
}

/// One transmitter: load `alpha = K/N`, signature kind and the law of the
/// per-stream received power `P = |A_kk|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitterSpec<T: Real = f64> {
    pub alpha: T,
    pub signature_kind: SignatureKind,
    pub power: SpectralMeasure<T>,
}

impl<T: Real> TransmitterSpec<T> {
    pub fn new(alpha: T, signature_kind: SignatureKind, power: SpectralMeasure<T>) -> Result<Self> {
        let spec = Self { alpha, signature_kind, power };
        spec.validate()?;
        Ok(spec)
    }

    pub fn iid(alpha: T, power: SpectralMeasure<T>) -> Result<Self> {
        Self::new(alpha, SignatureKind::Iid, power)
    }

    pub fn isometric(alpha: T, power: SpectralMeasure<T>) -> Result<Self> {
        Self::new(alpha, SignatureKind::Isometric, power)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha.is_finite()) {
            return Err(Error::InvalidScenario(format!("alpha {} must be positive", self.alpha)));
        }
        if self.signature_kind == SignatureKind::Isometric && self.alpha > T::one() {
            return Err(Error::InvalidScenario("isometric requires alpha <= 1".into()));
        }
        if !self.power.is_nonnegative() {
            return Err(Error::InvalidScenario("power law must be supported on [0, inf)".into()));
        }
        Ok(())
    }
}

/// Transmitters, the joint law of their channel gains and the noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct CdmaScenario<T: Real = f64> {
    transmitters: Vec<TransmitterSpec<T>>,
    channel: JointChannelMeasure<T>,
    noise_variance: T,
}

impl<T: Real> CdmaScenario<T> {
    pub fn new(
        transmitters: Vec<TransmitterSpec<T>>,
        channel: JointChannelMeasure<T>,
        noise_variance: T,
    ) -> Result<Self> {
        if transmitters.is_empty() {
            return Err(Error::InvalidScenario("at least one transmitter is required".into()));
        }
        for t in &transmitters {
            t.validate()?;
        }
        if channel.dimension() != transmitters.len() {
            return Err(Error::InvalidScenario(format!(
                "channel dimension {} does not match {} transmitters",
                channel.dimension(),
                transmitters.len()
            )));
        }
        if channel.atoms().any(|(h, _)| h.iter().any(|v| *v < T::zero())) {
            return Err(Error::InvalidScenario("channel atoms must be nonnegative".into()));
        }
        check_noise(noise_variance)?;
        Ok(Self { transmitters, channel, noise_variance })
    }

    pub fn transmitters(&self) -> &[TransmitterSpec<T>] {
        &self.transmitters
    }

    pub fn channel(&self) -> &JointChannelMeasure<T> {
        &self.channel
    }

    pub fn noise_variance(&self) -> T {
        self.noise_variance
    }

    pub fn len(&self) -> usize {
        self.transmitters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmitters.is_empty()
    }

    pub fn with_noise_variance(&self, noise_variance: T) -> Result<Self> {
        check_noise(noise_variance)?;
        Ok(Self { noise_variance, ..self.clone() })
    }

    /// Noise variance giving per-stream received SNR `snr_db` for the first
    /// transmitter: `sigma^2 = E[P_1] E[H_1] / snr`.
    pub fn noise_for_snr_db(&self, snr_db: T) -> T {
        let snr = T::lit(10.0).powf(snr_db / T::lit(10.0));
        self.transmitters[0].power.mean() * self.channel.marginal_mean(0) / snr
    }

    pub fn pbar(&self) -> Vec<T> {
        self.transmitters.iter().map(|t| t.power.mean()).collect()
    }

    /// Upper bound on the spectral norm of `R`.
    fn spectral_bound(&self) -> T {
        self.transmitters
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let s = T::one() + t.alpha.sqrt();
                self.channel.marginal_max(j) * t.power.max_location() * s * s
            })
            .fold(T::zero(), |a, b| a + b)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        for (index, t) in self.transmitters.iter().enumerate() {
            if t.power.is_degenerate() || !(self.channel.marginal_max(index) > T::zero()) {
                return Err(Error::DegenerateMeasure { index });
            }
        }
        Ok(())
    }
}

fn check_noise<T: Real>(noise_variance: T) -> Result<()> {
    if noise_variance >= T::zero() && noise_variance.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidScenario(format!("noise variance {noise_variance} must be finite and >= 0")))
    }
}

/// Converged solution of the system at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdmaFixedPointState<T: Real = f64> {
    /// `G_R(z)`.
    pub g: TransformValue<T>,
    pub rho: Vec<C<T>>,
    pub tau: Vec<C<T>>,
    pub cal_p: Vec<C<T>>,
    pub cal_h: Vec<C<T>>,
    pub pbar: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

/// `E[P / (1 + P rho)]`.
pub fn eval_cal_p<T: Real>(power: &SpectralMeasure<T>, rho: C<T>) -> Result<C<T>> {
    let mut acc = C::new(T::zero(), T::zero());
    for (p, w) in power.atoms() {
        let d = rho * p + T::one();
        if d.norm() == T::zero() {
            return Err(Error::EvaluationPole);
        }
        acc += d.inv() * (p * w);
    }
    Ok(acc)
}

/// `E[h_j / (-z + sum_i weights_i h_i)]` over the joint channel law.
pub fn eval_cal_h<T: Real>(
    channel: &JointChannelMeasure<T>,
    j: usize,
    weights: &[C<T>],
    z: HalfPlanePoint<T>,
) -> Result<C<T>> {
    if j >= channel.dimension() || weights.len() != channel.dimension() {
        return Err(Error::InvalidScenario(format!(
            "index {j} and {} weights do not fit a {}-dimensional channel",
            weights.len(),
            channel.dimension()
        )));
    }
    Ok(cal_h_all(channel, weights, z.value())[j])
}

fn cal_h_all<T: Real>(channel: &JointChannelMeasure<T>, weights: &[C<T>], z: C<T>) -> Vec<C<T>> {
    let mut out = vec![C::new(T::zero(), T::zero()); weights.len()];
    for (h, w) in channel.atoms() {
        let denom = h.iter().zip(weights).fold(-z, |acc, (hi, t)| acc + *t * *hi);
        let r = denom.inv() * w;
        for (o, hi) in out.iter_mut().zip(h) {
            *o += r * *hi;
        }
    }
    out
}

struct Evaluated<T: Real> {
    g: C<T>,
    cal_p: Vec<C<T>>,
    cal_h: Vec<C<T>>,
    /// Right-hand sides of the rho and tau equations.
    rho_rhs: Vec<C<T>>,
    tau_rhs: Vec<C<T>>,
}

fn evaluate<T: Real>(sc: &CdmaScenario<T>, pbar: &[T], z: C<T>, rho: &[C<T>], tau: &[C<T>]) -> Option<Evaluated<T>> {
    let cal_p =
        sc.transmitters.iter().zip(rho).map(|(t, r)| eval_cal_p(&t.power, *r).ok()).collect::<Option<Vec<_>>>()?;
    let weights: Vec<C<T>> =
        sc.transmitters.iter().zip(pbar).zip(tau).map(|((t, p), tj)| -*tj + t.alpha * *p).collect();
    let cal_h = cal_h_all(&sc.channel, &weights, z);
    let mut rho_rhs = Vec::with_capacity(rho.len());
    let mut tau_rhs = Vec::with_capacity(rho.len());
    let mut load = C::new(T::zero(), T::zero());
    for (j, t) in sc.transmitters.iter().enumerate() {
        let ap = cal_p[j] * t.alpha;
        load += ap * rho[j];
        let tau_iid = (-cal_p[j] + pbar[j]) * t.alpha;
        match t.signature_kind {
            SignatureKind::Iid => {
                rho_rhs.push(cal_h[j]);
                tau_rhs.push(tau_iid);
            }
            SignatureKind::Isometric => {
                rho_rhs.push(cal_h[j] / (-(ap * rho[j]) + T::one()));
                tau_rhs.push(tau_iid - weights[j] * weights[j] * cal_h[j]);
            }
        }
    }
    let g = -z.inv() * (-load + T::one());
    let all = rho_rhs.iter().chain(&tau_rhs).chain(&cal_h).all(|c| is_finite(*c)) && is_finite(g);
    all.then_some(Evaluated { g, cal_p, cal_h, rho_rhs, tau_rhs })
}

/// Maximum defect of the `2J + 1` defining equations at `(g, rho, tau)`,
/// with the auxiliary expectations recomputed from `rho` and `tau`.
pub fn cdma_residual<T: Real>(sc: &CdmaScenario<T>, z: C<T>, g: C<T>, rho: &[C<T>], tau: &[C<T>]) -> T {
    let pbar = sc.pbar();
    let Some(e) = evaluate(sc, &pbar, z, rho, tau) else { return T::infinity() };
    let mut worst = (g - e.g).norm();
    for j in 0..rho.len() {
        worst = worst.max((rho[j] - e.rho_rhs[j]).norm()).max((tau[j] - e.tau_rhs[j]).norm());
    }
    if worst.is_nan() {
        T::infinity()
    } else {
        worst
    }
}

struct Theorem1System<'a, T: Real> {
    sc: &'a CdmaScenario<T>,
    pbar: Vec<T>,
    z: C<T>,
    /// `Im tau` may touch zero (orthogonal signatures at full load); this
    /// much negative slack is tolerated.
    slack: T,
}

impl<T: Real> System<T> for Theorem1System<'_, T> {
    fn dim(&self) -> usize {
        2 * self.sc.len()
    }

    fn map(&self, x: &[C<T>], out: &mut [C<T>]) -> bool {
        let j = self.sc.len();
        let Some(e) = evaluate(self.sc, &self.pbar, self.z, &x[..j], &x[j..]) else { return false };
        out[..j].copy_from_slice(&e.rho_rhs);
        out[j..].copy_from_slice(&e.tau_rhs);
        true
    }

    fn admissible(&self, x: &[C<T>]) -> bool {
        let j = self.sc.len();
        if !x.iter().all(|c| is_finite(*c)) {
            return false;
        }
        if !x[..j].iter().all(|r| r.im > T::zero()) || !x[j..].iter().all(|t| t.im > -self.slack) {
            return false;
        }
        // Im G is checked on the accepted state only: near z = 0 it amplifies
        // small errors in rho by 1/|z|^2, which rejects good warm starts
        evaluate(self.sc, &self.pbar, self.z, &x[..j], &x[j..]).is_some()
    }

    fn residual(&self, x: &[C<T>]) -> T {
        let j = self.sc.len();
        let Some(e) = evaluate(self.sc, &self.pbar, self.z, &x[..j], &x[j..]) else { return T::infinity() };
        let worst =
            x.iter().zip(e.rho_rhs.iter().chain(&e.tau_rhs)).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        if worst.is_nan() {
            T::infinity()
        } else {
            worst
        }
    }
}

fn system<'a, T: Real>(sc: &'a CdmaScenario<T>, z: C<T>, cfg: &SolverConfig<T>) -> Theorem1System<'a, T> {
    Theorem1System { sc, pbar: sc.pbar(), z, slack: cfg.tolerance }
}

fn state_from<T: Real>(
    sc: &CdmaScenario<T>,
    z: C<T>,
    x: &[C<T>],
    iterations: usize,
    tolerance: T,
) -> Result<CdmaFixedPointState<T>> {
    let j = sc.len();
    let pbar = sc.pbar();
    let e = evaluate(sc, &pbar, z, &x[..j], &x[j..]).ok_or(Error::EvaluationPole)?;
    let residual = cdma_residual(sc, z, e.g, &x[..j], &x[j..]);
    // G carries the residual of rho amplified by up to 1/|z|
    let slack = T::lit(100.0) * tolerance * (T::one() + e.g.norm()) * T::one().max(z.norm().recip());
    if !(e.g.im > -slack) {
        return Err(Error::NonConvergence { iterations, residual: residual.as_f64() });
    }
    Ok(CdmaFixedPointState {
        g: e.g,
        rho: x[..j].to_vec(),
        tau: x[j..].to_vec(),
        cal_p: e.cal_p,
        cal_h: e.cal_h,
        pbar,
        residual,
        iterations,
    })
}

/// Large-`|z|` asymptotics: `rho_j ~ -E[h_j]/z`, `tau_j ~ alpha_j E[P_j^2] rho_j`.
fn far_start<T: Real>(sc: &CdmaScenario<T>, z: C<T>) -> Vec<C<T>> {
    let rho: Vec<C<T>> = (0..sc.len()).map(|j| -z.inv() * sc.channel.marginal_mean(j)).collect();
    let tau = sc.transmitters.iter().zip(&rho).map(|(t, r)| *r * (t.alpha * t.power.second_moment()));
    rho.iter().copied().chain(tau).collect()
}

/// Walks `Im z` down from far above the spectrum to the target.
fn solve_by_continuation<T: Real>(
    sc: &CdmaScenario<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
) -> Result<CdmaFixedPointState<T>> {
    let target = z.im();
    let two = T::lit(2.0);
    let mut y = target.max(two * (T::one() + z.re().abs() + sc.spectral_bound()));
    let mut x = far_start(sc, C::new(z.re(), y));
    let mut solved_y: Option<T> = None;
    let mut ratio = T::lit(0.25);
    let mut total = 0;
    loop {
        let zc = C::new(z.re(), y);
        match solve_fixed_point(&system(sc, zc, cfg), &x, cfg) {
            Ok(sol) => {
                total += sol.iterations;
                x = sol.x;
                if y <= target {
                    return state_from(sc, zc, &x, total, cfg.tolerance);
                }
                solved_y = Some(y);
                ratio = (ratio * ratio).max(T::lit(0.25));
                y = (y * ratio).max(target);
            }
            Err(err) => {
                let Some(last) = solved_y else { return Err(err) };
                total += match err {
                    Error::NonConvergence { iterations, .. } => iterations,
                    _ => 0,
                };
                ratio = ratio.sqrt();
                if ratio > T::lit(0.99) {
                    let residual = system(sc, zc, cfg).residual(&x).as_f64();
                    return Err(Error::NonConvergence { iterations: total, residual });
                }
                y = (last * ratio).max(target);
            }
        }
    }
}

/// Solves the system at `z`.
pub fn solve_theorem1<T: Real>(
    sc: &CdmaScenario<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
) -> Result<CdmaFixedPointState<T>> {
    solve_theorem1_warm(sc, z, cfg, None)
}

/// Like [`solve_theorem1`], first trying a Newton/Picard solve from `warm`
/// and falling back to continuation if that fails.
pub fn solve_theorem1_warm<T: Real>(
    sc: &CdmaScenario<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
    warm: Option<&CdmaFixedPointState<T>>,
) -> Result<CdmaFixedPointState<T>> {
    sc.check_nondegenerate()?;
    cfg.validate()?;
    let from_warm = warm.filter(|w| w.rho.len() == sc.len()).and_then(|w| {
        let x0: Vec<C<T>> = w.rho.iter().chain(&w.tau).copied().collect();
        let sol = solve_fixed_point(&system(sc, z.value(), cfg), &x0, cfg).ok()?;
        state_from(sc, z.value(), &sol.x, sol.iterations, cfg.tolerance).ok()
    });
    let state = match from_warm {
        Some(s) => s,
        None => solve_by_continuation(sc, z, cfg)?,
    };
    if cfg.check_uniqueness {
        let i = C::new(T::zero(), T::one());
        let x0 = vec![i; 2 * sc.len()];
        if let Ok(sol) = solve_fixed_point(&system(sc, z.value(), cfg), &x0, cfg) {
            let a: Vec<C<T>> = state.rho.iter().chain(&state.tau).copied().collect();
            ensure_same(&a, &sol.x, cfg.tolerance)?;
        }
    }
    Ok(state)
}

/// Converts a state solved at `-sigma^2 + i epsilon` into the SINR of a
/// stream of transmitter `j` received at `power_level`.
pub fn sinr_from_state<T: Real>(state: &CdmaFixedPointState<T>, j: usize, power_level: T, epsilon: T) -> Result<T> {
    let rho = *state.rho.get(j).ok_or_else(|| Error::InvalidScenario(format!("transmitter index {j} out of range")))?;
    // Im rho ~ epsilon * |d rho / dz|, which grows like (Re rho)^2 away from the
    // spectrum and without bound at its edge
    let bound = T::lit(1e3) * epsilon * T::one().max(rho.re * rho.re);
    if !(rho.im.abs() < bound) {
        return Err(Error::SpectralEdge { im_rho: rho.im.as_f64(), bound: bound.as_f64() });
    }
    Ok(power_level * rho.re)
}

fn sinr_point<T: Real>(sc: &CdmaScenario<T>, epsilon: T) -> Result<HalfPlanePoint<T>> {
    if !(epsilon > T::zero() && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("epsilon {epsilon} must be positive")));
    }
    HalfPlanePoint::new(-sc.noise_variance(), epsilon)
}

/// Asymptotic MMSE output SINR `power_level * rho_j` at `z = -sigma^2 + i epsilon`.
pub fn sinr<T: Real>(sc: &CdmaScenario<T>, power_level: T, j: usize, epsilon: T, cfg: &SolverConfig<T>) -> Result<T> {
    let t =
        sc.transmitters.get(j).ok_or_else(|| Error::InvalidScenario(format!("transmitter index {j} out of range")))?;
    let near = |x: T| (x - power_level).abs() <= T::tol(1e-9) * (T::one() + power_level.abs());
    if !t.power.locations().iter().any(|&p| near(p)) {
        log::warn!("power level {power_level} is not an atom of transmitter {j}'s power law");
    }
    let z = sinr_point(sc, epsilon)?;
    let state = solve_theorem1(sc, z, cfg)?;
    sinr_from_state(&state, j, power_level, epsilon)
}

/// SINR of every transmitter (at its mean power) at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSweepPoint<T: Real = f64> {
    pub snr_db: T,
    pub noise_variance: T,
    /// Linear SINR per transmitter.
    pub sinr: Vec<T>,
    pub state: CdmaFixedPointState<T>,
}

impl<T: Real> SinrSweepPoint<T> {
    /// `(snr_db, transmitter, sinr_db)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (T, usize, T)> + '_ {
        self.sinr.iter().enumerate().map(|(j, s)| (self.snr_db, j, to_db(*s)))
    }
}

pub fn to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// SINR against SNR for `template` with its noise variance replaced per
/// point, warm-starting each solve from the previous point. Failures are
/// reported per point.
pub fn sinr_sweep<T: Real>(
    template: &CdmaScenario<T>,
    snr_db_list: &[T],
    epsilon: T,
    cfg: &SolverConfig<T>,
) -> Vec<Result<SinrSweepPoint<T>>> {
    let mut last: Option<CdmaFixedPointState<T>> = None;
    snr_db_list
        .iter()
        .enumerate()
        .map(|(index, &snr_db)| {
            let run = || -> Result<SinrSweepPoint<T>> {
                let noise_variance = template.noise_for_snr_db(snr_db);
                let sc = template.with_noise_variance(noise_variance)?;
                let z = sinr_point(&sc, epsilon)?;
                let state = solve_theorem1_warm(&sc, z, cfg, last.as_ref())?;
                let sinr = (0..sc.len())
                    .map(|j| sinr_from_state(&state, j, state.pbar[j], epsilon))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SinrSweepPoint { snr_db, noise_variance, sinr, state })
            };
            let out = run().map_err(|e| Error::at_point(index, e));
            if let Ok(p) = &out {
                last = Some(p.state.clone());
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(a: f64) -> SpectralMeasure {
        SpectralMeasure::point_mass(a).unwrap()
    }

    fn single(alpha: f64, kind: SignatureKind, p: f64, h: f64, noise: f64) -> CdmaScenario {
        CdmaScenario::new(
            vec![TransmitterSpec::new(alpha, kind, pm(p)).unwrap()],
            JointChannelMeasure::point_mass(&[h]).unwrap(),
            noise,
        )
        .unwrap()
    }

    fn z(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn cal_p_values() {
        assert!((eval_cal_p(&pm(1.0), C::new(1.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        let m = SpectralMeasure::<f64>::from_atoms([(1.0, 0.5), (4.0, 0.5)]).unwrap();
        assert!((eval_cal_p(&m, C::new(0.0, 0.0)).unwrap() - 2.5).norm() < 1e-15);
        let v = eval_cal_p(&m, C::new(0.0, 1.0)).unwrap();
        assert!((v.re - 0.36765).abs() < 1e-5 && (v.im + 0.72059).abs() < 1e-5);
        assert_eq!(eval_cal_p(&pm(1.0), C::new(-1.0, 0.0)), Err(Error::EvaluationPole));
    }

    #[test]
    fn cal_h_values() {
        let zero = C::new(0.0, 0.0);
        let ch = JointChannelMeasure::point_mass(&[1.0, 1.0]).unwrap();
        let v = eval_cal_h(&ch, 0, &[zero, zero], z(0.0, 1.0)).unwrap();
        assert!((v - C::new(0.0, 1.0)).norm() < 1e-15);
        let ch = JointChannelMeasure::point_mass(&[2.0, 3.0]).unwrap();
        let one = C::new(1.0, 0.0);
        let v = eval_cal_h(&ch, 1, &[one, one], z(0.0, 1.0)).unwrap();
        assert!((v.re - 0.57692).abs() < 1e-5 && (v.im - 0.11538).abs() < 1e-5);
        assert!(eval_cal_h(&ch, 2, &[one, one], z(0.0, 1.0)).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(matches!(
            TransmitterSpec::isometric(1.5, pm(1.0)),
            Err(Error::InvalidScenario(msg)) if msg == "isometric requires alpha <= 1"
        ));
        assert!(TransmitterSpec::iid(0.0, pm(1.0)).is_err());
        assert!(TransmitterSpec::iid(1.0, pm(-1.0)).is_err());
        let t = TransmitterSpec::iid(1.0, pm(1.0)).unwrap();
        let ch = JointChannelMeasure::point_mass(&[1.0, 1.0]).unwrap();
        assert!(CdmaScenario::new(vec![t.clone()], ch, 0.1).is_err());
        let ch = JointChannelMeasure::point_mass(&[1.0]).unwrap();
        assert!(CdmaScenario::new(vec![t], ch, -0.1).is_err());
    }

    #[test]
    fn tse_hanly_instance() {
        let sc = single(1.0, SignatureKind::Iid, 1.0, 1.0, 0.1);
        let s = solve_theorem1(&sc, z(-0.1, 1e-8), &SolverConfig::default()).unwrap();
        let want = (41f64.sqrt() - 1.0) / 2.0;
        assert!((s.rho[0].re - want).abs() < 1e-8, "{:?}", s.rho[0]);
        assert!(s.rho[0].im.abs() < 1e-6);
        assert!(s.residual <= 1e-10);
        let v = sinr(&sc, 1.0, 0, DEFAULT_SINR_EPSILON, &SolverConfig::default()).unwrap();
        assert!((to_db(v) - 4.317).abs() < 1e-3);
    }

    #[test]
    fn vanishing_load_is_matched_filter() {
        let sc = single(1e-6, SignatureKind::Iid, 4.0, 1.0, 1.0);
        let s = solve_theorem1(&sc, z(-1.0, 1e-8), &SolverConfig::default()).unwrap();
        assert!((s.rho[0].re - 1.0).abs() < 1e-4);
        let v = sinr(&sc, 4.0, 0, DEFAULT_SINR_EPSILON, &SolverConfig::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-3);
        assert_eq!(sinr(&sc, 0.0, 0, DEFAULT_SINR_EPSILON, &SolverConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_signatures_have_no_interference() {
        for alpha in [0.3, 0.9, 1.0] {
            let sc = single(alpha, SignatureKind::Isometric, 1.0, 1.0, 0.2);
            let s = solve_theorem1(&sc, z(-0.2, 1e-8), &SolverConfig::default()).unwrap();
            assert!((s.rho[0].re - 5.0).abs() < 1e-7, "alpha {alpha}: {:?}", s.rho[0]);
        }
    }

    #[test]
    fn transform_is_herglotz_off_axis() {
        let sc = single(0.7, SignatureKind::Isometric, 2.0, 1.0, 0.1);
        let s = solve_theorem1(&sc, z(0.5, 0.3), &SolverConfig::default()).unwrap();
        assert!(s.g.im > 0.0 && s.rho[0].im > 0.0 && s.tau[0].im > 0.0);
        assert!(cdma_residual(&sc, C::new(0.5, 0.3), s.g, &s.rho, &s.tau) <= 1e-10);
    }

    #[test]
    fn spectral_edge_is_reported() {
        // no noise: -sigma^2 = 0 is an atom of the spectrum at load < 1
        let sc = single(0.5, SignatureKind::Iid, 1.0, 1.0, 0.0);
        let err = sinr(&sc, 1.0, 0, 1e-8, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SpectralEdge { .. }), "{err:?}");
    }

    #[test]
    fn sweep_is_monotone() {
        let sc = single(0.8, SignatureKind::Iid, 1.0, 1.0, 1.0);
        let snr: Vec<f64> = (0..6).map(|k| 4.0 * k as f64).collect();
        let out = sinr_sweep(&sc, &snr, 1e-8, &SolverConfig::default());
        let v: Vec<f64> = out.into_iter().map(|p| p.unwrap().sinr[0]).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]), "{v:?}");
    }
}
