//! Limiting spectrum of `X_1 + ... + X_J` for independent unitarily
//! invariant Hermitian summands.
//!
//! The unknowns are `G(z)` and `rho_1 .. rho_J`, tied together by
//!
//! ```text
//! G = (J - 1) / (z + sum_j 1/rho_j)
//! G = E[ 1 / (X_j + 1/rho_j) ]        for every j
//! ```
//!
//! Internally each `rho_j` is carried as `omega_j = -1/rho_j`, which lives in
//! the upper half-plane and satisfies `G = E[1/(X_j - omega_j)]`. The Picard
//! map is `omega_j <- z + sum_{i != j} (F_i(omega_i) - omega_i)` with
//! `F_i(w) = -1 / E[1/(X_i - w)]`, swept Gauss-Seidel style. It maps the
//! product of upper half-planes into itself, which is what makes it usable
//! far from the solution; the engine's Newton steps take over near it.

use crate::error::{Error, Result};
use crate::measures::SpectralMeasure;
use crate::scalar::{is_finite, Real, C};
use crate::solver::{ensure_same, solve_fixed_point, SolverConfig, System};
use crate::stieltjes::{resolvent_mean, HalfPlanePoint, TransformValue};

/// Converged solution of the sum system at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumFixedPointState<T: Real = f64> {
    /// `G_C(z)`, the transform of the sum's limiting spectrum.
    pub g: TransformValue<T>,
    pub rho: Vec<C<T>>,
    pub residual: T,
    pub iterations: usize,
}

struct SumSystem<'a, T: Real> {
    measures: &'a [SpectralMeasure<T>],
    z: C<T>,
}

impl<T: Real> SumSystem<'_, T> {
    /// `F_i(w) - w`, or `None` at a zero of the transform.
    fn excess(&self, i: usize, w: C<T>) -> Option<C<T>> {
        let cauchy = -resolvent_mean(&self.measures[i], w);
        if cauchy.norm() == T::zero() {
            return None;
        }
        let v = cauchy.inv() - w;
        is_finite(v).then_some(v)
    }
}

impl<T: Real> System<T> for SumSystem<'_, T> {
    fn dim(&self) -> usize {
        self.measures.len()
    }

    fn map(&self, x: &[C<T>], out: &mut [C<T>]) -> bool {
        let mut h = Vec::with_capacity(x.len());
        for (i, &w) in x.iter().enumerate() {
            match self.excess(i, w) {
                Some(v) => h.push(v),
                None => return false,
            }
        }
        out.copy_from_slice(x);
        for j in 0..x.len() {
            let others = h.iter().enumerate().filter(|&(i, _)| i != j).fold(self.z, |acc, (_, v)| acc + v);
            out[j] = others;
            match self.excess(j, others) {
                Some(v) => h[j] = v,
                None => return false,
            }
        }
        true
    }

    fn admissible(&self, x: &[C<T>]) -> bool {
        x.iter().all(|w| is_finite(*w) && w.im > T::zero())
    }

    fn residual(&self, x: &[C<T>]) -> T {
        let rho: Vec<C<T>> = x.iter().map(|w| -w.inv()).collect();
        let g = eq23(self.z, &rho);
        sum_residual(self.measures, self.z, g, &rho)
    }
}

fn eq23<T: Real>(z: C<T>, rho: &[C<T>]) -> C<T> {
    let j = T::from_usize(rho.len()).unwrap();
    let denom = rho.iter().fold(z, |acc, r| acc + r.inv());
    denom.inv() * (j - T::one())
}

/// Maximum defect of both defining equations at `(g, rho)`; for `J = 1` only
/// the per-summand equation applies.
pub fn sum_residual<T: Real>(measures: &[SpectralMeasure<T>], z: C<T>, g: C<T>, rho: &[C<T>]) -> T {
    let mut worst = if measures.len() > 1 { (g - eq23(z, rho)).norm() } else { T::zero() };
    for (m, r) in measures.iter().zip(rho) {
        // E[1/(X + 1/rho)] = resolvent mean at -1/rho
        let d = (g - resolvent_mean(m, -r.inv())).norm();
        worst = worst.max(if d.is_nan() { T::infinity() } else { d });
    }
    worst
}

fn check_inputs<T: Real>(measures: &[SpectralMeasure<T>]) -> Result<()> {
    if measures.is_empty() {
        return Err(Error::InvalidMeasure("free sum needs at least one measure".into()));
    }
    if let Some(index) = measures.iter().position(SpectralMeasure::is_degenerate) {
        return Err(Error::DegenerateMeasure { index });
    }
    Ok(())
}

fn state_from<T: Real>(
    measures: &[SpectralMeasure<T>],
    z: C<T>,
    omega: &[C<T>],
    iterations: usize,
) -> SumFixedPointState<T> {
    let rho: Vec<C<T>> = omega.iter().map(|w| -w.inv()).collect();
    let g = eq23(z, &rho);
    let residual = sum_residual(measures, z, g, &rho);
    SumFixedPointState { g, rho, residual, iterations }
}

fn solve_from<T: Real>(
    measures: &[SpectralMeasure<T>],
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
    start: &[C<T>],
) -> Result<SumFixedPointState<T>> {
    let sys = SumSystem { measures, z: z.value() };
    let sol = solve_fixed_point(&sys, start, cfg)?;
    Ok(state_from(measures, z.value(), &sol.x, sol.iterations))
}

fn single<T: Real>(m: &SpectralMeasure<T>, z: HalfPlanePoint<T>) -> SumFixedPointState<T> {
    let g = resolvent_mean(m, z.value());
    let rho = vec![-z.value().inv()];
    let residual = sum_residual(std::slice::from_ref(m), z.value(), g, &rho);
    SumFixedPointState { g, rho, residual, iterations: 0 }
}

/// Solves the sum system at `z`, starting from `rho_j = i`.
pub fn solve_sum<T: Real>(
    measures: &[SpectralMeasure<T>],
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
) -> Result<SumFixedPointState<T>> {
    solve_sum_warm(measures, z, cfg, None)
}

/// Like [`solve_sum`], optionally warm-started from a nearby state.
pub fn solve_sum_warm<T: Real>(
    measures: &[SpectralMeasure<T>],
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
    warm: Option<&SumFixedPointState<T>>,
) -> Result<SumFixedPointState<T>> {
    check_inputs(measures)?;
    cfg.validate()?;
    if measures.len() == 1 {
        return Ok(single(&measures[0], z));
    }
    let i = C::new(T::zero(), T::one());
    let cold: Vec<C<T>> = vec![i; measures.len()];
    let start = match warm {
        Some(s) if s.rho.len() == measures.len() => s.rho.iter().map(|r| -r.inv()).collect(),
        _ => cold,
    };
    let state = solve_from(measures, z, cfg, &start)?;
    if cfg.check_uniqueness {
        let far = C::new(z.re(), T::lit(4.0) * (T::one() + z.value().norm()));
        if let Ok(other) = solve_from(measures, z, cfg, &vec![far; measures.len()]) {
            let mut a = state.rho.clone();
            a.push(state.g);
            let mut b = other.rho.clone();
            b.push(other.g);
            ensure_same(&a, &b, cfg.tolerance)?;
        }
    }
    Ok(state)
}

/// Solves along `z_list` in order, warm-starting each point from the last
/// converged state. Failures are reported per point and do not stop the
/// sweep.
pub fn solve_sum_grid<T: Real>(
    measures: &[SpectralMeasure<T>],
    z_list: &[HalfPlanePoint<T>],
    cfg: &SolverConfig<T>,
) -> Vec<Result<SumFixedPointState<T>>> {
    let mut last: Option<SumFixedPointState<T>> = None;
    z_list
        .iter()
        .enumerate()
        .map(|(index, &z)| {
            let out = solve_sum_warm(measures, z, cfg, last.as_ref()).map_err(|e| Error::at_point(index, e));
            if let Ok(s) = &out {
                last = Some(s.clone());
            }
            out
        })
        .collect()
}
