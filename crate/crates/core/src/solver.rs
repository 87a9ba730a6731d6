//! Solver configuration and the fixed-point engine shared by the free sum,
//! free product and CDMA systems.
//!
//! Each system supplies a holomorphic fixed-point map `x -> phi(x)` on a
//! domain of admissible points (typically a product of upper half-planes).
//! The engine alternates two kinds of step:
//!
//! * a Newton step on `phi(x) - x`, with the Jacobian taken by central
//!   differences along the real axis (exact up to truncation because the
//!   map is holomorphic), accepted only when it stays admissible and shrinks
//!   the fixed-point defect;
//! * otherwise a damped Picard step `x + d (phi(x) - x)`, halving `d` until
//!   the candidate is admissible (at most 60 halvings).
//!
//! Convergence is declared on the system's own equation residual.

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real, C};

/// Tolerance, iteration budget and Picard damping for every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T: Real = f64> {
    /// Bound on the equation residual of an accepted state.
    pub tolerance: T,
    pub max_iterations: usize,
    /// Picard relaxation in `(0, 1]`.
    pub damping: T,
    /// Re-solve from a second start and fail with
    /// [`Error::AmbiguousFixedPoint`] if the two states disagree.
    pub check_uniqueness: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(T::DEFAULT_TOLERANCE),
            max_iterations: 10_000,
            damping: T::lit(0.5),
            check_uniqueness: false,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_uniqueness_check(mut self) -> Self {
        self.check_uniqueness = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero() && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(Error::InvalidConfig(format!("damping {} must lie in (0, 1]", self.damping)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

const MAX_HALVINGS: usize = 60;
const NEWTON_BACKTRACKS: usize = 4;
/// Iterations allowed without a 1% drop of the best fixed-point defect.
const STALL_LIMIT: usize = 500;

/// A fixed-point problem in `C^n`.
pub(crate) trait System<T: Real> {
    fn dim(&self) -> usize;

    /// Writes `phi(x)` into `out`; returns `false` where `phi` is undefined.
    fn map(&self, x: &[C<T>], out: &mut [C<T>]) -> bool;

    fn admissible(&self, x: &[C<T>]) -> bool;

    /// Maximum defect of the system's defining equations at `x`.
    fn residual(&self, x: &[C<T>]) -> T;
}

#[derive(Debug, Clone)]
pub(crate) struct Solution<T: Real> {
    pub x: Vec<C<T>>,
    pub iterations: usize,
}

fn max_abs<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |m, c| m.max(c.norm()))
}

/// `phi(x) - x`, or `None` outside the map's domain.
fn defect<T: Real, S: System<T>>(sys: &S, x: &[C<T>]) -> Option<Vec<C<T>>> {
    let mut out = vec![C::new(T::zero(), T::zero()); x.len()];
    if !sys.map(x, &mut out) {
        return None;
    }
    for (o, xi) in out.iter_mut().zip(x) {
        *o -= xi;
    }
    out.iter().all(|c| is_finite(*c)).then_some(out)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense<T: Real>(mut a: Vec<C<T>>, mut b: Vec<C<T>>) -> Option<Vec<C<T>>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].norm().partial_cmp(&a[j * n + col].norm()).unwrap())?;
        if !(a[pivot * n + col].norm() > T::zero()) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = a[col * n + col].inv();
        for row in col + 1..n {
            let factor = a[row * n + col] * inv;
            if factor.norm() == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![C::new(T::zero(), T::zero()); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    x.iter().all(|c| is_finite(*c)).then_some(x)
}

/// Newton direction for `phi(x) - x = 0` at `x`, given the defect `f` there.
fn newton_direction<T: Real, S: System<T>>(sys: &S, x: &[C<T>], f: &[C<T>]) -> Option<Vec<C<T>>> {
    let n = x.len();
    let step_scale = T::epsilon().cbrt();
    let mut jac = vec![C::new(T::zero(), T::zero()); n * n];
    let mut probe = x.to_vec();
    for k in 0..n {
        let h = step_scale * T::one().max(x[k].norm());
        probe[k] = x[k] + h;
        let plus = defect(sys, &probe)?;
        probe[k] = x[k] - h;
        let minus = defect(sys, &probe)?;
        probe[k] = x[k];
        let two_h = h + h;
        for i in 0..n {
            jac[i * n + k] = (plus[i] - minus[i]) / two_h;
        }
    }
    solve_dense(jac, f.iter().map(|v| -*v).collect())
}

/// Runs the hybrid Newton/Picard iteration from `x0`.
pub(crate) fn solve_fixed_point<T: Real, S: System<T>>(
    sys: &S,
    x0: &[C<T>],
    cfg: &SolverConfig<T>,
) -> Result<Solution<T>> {
    cfg.validate()?;
    debug_assert_eq!(x0.len(), sys.dim());
    let fail = |iterations: usize, residual: T| Error::NonConvergence { iterations, residual: residual.as_f64() };

    let mut x = x0.to_vec();
    if !sys.admissible(&x) {
        return Err(fail(0, T::infinity()));
    }
    let mut residual = sys.residual(&x);
    if residual <= cfg.tolerance {
        return Ok(Solution { x, iterations: 0 });
    }
    let mut f = defect(sys, &x).ok_or_else(|| fail(0, residual))?;
    let mut best = T::infinity();
    let mut stalled = 0;

    for iteration in 1..=cfg.max_iterations {
        let f_norm = max_abs(&f);
        if f_norm < T::lit(0.99) * best {
            best = f_norm;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > STALL_LIMIT {
                return Err(fail(iteration, residual));
            }
        }
        let mut accepted = false;

        if let Some(dir) = newton_direction(sys, &x, &f) {
            let mut scale = T::one();
            for _ in 0..=NEWTON_BACKTRACKS {
                let cand: Vec<C<T>> = x.iter().zip(&dir).map(|(xi, d)| *xi + *d * scale).collect();
                if sys.admissible(&cand) {
                    if let Some(fc) = defect(sys, &cand) {
                        if max_abs(&fc) < T::lit(0.9) * f_norm {
                            x = cand;
                            f = fc;
                            accepted = true;
                            break;
                        }
                    }
                }
                scale *= T::lit(0.5);
            }
        }

        if !accepted {
            let mut d = cfg.damping;
            for _ in 0..=MAX_HALVINGS {
                let cand: Vec<C<T>> = x.iter().zip(&f).map(|(xi, fi)| *xi + *fi * d).collect();
                if sys.admissible(&cand) {
                    if let Some(fc) = defect(sys, &cand) {
                        x = cand;
                        f = fc;
                        accepted = true;
                        break;
                    }
                }
                d *= T::lit(0.5);
            }
        }
        if !accepted {
            return Err(fail(iteration, residual));
        }

        residual = sys.residual(&x);
        if !residual.is_finite() {
            return Err(fail(iteration, residual));
        }
        if residual <= cfg.tolerance {
            return Ok(Solution { x, iterations: iteration });
        }
    }
    Err(fail(cfg.max_iterations, residual))
}

/// Fails with [`Error::AmbiguousFixedPoint`] when two accepted states differ
/// by more than `100 * tolerance`.
pub(crate) fn ensure_same<T: Real>(a: &[C<T>], b: &[C<T>], tolerance: T) -> Result<()> {
    let gap = a.iter().zip(b).fold(T::zero(), |m, (p, q)| m.max((*p - *q).norm()));
    if gap > T::lit(100.0) * tolerance {
        Err(Error::AmbiguousFixedPoint { gap: gap.as_f64() })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `x = a + b / x` has roots `(a +- sqrt(a^2 + 4b)) / 2`; admissible roots
    /// are those with positive imaginary part.
    struct Quadratic {
        a: C<f64>,
        b: C<f64>,
    }

    impl System<f64> for Quadratic {
        fn dim(&self) -> usize {
            1
        }
        fn map(&self, x: &[C<f64>], out: &mut [C<f64>]) -> bool {
            out[0] = self.a + self.b / x[0];
            true
        }
        fn admissible(&self, x: &[C<f64>]) -> bool {
            x[0].im > 0.0
        }
        fn residual(&self, x: &[C<f64>]) -> f64 {
            (x[0] * x[0] - self.a * x[0] - self.b).norm()
        }
    }

    #[test]
    fn finds_the_admissible_root() {
        let sys = Quadratic { a: C::new(0.3, 1.0), b: C::new(2.0, 0.0) };
        let sol = solve_fixed_point(&sys, &[C::new(0.0, 1.0)], &SolverConfig::default()).unwrap();
        let disc = (sys.a * sys.a + sys.b * 4.0).sqrt();
        let roots = [(sys.a + disc) / 2.0, (sys.a - disc) / 2.0];
        let want = roots.iter().find(|r| r.im > 0.0).unwrap();
        assert!((sol.x[0] - want).norm() < 1e-10);
        assert!(sys.residual(&sol.x) <= 1e-10);
    }

    #[test]
    fn dense_solve_matches_hand_system() {
        let a = vec![C::new(2.0, 0.0), C::new(1.0, 1.0), C::new(0.0, -1.0), C::new(3.0, 0.0)];
        let x_true = [C::new(1.0, -2.0), C::new(0.5, 0.25)];
        let b = vec![a[0] * x_true[0] + a[1] * x_true[1], a[2] * x_true[0] + a[3] * x_true[1]];
        let x = solve_dense(a, b).unwrap();
        assert!((x[0] - x_true[0]).norm() < 1e-14 && (x[1] - x_true[1]).norm() < 1e-14);
        assert!(solve_dense(vec![C::new(0.0, 0.0); 4], vec![C::new(1.0, 0.0); 2]).is_none());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::<f64>::default().validate().is_ok());
        let bad = SolverConfig { damping: 0.0, ..SolverConfig::<f64>::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SolverConfig { tolerance: -1.0, ..SolverConfig::<f64>::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ambiguity_threshold() {
        let a = [C::new(1.0, 1.0)];
        assert!(ensure_same(&a, &[C::new(1.0 + 5e-9, 1.0)], 1e-10).is_ok());
        assert!(matches!(ensure_same(&a, &[C::new(1.1, 1.0)], 1e-10), Err(Error::AmbiguousFixedPoint { .. })));
    }
}
