//! Limiting spectrum of `X_1 X_2` for independent unitarily invariant
//! factors, and a left-fold over more factors through Stieltjes inversion.
//!
//! The unknowns are `G(z)`, `pi_1`, `pi_2` with
//!
//! ```text
//! G = -(1/z) E[ 1 / (1 + pi_j X_j) ]      j = 1, 2
//! G = 1 / (z (z pi_1 pi_2 - 1))
//! ```
//!
//! The iteration works with `u_j = -1/pi_j`, for which the first equation
//! reads `-z G = u_j C_j(u_j)` with `C_j(u) = E[1/(u - X_j)]`, and the second
//! `u_1 u_2 = z y / (y - 1)` with `y = -z G`. The Picard sweep is
//! `u_2 <- z y_1 / ((y_1 - 1) u_1)`, then `u_1 <- z y_2 / ((y_2 - 1) u_2)`,
//! the multiplicative analogue of the additive subordination map.

use crate::error::{Error, Result};
use crate::measures::SpectralMeasure;
use crate::scalar::{is_finite, Real, C};
use crate::solver::{ensure_same, solve_fixed_point, SolverConfig, System};
use crate::stieltjes::{
    cdf_from_density, invert_density, quantile_atoms, resolvent_mean, HalfPlanePoint, TransformValue,
};

/// Converged solution of the product system at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFixedPointState<T: Real = f64> {
    /// `G_B(z)`.
    pub g: TransformValue<T>,
    pub pi1: C<T>,
    pub pi2: C<T>,
    pub residual: T,
    pub iterations: usize,
}

struct ProductSystem<'a, T: Real> {
    m1: &'a SpectralMeasure<T>,
    m2: &'a SpectralMeasure<T>,
    z: C<T>,
    nonnegative: bool,
}

fn eq46<T: Real>(z: C<T>, pi1: C<T>, pi2: C<T>) -> C<T> {
    (z * (z * pi1 * pi2 - T::one())).inv()
}

/// `y = u C(u)` mapped to the partner variable `z y / ((y - 1) u)`.
fn partner<T: Real>(m: &SpectralMeasure<T>, u: C<T>, z: C<T>) -> Option<C<T>> {
    let y = -u * resolvent_mean(m, u);
    let v = z * y / ((y - T::one()) * u);
    is_finite(v).then_some(v)
}

impl<T: Real> System<T> for ProductSystem<'_, T> {
    fn dim(&self) -> usize {
        2
    }

    fn map(&self, x: &[C<T>], out: &mut [C<T>]) -> bool {
        let Some(u2) = partner(self.m1, x[0], self.z) else { return false };
        let Some(u1) = partner(self.m2, u2, self.z) else { return false };
        out[0] = u1;
        out[1] = u2;
        true
    }

    fn admissible(&self, x: &[C<T>]) -> bool {
        if !x.iter().all(|u| is_finite(*u) && u.norm() > T::zero()) {
            return false;
        }
        if self.nonnegative && !x.iter().all(|u| u.im > T::zero()) {
            return false;
        }
        let g = eq46(self.z, -x[0].inv(), -x[1].inv());
        is_finite(g) && g.im > T::zero()
    }

    fn residual(&self, x: &[C<T>]) -> T {
        let (pi1, pi2) = (-x[0].inv(), -x[1].inv());
        product_residual(self.m1, self.m2, self.z, eq46(self.z, pi1, pi2), pi1, pi2)
    }
}

/// Maximum defect of both branches of the per-factor equation and of the
/// coupling equation at `(g, pi1, pi2)`.
pub fn product_residual<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    z: C<T>,
    g: C<T>,
    pi1: C<T>,
    pi2: C<T>,
) -> T {
    let one = C::new(T::one(), T::zero());
    let branch = |m: &SpectralMeasure<T>, pi: C<T>| -z.inv() * m.expect(|x| (one + pi * x).inv());
    let d = [(g - branch(m1, pi1)).norm(), (g - branch(m2, pi2)).norm(), (g - eq46(z, pi1, pi2)).norm()];
    d.iter().fold(T::zero(), |m, &v| if v.is_nan() { T::infinity() } else { m.max(v) })
}

fn check_inputs<T: Real>(m1: &SpectralMeasure<T>, m2: &SpectralMeasure<T>) -> Result<()> {
    for (index, m) in [m1, m2].into_iter().enumerate() {
        if m.is_degenerate() {
            return Err(Error::DegenerateMeasure { index });
        }
    }
    Ok(())
}

fn solve_from<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
    start: [C<T>; 2],
) -> Result<ProductFixedPointState<T>> {
    let sys = ProductSystem { m1, m2, z: z.value(), nonnegative: m1.is_nonnegative() && m2.is_nonnegative() };
    let sol = solve_fixed_point(&sys, &start, cfg)?;
    let (pi1, pi2) = (-sol.x[0].inv(), -sol.x[1].inv());
    let g = eq46(z.value(), pi1, pi2);
    Ok(ProductFixedPointState { g, pi1, pi2, residual: sys.residual(&sol.x), iterations: sol.iterations })
}

/// Solves the product system at `z`, starting from `pi_1 = pi_2 = -1/z`.
pub fn solve_product<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
) -> Result<ProductFixedPointState<T>> {
    solve_product_warm(m1, m2, z, cfg, None)
}

pub fn solve_product_warm<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    z: HalfPlanePoint<T>,
    cfg: &SolverConfig<T>,
    warm: Option<&ProductFixedPointState<T>>,
) -> Result<ProductFixedPointState<T>> {
    check_inputs(m1, m2)?;
    cfg.validate()?;
    let cold = [z.value(), z.value()];
    let start = warm.map_or(cold, |s| [-s.pi1.inv(), -s.pi2.inv()]);
    let state = match solve_from(m1, m2, z, cfg, start) {
        Err(_) if warm.is_some() => solve_from(m1, m2, z, cfg, cold)?,
        other => other?,
    };
    if cfg.check_uniqueness {
        let far = C::new(T::zero(), T::one());
        if let Ok(other) = solve_from(m1, m2, z, cfg, [far, far]) {
            ensure_same(&[state.g, state.pi1, state.pi2], &[other.g, other.pi1, other.pi2], cfg.tolerance)?;
        }
    }
    Ok(state)
}

/// Solves along `z_list` with warm starts; failures are reported per point.
pub fn solve_product_grid<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    z_list: &[HalfPlanePoint<T>],
    cfg: &SolverConfig<T>,
) -> Vec<Result<ProductFixedPointState<T>>> {
    let mut last: Option<ProductFixedPointState<T>> = None;
    z_list
        .iter()
        .enumerate()
        .map(|(index, &z)| {
            let out = solve_product_warm(m1, m2, z, cfg, last.as_ref()).map_err(|e| Error::at_point(index, e));
            if let Ok(s) = &out {
                last = Some(s.clone());
            }
            out
        })
        .collect()
}

/// Inversion settings for [`solve_product_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOptions<T: Real = f64> {
    /// Inversion grid used for every link. When `None`, each link uses
    /// `grid_points` equispaced points on `[-(1+margin) B, (1+margin) B]`
    /// with `B` the product of the support bounds folded so far.
    pub grid: Option<Vec<T>>,
    pub grid_points: usize,
    pub margin: T,
    /// Imaginary offset of the inversion contour; defaults to the grid
    /// spacing.
    pub epsilon: Option<T>,
    /// Atoms of each re-discretized intermediate measure.
    pub atoms: usize,
}

impl<T: Real> Default for ChainOptions<T> {
    fn default() -> Self {
        Self { grid: None, grid_points: 8001, margin: T::lit(0.25), epsilon: None, atoms: 512 }
    }
}

impl<T: Real> ChainOptions<T> {
    fn grid_for(&self, bound: T) -> Result<Vec<T>> {
        if let Some(g) = &self.grid {
            if g.len() < 2 || g.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidGrid("inversion grid must be strictly increasing with >= 2 points".into()));
            }
            return Ok(g.clone());
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidGrid("grid_points must be at least 2".into()));
        }
        let half = (T::one() + self.margin) * bound;
        let step = (half + half) / T::from_usize(self.grid_points - 1).unwrap();
        Ok((0..self.grid_points).map(|k| -half + step * T::from_usize(k).unwrap()).collect())
    }

    fn epsilon_for(&self, grid: &[T]) -> T {
        self.epsilon.unwrap_or_else(|| {
            let n = T::from_usize(grid.len() - 1).unwrap();
            (grid[grid.len() - 1] - grid[0]) / n
        })
    }
}

/// Spectral law of `X_1 X_2` recovered by Stieltjes inversion on a grid and
/// re-discretized onto `opts.atoms` quantile atoms.
pub fn product_law<T: Real>(
    m1: &SpectralMeasure<T>,
    m2: &SpectralMeasure<T>,
    opts: &ChainOptions<T>,
    cfg: &SolverConfig<T>,
) -> Result<SpectralMeasure<T>> {
    let grid = opts.grid_for(m1.support_bound() * m2.support_bound())?;
    let eps = opts.epsilon_for(&grid);
    let mut last: Option<ProductFixedPointState<T>> = None;
    let density = invert_density(
        |z| {
            let s = solve_product_warm(m1, m2, z, cfg, last.as_ref())?;
            let g = s.g;
            last = Some(s);
            Ok(g)
        },
        &grid,
        eps,
    )?;
    let cdf = cdf_from_density(&density)?;
    let law = quantile_atoms(&cdf, opts.atoms)?;
    if m1.is_nonnegative() && m2.is_nonnegative() && !law.is_nonnegative() {
        // broadening pushes mass of a nonnegative law below zero
        return SpectralMeasure::from_atoms(law.atoms().map(|(x, w)| (x.max(T::zero()), w)));
    }
    Ok(law)
}

/// Left fold of the product over `measures`: each link solves the product
/// of the running law with the next factor, inverts it and re-discretizes.
/// Returns the final law and the last link's states on `z_grid`.
pub fn solve_product_chain<T: Real>(
    measures: &[SpectralMeasure<T>],
    z_grid: &[HalfPlanePoint<T>],
    opts: &ChainOptions<T>,
    cfg: &SolverConfig<T>,
) -> Result<(SpectralMeasure<T>, Vec<ProductFixedPointState<T>>)> {
    if measures.len() < 2 {
        return Err(Error::InvalidMeasure("a product chain needs at least two factors".into()));
    }
    let link_err = |index: usize| move |e: Error| Error::AtChainLink { index, source: Box::new(e) };
    let mut running = measures[0].clone();
    let mut states = Vec::new();
    for (k, factor) in measures.iter().enumerate().skip(1) {
        if k + 1 == measures.len() {
            states = solve_product_grid(&running, factor, z_grid, cfg)
                .into_iter()
                .collect::<Result<Vec<_>>>()
                .map_err(link_err(k))?;
        }
        running = product_law(&running, factor, opts, cfg).map_err(link_err(k))?;
    }
    Ok((running, states))
}
