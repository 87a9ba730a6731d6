//! Asymptotic eigenvalue distributions of large random matrices through
//! Stieltjes-transform fixed points.
//!
//! * [`measures`]: atom measures, family discretization, joint channel laws.
//! * [`stieltjes`]: transforms, inversion to densities and CDFs.
//! * [`free_sum`] and [`free_product`]: spectra of sums and products of
//!   independent unitarily invariant matrices.
//! * [`cdma`]: spectrum of a multi-transmitter CDMA correlation matrix with
//!   jointly diagonalizable channels, and the MMSE SINR.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

// `!(a > b)` comparisons are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cdma;
pub mod error;
pub mod free_product;
pub mod free_sum;
pub mod measures;
pub mod scalar;
pub mod solver;
pub mod stieltjes;

pub use cdma::{
    cdma_residual, eval_cal_h, eval_cal_p, sinr, sinr_from_state, sinr_sweep, solve_theorem1, solve_theorem1_warm,
    to_db, CdmaFixedPointState, CdmaScenario, SignatureKind, SinrSweepPoint, TransmitterSpec, DEFAULT_SINR_EPSILON,
};
pub use error::{Error, Result};
pub use free_product::{
    product_law, product_residual, solve_product, solve_product_chain, solve_product_grid, solve_product_warm,
    ChainOptions, ProductFixedPointState,
};
pub use free_sum::{solve_sum, solve_sum_grid, solve_sum_warm, sum_residual, SumFixedPointState};
pub use measures::{Family, FamilySpec, JointChannelMeasure, JointChannelSpec, MeasureSpec, SpectralMeasure};
pub use scalar::{Real, C};
pub use solver::SolverConfig;
pub use stieltjes::{
    cdf_from_density, invert_density, kolmogorov_distance, quantile_atoms, transform, HalfPlanePoint, TransformValue,
};

pub type SpectralMeasure64 = SpectralMeasure<f64>;
pub type SpectralMeasure32 = SpectralMeasure<f32>;
pub type JointChannelMeasure64 = JointChannelMeasure<f64>;
pub type HalfPlanePoint64 = HalfPlanePoint<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type CdmaScenario64 = CdmaScenario<f64>;
pub type CdmaFixedPointState64 = CdmaFixedPointState<f64>;
pub type SumFixedPointState64 = SumFixedPointState<f64>;
pub type ProductFixedPointState64 = ProductFixedPointState<f64>;
pub type Complex64 = C<f64>;
