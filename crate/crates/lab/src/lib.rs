//! Finite-N random-matrix lab: Haar and signature sampling, sum, product and
//! CDMA ensembles, empirical transforms and MMSE SINR, quadratic-form
//! concentration and seeded Monte Carlo drivers.
//!
//! Every draw comes from a [`RngStream`], so a `(seed, stream_id)` pair
//! reproduces an instance exactly. Matrices are `faer` dense complex `f64`.

// `!(a > b)` comparisons are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod error;
pub mod instance;
pub mod montecarlo;
pub mod rng;
pub mod sample;
pub mod spectra;

pub use concentration::{concentration_check, concentration_check_iid, ConcentrationStats};
pub use error::{LabError, Result};
pub use instance::{
    build_cdma, empirical_sinr, empirical_tau_iid, CdmaSpectrum, EmpiricalSinr, EnsembleInstance, EnsembleKind,
    StreamSinr,
};
pub use montecarlo::{
    mc_cdma_sinr, mc_cdma_transform, mc_product_transform, mc_sum_transform, McSamples, SinrSamples, SinrSummary,
};
pub use rng::RngStream;
pub use sample::{draw_spectrum, sample_haar, sample_haar_columns, sample_signatures};
pub use spectra::{
    build_product_hermitized, build_sum, eigenvalues, empirical_stieltjes, hermitian_defect, spectrum_transform,
};
