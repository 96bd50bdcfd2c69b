//! Matrix-variate distributions built from a scalar shape function.
//!
//! The family covers densities of the form
//! `f(X) = k |Sigma|^{-n/2} |X|^{(n-m-1)/2} h(tr Sigma^{-1} X)` on the cone
//! of symmetric positive definite matrices, where `h` ranges over a set of
//! built-in shape functions (exponential, t-prime, power-exponential,
//! Kummer, logistic, sine-Gaussian, log-weighted, hypergeometric) plus
//! user-registered ones. The classical Wishart is the exponential case.
//!
//! Modules:
//! - [`matrix`]: symmetric and SPD matrix types, multivariate gamma/beta.
//! - [`partition`]: integer partitions, generalized Pochhammer symbols.
//! - [`zonal`]: zonal polynomial tables and hypergeometric functions of a
//!   matrix argument.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature on half-open supports.
//! - [`generator`]: shape functions `h`, their moment integrals and radial
//!   laws.
//! - [`dist`]: log-densities for the family, its inverse/generalized/
//!   noncentral/weighted variants, and named special cases.
//! - [`moments`]: determinant and trace moments, characteristic function,
//!   eigenvalue laws, matrix CDF series.
//! - [`sampling`]: exact samplers and Monte Carlo estimation.
//! - [`inference`]: maximum likelihood and Bayes estimators for the scale.
//! - [`verify`]: the oracle suite backing `wgd verify`.

pub mod dist;
pub mod error;
pub mod matrix;
pub mod generator;
pub mod inference;
pub mod io;
pub mod moments;
pub mod partition;
pub mod quad;
pub mod sampling;
pub mod series;
pub mod special;
pub mod verify;
pub mod zonal;

pub use dist::{
    exp_wgd_log_normalizer, exp_wgd_logpdf, special_case, GgdParams, HwgdParams, NcwgdParams,
    SpecialCase, SpecialCaseReport, WgdParams,
};
pub use error::{Error, Result};
pub use generator::{register_custom_shape, Decay, GammaK, GammaMethod, ShapeGenerator, ShapeKind, SignLn};
pub use inference::{
    bayes_det_sigma, bayes_marginal_ln, beta_product_check, mle_sigma, posterior_logpdf,
    BetaProductReport, MleResult, PriorIW,
};
pub use io::{matrix_json_line, parse_generator, parse_matrix, read_spd_matrix, read_sym_matrix};
pub use matrix::{mv_beta_ln, mv_gamma_ln, spd_from_entries, sqrt_spd, SpdMatrix, SymMatrix};
pub use moments::{
    cf_series, det_moment, eig_joint_logpdf, laplace_series, laplace_series_literal,
    lmax_cdf, lmax_cdf_literal, log_det_expectation, prob_less_than, prob_less_than_literal,
    ratio_b1_pdf, ratio_b2_pdf, trace_moment, trace_moment_literal, trace_pdf,
    trace_pdf_exact_iso, trace_pdf_literal, wishart_cf_closed, zonal_expectation,
    zonal_expectation_literal,
};
pub use partition::{gen_pochhammer, partitions_of, Partition};
pub use sampling::{
    mc_estimate, sample_direction, sample_radial, sample_wgd, sample_wishart, InverseCdfTable,
    McEstimate, RadialSampler, RngStream, WgdSampler,
};
pub use series::{SeriesValue, TolPolicy, Truncation};
pub use verify::{run_suite, CheckReport, CHECK_NAMES};
pub use zonal::{hypergeom_matrix, ZonalTable};
