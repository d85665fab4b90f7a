//! Semiparametric Bayesian inference for the thermal diffusivity of the
//! one-dimensional heat equation with an unknown initial condition.
//!
//! The crate simulates noisy sine coefficients of the initial and final
//! temperature profiles, evaluates the exact marginal posterior of the
//! diffusivity under a Gaussian series prior, samples it with random-walk
//! Metropolis–Hastings and compares the draws with the limiting normal
//! `N(center, 1 / (n I_eff))`.

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod numeric;
pub mod posterior;
pub mod prior;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use data::{generate, ObservationMeta, Observations};
pub use diagnostics::{
    bias_report, ks_distance, limiting_normal, tv_distance_histogram, BiasReport,
    DiagnosticsRecord, LimitingNormal,
};
pub use error::{Error, Result};
pub use posterior::{
    conditional_f_posterior, log_likelihood, log_marginal_theta, CoefficientPosterior,
    MarginalForm, PosteriorTarget,
};
pub use prior::{
    bvm_zone, contraction_rate, ground_truth_f0, sample_prior, sigma_k, SeriesPrior, TruthSpec,
};
pub use sampler::{acceptance_rate, run_mh, summarize, Chain, ChainSummary, MhConfig, ProposalScale};
pub use spectral::{
    apply_k, apply_kdot, efficient_fisher, heat_solution, l_inner_product, l_norm_sq,
    least_favourable_direction, operator_diff_norm, parametric_fisher, sobolev_norm_sq,
    taylor_remainder_norm, Diffusivity, ModelConfig, SineCoefficients,
};
