//! Gaussian series prior on the initial condition, the ground-truth family
//! used in the simulations, and the regularity predicates for the
//! limiting-normal regime.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, PRIOR_CHANNEL};
use crate::spectral::{Diffusivity, SineCoefficients};

/// Standard deviation `(k + 1)^(-1/2 - alpha)` of coefficient `k`.
pub fn sigma_k(alpha: f64, k: usize) -> f64 {
    assert!(alpha > 0.0, "alpha must be > 0, got {alpha}");
    assert!(k >= 1, "k is 1-based");
    ((k + 1) as f64).powf(-0.5 - alpha)
}

/// Independent `N(0, sigma_k^2)` weights on the first `m` sine modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPrior {
    pub alpha: f64,
    pub m: usize,
}

impl SeriesPrior {
    pub fn new(alpha: f64, m: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "prior regularity alpha must be > 0, got {alpha}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        Ok(Self { alpha, m })
    }

    pub fn sigma(&self, k: usize) -> f64 {
        sigma_k(self.alpha, k)
    }

    /// Prior precision `(k + 1)^(1 + 2 alpha)` of coefficient `k`.
    pub fn precision(&self, k: usize) -> f64 {
        ((k + 1) as f64).powf(1.0 + 2.0 * self.alpha)
    }
}

/// Draws `f_k = sigma_k z_k`. Coefficient `k` uses its own substream, so a
/// draw at truncation `m` is a prefix of the draw at any larger `m`.
pub fn sample_prior(prior: &SeriesPrior, seed: u64) -> SineCoefficients {
    let coeffs = (1..=prior.m)
        .map(|k| {
            let mut rng = substream(seed, PRIOR_CHANNEL, k as u64);
            let z: f64 = StandardNormal.sample(&mut rng);
            prior.sigma(k) * z
        })
        .collect();
    SineCoefficients::new(coeffs).expect("finite draws")
}

/// `f0_k = k^(-2)`, Sobolev-type regularity just below 3/2.
pub fn ground_truth_f0(m: usize) -> SineCoefficients {
    power_decay_f0(m, 2.0)
}

/// `f0_k = k^(-decay)`.
pub fn power_decay_f0(m: usize, decay: f64) -> SineCoefficients {
    SineCoefficients::from_fn(m, |k| (k as f64).powf(-decay)).expect("m >= 1")
}

/// True parameter pair plus the regularity of `f0`, carried as metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub theta0: Diffusivity,
    pub f0: SineCoefficients,
    pub beta: f64,
}

impl TruthSpec {
    pub fn new(theta0: Diffusivity, f0: SineCoefficients, beta: f64) -> Result<Self> {
        if f0.is_zero() {
            return Err(Error::InvalidArgument("f0 must be nonzero".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be > 0, got {beta}"
            )));
        }
        Ok(Self { theta0, f0, beta })
    }
}

/// `1/2 < alpha < 2 beta - 1/2`.
pub fn bvm_zone(alpha: f64, beta: f64) -> bool {
    0.5 < alpha && alpha < 2.0 * beta - 0.5
}

/// Contraction rate `n^(-min(alpha, beta) / (1 + 2 alpha))`, constant dropped.
pub fn contraction_rate(alpha: f64, beta: f64, n: f64) -> f64 {
    assert!(n >= 1.0, "n must be >= 1, got {n}");
    n.powf(-alpha.min(beta) / (1.0 + 2.0 * alpha))
}
