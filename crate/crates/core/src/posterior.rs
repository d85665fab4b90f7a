//! Likelihood of the truncated coefficient model, the conjugate Gaussian
//! conditional of `f` given `theta`, and the log marginal posterior of `theta`
//! obtained by integrating `f` out coefficient by coefficient.
//!
//! Everything is evaluated in natural-log space. With `n = 1e5` the exponent
//! terms reach the order of `n`, so no density is ever exponentiated here.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::data::Observations;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::prior::SeriesPrior;
use crate::spectral::{decay_factor, Diffusivity, ModelConfig, SineCoefficients};

/// Which precision enters the marginal of `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalForm {
    /// `n + n a_k^2 + (k+1)^(1+2 alpha)`, the exact Gaussian integral.
    #[default]
    Derived,
    /// `n + n a_k + (k+1)^(1+2 alpha)`, the form printed with the simulation
    /// study. Kept only for comparison; it does not integrate the model.
    UnsquaredDecay,
}

/// Log of the truncated likelihood, including the `m log(n / 2 pi)` constant.
pub fn log_likelihood(
    theta: Diffusivity,
    f: &SineCoefficients,
    obs: &Observations,
    t_final: f64,
) -> Result<f64> {
    if f.m() != obs.m() {
        return Err(Error::TruncationMismatch {
            expected: obs.m(),
            actual: f.m(),
        });
    }
    let n = obs.n();
    let quad = compensated_sum(f.iter_indexed().map(|(k, fk)| {
        let a = decay_factor(theta.value(), t_final, k);
        let r1 = obs.x1()[k - 1] - fk;
        let r2 = obs.x2()[k - 1] - a * fk;
        -0.5 * n * (r1 * r1 + r2 * r2)
    }));
    Ok(obs.m() as f64 * (n / (2.0 * PI)).ln() + quad)
}

/// Per-coefficient Gaussian conditional of `f_k` given `theta` and the data.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPosterior {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl CoefficientPosterior {
    /// `sum_k log N(f_k; mean_k, var_k)`.
    pub fn log_density(&self, f: &SineCoefficients) -> Result<f64> {
        if f.m() != self.mean.len() {
            return Err(Error::TruncationMismatch {
                expected: self.mean.len(),
                actual: f.m(),
            });
        }
        Ok(compensated_sum(
            f.as_slice()
                .iter()
                .zip(self.mean.iter().zip(&self.var))
                .map(|(x, (mu, v))| -0.5 * (2.0 * PI * v).ln() - (x - mu).powi(2) / (2.0 * v)),
        ))
    }
}

pub fn conditional_f_posterior(
    theta: Diffusivity,
    obs: &Observations,
    prior: &SeriesPrior,
    t_final: f64,
) -> Result<CoefficientPosterior> {
    if prior.m != obs.m() {
        return Err(Error::TruncationMismatch {
            expected: obs.m(),
            actual: prior.m,
        });
    }
    let n = obs.n();
    let (mean, var) = (1..=obs.m())
        .map(|k| {
            let a = decay_factor(theta.value(), t_final, k);
            let p = n + n * a * a + prior.precision(k);
            let s = n * obs.x1()[k - 1] + n * a * obs.x2()[k - 1];
            (s / p, 1.0 / p)
        })
        .unzip();
    Ok(CoefficientPosterior { mean, var })
}

/// Unnormalized log marginal posterior of `theta` under a uniform prior on
/// the parameter interval.
#[derive(Debug, Clone)]
pub struct PosteriorTarget {
    obs: Observations,
    prior: SeriesPrior,
    t_final: f64,
    theta_lo: f64,
    theta_hi: f64,
    form: MarginalForm,
}

impl PosteriorTarget {
    pub fn new(obs: Observations, prior: SeriesPrior, model: &ModelConfig) -> Result<Self> {
        if prior.m != obs.m() {
            return Err(Error::TruncationMismatch {
                expected: obs.m(),
                actual: prior.m,
            });
        }
        Ok(Self {
            obs,
            prior,
            t_final: model.t_final,
            theta_lo: model.theta_lo,
            theta_hi: model.theta_hi,
            form: MarginalForm::Derived,
        })
    }

    pub fn with_form(mut self, form: MarginalForm) -> Self {
        self.form = form;
        self
    }

    pub fn observations(&self) -> &Observations {
        &self.obs
    }

    pub fn prior(&self) -> &SeriesPrior {
        &self.prior
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.theta_lo, self.theta_hi)
    }

    pub fn form(&self) -> MarginalForm {
        self.form
    }

    /// `sum_k [-log(p_k)/2 + s_k^2 / (2 p_k)]`, or `-inf` off the support.
    pub fn log_density(&self, theta: f64) -> f64 {
        if !(self.theta_lo < theta && theta < self.theta_hi) {
            return f64::NEG_INFINITY;
        }
        let n = self.obs.n();
        let x1 = self.obs.x1();
        let x2 = self.obs.x2();
        compensated_sum((1..=self.obs.m()).map(|k| {
            let a = decay_factor(theta, self.t_final, k);
            let gain = match self.form {
                MarginalForm::Derived => a * a,
                MarginalForm::UnsquaredDecay => a,
            };
            let p = n + n * gain + self.prior.precision(k);
            let s = n * x1[k - 1] + n * a * x2[k - 1];
            -0.5 * p.ln() + s * s / (2.0 * p)
        }))
    }
}

pub fn log_marginal_theta(theta: f64, target: &PosteriorTarget) -> f64 {
    target.log_density(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ObservationMeta;
    use approx::assert_relative_eq;

    fn obs(x1: Vec<f64>, x2: Vec<f64>, n: f64) -> Observations {
        let m = x1.len();
        Observations::new(
            x1,
            x2,
            ObservationMeta {
                n,
                m,
                t_final: 1.0,
                theta0: 0.01,
                seed: 0,
            },
        )
        .unwrap()
    }

    fn theta_with_decay(a: f64, k: usize) -> Diffusivity {
        Diffusivity::new(-a.ln() / (PI * PI * (k * k) as f64)).unwrap()
    }

    #[test]
    fn likelihood_hand_arithmetic() {
        let o = obs(vec![0.5], vec![0.3], 100.0);
        let f = SineCoefficients::new(vec![0.4]).unwrap();
        let ll = log_likelihood(theta_with_decay(0.5, 1), &f, &o, 1.0).unwrap();
        let expected = -50.0 * 0.01 - 50.0 * 0.01 + (100.0 / (2.0 * PI)).ln();
        assert_relative_eq!(ll, expected, max_relative = 1e-12);
    }

    #[test]
    fn likelihood_at_noiseless_truth_is_the_constant() {
        let theta = Diffusivity::new(0.01).unwrap();
        let f = SineCoefficients::from_fn(12, |k| (k as f64).powi(-2)).unwrap();
        let x2 = crate::spectral::apply_k(&f, theta, 1.0);
        let o = obs(f.as_slice().to_vec(), x2.as_slice().to_vec(), 1e5);
        let ll = log_likelihood(theta, &f, &o, 1.0).unwrap();
        assert_relative_eq!(ll, 12.0 * (1e5 / (2.0 * PI)).ln(), max_relative = 1e-14);

        // perturbing f_1 by delta costs (n/2) delta^2 (1 + a_1^2)
        let delta = 1e-3;
        let mut g = f.as_slice().to_vec();
        g[0] += delta;
        let g = SineCoefficients::new(g).unwrap();
        let a1 = decay_factor(0.01, 1.0, 1);
        let drop = ll - log_likelihood(theta, &g, &o, 1.0).unwrap();
        assert_relative_eq!(drop, 0.5 * 1e5 * delta * delta * (1.0 + a1 * a1), max_relative = 1e-8);

        let short = SineCoefficients::zeros(3);
        assert!(log_likelihood(theta, &short, &o, 1.0).is_err());
    }

    #[test]
    fn conditional_limits() {
        let prior = SeriesPrior::new(1.5, 2).unwrap();
        let o = obs(vec![0.7, -0.2], vec![0.1, 0.3], 1e-300);
        let post = conditional_f_posterior(Diffusivity::new(0.01).unwrap(), &o, &prior, 1.0).unwrap();
        for k in 1..=2 {
            assert!(post.mean[k - 1].abs() < 1e-290);
            assert_relative_eq!(post.var[k - 1], prior.sigma(k).powi(2), max_relative = 1e-12);
        }

        // mode 60 at theta = 0.1 has a_k == 0: only the first channel informs
        let m = 60;
        let prior = SeriesPrior::new(1.0, m).unwrap();
        let o = obs(vec![0.25; m], vec![5.0; m], 1e4);
        let theta = Diffusivity::new(0.1).unwrap();
        assert_eq!(decay_factor(0.1, 1.0, m), 0.0);
        let post = conditional_f_posterior(theta, &o, &prior, 1.0).unwrap();
        let expected = 1e4 * 0.25 / (1e4 + prior.precision(m));
        assert_eq!(post.mean[m - 1], expected);
    }

    #[test]
    fn conditional_never_inflates_variance() {
        let prior = SeriesPrior::new(2.0, 30).unwrap();
        let o = obs(vec![0.1; 30], vec![0.05; 30], 1e3);
        let post = conditional_f_posterior(Diffusivity::new(0.03).unwrap(), &o, &prior, 1.0).unwrap();
        for k in 1..=30 {
            assert!(post.var[k - 1] > 0.0);
            assert!(post.var[k - 1] <= prior.sigma(k).powi(2));
        }
    }

    #[test]
    fn zero_data_marginal() {
        let prior = SeriesPrior::new(1.0, 1).unwrap();
        let model = ModelConfig::new(0.001, 0.1, 1.0, 1e3, 1).unwrap();
        let target = PosteriorTarget::new(obs(vec![0.0], vec![0.0], 1e3), prior, &model).unwrap();
        let theta = 0.02;
        let a = decay_factor(theta, 1.0, 1);
        assert_relative_eq!(
            target.log_density(theta),
            -0.5 * (1e3 + 1e3 * a * a + 8.0).ln(),
            max_relative = 1e-14
        );
        // decreasing a_1 raises the density, so the maximum sits at theta_hi
        assert!(target.log_density(0.099) > target.log_density(0.05));
        assert!(target.log_density(0.05) > target.log_density(0.002));
    }

    #[test]
    fn off_support_is_neg_infinity() {
        let prior = SeriesPrior::new(1.0, 1).unwrap();
        let model = ModelConfig::new(0.001, 0.1, 1.0, 1e3, 1).unwrap();
        let target = PosteriorTarget::new(obs(vec![0.3], vec![0.2], 1e3), prior, &model).unwrap();
        for th in [0.001, 0.1, -1.0, 0.5, f64::NAN] {
            assert_eq!(log_marginal_theta(th, &target), f64::NEG_INFINITY);
        }
        assert!(log_marginal_theta(0.05, &target).is_finite());
    }

    #[test]
    fn full_scale_density_stays_finite() {
        let f0 = crate::prior::ground_truth_f0(100);
        let truth = crate::prior::TruthSpec::new(Diffusivity::new(0.01).unwrap(), f0, 1.5).unwrap();
        let o = crate::data::generate(&truth, 1.0, 1e5, 100, 1, 1.0).unwrap();
        let model = ModelConfig::new(0.001, 0.1, 1.0, 1e5, 100).unwrap();
        let target = PosteriorTarget::new(o, SeriesPrior::new(1.0, 100).unwrap(), &model).unwrap();
        for i in 1..100 {
            let th = 0.001 + 0.099 * i as f64 / 100.0;
            assert!(target.log_density(th).is_finite());
        }
    }
}
