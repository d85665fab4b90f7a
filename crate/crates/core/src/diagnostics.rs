//! Sample-level comparison of the sampled marginal posterior with its
//! limiting normal, and bias measurement against the true diffusivity.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::prior::TruthSpec;
use crate::sampler::{summarize, Chain};
use crate::spectral::efficient_fisher;

/// `N(center, 1 / (n * I_eff))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitingNormal {
    pub center: f64,
    pub variance: f64,
}

impl LimitingNormal {
    pub fn new(center: f64, variance: f64) -> Result<Self> {
        if !(center.is_finite() && variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need finite center and variance > 0, got ({center}, {variance})"
            )));
        }
        Ok(Self { center, variance })
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        Normal::new(self.center, self.sd())
            .expect("validated parameters")
            .cdf(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sd();
        (-0.5 * z * z).exp() / (self.sd() * (2.0 * std::f64::consts::PI).sqrt())
    }
}

pub fn limiting_normal(center: f64, truth: &TruthSpec, t_final: f64, n: f64) -> Result<LimitingNormal> {
    let info = efficient_fisher(truth.theta0, &truth.f0, t_final);
    if info <= 0.0 {
        return Err(Error::ZeroInformation);
    }
    LimitingNormal::new(center, 1.0 / (n * info))
}

pub const MIN_KS_SAMPLES: usize = 100;
pub const MIN_TV_SAMPLES: usize = 1000;
pub const MIN_TV_BINS: usize = 10;
/// Histogram half-width in reference standard deviations.
pub const TV_HALF_WIDTH_SD: f64 = 6.0;

/// One-sample Kolmogorov–Smirnov statistic against the reference normal.
pub fn ks_distance(samples: &[f64], reference: &LimitingNormal) -> Result<f64> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_KS_SAMPLES,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let stat = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = reference.cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(stat.clamp(0.0, 1.0))
}

/// Total variation between the binned sample distribution and the reference
/// on `bins` equal bins over `center +/- 6 sd`; both tails count as extra cells.
pub fn tv_distance_histogram(samples: &[f64], reference: &LimitingNormal, bins: usize) -> Result<f64> {
    if bins < MIN_TV_BINS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_TV_BINS} bins, got {bins}"
        )));
    }
    if samples.len() < MIN_TV_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_TV_SAMPLES,
            got: samples.len(),
        });
    }
    let lo = reference.center - TV_HALF_WIDTH_SD * reference.sd();
    let hi = reference.center + TV_HALF_WIDTH_SD * reference.sd();
    let width = (hi - lo) / bins as f64;

    // cells: [left tail, bin 0, ..., bin bins-1, right tail]
    let mut counts = vec![0usize; bins + 2];
    for &x in samples {
        let cell = if x < lo {
            0
        } else if x >= hi {
            bins + 1
        } else {
            1 + (((x - lo) / width) as usize).min(bins - 1)
        };
        counts[cell] += 1;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let cdf: Vec<f64> = edges.iter().map(|&e| reference.cdf(e)).collect();
    let mut mass = Vec::with_capacity(bins + 2);
    mass.push(cdf[0]);
    mass.extend(cdf.windows(2).map(|w| w[1] - w[0]));
    mass.push(1.0 - cdf[bins]);

    let n = samples.len() as f64;
    let l1: f64 = counts
        .iter()
        .zip(&mass)
        .map(|(&c, &q)| (c as f64 / n - q).abs())
        .sum();
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub abs_bias: f64,
    pub standardized_bias: f64,
}

/// `|mean - theta0|`, and the same in posterior standard deviations
/// (zero when the chain is constant).
pub fn bias_report(chain: &Chain, truth: &TruthSpec) -> Result<BiasReport> {
    let s = summarize(chain)?;
    let abs_bias = (s.posterior_mean - truth.theta0.value()).abs();
    let sd = s.posterior_var.sqrt();
    let standardized_bias = if sd > 0.0 { abs_bias / sd } else { 0.0 };
    Ok(BiasReport {
        abs_bias,
        standardized_bias,
    })
}

/// Per-run diagnostics record, written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub alpha: f64,
    pub seed: u64,
    pub posterior_mean: f64,
    pub posterior_var: f64,
    pub ks: f64,
    pub tv: f64,
    pub abs_bias: f64,
    pub standardized_bias: f64,
    pub acceptance_rate: f64,
    pub ess: f64,
    pub limiting_variance: f64,
    pub proposal_sd: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

pub const DEFAULT_TV_BINS: usize = 50;
