//! Random-walk Metropolis–Hastings over the scalar diffusivity.
//!
//! Proposals are `N(theta, sd^2)`. A proposal off the support has log-target
//! `-inf` and is rejected, never redrawn, so the kernel stays symmetric.
//! With [`ProposalScale::Auto`] the step size adapts during burn-in only and
//! is frozen afterwards.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::rng::{substream, SAMPLER_CHANNEL};

pub const DEFAULT_BURN_IN: usize = 1000;
/// Acceptance rate targeted by burn-in adaptation.
pub const TARGET_ACCEPTANCE: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalScale {
    Fixed(f64),
    /// Robbins–Monro adaptation of `log sd` during burn-in, from `initial`.
    Auto { initial: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub proposal: ProposalScale,
    pub init: f64,
    pub seed: u64,
}

impl MhConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 iterations, got {}",
                self.iterations
            )));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidArgument(format!(
                "burn_in ({}) must be < iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        let sd = match self.proposal {
            ProposalScale::Fixed(sd) => sd,
            ProposalScale::Auto { initial } => initial,
        };
        if !(sd.is_finite() && sd > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "proposal sd must be > 0, got {sd}"
            )));
        }
        if !self.init.is_finite() {
            return Err(Error::InvalidArgument("init must be finite".into()));
        }
        Ok(())
    }
}

/// Sample path `theta^(1..=T)`; `samples[0]` is the initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    samples: Vec<f64>,
    accepted_flags: Vec<bool>,
    accepted: usize,
    burn_in: usize,
    proposal_sd: f64,
    config: MhConfig,
}

impl Chain {
    /// Builds a chain from stored values. Used for pseudo-chains and when
    /// reading traces back from disk.
    pub fn from_parts(samples: Vec<f64>, accepted_flags: Vec<bool>, burn_in: usize) -> Result<Self> {
        if samples.len() != accepted_flags.len() {
            return Err(Error::InvalidArgument(
                "samples and accepted flags differ in length".into(),
            ));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if burn_in >= samples.len() {
            return Err(Error::InvalidArgument(format!(
                "burn_in ({burn_in}) must be < chain length ({})",
                samples.len()
            )));
        }
        let accepted = accepted_flags.iter().skip(1).filter(|&&a| a).count();
        let config = MhConfig {
            iterations: samples.len(),
            burn_in,
            proposal: ProposalScale::Fixed(f64::NAN),
            init: samples[0],
            seed: 0,
        };
        Ok(Self {
            samples,
            accepted_flags,
            accepted,
            burn_in,
            proposal_sd: f64::NAN,
            config,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn post_burn_in(&self) -> &[f64] {
        &self.samples[self.burn_in..]
    }

    pub fn accepted_flags(&self) -> &[bool] {
        &self.accepted_flags
    }

    pub fn accepted(&self) -> usize {
        self.accepted
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Proposal sd in force after burn-in.
    pub fn proposal_sd(&self) -> f64 {
        self.proposal_sd
    }

    pub fn config(&self) -> &MhConfig {
        &self.config
    }

    /// CSV `t,theta,accepted_flag` with 1-based `t`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 32);
        out.push_str("t,theta,accepted_flag\n");
        for (t, (x, a)) in self.samples.iter().zip(&self.accepted_flags).enumerate() {
            let _ = writeln!(out, "{},{:.16e},{}", t + 1, x, u8::from(*a));
        }
        out
    }

    pub fn from_csv(csv: &str, burn_in: usize) -> Result<Self> {
        let mut lines = csv.lines();
        match lines.next().map(str::trim) {
            Some("t,theta,accepted_flag") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `t,theta,accepted_flag`, found {other:?}"
                )))
            }
        }
        let mut samples = Vec::new();
        let mut flags = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let row = i + 2;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {row}: expected 3 fields")));
            }
            let theta: f64 = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("row {row}: theta: {e}")))?;
            let flag = match fields[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse(format!(
                        "row {row}: accepted_flag must be 0 or 1, found {other}"
                    )))
                }
            };
            samples.push(theta);
            flags.push(flag);
        }
        Self::from_parts(samples, flags, burn_in)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Runs the sampler against `log_target`, which must be finite at `config.init`.
pub fn run_mh<F>(config: &MhConfig, log_target: F) -> Result<Chain>
where
    F: Fn(f64) -> f64,
{
    config.validate()?;
    let mut rng = substream(config.seed, SAMPLER_CHANNEL, 0);

    let mut current = config.init;
    let mut current_lp = log_target(current);
    if !current_lp.is_finite() {
        return Err(Error::NonFiniteInit(current));
    }

    let (mut log_sd, adapt) = match config.proposal {
        ProposalScale::Fixed(sd) => (sd.ln(), false),
        ProposalScale::Auto { initial } => (initial.ln(), true),
    };

    let mut samples = Vec::with_capacity(config.iterations);
    let mut flags = Vec::with_capacity(config.iterations);
    samples.push(current);
    flags.push(false);
    let mut accepted = 0usize;

    for t in 1..config.iterations {
        let z: f64 = StandardNormal.sample(&mut rng);
        let proposal = current + log_sd.exp() * z;
        let proposal_lp = log_target(proposal);
        let log_ratio = proposal_lp - current_lp;
        let u: f64 = rng.random();
        // NaN log-ratios (both -inf) fall through to rejection
        let accept = u.ln() < log_ratio;
        if accept {
            current = proposal;
            current_lp = proposal_lp;
            accepted += 1;
        }
        samples.push(current);
        flags.push(accept);

        if adapt && t < config.burn_in {
            let prob = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
            log_sd += (prob - TARGET_ACCEPTANCE) / ((t + 1) as f64).powf(0.6);
        }
    }

    Ok(Chain {
        samples,
        accepted_flags: flags,
        accepted,
        burn_in: config.burn_in,
        proposal_sd: log_sd.exp(),
        config: config.clone(),
    })
}

/// `accepted / (T - 1)`.
pub fn acceptance_rate(chain: &Chain) -> f64 {
    assert!(chain.len() >= 2, "acceptance rate needs at least 2 samples");
    chain.accepted() as f64 / (chain.len() - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub posterior_mean: f64,
    pub posterior_var: f64,
    pub ess: f64,
}

pub const MIN_SUMMARY_SAMPLES: usize = 100;

/// Mean, variance and effective sample size of the post-burn-in samples.
pub fn summarize(chain: &Chain) -> Result<ChainSummary> {
    summarize_samples(chain.post_burn_in())
}

pub fn summarize_samples(xs: &[f64]) -> Result<ChainSummary> {
    if xs.len() < MIN_SUMMARY_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SUMMARY_SAMPLES,
            got: xs.len(),
        });
    }
    let (mean, var) = mean_var(xs);
    Ok(ChainSummary {
        posterior_mean: mean,
        posterior_var: var,
        ess: effective_sample_size(xs),
    })
}

/// Sample mean and unbiased variance, accumulated as offsets from the first
/// sample so that a constant chain is reproduced exactly.
pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let shift = xs[0];
    let mean = shift + compensated_sum(xs.iter().map(|x| x - shift)) / n;
    let ss = compensated_sum(xs.iter().map(|x| (x - mean).powi(2)));
    let var = if xs.len() > 1 { ss / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Geyer's initial monotone sequence estimator. A constant chain has ESS 1.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return n as f64;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let c0 = autocov(0);
    if c0 <= 0.0 {
        return 1.0;
    }

    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / c0;
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    n as f64 / tau.max(f64::MIN_POSITIVE)
}
