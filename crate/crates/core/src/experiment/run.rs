use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProposalSetting};
use super::svg::{histogram_svg, trace_svg};
use crate::data::{generate, Observations};
use crate::diagnostics::{
    bias_report, ks_distance, limiting_normal, tv_distance_histogram, DiagnosticsRecord,
    DEFAULT_TV_BINS,
};
use crate::error::{Error, Result};
use crate::posterior::PosteriorTarget;
use crate::prior::{bvm_zone, power_decay_f0, SeriesPrior, TruthSpec};
use crate::rng::splitmix64;
use crate::sampler::{acceptance_rate, run_mh, summarize, Chain, MhConfig, ProposalScale};
use crate::spectral::{Diffusivity, SineCoefficients};

const HISTOGRAM_BINS: usize = 60;

/// Truth description written next to every experiment and read by `diag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub theta0: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n: f64,
    pub beta: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub f0: Vec<f64>,
}

impl TruthRecord {
    pub fn truth(&self) -> Result<TruthSpec> {
        TruthSpec::new(
            Diffusivity::new(self.theta0)?,
            SineCoefficients::new(self.f0.clone())?,
            self.beta,
        )
    }
}

/// Diagnostics of a single chain against a truth record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub posterior_mean: f64,
    pub posterior_var: f64,
    pub ks: f64,
    pub tv: f64,
    pub abs_bias: f64,
    pub standardized_bias: f64,
    pub acceptance_rate: f64,
    pub ess: f64,
    pub limiting_variance: f64,
}

/// Summary statistics, distances to the limiting normal centered at the
/// posterior mean, and bias.
pub fn analyze_chain(chain: &Chain, truth: &TruthSpec, t_final: f64, n: f64) -> Result<ChainReport> {
    let summary = summarize(chain)?;
    let reference = limiting_normal(summary.posterior_mean, truth, t_final, n)?;
    let post = chain.post_burn_in();
    let bias = bias_report(chain, truth)?;
    Ok(ChainReport {
        posterior_mean: summary.posterior_mean,
        posterior_var: summary.posterior_var,
        ks: ks_distance(post, &reference)?,
        tv: tv_distance_histogram(post, &reference, DEFAULT_TV_BINS)?,
        abs_bias: bias.abs_bias,
        standardized_bias: bias.standardized_bias,
        acceptance_rate: acceptance_rate(chain),
        ess: summary.ess,
        limiting_variance: reference.variance,
    })
}

/// Chain seed for a `(dataset seed, alpha)` pair.
pub fn chain_seed(seed: u64, alpha: f64) -> u64 {
    splitmix64(seed ^ alpha.to_bits())
}

pub fn truth_spec(cfg: &ExperimentConfig) -> Result<TruthSpec> {
    TruthSpec::new(
        cfg.model.diffusivity(cfg.truth.theta0)?,
        power_decay_f0(cfg.model.m, cfg.truth.f0_decay),
        cfg.truth.beta,
    )
}

fn mh_config(cfg: &ExperimentConfig, seed: u64, alpha: f64) -> MhConfig {
    let proposal = match cfg.mcmc.proposal_sd {
        ProposalSetting::Fixed(sd) => ProposalScale::Fixed(sd),
        ProposalSetting::Auto => ProposalScale::Auto {
            initial: (cfg.model.theta_hi - cfg.model.theta_lo) / 100.0,
        },
    };
    MhConfig {
        iterations: cfg.mcmc.iterations,
        burn_in: cfg.mcmc.burn_in,
        proposal,
        init: cfg.init_theta(),
        seed: chain_seed(seed, alpha),
    }
}

/// Dataset seed used by the run with chain seed `seed`.
fn dataset_seed(cfg: &ExperimentConfig, seed: u64) -> u64 {
    if cfg.data.shared_dataset {
        cfg.data.data_seed.expect("validated")
    } else {
        seed
    }
}

pub fn dataset(cfg: &ExperimentConfig, seed: u64) -> Result<Observations> {
    generate(
        &truth_spec(cfg)?,
        cfg.model.t_final,
        cfg.model.n,
        cfg.model.m,
        dataset_seed(cfg, seed),
        cfg.data.noise_scale,
    )
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: DiagnosticsRecord,
    pub chain: Chain,
}

/// Samples the marginal posterior for one `(alpha, seed)` pair on `obs`.
pub fn run_single(cfg: &ExperimentConfig, alpha: f64, seed: u64, obs: &Observations) -> Result<RunOutcome> {
    let truth = truth_spec(cfg)?;
    let prior = SeriesPrior::new(alpha, cfg.model.m)?;
    let target = PosteriorTarget::new(obs.clone(), prior, &cfg.model)?;
    let chain = run_mh(&mh_config(cfg, seed, alpha), |th| target.log_density(th))?;
    let report = analyze_chain(&chain, &truth, cfg.model.t_final, cfg.model.n)?;
    let record = DiagnosticsRecord {
        alpha,
        seed,
        posterior_mean: report.posterior_mean,
        posterior_var: report.posterior_var,
        ks: report.ks,
        tv: report.tv,
        abs_bias: report.abs_bias,
        standardized_bias: report.standardized_bias,
        acceptance_rate: report.acceptance_rate,
        ess: report.ess,
        limiting_variance: report.limiting_variance,
        proposal_sd: chain.proposal_sd(),
        theta_lo: cfg.model.theta_lo,
        theta_hi: cfg.model.theta_hi,
    };
    Ok(RunOutcome { record, chain })
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub out_dir: PathBuf,
    /// Sorted by `(alpha, seed)`.
    pub records: Vec<DiagnosticsRecord>,
}

pub fn run_dir_name(alpha: f64, seed: u64) -> String {
    format!("alpha-{alpha}_seed-{seed}")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

/// Runs every `(alpha, seed)` pair and writes, under `out_dir`:
///
/// - `config.json`, `truth.json`
/// - `data/seed-<s>.{csv,json}` for each dataset
/// - `runs/alpha-<a>_seed-<s>/{chain.csv, diagnostics.json, histogram.svg, trace.svg}`
/// - `summary.csv`
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    let data_dir = out_dir.join("data");
    let runs_dir = out_dir.join("runs");
    for d in [out_dir, &data_dir, &runs_dir] {
        fs::create_dir_all(d).map_err(|e| io_err(d, e))?;
    }
    let truth = truth_spec(cfg)?;
    write(&out_dir.join("config.json"), json(cfg)?)?;
    let record = TruthRecord {
        theta0: cfg.truth.theta0,
        t_final: cfg.model.t_final,
        n: cfg.model.n,
        beta: cfg.truth.beta,
        theta_lo: cfg.model.theta_lo,
        theta_hi: cfg.model.theta_hi,
        f0: truth.f0.as_slice().to_vec(),
    };
    write(&out_dir.join("truth.json"), json(&record)?)?;

    let mut datasets = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let obs = dataset(cfg, seed)?;
        obs.write(&data_dir, &format!("seed-{}", dataset_seed(cfg, seed)))?;
        datasets.push((seed, obs));
    }

    let jobs: Vec<(f64, usize)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| (0..datasets.len()).map(move |i| (a, i)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(alpha, i)| {
            let (seed, obs) = &datasets[i];
            let outcome = run_single(cfg, alpha, *seed, obs)?;
            let dir = runs_dir.join(run_dir_name(alpha, *seed));
            fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            write(&dir.join("chain.csv"), outcome.chain.to_csv())?;
            write(&dir.join("diagnostics.json"), json(&outcome.record)?)?;
            let reference = limiting_normal(outcome.record.posterior_mean, &truth, cfg.model.t_final, cfg.model.n)?;
            let zone = if bvm_zone(alpha, cfg.truth.beta) { "inside" } else { "outside" };
            write(
                &dir.join("histogram.svg"),
                histogram_svg(
                    outcome.chain.post_burn_in(),
                    &reference,
                    cfg.truth.theta0,
                    HISTOGRAM_BINS,
                    &format!("alpha = {alpha} ({zone} zone), seed {seed}"),
                ),
            )?;
            write(
                &dir.join("trace.svg"),
                trace_svg(
                    outcome.chain.samples(),
                    outcome.chain.burn_in(),
                    &format!("trace, alpha = {alpha}, seed {seed}"),
                ),
            )?;
            Ok(outcome.record)
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.seed.cmp(&b.seed)));

    write(&out_dir.join("summary.csv"), summary_csv(&records, cfg.truth.beta))?;
    Ok(ExperimentSummary {
        out_dir: out_dir.to_path_buf(),
        records,
    })
}

fn summary_csv(records: &[DiagnosticsRecord], beta: f64) -> String {
    let mut out = String::from(
        "alpha,seed,in_bvm_zone,posterior_mean,posterior_var,ks,tv,abs_bias,standardized_bias,acceptance_rate,ess\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.alpha,
            r.seed,
            bvm_zone(r.alpha, beta),
            r.posterior_mean,
            r.posterior_var,
            r.ks,
            r.tv,
            r.abs_bias,
            r.standardized_bias,
            r.acceptance_rate,
            r.ess
        );
    }
    out
}
