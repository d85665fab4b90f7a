//! Experiment configuration.
//!
//! The file is TOML. Grammar (every key listed; defaults in brackets):
//!
//! ```toml
//! name = "fig1"                 # run label [\"experiment\"]
//! output_dir = "out/fig1"       # output root, overridable from the CLI
//! seeds = [1, 2, 3]             # distinct non-negative integers, at least one
//!
//! [truth]
//! theta0 = 0.01                 # true diffusivity, inside (theta_lo, theta_hi)
//! f0_decay = 2.0                # f0_k = k^(-f0_decay)            [2.0]
//! beta = 1.5                    # regularity of f0 (metadata)     [f0_decay - 0.5]
//!
//! [model]
//! T = 1.0                       # final time
//! n = 1e5                       # signal-to-noise ratio
//! m = 100                       # truncation level
//! theta_lo = 0.001              # uniform prior support           [0.001]
//! theta_hi = 0.1                #                                 [0.1]
//!
//! [prior]
//! alpha = [1.0]                 # prior regularities, each > 0
//!
//! [mcmc]
//! iterations = 100000
//! burn_in = 1000                #                                 [1000]
//! proposal_sd = "auto"          # "auto" or a positive number     ["auto"]
//! init = "auto"                 # "auto" (geometric midpoint of the support) or a number ["auto"]
//!
//! [data]
//! shared_dataset = false        # one dataset for every run       [false]
//! data_seed = 1                 # required when shared_dataset = true
//! noise_scale = 1.0             #                                 [1.0]
//! ```
//!
//! Validation collects every violation instead of stopping at the first.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::spectral::ModelConfig;

pub const PRESET_FIG1: &str = include_str!("../../presets/fig1.toml");
pub const PRESET_FIG2: &str = include_str!("../../presets/fig2.toml");
pub const PRESET_FIG3: &str = include_str!("../../presets/fig3.toml");

pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(PRESET_FIG1),
        "fig2" => Some(PRESET_FIG2),
        "fig3" => Some(PRESET_FIG3),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthBlock {
    pub theta0: f64,
    pub f0_decay: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalSetting {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSetting {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcBlock {
    pub iterations: usize,
    pub burn_in: usize,
    pub proposal_sd: ProposalSetting,
    pub init: InitSetting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataBlock {
    pub shared_dataset: bool,
    pub data_seed: Option<u64>,
    pub noise_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    pub truth: TruthBlock,
    pub model: ModelConfig,
    pub alphas: Vec<f64>,
    pub mcmc: McmcBlock,
    pub data: DataBlock,
}

impl ExperimentConfig {
    /// Initial value of every chain.
    pub fn init_theta(&self) -> f64 {
        match self.mcmc.init {
            InitSetting::Value(v) => v,
            InitSetting::Auto => (self.model.theta_lo * self.model.theta_hi).sqrt(),
        }
    }

    /// Replaces the seed list, re-checking distinctness.
    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Result<Self, ConfigErrors> {
        let mut errs = Vec::new();
        check_seeds(&seeds, &mut errs);
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        self.seeds = seeds;
        Ok(self)
    }
}

/// Every violation found, one human-readable line each, prefixed by its key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

struct Reader<'a> {
    errors: &'a mut Vec<String>,
}

impl Reader<'_> {
    fn push(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn block<'t>(&mut self, root: &'t Table, name: &str, required: bool) -> Option<&'t Table> {
        match root.get(name) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.push(format!("{name}: expected a table"));
                None
            }
            None => {
                if required {
                    self.push(format!("{name}: missing block"));
                }
                None
            }
        }
    }

    fn unknown_keys(&mut self, table: &Table, path: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let full = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                self.push(format!("{full}: unknown key"));
            }
        }
    }

    fn number(&mut self, table: Option<&Table>, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let full = format!("{path}.{key}");
        match table.and_then(|t| t.get(key)) {
            Some(Value::Float(x)) => Some(*x),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(_) => {
                self.push(format!("{full}: expected a number"));
                None
            }
            None => {
                if default.is_none() && table.is_some() {
                    self.push(format!("{full}: missing"));
                }
                default
            }
        }
    }

    fn integer(&mut self, table: Option<&Table>, path: &str, key: &str, default: Option<i64>) -> Option<i64> {
        let full = format!("{path}.{key}");
        match table.and_then(|t| t.get(key)) {
            Some(Value::Integer(i)) => Some(*i),
            Some(Value::Float(x)) if x.fract() == 0.0 && x.abs() < 9.0e15 => Some(*x as i64),
            Some(_) => {
                self.push(format!("{full}: expected an integer"));
                None
            }
            None => {
                if default.is_none() && table.is_some() {
                    self.push(format!("{full}: missing"));
                }
                default
            }
        }
    }
}

fn check_seeds(seeds: &[u64], errs: &mut Vec<String>) {
    if seeds.is_empty() {
        errs.push("seeds: at least one seed is required".into());
    }
    for (i, s) in seeds.iter().enumerate() {
        if seeds[..i].contains(s) {
            errs.push(format!("seeds: duplicate seed {s}"));
        }
    }
}

fn positive(x: Option<f64>, path: &str, errs: &mut Vec<String>) {
    if let Some(v) = x {
        if !(v.is_finite() && v > 0.0) {
            errs.push(format!("{path}: must be > 0, got {v}"));
        }
    }
}

/// Parses and range-checks a configuration file.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let root: Table = toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("syntax: {e}")]))?;
    let mut errors = Vec::new();
    let mut r = Reader { errors: &mut errors };

    r.unknown_keys(
        &root,
        "",
        &["name", "output_dir", "seeds", "truth", "model", "prior", "mcmc", "data"],
    );

    let name = match root.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            r.push("name: expected a string".into());
            String::new()
        }
        None => "experiment".into(),
    };
    let output_dir = match root.get("output_dir") {
        Some(Value::String(s)) => PathBuf::from(s),
        Some(_) => {
            r.push("output_dir: expected a string".into());
            PathBuf::new()
        }
        None => PathBuf::from("out").join(&name),
    };

    let mut seeds = Vec::new();
    match root.get("seeds") {
        Some(Value::Array(items)) => {
            for (i, v) in items.iter().enumerate() {
                match v {
                    Value::Integer(s) if *s >= 0 => seeds.push(*s as u64),
                    _ => r.push(format!("seeds[{i}]: expected a non-negative integer")),
                }
            }
        }
        Some(_) => r.push("seeds: expected an array of integers".into()),
        None => r.push("seeds: missing".into()),
    }
    check_seeds(&seeds, r.errors);

    // truth
    let truth_t = r.block(&root, "truth", true);
    if let Some(t) = truth_t {
        r.unknown_keys(t, "truth", &["theta0", "f0_decay", "beta"]);
    }
    let theta0 = r.number(truth_t, "truth", "theta0", None);
    let f0_decay = r.number(truth_t, "truth", "f0_decay", Some(2.0));
    let beta = r.number(truth_t, "truth", "beta", f0_decay.map(|d| d - 0.5));
    positive(theta0, "truth.theta0", r.errors);
    positive(f0_decay, "truth.f0_decay", r.errors);
    positive(beta, "truth.beta", r.errors);

    // model
    let model_t = r.block(&root, "model", true);
    if let Some(t) = model_t {
        r.unknown_keys(t, "model", &["T", "n", "m", "theta_lo", "theta_hi"]);
    }
    let t_final = r.number(model_t, "model", "T", None);
    let n = r.number(model_t, "model", "n", None);
    let m = r.integer(model_t, "model", "m", None);
    let theta_lo = r.number(model_t, "model", "theta_lo", Some(0.001));
    let theta_hi = r.number(model_t, "model", "theta_hi", Some(0.1));
    positive(t_final, "model.T", r.errors);
    positive(n, "model.n", r.errors);
    positive(theta_lo, "model.theta_lo", r.errors);
    if let Some(m) = m {
        if m < 1 {
            r.push(format!("model.m: must be >= 1, got {m}"));
        }
    }
    if let (Some(lo), Some(hi)) = (theta_lo, theta_hi) {
        if lo >= hi {
            r.push(format!("model.theta_hi: must exceed theta_lo ({lo}), got {hi}"));
        }
        if let Some(t0) = theta0 {
            if !(lo < t0 && t0 < hi) {
                r.push(format!("truth.theta0: {t0} lies outside ({lo}, {hi})"));
            }
        }
    }

    // prior
    let prior_t = r.block(&root, "prior", true);
    if let Some(t) = prior_t {
        r.unknown_keys(t, "prior", &["alpha"]);
    }
    let mut alphas = Vec::new();
    match prior_t.map(|t| t.get("alpha")) {
        Some(Some(Value::Array(items))) => {
            if items.is_empty() {
                r.push("prior.alpha: at least one value is required".into());
            }
            for (i, v) in items.iter().enumerate() {
                let a = match v {
                    Value::Float(x) => Some(*x),
                    Value::Integer(x) => Some(*x as f64),
                    _ => None,
                };
                match a {
                    Some(a) if a.is_finite() && a > 0.0 => alphas.push(a),
                    Some(a) => r.push(format!("prior.alpha[{i}]: must be > 0, got {a}")),
                    None => r.push(format!("prior.alpha[{i}]: expected a number")),
                }
            }
        }
        Some(Some(Value::Float(x))) if *x > 0.0 => alphas.push(*x),
        Some(Some(Value::Integer(x))) if *x > 0 => alphas.push(*x as f64),
        Some(Some(v)) => r.push(format!("prior.alpha: expected positive number(s), got {v}")),
        Some(None) => r.push("prior.alpha: missing".into()),
        None => {}
    }
    for (i, a) in alphas.iter().enumerate() {
        if alphas[..i].contains(a) {
            r.push(format!("prior.alpha: duplicate value {a}"));
        }
    }

    // mcmc
    let mcmc_t = r.block(&root, "mcmc", true);
    if let Some(t) = mcmc_t {
        r.unknown_keys(t, "mcmc", &["iterations", "burn_in", "proposal_sd", "init"]);
    }
    let iterations = r.integer(mcmc_t, "mcmc", "iterations", None);
    let burn_in = r.integer(mcmc_t, "mcmc", "burn_in", Some(1000));
    if let Some(it) = iterations {
        if it < 2 {
            r.push(format!("mcmc.iterations: must be >= 2, got {it}"));
        }
    }
    if let Some(b) = burn_in {
        if b < 0 {
            r.push(format!("mcmc.burn_in: must be >= 0, got {b}"));
        }
        if let Some(it) = iterations {
            if b >= it {
                r.push(format!("mcmc.burn_in: must be < iterations ({it}), got {b}"));
            }
        }
    }
    let proposal_sd = match mcmc_t.and_then(|t| t.get("proposal_sd")) {
        None => Some(ProposalSetting::Auto),
        Some(Value::String(s)) if s == "auto" => Some(ProposalSetting::Auto),
        Some(Value::Float(x)) if x.is_finite() && *x > 0.0 => Some(ProposalSetting::Fixed(*x)),
        Some(Value::Integer(x)) if *x > 0 => Some(ProposalSetting::Fixed(*x as f64)),
        Some(v) => {
            r.push(format!("mcmc.proposal_sd: expected \"auto\" or a number > 0, got {v}"));
            None
        }
    };
    let init = match mcmc_t.and_then(|t| t.get("init")) {
        None => Some(InitSetting::Auto),
        Some(Value::String(s)) if s == "auto" => Some(InitSetting::Auto),
        Some(Value::Float(x)) => Some(InitSetting::Value(*x)),
        Some(Value::Integer(x)) => Some(InitSetting::Value(*x as f64)),
        Some(v) => {
            r.push(format!("mcmc.init: expected \"auto\" or a number, got {v}"));
            None
        }
    };
    if let (Some(InitSetting::Value(v)), Some(lo), Some(hi)) = (init, theta_lo, theta_hi) {
        if !(lo < v && v < hi) {
            r.push(format!("mcmc.init: {v} lies outside ({lo}, {hi})"));
        }
    }

    // data
    let data_t = r.block(&root, "data", false);
    if let Some(t) = data_t {
        r.unknown_keys(t, "data", &["shared_dataset", "data_seed", "noise_scale"]);
    }
    let shared_dataset = match data_t.and_then(|t| t.get("shared_dataset")) {
        None => false,
        Some(Value::Boolean(b)) => *b,
        Some(_) => {
            r.push("data.shared_dataset: expected a boolean".into());
            false
        }
    };
    let data_seed = match data_t.and_then(|t| t.get("data_seed")) {
        None => None,
        Some(Value::Integer(s)) if *s >= 0 => Some(*s as u64),
        Some(_) => {
            r.push("data.data_seed: expected a non-negative integer".into());
            None
        }
    };
    if shared_dataset && data_seed.is_none() {
        r.push("data.data_seed: required when shared_dataset = true".into());
    }
    let noise_scale = match data_t.and_then(|t| t.get("noise_scale")) {
        None => Some(1.0),
        Some(Value::Float(x)) if x.is_finite() && *x >= 0.0 => Some(*x),
        Some(Value::Integer(x)) if *x >= 0 => Some(*x as f64),
        Some(v) => {
            r.push(format!("data.noise_scale: expected a number >= 0, got {v}"));
            None
        }
    };

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }

    // all required values are present when no error was recorded
    let model = ModelConfig::new(
        theta_lo.unwrap(),
        theta_hi.unwrap(),
        t_final.unwrap(),
        n.unwrap(),
        m.unwrap() as usize,
    )
    .map_err(|e| ConfigErrors(vec![format!("model: {e}")]))?;

    Ok(ExperimentConfig {
        name,
        output_dir,
        seeds,
        truth: TruthBlock {
            theta0: theta0.unwrap(),
            f0_decay: f0_decay.unwrap(),
            beta: beta.unwrap(),
        },
        model,
        alphas,
        mcmc: McmcBlock {
            iterations: iterations.unwrap() as usize,
            burn_in: burn_in.unwrap() as usize,
            proposal_sd: proposal_sd.unwrap(),
            init: init.unwrap(),
        },
        data: DataBlock {
            shared_dataset,
            data_seed,
            noise_scale: noise_scale.unwrap(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_preset_parses_to_simulation_settings() {
        let cfg = validate_config(PRESET_FIG1).unwrap();
        assert_eq!(cfg.truth.theta0, 0.01);
        assert_eq!(cfg.truth.f0_decay, 2.0);
        assert_eq!(cfg.truth.beta, 1.5);
        assert_eq!(cfg.model.t_final, 1.0);
        assert_eq!(cfg.model.n, 1e5);
        assert_eq!(cfg.model.m, 100);
        assert_eq!(cfg.alphas, vec![1.0]);
        assert_eq!(cfg.mcmc.iterations, 100_000);
        assert_eq!(cfg.mcmc.burn_in, 1000);
        assert_eq!(cfg.seeds.len(), 3);
        assert!(!cfg.data.shared_dataset);
        assert_eq!(cfg.init_theta(), (0.001_f64 * 0.1).sqrt());
    }

    #[test]
    fn other_presets_parse() {
        let fig2 = validate_config(PRESET_FIG2).unwrap();
        assert_eq!(fig2.alphas, vec![2.6, 3.0, 3.4]);
        assert!(fig2.data.shared_dataset);
        let fig3 = validate_config(PRESET_FIG3).unwrap();
        assert_eq!(fig3.seeds.len(), 2);
    }

    #[test]
    fn negative_alpha_names_the_prior_block() {
        let text = PRESET_FIG1.replace("alpha = [1.0]", "alpha = [-1.0]");
        let errs = validate_config(&text).unwrap_err();
        assert!(errs.0.iter().any(|e| e.starts_with("prior.alpha")), "{errs}");
    }

    #[test]
    fn burn_in_must_be_below_iterations() {
        let text = PRESET_FIG1.replace("burn_in = 1000", "burn_in = 100000");
        let errs = validate_config(&text).unwrap_err();
        assert!(errs.0.iter().any(|e| e.starts_with("mcmc.burn_in")), "{errs}");
    }

    #[test]
    fn every_violation_is_reported() {
        let text = r#"
            seeds = [1, 1]
            bogus = 3
            [truth]
            theta0 = 0.5
            [model]
            T = -1.0
            n = 1e5
            m = 0
            [prior]
            alpha = [0.0, "x"]
            [mcmc]
            iterations = 10
            burn_in = 20
            proposal_sd = -2.0
            [data]
            shared_dataset = true
        "#;
        let errs = validate_config(text).unwrap_err().0;
        for prefix in [
            "seeds: duplicate",
            "bogus: unknown key",
            "truth.theta0",
            "model.T",
            "model.m",
            "prior.alpha[0]",
            "prior.alpha[1]",
            "mcmc.burn_in",
            "mcmc.proposal_sd",
            "data.data_seed",
        ] {
            assert!(errs.iter().any(|e| e.starts_with(prefix)), "missing {prefix}: {errs:?}");
        }
    }

    #[test]
    fn missing_blocks_and_syntax_errors() {
        let errs = validate_config("seeds = [1]").unwrap_err().0;
        for block in ["truth", "model", "prior", "mcmc"] {
            assert!(errs.iter().any(|e| e == &format!("{block}: missing block")), "{errs:?}");
        }
        assert!(validate_config("seeds = [").unwrap_err().0[0].starts_with("syntax"));
    }

    #[test]
    fn seed_override_checks_duplicates() {
        let cfg = validate_config(PRESET_FIG1).unwrap();
        assert!(cfg.clone().with_seeds(vec![4, 4]).is_err());
        assert_eq!(cfg.with_seeds(vec![9]).unwrap().seeds, vec![9]);
    }
}
