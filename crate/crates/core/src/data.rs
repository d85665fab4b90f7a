//! Synthetic observations in the coefficient form of the two-time model:
//! `x1_k = f_k + zeta1_k / sqrt(n)` and
//! `x2_k = exp(-pi^2 T theta k^2) f_k + zeta2_k / sqrt(n)`.

use std::fs;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prior::TruthSpec;
use crate::rng::{substream, NOISE_X1_CHANNEL, NOISE_X2_CHANNEL};
use crate::spectral::decay_factor;

/// Provenance carried with every dataset (also the JSON sidecar schema).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationMeta {
    pub n: f64,
    pub m: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub theta0: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    x1: Vec<f64>,
    x2: Vec<f64>,
    meta: ObservationMeta,
}

impl Observations {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>, meta: ObservationMeta) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::TruncationMismatch {
                expected: x1.len(),
                actual: x2.len(),
            });
        }
        if x1.is_empty() || x1.len() != meta.m {
            return Err(Error::InvalidArgument(format!(
                "observation length {} does not match m = {}",
                x1.len(),
                meta.m
            )));
        }
        if !(meta.n.is_finite() && meta.n > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "signal-to-noise ratio must be > 0, got {}",
                meta.n
            )));
        }
        if x1.iter().chain(&x2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("observations must be finite".into()));
        }
        Ok(Self { x1, x2, meta })
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn n(&self) -> f64 {
        self.meta.n
    }

    pub fn m(&self) -> usize {
        self.x1.len()
    }

    pub fn meta(&self) -> &ObservationMeta {
        &self.meta
    }

    /// CSV with header `k,x1,x2`, values at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,x1,x2\n");
        for (i, (a, b)) in self.x1.iter().zip(&self.x2).enumerate() {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", i + 1, a, b));
        }
        out
    }

    pub fn from_csv(csv: &str, meta: ObservationMeta) -> Result<Self> {
        let mut lines = csv.lines();
        match lines.next().map(str::trim) {
            Some("k,x1,x2") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `k,x1,x2`, found {other:?}"
                )))
            }
        }
        let mut x1 = Vec::new();
        let mut x2 = Vec::new();
        for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 fields", row + 2)));
            }
            let k: usize = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: k: {e}", row + 2)))?;
            if k != x1.len() + 1 {
                return Err(Error::Parse(format!(
                    "row {}: expected k = {}, found {k}",
                    row + 2,
                    x1.len() + 1
                )));
            }
            let parse = |s: &str, name: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {name}: {e}", row + 2)))
            };
            x1.push(parse(fields[1], "x1")?);
            x2.push(parse(fields[2], "x2")?);
        }
        Self::new(x1, x2, meta)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        let json = serde_json::to_string_pretty(&self.meta)
            .map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let meta_text = fs::read_to_string(dir.join(format!("{stem}.json")))?;
        let meta: ObservationMeta =
            serde_json::from_str(&meta_text).map_err(|e| Error::Parse(e.to_string()))?;
        let csv = fs::read_to_string(dir.join(format!("{stem}.csv")))?;
        Self::from_csv(&csv, meta)
    }
}

/// Simulates the coefficient model at the truth. `noise_scale = 1` is the
/// model itself, `0` gives the noiseless signal.
pub fn generate(
    truth: &TruthSpec,
    t_final: f64,
    n: f64,
    m: usize,
    seed: u64,
    noise_scale: f64,
) -> Result<Observations> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "signal-to-noise ratio must be > 0, got {n}"
        )));
    }
    if !(noise_scale.is_finite() && noise_scale >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise_scale must be >= 0, got {noise_scale}"
        )));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "final time must be > 0, got {t_final}"
        )));
    }
    if truth.f0.m() != m {
        return Err(Error::TruncationMismatch {
            expected: m,
            actual: truth.f0.m(),
        });
    }
    let sd = noise_scale / n.sqrt();
    let theta0 = truth.theta0.value();
    let mut x1 = Vec::with_capacity(m);
    let mut x2 = Vec::with_capacity(m);
    for (k, fk) in truth.f0.iter_indexed() {
        let z1: f64 = StandardNormal.sample(&mut substream(seed, NOISE_X1_CHANNEL, k as u64));
        let z2: f64 = StandardNormal.sample(&mut substream(seed, NOISE_X2_CHANNEL, k as u64));
        x1.push(fk + sd * z1);
        x2.push(decay_factor(theta0, t_final, k) * fk + sd * z2);
    }
    Observations::new(
        x1,
        x2,
        ObservationMeta {
            n,
            m,
            t_final,
            theta0,
            seed,
        },
    )
}
