use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heatbvm::experiment::{analyze_chain, preset_text, run_experiment, validate_config, TruthRecord};
use heatbvm::sampler::{Chain, DEFAULT_BURN_IN};

/// Overrides the output root; runs land in `$HEATBVM_OUT_ROOT/<name>`.
const OUT_ROOT_ENV: &str = "HEATBVM_OUT_ROOT";

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "heatbvm", version, about = "Marginal posterior of the heat-equation diffusivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a built-in preset.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ["fig1", "fig2", "fig3"])]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated seed list replacing the configured one.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Validate a config file and report every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Diagnose a chain CSV against a truth JSON.
    Diag {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
    },
}

enum Failure {
    Validation(String),
    Runtime(String),
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { config } => {
            let text = read(&config)?;
            let cfg = validate_config(&text).map_err(|e| Failure::Validation(e.to_string()))?;
            println!(
                "ok: {} ({} alpha value(s) x {} seed(s))",
                cfg.name,
                cfg.alphas.len(),
                cfg.seeds.len()
            );
            Ok(())
        }
        Command::Run {
            config,
            preset,
            out,
            seeds,
        } => {
            let text = match (&config, &preset) {
                (Some(path), _) => read(path)?,
                (None, Some(name)) => preset_text(name)
                    .ok_or_else(|| Failure::Validation(format!("unknown preset {name}")))?
                    .to_string(),
                (None, None) => return Err(Failure::Validation("need --config or --preset".into())),
            };
            let mut cfg = validate_config(&text).map_err(|e| Failure::Validation(e.to_string()))?;
            if let Some(seeds) = seeds {
                cfg = cfg.with_seeds(seeds).map_err(|e| Failure::Validation(e.to_string()))?;
            }
            let out_dir = match (out, std::env::var_os(OUT_ROOT_ENV)) {
                (Some(dir), _) => dir,
                (None, Some(root)) => PathBuf::from(root).join(&cfg.name),
                (None, None) => cfg.output_dir.clone(),
            };
            let summary = run_experiment(&cfg, &out_dir).map_err(|e| Failure::Runtime(e.to_string()))?;
            for r in &summary.records {
                println!(
                    "alpha={} seed={} mean={:.6e} sd={:.3e} ks={:.4} tv={:.4} std_bias={:.3} acc={:.3} ess={:.0}",
                    r.alpha,
                    r.seed,
                    r.posterior_mean,
                    r.posterior_var.sqrt(),
                    r.ks,
                    r.tv,
                    r.standardized_bias,
                    r.acceptance_rate,
                    r.ess
                );
            }
            println!("wrote {}", summary.out_dir.display());
            Ok(())
        }
        Command::Diag {
            chain,
            truth,
            burn_in,
        } => {
            let chain = Chain::from_csv(&read(&chain)?, burn_in)
                .map_err(|e| Failure::Validation(e.to_string()))?;
            let record: TruthRecord = serde_json::from_str(&read(&truth)?)
                .map_err(|e| Failure::Validation(format!("truth: {e}")))?;
            let spec = record.truth().map_err(|e| Failure::Validation(format!("truth: {e}")))?;
            let report = analyze_chain(&chain, &spec, record.t_final, record.n)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("validation error:\n{msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
