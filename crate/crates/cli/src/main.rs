//! `tdprune`: generate, train, explain, prune, and run full pruning
//! experiments from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tdprune_core::error::{Error, ErrorCategory};

#[derive(Debug, Parser)]
#[command(
    name = "tdprune",
    version,
    about = "Attribution-guided data pruning for temporal regression",
    after_help = "Pipeline config values can be overridden with dotted flags, e.g. \
                  `tdprune pipeline --config c.json --model.kind mlp --explain.n_coalitions 512`."
)]
pub struct Cli {
    /// Cap internal parallel fan-out (default: available cores). Output
    /// is byte-identical regardless of this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Report errors as {"stage","message"} JSON on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic benchmark dataset as CSV.
    Generate(GenerateArgs),
    /// Train a regressor on a CSV dataset directory.
    Train(TrainArgs),
    /// Explain a trained model on the validation split.
    Explain(ExplainArgs),
    /// Derive a prune plan from a global heatmap.
    Prune(PruneArgs),
    /// Run the full baseline → explain → prune → retrain experiment.
    Pipeline(PipelineArgs),
    /// Re-render a report.json as markdown or CSV.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Time steps per sample (1 = flat tabular).
    #[arg(long = "t-steps", default_value_t = 1)]
    pub t_steps: usize,
    /// Structured features driving the target.
    #[arg(long, default_value_t = 20)]
    pub structured: usize,
    /// Noise features independent of the target.
    #[arg(long, default_value_t = 10)]
    pub noise: usize,
    /// Target noise standard deviation.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for features.csv, targets.csv, schema.json.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset directory holding features.csv, targets.csv, schema.json.
    #[arg(long)]
    pub data: std::path::PathBuf,
    /// Regressor kind.
    #[arg(long, value_parser = ["ridge", "mlp", "gridconv"], default_value = "mlp")]
    pub model: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory (defaults to --data).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Dataset directory holding features.csv, targets.csv, schema.json.
    #[arg(long)]
    pub data: std::path::PathBuf,
    /// Trained model JSON written by `train` or `pipeline`.
    #[arg(long = "model-file")]
    pub model_file: std::path::PathBuf,
    /// Attribution method.
    #[arg(long, value_parser = ["shap", "lime"], default_value = "shap")]
    pub method: String,
    /// Enumerate every coalition (requires ≤ 20 attribution units).
    #[arg(long, conflicts_with = "coalitions")]
    pub exhaustive: bool,
    /// Coalition sampling budget for SHAP.
    #[arg(long)]
    pub coalitions: Option<usize>,
    /// Background set size drawn from the training split.
    #[arg(long, default_value_t = 50)]
    pub background: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory (defaults to the dataset directory).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    /// global_heatmap.json written by `explain` or `pipeline`.
    #[arg(long)]
    pub heatmap: std::path::PathBuf,
    /// Feature-pruning strategy.
    #[arg(long, value_parser = ["selective", "max"])]
    pub strategy: String,
    /// Selective threshold: prune features scoring below tau·max.
    #[arg(long, conflicts_with = "top_k")]
    pub tau: Option<f64>,
    /// Max strategy: retain only the top-k ranked features.
    #[arg(long = "top-k")]
    pub top_k: Option<usize>,
    /// Also prune samples above the (1−q) residual quantile
    /// (requires --data).
    #[arg(long = "sample-q")]
    pub sample_q: Option<f64>,
    /// Dataset directory, needed for residual scoring with --sample-q.
    #[arg(long)]
    pub data: Option<std::path::PathBuf>,
    /// Model kind for residual scoring.
    #[arg(long, value_parser = ["ridge", "mlp", "gridconv"], default_value = "ridge")]
    pub model: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output path (defaults to prune_plan.json next to the heatmap).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pipeline config JSON. Flags and dotted overrides take precedence
    /// over file values.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Override the config's output_dir.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the default synthetic-benchmark config and exit.
    #[arg(long = "print-default-config")]
    pub print_default_config: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// report.json produced by `pipeline`.
    #[arg(long = "in")]
    pub input: std::path::PathBuf,
    /// Output format.
    #[arg(long, value_parser = ["md", "markdown", "csv", "json"])]
    pub format: String,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

/// Split dotted-path overrides (`--model.kind mlp`, `--split.train=0.7`)
/// out of the raw argv so clap never sees them.
fn extract_dotted_overrides(argv: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut clean = Vec::with_capacity(argv.len());
    let mut overrides = Vec::new();
    let mut iter = argv.into_iter().peekable();
    while let Some(arg) = iter.next() {
        let is_dotted = arg.starts_with("--")
            && arg[2..].split('=').next().is_some_and(|path| {
                path.contains('.')
                    && path
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
            });
        if !is_dotted {
            clean.push(arg);
            continue;
        }
        let body = &arg[2..];
        if let Some((path, value)) = body.split_once('=') {
            overrides.push((path.to_string(), value.to_string()));
        } else if let Some(value) = iter.next() {
            overrides.push((body.to_string(), value));
        } else {
            // Missing value: keep it for clap to reject with usage text.
            clean.push(arg);
        }
    }
    (clean, overrides)
}

fn report_error(error: &Error, json_errors: bool) -> ExitCode {
    if json_errors {
        let doc = serde_json::json!({
            "stage": error.stage().unwrap_or("cli"),
            "message": error.to_string(),
        });
        eprintln!("{doc}");
    } else {
        eprintln!("error: {error}");
    }
    match error.category() {
        ErrorCategory::Usage => ExitCode::from(1),
        ErrorCategory::Data => ExitCode::from(2),
        ErrorCategory::Numeric => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let (argv, overrides) = extract_dotted_overrides(std::env::args().collect());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    if !overrides.is_empty() && !matches!(cli.command, Command::Pipeline(_)) {
        let err = Error::config("dotted config overrides only apply to the pipeline subcommand");
        return report_error(&err, cli.json_errors);
    }

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let err = Error::config(format!("could not build thread pool: {e}"));
            return report_error(&err, cli.json_errors);
        }
    };

    let json_errors = cli.json_errors;
    match pool.install(|| commands::run(cli, &overrides)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e, json_errors),
    }
}
