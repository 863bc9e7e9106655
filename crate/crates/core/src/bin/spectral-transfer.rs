use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spectral_transfer::generators::{self, SbmParams};
use spectral_transfer::harness::{self, GdConfig, SweepConfig, VerifyConfig, VerifyPolicy, EXIT_ERROR};
use spectral_transfer::metrics::ReportOptions;
use spectral_transfer::{io, Error, Normalization, Result};

#[derive(Parser)]
#[command(name = "spectral-transfer", version, about = "Spectral contrastive embeddings and transfer checks on positive-pair graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a block-model instance to a graph file.
    Generate(GenerateArgs),
    /// Assumption report and lemma checks as JSON. Exit 1 on failure.
    Verify(VerifyArgs),
    /// Closed-form minimizer as CSV (`vertex,f1,…,fk`).
    Embed(EmbedArgs),
    /// Target error and bounds over a grid of `t` and `k`.
    Sweep(SweepArgs),
    /// Gradient descent on the loss against the closed-form minimum.
    GdCheck(GdArgs),
}

#[derive(Args)]
struct GraphInput {
    #[arg(long)]
    graph: PathBuf,
    /// Rescale weights to total mass 1 instead of rejecting them.
    #[arg(long)]
    normalize: bool,
}

impl GraphInput {
    fn normalization(&self) -> Normalization {
        if self.normalize {
            Normalization::Rescale
        } else {
            Normalization::Strict
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON parameter file; flags below override its fields.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    cluster_size: Option<usize>,
    #[arg(long)]
    extra_clusters: Option<usize>,
    #[arg(long)]
    p_intra: Option<f64>,
    #[arg(long)]
    q_same: Option<f64>,
    #[arg(long)]
    q_cross: Option<f64>,
    #[arg(long)]
    q_other: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckOptions {
    #[arg(long, default_value_t = 8.0)]
    c: f64,
    #[arg(long, default_value_t = 22)]
    exact_gamma_cap: usize,
}

impl CheckOptions {
    fn report_options(&self) -> ReportOptions {
        ReportOptions {
            c: self.c,
            exact_cap: self.exact_gamma_cap,
            ..ReportOptions::default()
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Embedding dimension; defaults to the number of clusters.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    options: CheckOptions,
    /// Also fail when an assumption verdict fails.
    #[arg(long)]
    strict: bool,
    /// Report path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Comma-separated dimensions; defaults to the number of clusters.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    t: Vec<u32>,
    #[command(flatten)]
    options: CheckOptions,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GdArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sbm_params(args: &GenerateArgs) -> Result<SbmParams> {
    let mut params = match &args.params {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
        None => generators::reference_sbm(0),
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field { params.$field = v; })*
        };
    }
    set!(r, cluster_size, extra_clusters, p_intra, q_same, q_cross, q_other, seed);
    Ok(params)
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn default_k(input: &GraphInput) -> Result<usize> {
    let file = io::load_graph(&input.graph, input.normalization())?;
    Ok(file.domain()?.num_clusters())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate(args) => {
            harness::cmd_generate(&sbm_params(&args)?, &args.out)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let k = match args.k {
                Some(k) => k,
                None => default_k(&args.input)?,
            };
            let mut config = VerifyConfig::new(k);
            config.options = args.options.report_options();
            if args.strict {
                config.policy = VerifyPolicy::RequireAssumptions;
            }
            let report = harness::cmd_verify(&args.input.graph, &config, args.input.normalization())?;
            emit_json(&report, args.out.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Embed(args) => {
            harness::cmd_embed(&args.input.graph, args.k, args.sigma, &args.out, args.input.normalization())?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let k_values = if args.k.is_empty() {
                vec![default_k(&args.input)?]
            } else {
                args.k.clone()
            };
            let mut config = SweepConfig::new(args.t.clone(), k_values)?;
            config.sigma = args.sigma;
            config.options = args.options.report_options();
            harness::cmd_sweep(&args.input.graph, &config, &args.out, args.input.normalization())?;
            Ok(0)
        }
        Command::GdCheck(args) => {
            let config = GdConfig {
                k: args.k,
                sigma: args.sigma,
                steps: args.steps,
                lr: args.lr,
                seed: args.seed,
            };
            let report = harness::cmd_gd_crosscheck(&args.input.graph, &config, args.input.normalization())?;
            emit_json(&report, args.out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
