use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rkhs_regress::harness::{
    self, CommandConfig, Example1Config, Example2Config, Example3Config, FitConfig, FitMethod, KernelKind,
    DEFAULT_SEED, THREADS_ENV,
};
use rkhs_regress::io::{parse_lambda_grid, read_samples_csv};
use rkhs_regress::Result;

/// Nonparametric regression on [-1, 1] with Legendre, Sinc and kernel ridge
/// estimators.
#[derive(Parser)]
#[command(name = "rkhs-regress", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error table and plot data for the sin(20x)/(20x) example.
    Example1(Example1Args),
    /// Error tables for the random Brownian-type series.
    Example2(Example2Args),
    /// Condition numbers of Sinc Gram matrices.
    Example3(Example3Args),
    /// Fit one estimator to a CSV of samples and predict on a grid.
    Fit(FitArgs),
    /// Re-run a manifest written by an earlier command.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct Shared {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Quadrature nodes for L2 errors; derived from the problem when omitted.
    #[arg(long)]
    quad_nodes: Option<usize>,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Example1Args {
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Bandwidth of the Sinc projection.
    #[arg(long)]
    c: Option<f64>,
    /// Bandwidth of the kernel ridge estimator.
    #[arg(long)]
    krr_c: Option<f64>,
    #[arg(long = "N")]
    degree: Option<usize>,
    /// Comma-separated sample sizes, replacing both projection and KRR sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_parser = lambda_grid)]
    lambda_grid: Option<::std::vec::Vec<f64>>,
}

#[derive(Args)]
struct Example2Args {
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    krr_c: Option<f64>,
    #[arg(long = "N")]
    degree: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_parser = lambda_grid)]
    lambda_grid: Option<::std::vec::Vec<f64>>,
    /// Comma-separated smoothness values s.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Number of series terms K.
    #[arg(long)]
    truncation: Option<usize>,
    /// Draw the series coefficients once instead of per replication.
    #[arg(long)]
    frozen: bool,
}

#[derive(Args)]
struct Example3Args {
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Sinc,
    Legendre,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Projection,
    Krr,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    shared: Shared,
    /// CSV file with columns x,y.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sinc")]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value = "projection")]
    method: MethodArg,
    #[arg(long, default_value_t = 20.0)]
    c: f64,
    #[arg(long = "N", default_value_t = 20)]
    degree: usize,
    #[arg(long, value_parser = lambda_grid)]
    lambda_grid: Option<::std::vec::Vec<f64>>,
    /// Comma-separated evaluation points; a uniform grid when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eval_points: Option<Vec<f64>>,
    #[arg(long, default_value_t = harness::DEFAULT_GRID_POINTS)]
    grid_points: usize,
}

#[derive(Args)]
struct ReplayArgs {
    /// Manifest JSON written by a previous run.
    manifest: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
}

fn lambda_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    parse_lambda_grid(s).map_err(|e| e.to_string())
}

fn example1(a: Example1Args) -> CommandConfig {
    let mut cfg =
        Example1Config { seed: a.shared.seed, quad_nodes: a.shared.quad_nodes, ..Default::default() };
    if let Some(r) = a.shared.replications {
        cfg.replications = r;
    }
    if let Some(v) = a.noise_sigma {
        cfg.noise_sigma = v;
    }
    if let Some(v) = a.c {
        cfg.sinc_c = v;
    }
    if let Some(v) = a.krr_c {
        cfg.krr_c = v;
    }
    if let Some(v) = a.degree {
        cfg.legendre_degree = v;
    }
    if let Some(v) = a.n {
        cfg.projection_sizes = v.clone();
        cfg.krr_sizes = v;
    }
    if let Some(v) = a.lambda_grid {
        cfg.lambda_grid = v;
    }
    CommandConfig::Example1(cfg)
}

fn example2(a: Example2Args) -> CommandConfig {
    let mut cfg = Example2Config {
        seed: a.shared.seed,
        quad_nodes: a.shared.quad_nodes,
        frozen: a.frozen,
        ..Default::default()
    };
    if let Some(r) = a.shared.replications {
        cfg.replications = r;
    }
    if let Some(v) = a.noise_sigma {
        cfg.noise_sigma = v;
    }
    if let Some(v) = a.c {
        cfg.sinc_c = v;
    }
    if let Some(v) = a.krr_c {
        cfg.krr_c = v;
    }
    if let Some(v) = a.degree {
        cfg.legendre_degree = v;
    }
    if let Some(v) = a.n {
        cfg.projection_sizes = v.clone();
        cfg.krr_sizes = v;
    }
    if let Some(v) = a.lambda_grid {
        cfg.lambda_grid = v;
    }
    if let Some(v) = a.s {
        cfg.smoothness = v;
    }
    if let Some(v) = a.truncation {
        cfg.truncation = v;
    }
    CommandConfig::Example2(cfg)
}

fn example3(a: Example3Args) -> CommandConfig {
    let mut cfg = Example3Config { seed: a.shared.seed, ..Default::default() };
    if let Some(r) = a.shared.replications {
        cfg.realizations = r;
    }
    if let Some(v) = a.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = a.c {
        cfg.bandwidths = v;
    }
    if let Some(v) = a.n {
        cfg.sizes = v;
    }
    CommandConfig::Example3(cfg)
}

fn fit(a: &FitArgs) -> Result<CommandConfig> {
    let samples = read_samples_csv(std::fs::File::open(&a.input)?)?;
    Ok(CommandConfig::Fit(FitConfig {
        method: match a.method {
            MethodArg::Projection => FitMethod::Projection,
            MethodArg::Krr => FitMethod::Krr,
        },
        kernel: match a.kernel {
            KernelArg::Sinc => KernelKind::Sinc,
            KernelArg::Legendre => KernelKind::Legendre,
        },
        c: a.c,
        degree: a.degree,
        lambda_grid: a.lambda_grid.clone().unwrap_or_else(rkhs_regress::krr::default_lambda_grid),
        samples,
        eval_points: a.eval_points.clone().unwrap_or_else(|| harness::uniform_grid(a.grid_points)),
    }))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Example1(a) => {
            let (threads, out) = (a.shared.threads, a.shared.out_dir.clone());
            harness::run_and_write(example1(a), threads, &out)
        }
        Command::Example2(a) => {
            let (threads, out) = (a.shared.threads, a.shared.out_dir.clone());
            harness::run_and_write(example2(a), threads, &out)
        }
        Command::Example3(a) => {
            let (threads, out) = (a.shared.threads, a.shared.out_dir.clone());
            harness::run_and_write(example3(a), threads, &out)
        }
        Command::Fit(a) => {
            let cfg = fit(&a)?;
            harness::run_and_write(cfg, a.shared.threads, &a.shared.out_dir)
        }
        Command::Replay(a) => harness::replay(&a.manifest, a.threads, &a.out_dir),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
