//! Reproduction runs for the three numerical examples and single ad-hoc fits.
//!
//! A command is described by a fully materialized [`CommandConfig`]. Running
//! it yields named output files whose contents depend only on the config, so
//! re-executing the [`RunManifest`] written next to them reproduces them byte
//! for byte, whatever the thread count.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::estimators::{fit_legendre_projection, fit_sinc_projection, Estimate, RegressionSample};
use crate::io::{self, format_float, ReportRow};
use crate::krr::{
    self, build_gram, condition_number_2, default_lambda_grid, fit_krr, gcv_select,
    kappa2_lower_bound_expectation, kappa2_upper_bound, ConditionReport, Kernel,
};
use crate::sinc::SincBandwidth;
use crate::testbed::{
    mean_and_std, run_experiment, sample_uniform_design, samples_for_replication, substream,
    truth_for_replication, EstimatorSpec, ExperimentConfig, ExperimentReport, NoiseSpec, Purpose, TruthSpec,
};
use crate::{Error, Result};

/// Environment variable read when no thread count is given.
pub const THREADS_ENV: &str = "RKHS_REGRESS_THREADS";

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REPLICATIONS: usize = 100;
pub const DEFAULT_GRID_POINTS: usize = 401;

/// Thread count from the flag, else from [`THREADS_ENV`], else `None`
/// (rayon's default).
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV} must be an integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Config {
    pub seed: u64,
    pub replications: usize,
    pub quad_nodes: Option<usize>,
    pub noise_sigma: f64,
    pub sinc_c: f64,
    pub legendre_degree: usize,
    pub projection_sizes: Vec<usize>,
    pub krr_c: f64,
    pub krr_sizes: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub grid_points: usize,
}

impl Default for Example1Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            replications: DEFAULT_REPLICATIONS,
            quad_nodes: None,
            noise_sigma: 0.1,
            sinc_c: 20.0,
            legendre_degree: 20,
            projection_sizes: vec![100, 500, 1000],
            krr_c: 30.0,
            krr_sizes: vec![50, 100, 500],
            lambda_grid: default_lambda_grid(),
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Config {
    pub seed: u64,
    pub replications: usize,
    pub quad_nodes: Option<usize>,
    pub noise_sigma: f64,
    pub smoothness: Vec<f64>,
    pub truncation: usize,
    pub frozen: bool,
    pub sinc_c: f64,
    pub legendre_degree: usize,
    pub projection_sizes: Vec<usize>,
    pub krr_c: f64,
    pub krr_sizes: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub grid_points: usize,
}

impl Default for Example2Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            replications: DEFAULT_REPLICATIONS,
            quad_nodes: None,
            noise_sigma: 0.1,
            smoothness: vec![1.0, 2.0],
            truncation: 2000,
            frozen: false,
            sinc_c: 30.0,
            legendre_degree: 20,
            projection_sizes: vec![100, 500, 1000],
            krr_c: 30.0,
            krr_sizes: vec![50, 100, 150],
            lambda_grid: default_lambda_grid(),
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example3Config {
    pub seed: u64,
    pub realizations: usize,
    pub lambda: f64,
    pub bandwidths: Vec<f64>,
    pub sizes: Vec<usize>,
}

impl Default for Example3Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            realizations: 10,
            lambda: 1e-4,
            bandwidths: vec![30.0, 50.0],
            sizes: vec![50, 75],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Empirical projection `(2/n) sum_i y_i K(x_i, .)`.
    Projection,
    /// Kernel ridge regression with GCV over the lambda grid.
    Krr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Sinc,
    Legendre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub method: FitMethod,
    pub kernel: KernelKind,
    pub c: f64,
    pub degree: usize,
    pub lambda_grid: Vec<f64>,
    pub samples: Vec<RegressionSample>,
    pub eval_points: Vec<f64>,
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum CommandConfig {
    Example1(Example1Config),
    Example2(Example2Config),
    Example3(Example3Config),
    Fit(FitConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Example1(_) => "example1",
            CommandConfig::Example2(_) => "example2",
            CommandConfig::Example3(_) => "example3",
            CommandConfig::Fit(_) => "fit",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            CommandConfig::Example1(c) => Some(c.seed),
            CommandConfig::Example2(c) => Some(c.seed),
            CommandConfig::Example3(c) => Some(c.seed),
            CommandConfig::Fit(_) => None,
        }
    }
}

/// Provenance of a run: the resolved config plus environment facts that do
/// not influence the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub started_unix_secs: f64,
    pub finished_unix_secs: f64,
    /// Wall time in seconds per computed cell.
    pub timings: Vec<(String, f64)>,
    pub config: CommandConfig,
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn file_name(&self) -> String {
        format!("{}_manifest.json", self.command)
    }
}

/// Files produced by a command, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub timings: Vec<(String, f64)>,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn bandwidth(c: f64) -> Result<SincBandwidth> {
    SincBandwidth::new(c)
}

/// `m` equally spaced points from -1 to 1.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..m).map(|i| if i == m - 1 { 1.0 } else { -1.0 + 2.0 * i as f64 / (m - 1) as f64 }).collect(),
    }
}

fn csv_bytes<F>(write: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

struct Cell {
    report: ExperimentReport,
    label: String,
}

fn run_cell(config: ExperimentConfig, threads: Option<usize>) -> Result<Cell> {
    let report = run_experiment(&config, threads)?;
    let label = format!("{} {} n={}", config.estimator.label(), config.estimator.param(), config.n);
    log::info!("{label}: mean L2 error {:e} ({:.2} s)", report.mean_l2_error, report.wall_time_secs);
    Ok(Cell { report, label })
}

fn report_row(report: &ExperimentReport) -> ReportRow {
    ReportRow {
        estimator: report.config.estimator.label().to_string(),
        param: report.config.estimator.param(),
        n: report.config.n,
        mean_l2_error: report.mean_l2_error,
        std_l2_error: report.std_l2_error,
    }
}

struct Sweep {
    cells: Vec<Cell>,
}

impl Sweep {
    fn rows(&self) -> Vec<ReportRow> {
        self.cells.iter().map(|c| report_row(&c.report)).collect()
    }

    fn timings(&self) -> Vec<(String, f64)> {
        self.cells.iter().map(|c| (c.label.clone(), c.report.wall_time_secs)).collect()
    }

    fn gcv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            if let Some(lambdas) = &cell.report.selected_lambdas {
                for (r, l) in lambdas.iter().enumerate() {
                    rows.push(vec![
                        cell.report.config.estimator.param(),
                        cell.report.config.n.to_string(),
                        r.to_string(),
                        format_float(*l),
                    ]);
                }
            }
        }
        rows
    }
}

struct SweepSpec<'a> {
    seed: u64,
    replications: usize,
    quad_nodes: Option<usize>,
    noise: NoiseSpec,
    truth: TruthSpec,
    sinc_c: f64,
    legendre_degree: usize,
    projection_sizes: &'a [usize],
    krr_c: f64,
    krr_sizes: &'a [usize],
    lambda_grid: &'a [f64],
}

impl SweepSpec<'_> {
    fn experiment(&self, estimator: EstimatorSpec, n: usize) -> ExperimentConfig {
        ExperimentConfig {
            estimator,
            truth: self.truth.clone(),
            n,
            replications: self.replications,
            noise: self.noise,
            seed: self.seed,
            quad_nodes: self.quad_nodes,
        }
    }

    fn sinc(&self, n: usize) -> Result<ExperimentConfig> {
        Ok(self.experiment(EstimatorSpec::SincProjection { c: bandwidth(self.sinc_c)? }, n))
    }

    fn run(&self, threads: Option<usize>) -> Result<Sweep> {
        let mut cells = Vec::new();
        for &n in self.projection_sizes {
            cells.push(run_cell(self.sinc(n)?, threads)?);
        }
        for &n in self.projection_sizes {
            let est = EstimatorSpec::LegendreProjection { degree: self.legendre_degree };
            cells.push(run_cell(self.experiment(est, n), threads)?);
        }
        for &n in self.krr_sizes {
            let est = EstimatorSpec::Krr {
                kernel: Kernel::sinc(bandwidth(self.krr_c)?),
                lambda_grid: self.lambda_grid.to_vec(),
            };
            cells.push(run_cell(self.experiment(est, n), threads)?);
        }
        Ok(Sweep { cells })
    }

    /// Truth, the first replication's samples and the Sinc fit on them, at
    /// the largest projection size.
    fn plot_data(&self, grid_points: usize) -> Result<(Vec<u8>, Vec<u8>)> {
        let Some(&n) = self.projection_sizes.iter().max() else {
            return Ok((Vec::new(), Vec::new()));
        };
        let cfg = self.sinc(n)?;
        cfg.validate()?;
        let truth = truth_for_replication(&cfg, 0)?;
        let generated = samples_for_replication(&cfg, 0, &truth)?;
        let model = fit_sinc_projection(&generated.samples, bandwidth(self.sinc_c)?)?;
        let xs = uniform_grid(grid_points);
        let truth_vals: Vec<f64> = xs.iter().map(|&x| truth.eval(x)).collect();
        let fit = model.values_at(&xs);
        let grid = csv_bytes(|b| io::write_grid_csv(b, &xs, &truth_vals, &fit))?;
        let samples = csv_bytes(|b| io::write_samples_csv(b, &generated.samples))?;
        Ok((grid, samples))
    }
}

const GCV_HEADER: [&str; 4] = ["param", "n", "replication", "lambda"];

fn validate_common(replications: usize, sigma: f64, lambda_grid: &[f64]) -> Result<()> {
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be at least 1".into()));
    }
    NoiseSpec::new(sigma)?;
    if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::LambdaGrid("grid must be non-empty with positive entries".into()));
    }
    Ok(())
}

fn run_example1(cfg: &Example1Config, threads: Option<usize>) -> Result<RunOutput> {
    validate_common(cfg.replications, cfg.noise_sigma, &cfg.lambda_grid)?;
    let spec = SweepSpec {
        seed: cfg.seed,
        replications: cfg.replications,
        quad_nodes: cfg.quad_nodes,
        noise: NoiseSpec::new(cfg.noise_sigma)?,
        truth: TruthSpec::Example1,
        sinc_c: cfg.sinc_c,
        legendre_degree: cfg.legendre_degree,
        projection_sizes: &cfg.projection_sizes,
        krr_c: cfg.krr_c,
        krr_sizes: &cfg.krr_sizes,
        lambda_grid: &cfg.lambda_grid,
    };
    let sweep = spec.run(threads)?;
    let (grid, samples) = spec.plot_data(cfg.grid_points)?;
    let files = vec![
        ("example1_report.csv".to_string(), csv_bytes(|b| io::write_report_csv(b, &sweep.rows()))?),
        ("example1_grid.csv".to_string(), grid),
        ("example1_samples.csv".to_string(), samples),
        (
            "example1_gcv.csv".to_string(),
            csv_bytes(|b| io::write_table_csv(b, &GCV_HEADER, &sweep.gcv_rows()))?,
        ),
    ];
    Ok(RunOutput { files, timings: sweep.timings() })
}

fn smoothness_tag(s: f64) -> String {
    if s.fract() == 0.0 {
        format!("{}", s as i64)
    } else {
        format!("{s}").replace('.', "p")
    }
}

fn run_example2(cfg: &Example2Config, threads: Option<usize>) -> Result<RunOutput> {
    validate_common(cfg.replications, cfg.noise_sigma, &cfg.lambda_grid)?;
    let mut files = Vec::new();
    let mut timings = Vec::new();
    for &s in &cfg.smoothness {
        let spec = SweepSpec {
            seed: cfg.seed,
            replications: cfg.replications,
            quad_nodes: cfg.quad_nodes,
            noise: NoiseSpec::new(cfg.noise_sigma)?,
            truth: TruthSpec::Brownian { s, truncation: cfg.truncation, frozen: cfg.frozen },
            sinc_c: cfg.sinc_c,
            legendre_degree: cfg.legendre_degree,
            projection_sizes: &cfg.projection_sizes,
            krr_c: cfg.krr_c,
            krr_sizes: &cfg.krr_sizes,
            lambda_grid: &cfg.lambda_grid,
        };
        let sweep = spec.run(threads)?;
        let (grid, samples) = spec.plot_data(cfg.grid_points)?;
        let tag = smoothness_tag(s);
        files.push((
            format!("example2_s{tag}_report.csv"),
            csv_bytes(|b| io::write_report_csv(b, &sweep.rows()))?,
        ));
        files.push((format!("example2_s{tag}_grid.csv"), grid));
        files.push((format!("example2_s{tag}_samples.csv"), samples));
        files.push((
            format!("example2_s{tag}_gcv.csv"),
            csv_bytes(|b| io::write_table_csv(b, &GCV_HEADER, &sweep.gcv_rows()))?,
        ));
        timings.extend(sweep.timings().into_iter().map(|(l, t)| (format!("s={s} {l}"), t)));
    }
    Ok(RunOutput { files, timings })
}

/// Condition numbers of one random design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionDraw {
    pub regularized: ConditionReport,
    pub unregularized: ConditionReport,
}

/// `kappa_2` of `G^c_{lambda,n}` and `G^c_{0,n}` on a uniform design drawn
/// from stream `(seed, draw)`.
pub fn condition_draw(
    seed: u64,
    draw: u64,
    c: SincBandwidth,
    n: usize,
    lambda: f64,
) -> Result<ConditionDraw> {
    let mut rng = substream(seed, draw, Purpose::Design);
    let design = sample_uniform_design(n, &mut rng);
    let gram = build_gram(&Kernel::sinc(c), &design)?;
    let mut regularized = condition_number_2(&gram.regularized(lambda))?;
    regularized.kappa2_upper_bound = Some(kappa2_upper_bound(c, n, lambda));
    let unregularized = condition_number_2(gram.entries())?;
    Ok(ConditionDraw { regularized, unregularized })
}

fn run_example3(cfg: &Example3Config) -> Result<RunOutput> {
    if cfg.realizations == 0 {
        return Err(Error::InvalidParameter("realizations must be at least 1".into()));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", cfg.lambda)));
    }
    let mut table = Vec::new();
    let mut draws = Vec::new();
    let mut timings = Vec::new();
    let mut cell_index = 0u64;
    for &c in &cfg.bandwidths {
        let bw = bandwidth(c)?;
        for &n in &cfg.sizes {
            let start = Instant::now();
            let mut reg = Vec::new();
            let mut unreg = Vec::new();
            let mut floors = Vec::new();
            let bound = kappa2_upper_bound(bw, n, cfg.lambda);
            for r in 0..cfg.realizations {
                let draw = cell_index * cfg.realizations as u64 + r as u64;
                let d = condition_draw(cfg.seed, draw, bw, n, cfg.lambda)?;
                reg.push(d.regularized.kappa2_measured);
                unreg.push(d.unregularized.kappa2_measured);
                floors.push(d.unregularized.precision_floor_hit);
                draws.push(vec![
                    format_float(c),
                    n.to_string(),
                    r.to_string(),
                    format_float(d.regularized.kappa2_measured),
                    format_float(d.unregularized.kappa2_measured),
                    d.unregularized.precision_floor_hit.to_string(),
                ]);
            }
            let (reg_mean, _) = mean_and_std(&reg);
            let (unreg_mean, _) = mean_and_std(&unreg);
            let lower = match kappa2_lower_bound_expectation(bw, n) {
                Ok(v) => format_float(v.log10()),
                Err(Error::NotApplicable(_)) => "NA".to_string(),
                Err(e) => return Err(e),
            };
            table.push(vec![
                format_float(c),
                n.to_string(),
                format_float(cfg.lambda),
                format_float(reg_mean),
                format_float(bound),
                reg.iter().all(|&k| k <= bound).to_string(),
                format_float(unreg_mean),
                floors.iter().all(|&f| f).to_string(),
                lower,
            ]);
            timings.push((format!("c={c} n={n}"), start.elapsed().as_secs_f64()));
            cell_index += 1;
        }
    }
    let header = [
        "c",
        "n",
        "lambda",
        "kappa2_regularized_mean",
        "kappa2_upper_bound",
        "all_draws_within_bound",
        "kappa2_unregularized_mean",
        "unregularized_precision_floor_all",
        "unregularized_lower_bound_log10",
    ];
    let draw_header =
        ["c", "n", "draw", "kappa2_regularized", "kappa2_unregularized", "unregularized_precision_floor"];
    let files = vec![
        ("example3_report.csv".to_string(), csv_bytes(|b| io::write_table_csv(b, &header, &table))?),
        ("example3_draws.csv".to_string(), csv_bytes(|b| io::write_table_csv(b, &draw_header, &draws))?),
    ];
    Ok(RunOutput { files, timings })
}

/// Diagnostics written next to the predictions of `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub estimator: String,
    pub n: usize,
    pub selected_lambda: Option<f64>,
    /// `(lambda, score)`; `None` for grid points whose solve failed.
    pub gcv_scores: Option<Vec<(f64, Option<f64>)>>,
    pub condition: Option<ConditionReport>,
}

/// Fits the configured estimator and returns predictions at `eval_points`.
pub fn fit_predictions(cfg: &FitConfig) -> Result<(Vec<f64>, FitDiagnostics)> {
    cfg.eval_points.iter().try_for_each(|&x| crate::check_in_interval(x))?;
    let n = cfg.samples.len();
    let kernel = match cfg.kernel {
        KernelKind::Sinc => Kernel::sinc(bandwidth(cfg.c)?),
        KernelKind::Legendre => Kernel::legendre(cfg.degree),
    };
    match (cfg.method, kernel) {
        (FitMethod::Projection, Kernel::Sinc { c }) => {
            let model = fit_sinc_projection(&cfg.samples, c)?;
            let diag = FitDiagnostics {
                estimator: "sinc".into(),
                n,
                selected_lambda: None,
                gcv_scores: None,
                condition: None,
            };
            Ok((model.values_at(&cfg.eval_points), diag))
        }
        (FitMethod::Projection, Kernel::Legendre { degree }) => {
            let model = fit_legendre_projection(&cfg.samples, degree)?;
            let diag = FitDiagnostics {
                estimator: "legendre".into(),
                n,
                selected_lambda: None,
                gcv_scores: None,
                condition: None,
            };
            Ok((model.values_at(&cfg.eval_points), diag))
        }
        (FitMethod::Krr, kernel) => {
            let (model, scores) = if cfg.lambda_grid.len() == 1 {
                (fit_krr(&kernel, &cfg.samples, cfg.lambda_grid[0])?, None)
            } else {
                let sel = gcv_select(&kernel, &cfg.samples, &cfg.lambda_grid)?;
                let scores = cfg
                    .lambda_grid
                    .iter()
                    .zip(&sel.scores)
                    .map(|(&l, &s)| (l, s.is_finite().then_some(s)))
                    .collect();
                (sel.model, Some(scores))
            };
            let gram = build_gram(&kernel, model.design())?;
            let mut condition = condition_number_2(&gram.regularized(model.lambda()))?;
            if let Kernel::Sinc { c } = kernel {
                condition.kappa2_upper_bound = Some(krr::kappa2_upper_bound(c, n, model.lambda()));
            }
            let label = match kernel {
                Kernel::Sinc { .. } => "krr_sinc",
                Kernel::Legendre { .. } => "krr_legendre",
            };
            let diag = FitDiagnostics {
                estimator: label.into(),
                n,
                selected_lambda: Some(model.lambda()),
                gcv_scores: scores,
                condition: Some(condition),
            };
            Ok((model.values_at(&cfg.eval_points), diag))
        }
    }
}

fn run_fit(cfg: &FitConfig) -> Result<RunOutput> {
    let (predictions, diag) = fit_predictions(cfg)?;
    let files = vec![
        (
            "fit_predictions.csv".to_string(),
            csv_bytes(|b| io::write_predictions_csv(b, &cfg.eval_points, &predictions))?,
        ),
        ("fit_diagnostics.json".to_string(), serde_json::to_vec_pretty(&diag)?),
    ];
    Ok(RunOutput { files, timings: Vec::new() })
}

/// Computes every output file of a command.
pub fn execute(config: &CommandConfig, threads: Option<usize>) -> Result<RunOutput> {
    match config {
        CommandConfig::Example1(c) => run_example1(c, threads),
        CommandConfig::Example2(c) => run_example2(c, threads),
        CommandConfig::Example3(c) => run_example3(c),
        CommandConfig::Fit(c) => run_fit(c),
    }
}

/// Runs a command and writes its files plus `<command>_manifest.json` into
/// `out_dir`. Returns the paths written.
pub fn run_and_write(config: CommandConfig, threads: Option<usize>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let started = unix_now();
    let output = execute(&config, threads)?;
    let manifest = RunManifest {
        command: config.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed(),
        threads,
        started_unix_secs: started,
        finished_unix_secs: unix_now(),
        timings: output.timings.clone(),
        config,
    };
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (name, bytes) in &output.files {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
    }
    let path = out_dir.join(manifest.file_name());
    std::fs::write(&path, manifest.to_json()?)?;
    written.push(path);
    Ok(written)
}

/// Re-executes a manifest read from `manifest_path`.
pub fn replay(manifest_path: &Path, threads: Option<usize>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest = RunManifest::from_json(&std::fs::read_to_string(manifest_path)?)?;
    run_and_write(manifest.config, threads, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_example1() -> Example1Config {
        Example1Config {
            replications: 2,
            projection_sizes: vec![30],
            krr_sizes: vec![20],
            lambda_grid: vec![1e-3, 1e-2],
            grid_points: 5,
            ..Default::default()
        }
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(uniform_grid(3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(uniform_grid(1), vec![0.0]);
        assert!(uniform_grid(0).is_empty());
    }

    #[test]
    fn example1_files_and_layout() {
        let out = execute(&CommandConfig::Example1(small_example1()), Some(1)).unwrap();
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            ["example1_report.csv", "example1_grid.csv", "example1_samples.csv", "example1_gcv.csv"]
        );
        let report = String::from_utf8(out.file("example1_report.csv").unwrap().to_vec()).unwrap();
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines[0], "estimator,param,n,mean_l2_error,std_l2_error");
        assert!(lines[1].starts_with("sinc,c=20,30,"));
        assert!(lines[2].starts_with("legendre,N=20,30,"));
        assert!(lines[3].starts_with("krr_sinc,c=30,20,"));
        let grid = String::from_utf8(out.file("example1_grid.csv").unwrap().to_vec()).unwrap();
        assert_eq!(grid.lines().count(), 6);
        let gcv = String::from_utf8(out.file("example1_gcv.csv").unwrap().to_vec()).unwrap();
        assert_eq!(gcv.lines().count(), 3);
    }

    #[test]
    fn repeated_execution_is_identical() {
        let cfg = CommandConfig::Example1(small_example1());
        let a = execute(&cfg, Some(1)).unwrap();
        let b = execute(&cfg, Some(3)).unwrap();
        assert_eq!(a.files, b.files);
    }

    #[test]
    fn manifest_json_round_trip() {
        let manifest = RunManifest {
            command: "example3".into(),
            version: "0.0.0".into(),
            seed: Some(3),
            threads: None,
            started_unix_secs: 1.0,
            finished_unix_secs: 2.0,
            timings: vec![("x".into(), 0.5)],
            config: CommandConfig::Example3(Example3Config::default()),
        };
        let back = RunManifest::from_json(&manifest.to_json().unwrap()).unwrap();
        assert_eq!(back, manifest);
        assert!(RunManifest::from_json("{\"command\": 1}").is_err());
    }

    #[test]
    fn example3_small() {
        let cfg = Example3Config {
            realizations: 2,
            bandwidths: vec![30.0],
            sizes: vec![50, 40],
            ..Default::default()
        };
        let out = execute(&CommandConfig::Example3(cfg), None).unwrap();
        let report = String::from_utf8(out.file("example3_report.csv").unwrap().to_vec()).unwrap();
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("3e1,50,1e-4,"));
        let fields: Vec<&str> = lines[1].split(',').collect();
        let bound: f64 = fields[4].parse().unwrap();
        assert!((bound - 2.350574e4).abs() < 1.0);
        assert_eq!(fields[5], "true");
        assert_eq!(fields[7], "true");
        assert!(lines[2].ends_with(",NA"));
    }

    #[test]
    fn single_sinc_fit_on_its_own_point() {
        let (x, y, c) = (0.25, 1.5, 20.0);
        let cfg = FitConfig {
            method: FitMethod::Projection,
            kernel: KernelKind::Sinc,
            c,
            degree: 0,
            lambda_grid: vec![],
            samples: vec![RegressionSample::new(x, y).unwrap()],
            eval_points: vec![x],
        };
        let (pred, _) = fit_predictions(&cfg).unwrap();
        assert!((pred[0] - 2.0 * y * c / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn krr_fit_reports_condition() {
        let samples: Vec<RegressionSample> = (0..20)
            .map(|i| {
                let x = -0.95 + 0.1 * i as f64;
                RegressionSample::new(x, (3.0 * x).sin()).unwrap()
            })
            .collect();
        let cfg = FitConfig {
            method: FitMethod::Krr,
            kernel: KernelKind::Sinc,
            c: 10.0,
            degree: 0,
            lambda_grid: vec![1e-4, 1e-3, 1e-2],
            samples,
            eval_points: uniform_grid(7),
        };
        let (pred, diag) = fit_predictions(&cfg).unwrap();
        assert_eq!(pred.len(), 7);
        let cond = diag.condition.unwrap();
        assert!(cond.kappa2_measured >= 1.0);
        assert!(cond.kappa2_measured <= cond.kappa2_upper_bound.unwrap());
        assert_eq!(diag.gcv_scores.unwrap().len(), 3);
    }

    #[test]
    fn threads_from_flag_first() {
        assert_eq!(resolve_threads(Some(3)).unwrap(), Some(3));
    }
}
