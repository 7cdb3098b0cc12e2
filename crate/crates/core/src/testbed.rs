//! Synthetic regression problems and seeded Monte-Carlo replication.
//!
//! Randomness comes from ChaCha20 keyed by the experiment seed (expanded by
//! `SeedableRng::seed_from_u64`). Each replication draws from separate ChaCha
//! streams for the design, the noise and the random truth, with stream id
//! `4 * replication + purpose`, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimators::{
    fit_legendre_projection, fit_sinc_projection, l2_error_node_count, l2_error_values, Estimate,
    RegressionSample,
};
use crate::krr::{gcv_select, Kernel};
use crate::legendre::orthonormal_extrapolated;
use crate::quadrature::QuadratureRule;
use crate::sinc::SincBandwidth;
use crate::{Error, Result};

/// Additive noise `sigma * Z` with `Z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        let spec = Self { sigma };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.sigma >= 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.sigma
            )))
        }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { sigma: 0.1 }
    }
}

/// A realization of `g^s(x) = sum_{k=1}^{K} X_k / k^s cos(k pi x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianFunctionSpec {
    s: f64,
    coefficients: Vec<f64>,
    /// `X_k / k^s`, cached for evaluation.
    weighted: Vec<f64>,
}

impl BrownianFunctionSpec {
    /// Uses `coefficients[k - 1]` as `X_k`.
    pub fn from_coefficients(s: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("smoothness s must be positive, got {s}")));
        }
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("truncation K must be at least 1".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "series coefficient" });
        }
        let weighted = coefficients.iter().enumerate().map(|(k, &x)| x * ((k + 1) as f64).powf(-s)).collect();
        Ok(Self { s, coefficients, weighted })
    }

    /// Draws `X_1..X_K` i.i.d. standard normal.
    pub fn draw<R: Rng + ?Sized>(s: f64, truncation: usize, rng: &mut R) -> Result<Self> {
        let coefficients = (0..truncation).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_coefficients(s, coefficients)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluates the truncated series with the recurrence
    /// `cos((k+1) t) = 2 cos(t) cos(k t) - cos((k-1) t)`.
    pub fn eval(&self, x: f64) -> f64 {
        let t = PI * x;
        let two_cos = 2.0 * t.cos();
        let (mut prev, mut curr) = (1.0, t.cos());
        let mut acc = 0.0;
        for &w in &self.weighted {
            acc += w * curr;
            let next = two_cos * curr - prev;
            prev = curr;
            curr = next;
        }
        acc
    }

    /// Evaluates at many points, four at a time so the recurrences of
    /// neighbouring points overlap.
    pub fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        const LANES: usize = 4;
        let mut out = Vec::with_capacity(xs.len());
        let mut chunks = xs.chunks_exact(LANES);
        for chunk in &mut chunks {
            let mut two_cos = [0.0; LANES];
            let mut prev = [1.0; LANES];
            let mut curr = [0.0; LANES];
            for l in 0..LANES {
                curr[l] = (PI * chunk[l]).cos();
                two_cos[l] = 2.0 * curr[l];
            }
            let mut acc = [0.0; LANES];
            for &w in &self.weighted {
                for l in 0..LANES {
                    acc[l] += w * curr[l];
                    let next = two_cos[l] * curr[l] - prev[l];
                    prev[l] = curr[l];
                    curr[l] = next;
                }
            }
            out.extend_from_slice(&acc);
        }
        out.extend(chunks.remainder().iter().map(|&x| self.eval(x)));
        out
    }

    /// `(sum_{k>K} k^{-2s})^{1/2} max_k |X_k|`, with the tail sum bounded by
    /// `K^{1-2s} / (2s - 1)`. Infinite for `s <= 1/2`.
    pub fn tail_bound(&self) -> f64 {
        if self.s <= 0.5 {
            return f64::INFINITY;
        }
        let k = self.truncation() as f64;
        let tail = k.powf(1.0 - 2.0 * self.s) / (2.0 * self.s - 1.0);
        let max = self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        tail.sqrt() * max
    }

    /// `||g^s||_{L^2(I)} = (sum_k (X_k / k^s)^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// `sin(20 x) / (20 x)`, equal to 1 at the origin.
pub fn truth_bandlimited_example1(x: f64) -> f64 {
    let t = 20.0 * x;
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

pub fn truth_brownian(spec: &BrownianFunctionSpec, x: f64) -> f64 {
    spec.eval(x)
}

/// Regression function of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthSpec {
    /// `sin(20 x) / (20 x)`.
    Example1,
    /// Random cosine series, redrawn every replication unless `frozen`.
    Brownian { s: f64, truncation: usize, frozen: bool },
    /// A single orthonormal Legendre polynomial.
    OrthonormalLegendre { degree: usize },
}

impl TruthSpec {
    fn validate(&self) -> Result<()> {
        if let TruthSpec::Brownian { s, truncation, .. } = *self {
            if !(s > 0.0 && s.is_finite()) || truncation == 0 {
                return Err(Error::InvalidParameter(format!(
                    "Brownian truth needs s > 0 and K >= 1, got s = {s}, K = {truncation}"
                )));
            }
        }
        Ok(())
    }

    /// Quadrature nodes needed to integrate the square of this truth.
    fn resolving_nodes(&self) -> usize {
        match *self {
            TruthSpec::Example1 => 0,
            // cos(K pi x)^2 oscillates at frequency 2 K pi.
            TruthSpec::Brownian { truncation, .. } => (PI * truncation as f64).ceil() as usize + 32,
            TruthSpec::OrthonormalLegendre { degree } => degree + 1,
        }
    }
}

/// A truth function fixed for one replication.
#[derive(Debug, Clone)]
pub enum Truth {
    Example1,
    Brownian(BrownianFunctionSpec),
    OrthonormalLegendre(usize),
}

impl Truth {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Truth::Example1 => truth_bandlimited_example1(x),
            Truth::Brownian(spec) => spec.eval(x),
            Truth::OrthonormalLegendre(degree) => orthonormal_extrapolated(*degree, x),
        }
    }

    pub fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        match self {
            Truth::Brownian(spec) => spec.values_at(xs),
            _ => xs.iter().map(|&x| self.eval(x)).collect(),
        }
    }
}

/// Estimator fitted in every replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    LegendreProjection {
        degree: usize,
    },
    SincProjection {
        c: SincBandwidth,
    },
    /// Kernel ridge regression; `lambda` chosen by GCV over the grid (a
    /// one-point grid fixes it).
    Krr {
        kernel: Kernel,
        lambda_grid: Vec<f64>,
    },
}

impl EstimatorSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorSpec::LegendreProjection { .. } => "legendre",
            EstimatorSpec::SincProjection { .. } => "sinc",
            EstimatorSpec::Krr { kernel: Kernel::Sinc { .. }, .. } => "krr_sinc",
            EstimatorSpec::Krr { kernel: Kernel::Legendre { .. }, .. } => "krr_legendre",
        }
    }

    /// The defining parameter (`N` or `c`) rendered for reports.
    pub fn param(&self) -> String {
        match self {
            EstimatorSpec::LegendreProjection { degree } => format!("N={degree}"),
            EstimatorSpec::SincProjection { c } => format!("c={}", c.get()),
            EstimatorSpec::Krr { kernel: Kernel::Sinc { c }, .. } => format!("c={}", c.get()),
            EstimatorSpec::Krr { kernel: Kernel::Legendre { degree }, .. } => format!("N={degree}"),
        }
    }

    fn node_requirement(&self) -> usize {
        match self {
            EstimatorSpec::LegendreProjection { degree } => l2_error_node_count(None, Some(*degree)),
            EstimatorSpec::SincProjection { c } => l2_error_node_count(Some(c.get()), None),
            EstimatorSpec::Krr { kernel: Kernel::Sinc { c }, .. } => l2_error_node_count(Some(c.get()), None),
            EstimatorSpec::Krr { kernel: Kernel::Legendre { degree }, .. } => {
                l2_error_node_count(None, Some(*degree))
            }
        }
    }
}

/// Everything that determines a Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub estimator: EstimatorSpec,
    pub truth: TruthSpec,
    pub n: usize,
    pub replications: usize,
    pub noise: NoiseSpec,
    pub seed: u64,
    /// Quadrature nodes for the `L^2` error; derived from the estimator and
    /// truth when absent.
    pub quad_nodes: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.replications == 0 {
            return Err(Error::InvalidParameter("sample size and replications must be at least 1".into()));
        }
        if self.quad_nodes == Some(0) {
            return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
        }
        if let EstimatorSpec::Krr { lambda_grid, .. } = &self.estimator {
            if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(Error::LambdaGrid("grid must be non-empty with positive finite entries".into()));
            }
        }
        self.noise.validate()?;
        self.truth.validate()
    }

    /// Node count of the error quadrature rule.
    pub fn resolved_quad_nodes(&self) -> usize {
        let required = self.estimator.node_requirement().max(self.truth.resolving_nodes());
        match self.quad_nodes {
            Some(m) => {
                if m < required {
                    log::warn!("error quadrature uses {m} nodes, {required} recommended");
                }
                m
            }
            None => required,
        }
    }
}

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Design = 0,
    Noise = 1,
    Truth = 2,
    /// The single truth shared by every replication in frozen mode.
    FrozenTruth = 3,
}

/// The ChaCha20 stream for `(seed, replication, purpose)`.
pub fn substream(seed: u64, replication: u64, purpose: Purpose) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let replication = if purpose == Purpose::FrozenTruth { 0 } else { replication };
    rng.set_stream(replication.wrapping_mul(4) | purpose as u64);
    rng
}

/// `n` i.i.d. uniform points on `[-1, 1]`.
pub fn sample_uniform_design<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Samples with the realized noise bound `max_i |eta_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSamples {
    pub samples: Vec<RegressionSample>,
    pub max_abs_noise: f64,
}

/// `y_i = truth(x_i) + sigma z_i`, with the design and the noise drawn from
/// separate streams.
pub fn generate_samples<F, R1, R2>(
    truth: F,
    n: usize,
    noise: NoiseSpec,
    design_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<GeneratedSamples>
where
    F: Fn(f64) -> f64,
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    noise.validate()?;
    let xs = sample_uniform_design(n, design_rng);
    let mut max_abs_noise = 0.0f64;
    let samples = xs
        .into_iter()
        .map(|x| {
            let z: f64 = noise_rng.sample(StandardNormal);
            let eta = noise.sigma * z;
            max_abs_noise = max_abs_noise.max(eta.abs());
            RegressionSample { x, y: truth(x) + eta }
        })
        .collect();
    Ok(GeneratedSamples { samples, max_abs_noise })
}

/// Result of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub l2_error: f64,
    pub selected_lambda: Option<f64>,
    pub max_abs_noise: f64,
}

/// Aggregated experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub mean_l2_error: f64,
    /// Sample standard deviation; zero for a single replication.
    pub std_l2_error: f64,
    pub errors: Vec<f64>,
    pub selected_lambdas: Option<Vec<f64>>,
    pub max_abs_noise: Vec<f64>,
    pub quad_nodes: usize,
    pub wall_time_secs: f64,
}

/// The truth used by replication `r`.
pub fn truth_for_replication(config: &ExperimentConfig, replication: usize) -> Result<Truth> {
    Ok(match config.truth {
        TruthSpec::Example1 => Truth::Example1,
        TruthSpec::OrthonormalLegendre { degree } => Truth::OrthonormalLegendre(degree),
        TruthSpec::Brownian { s, truncation, frozen } => {
            let purpose = if frozen { Purpose::FrozenTruth } else { Purpose::Truth };
            let mut rng = substream(config.seed, replication as u64, purpose);
            Truth::Brownian(BrownianFunctionSpec::draw(s, truncation, &mut rng)?)
        }
    })
}

/// The samples drawn in replication `r`.
pub fn samples_for_replication(
    config: &ExperimentConfig,
    replication: usize,
    truth: &Truth,
) -> Result<GeneratedSamples> {
    let mut design_rng = substream(config.seed, replication as u64, Purpose::Design);
    let mut noise_rng = substream(config.seed, replication as u64, Purpose::Noise);
    generate_samples(|x| truth.eval(x), config.n, config.noise, &mut design_rng, &mut noise_rng)
}

/// Runs replication `r` against a prepared error quadrature rule.
pub fn run_replication(
    config: &ExperimentConfig,
    replication: usize,
    rule: &QuadratureRule,
) -> Result<ReplicationOutcome> {
    let truth = truth_for_replication(config, replication)?;
    let generated = samples_for_replication(config, replication, &truth)?;
    let samples = &generated.samples;
    let truth_values = truth.values_at(rule.nodes());
    let (l2, selected_lambda) = match &config.estimator {
        EstimatorSpec::LegendreProjection { degree } => {
            let model = fit_legendre_projection(samples, *degree)?;
            (l2_error_values(&model, &truth_values, rule)?, None)
        }
        EstimatorSpec::SincProjection { c } => {
            let model = fit_sinc_projection(samples, *c)?;
            (l2_error_values(&model, &truth_values, rule)?, None)
        }
        EstimatorSpec::Krr { kernel, lambda_grid } => {
            let sel = gcv_select(kernel, samples, lambda_grid)?;
            (l2_error_values(&sel.model as &dyn Estimate, &truth_values, rule)?, Some(sel.lambda))
        }
    };
    Ok(ReplicationOutcome { l2_error: l2, selected_lambda, max_abs_noise: generated.max_abs_noise })
}

/// Runs every replication, in parallel on `threads` workers (rayon's default
/// when `None`), and assembles the results in replication order.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let quad_nodes = config.resolved_quad_nodes();
    let rule = QuadratureRule::gauss_legendre(quad_nodes)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool =
        builder.build().map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}")))?;
    let outcomes: Vec<Result<ReplicationOutcome>> = pool.install(|| {
        (0..config.replications).into_par_iter().map(|r| run_replication(config, r, &rule)).collect()
    });

    let mut errors = Vec::with_capacity(outcomes.len());
    let mut lambdas = Vec::new();
    let mut max_abs_noise = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome.map_err(|e| Error::Replication { index, source: Box::new(e) })?;
        errors.push(o.l2_error);
        max_abs_noise.push(o.max_abs_noise);
        if let Some(l) = o.selected_lambda {
            lambdas.push(l);
        }
    }
    let (mean, std) = mean_and_std(&errors);
    Ok(ExperimentReport {
        config: config.clone(),
        mean_l2_error: mean,
        std_l2_error: std,
        errors,
        selected_lambdas: matches!(config.estimator, EstimatorSpec::Krr { .. }).then_some(lambdas),
        max_abs_noise,
        quad_nodes,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Arithmetic mean and sample standard deviation.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn config(estimator: EstimatorSpec, truth: TruthSpec, n: usize, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            estimator,
            truth,
            n,
            replications: reps,
            noise: NoiseSpec::default(),
            seed: 7,
            quad_nodes: None,
        }
    }

    #[test]
    fn uniform_design_moments() {
        let mut rng = substream(1, 0, Purpose::Design);
        let xs = sample_uniform_design(1_000_000, &mut rng);
        assert!(xs.iter().all(|x| (-1.0..=1.0).contains(x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.005);
        let below = xs[..100_000].iter().filter(|&&x| x <= 0.0).count() as f64 / 1e5;
        assert!((below - 0.5).abs() < 0.01);
    }

    #[test]
    fn example1_truth_values() {
        assert_eq!(truth_bandlimited_example1(0.0), 1.0);
        assert_abs_diff_eq!(truth_bandlimited_example1(PI / 20.0), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(truth_bandlimited_example1(0.5), 10f64.sin() / 10.0, epsilon = 1e-16);
    }

    #[test]
    fn brownian_simple_cases() {
        let zero = BrownianFunctionSpec::from_coefficients(1.0, vec![0.0; 10]).unwrap();
        assert_eq!(truth_brownian(&zero, 0.3), 0.0);
        let one = BrownianFunctionSpec::from_coefficients(1.0, vec![1.0]).unwrap();
        assert_eq!(truth_brownian(&one, 0.0), 1.0);
        assert!(BrownianFunctionSpec::from_coefficients(0.0, vec![1.0]).is_err());
        assert!(BrownianFunctionSpec::from_coefficients(1.0, vec![]).is_err());
    }

    #[test]
    fn brownian_recurrence_matches_direct_sum() {
        let mut rng = substream(3, 0, Purpose::Truth);
        let spec = BrownianFunctionSpec::draw(1.0, 2000, &mut rng).unwrap();
        for &x in &[-1.0, -0.73, 0.0, 0.3, 0.999, 1.0] {
            let direct: f64 = spec
                .coefficients()
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let k = (k + 1) as f64;
                    c / k * (k * PI * x).cos()
                })
                .sum();
            assert_abs_diff_eq!(spec.eval(x), direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn brownian_truncation_tail() {
        let mut rng = substream(5, 0, Purpose::Truth);
        let long = BrownianFunctionSpec::draw(2.0, 20_000, &mut rng).unwrap();
        let short =
            BrownianFunctionSpec::from_coefficients(2.0, long.coefficients()[..200].to_vec()).unwrap();
        let diff = (long.eval(0.3) - short.eval(0.3)).abs();
        assert!(diff < 1e-5, "{diff}");

        let k2000 =
            BrownianFunctionSpec::from_coefficients(1.0, long.coefficients()[..2000].to_vec()).unwrap();
        assert!(k2000.tail_bound() <= 1e-1 * k2000.l2_norm());
        let s2 = BrownianFunctionSpec::from_coefficients(2.0, long.coefficients()[..2000].to_vec()).unwrap();
        assert!(s2.tail_bound() <= 1e-4 * s2.l2_norm());
    }

    #[test]
    fn noiseless_samples_are_exact() {
        let mut d = substream(9, 0, Purpose::Design);
        let mut z = substream(9, 0, Purpose::Noise);
        let g =
            generate_samples(truth_bandlimited_example1, 50, NoiseSpec::new(0.0).unwrap(), &mut d, &mut z)
                .unwrap();
        assert!(g.samples.iter().all(|s| s.y == truth_bandlimited_example1(s.x)));
        assert_eq!(g.max_abs_noise, 0.0);
    }

    #[test]
    fn noise_scale() {
        let mut d = substream(2, 0, Purpose::Design);
        let mut z = substream(2, 0, Purpose::Noise);
        let g = generate_samples(|_| 0.0, 100_000, NoiseSpec::new(0.1).unwrap(), &mut d, &mut z).unwrap();
        let ys: Vec<f64> = g.samples.iter().map(|s| s.y).collect();
        let (_, std) = mean_and_std(&ys);
        assert!((std - 0.1).abs() < 0.002, "{std}");
    }

    #[test]
    fn batched_series_matches_pointwise() {
        let mut rng = substream(9, 0, Purpose::Truth);
        let spec = BrownianFunctionSpec::draw(1.0, 500, &mut rng).unwrap();
        let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        for (x, v) in xs.iter().zip(spec.values_at(&xs)) {
            assert_eq!(v, spec.eval(*x));
        }
    }

    #[test]
    fn substreams_are_distinct_and_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| substream(1, 3, Purpose::Design).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = substream(1, 3, Purpose::Design).random();
        let y: u64 = substream(1, 3, Purpose::Noise).random();
        let z: u64 = substream(1, 4, Purpose::Design).random();
        let w: u64 = substream(2, 3, Purpose::Design).random();
        assert!(x != y && x != z && x != w);
        let f0: u64 = substream(1, 0, Purpose::FrozenTruth).random();
        let f9: u64 = substream(1, 9, Purpose::FrozenTruth).random();
        assert_eq!(f0, f9);
    }

    #[test]
    fn fixed_seed_samples_identical() {
        let cfg = config(EstimatorSpec::LegendreProjection { degree: 5 }, TruthSpec::Example1, 30, 1);
        let t = truth_for_replication(&cfg, 0).unwrap();
        let a = samples_for_replication(&cfg, 0, &t).unwrap();
        let b = samples_for_replication(&cfg, 0, &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn in_span_noiseless_truth() {
        let mut cfg = config(
            EstimatorSpec::LegendreProjection { degree: 8 },
            TruthSpec::OrthonormalLegendre { degree: 2 },
            2000,
            1,
        );
        cfg.noise = NoiseSpec::new(0.0).unwrap();
        let r = run_experiment(&cfg, Some(1)).unwrap();
        // Pure Monte-Carlo error of the empirical inner products.
        assert!(r.mean_l2_error < 0.3, "{}", r.mean_l2_error);
        assert!(r.mean_l2_error > 0.0);
    }

    #[test]
    fn report_mean_and_determinism() {
        let cfg = config(
            EstimatorSpec::SincProjection { c: SincBandwidth::new(20.0).unwrap() },
            TruthSpec::Example1,
            100,
            3,
        );
        let a = run_experiment(&cfg, Some(1)).unwrap();
        let b = run_experiment(&cfg, Some(2)).unwrap();
        assert_eq!(a.errors, b.errors);
        let mean = a.errors.iter().sum::<f64>() / 3.0;
        assert_abs_diff_eq!(a.mean_l2_error, mean, epsilon = 1e-12);
        assert!(a.selected_lambdas.is_none());
    }

    #[test]
    fn frozen_truth_shared_across_replications() {
        let cfg = config(
            EstimatorSpec::LegendreProjection { degree: 4 },
            TruthSpec::Brownian { s: 1.0, truncation: 50, frozen: true },
            10,
            3,
        );
        let a = truth_for_replication(&cfg, 0).unwrap();
        let b = truth_for_replication(&cfg, 2).unwrap();
        assert_eq!(a.eval(0.4), b.eval(0.4));
        let redraw =
            ExperimentConfig { truth: TruthSpec::Brownian { s: 1.0, truncation: 50, frozen: false }, ..cfg };
        let a = truth_for_replication(&redraw, 0).unwrap();
        let b = truth_for_replication(&redraw, 2).unwrap();
        assert_ne!(a.eval(0.4), b.eval(0.4));
    }

    #[test]
    fn krr_reports_lambdas() {
        let cfg = config(
            EstimatorSpec::Krr {
                kernel: Kernel::sinc(SincBandwidth::new(30.0).unwrap()),
                lambda_grid: vec![1e-3, 1e-2],
            },
            TruthSpec::Example1,
            40,
            2,
        );
        let r = run_experiment(&cfg, Some(1)).unwrap();
        assert_eq!(r.selected_lambdas.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config(EstimatorSpec::LegendreProjection { degree: 4 }, TruthSpec::Example1, 0, 1);
        assert!(run_experiment(&cfg, Some(1)).is_err());
        cfg.n = 10;
        cfg.noise.sigma = -1.0;
        assert!(run_experiment(&cfg, Some(1)).is_err());
    }

    #[test]
    fn brownian_node_count_resolves_series() {
        let cfg = config(
            EstimatorSpec::SincProjection { c: SincBandwidth::new(30.0).unwrap() },
            TruthSpec::Brownian { s: 1.0, truncation: 2000, frozen: false },
            10,
            1,
        );
        assert!(cfg.resolved_quad_nodes() as f64 > PI * 2000.0);
    }
}
