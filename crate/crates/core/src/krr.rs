//! Tikhonov-regularized least squares in a kernel's RKHS.
//!
//! The minimizer of `(1/n) sum_i (f(x_i) - y_i)^2 + lambda ||f||_K^2` is
//! `sum_i C_i K(x_i, .)` with `(G_0 + n lambda I) C = Y`, where `G_0` is the
//! Gram matrix of the design. The system is solved by Cholesky factorization.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::LogValue;
use crate::estimators::{validate_samples, Estimate, RegressionSample};
use crate::legendre::fill_orthonormal;
use crate::sinc::{self, SincBandwidth};
use crate::{check_in_interval, Error, Result};

/// Relative residual accepted after a solve.
const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Relative asymmetry accepted by [`condition_number_2`].
const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// `lambda_min < PRECISION_FLOOR * lambda_max` marks an eigenvalue lost in rounding.
const PRECISION_FLOOR: f64 = 1e-14;

/// Reproducing kernel on `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `K_c(x, y) = sin(c (x - y)) / (pi (x - y))`.
    Sinc { c: SincBandwidth },
    /// Christoffel-Darboux kernel `K_N(x, y) = sum_{k<=N} P~_k(x) P~_k(y)`.
    Legendre { degree: usize },
}

impl Kernel {
    pub fn sinc(c: SincBandwidth) -> Self {
        Kernel::Sinc { c }
    }

    pub fn legendre(degree: usize) -> Self {
        Kernel::Legendre { degree }
    }

    /// `K(x, y)` with no domain check.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Kernel::Sinc { c } => sinc::kernel_at_offset(c, x - y),
            Kernel::Legendre { degree } => {
                let mut px = vec![0.0; degree + 1];
                let mut py = vec![0.0; degree + 1];
                fill_orthonormal(x, &mut px);
                fill_orthonormal(y, &mut py);
                px.iter().zip(&py).map(|(a, b)| a * b).sum()
            }
        }
    }
}

/// `[K(x_i, x_j)]` for a design, exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    kernel: Kernel,
    entries: DMatrix<f64>,
    design: Vec<f64>,
}

impl GramMatrix {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn design(&self) -> &[f64] {
        &self.design
    }

    pub fn len(&self) -> usize {
        self.design.len()
    }

    pub fn is_empty(&self) -> bool {
        self.design.is_empty()
    }

    /// `G_lambda = G_0 + n lambda I`.
    pub fn regularized(&self, lambda: f64) -> DMatrix<f64> {
        regularized(&self.entries, lambda)
    }
}

/// `A + n lambda I` for an `n x n` matrix `A`.
pub fn regularized(matrix: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let n = matrix.nrows();
    let mut out = matrix.clone();
    let shift = n as f64 * lambda;
    for i in 0..n {
        out[(i, i)] += shift;
    }
    out
}

/// Builds the Gram matrix from its lower triangle and mirrors it.
pub fn build_gram(kernel: &Kernel, design: &[f64]) -> Result<GramMatrix> {
    if design.is_empty() {
        return Err(Error::EmptySample);
    }
    design.iter().try_for_each(|&x| check_in_interval(x))?;
    let n = design.len();
    let mut g = DMatrix::zeros(n, n);
    match *kernel {
        Kernel::Sinc { c } => {
            for j in 0..n {
                for i in j..n {
                    g[(i, j)] = sinc::kernel_at_offset(c, design[i] - design[j]);
                }
            }
        }
        Kernel::Legendre { degree } => {
            let basis = legendre_basis_rows(degree, design);
            for j in 0..n {
                for i in j..n {
                    g[(i, j)] = basis.row(i).dot(&basis.row(j));
                }
            }
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            g[(j, i)] = g[(i, j)];
        }
    }
    Ok(GramMatrix { kernel: *kernel, entries: g, design: design.to_vec() })
}

/// Row `i` holds `P~_0(x_i), ..., P~_N(x_i)`.
fn legendre_basis_rows(degree: usize, xs: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(xs.len(), degree + 1);
    let mut buf = vec![0.0; degree + 1];
    for (i, &x) in xs.iter().enumerate() {
        fill_orthonormal(x, &mut buf);
        for (k, &p) in buf.iter().enumerate() {
            out[(i, k)] = p;
        }
    }
    out
}

/// Fitted `hat f^lambda_n(x) = sum_i C_i K(x_i, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrrModel {
    kernel: Kernel,
    design: Vec<f64>,
    lambda: f64,
    coefficients: Vec<f64>,
    /// For the Legendre kernel, the fit collapsed onto `P~_0..P~_N`.
    legendre_coeffs: Option<Vec<f64>>,
}

impl KrrModel {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn design(&self) -> &[f64] {
        &self.design
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn new(kernel: Kernel, design: Vec<f64>, lambda: f64, coefficients: Vec<f64>) -> Self {
        let legendre_coeffs = match kernel {
            Kernel::Legendre { degree } => {
                let basis = legendre_basis_rows(degree, &design);
                let c = DVector::from_column_slice(&coefficients);
                Some(basis.tr_mul(&c).as_slice().to_vec())
            }
            Kernel::Sinc { .. } => None,
        };
        Self { kernel, design, lambda, coefficients, legendre_coeffs }
    }
}

impl Estimate for KrrModel {
    fn value_at(&self, x: f64) -> f64 {
        match (&self.kernel, &self.legendre_coeffs) {
            (Kernel::Legendre { degree }, Some(coeffs)) => {
                let mut basis = vec![0.0; degree + 1];
                fill_orthonormal(x, &mut basis);
                basis.iter().zip(coeffs).map(|(p, c)| p * c).sum()
            }
            _ => self
                .design
                .iter()
                .zip(&self.coefficients)
                .map(|(&xi, &ci)| ci * self.kernel.eval(xi, x))
                .sum(),
        }
    }

    fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        match self.kernel {
            Kernel::Sinc { c } => sinc::weighted_kernel_sums(c, &self.design, &self.coefficients, xs),
            Kernel::Legendre { .. } => xs.iter().map(|&x| self.value_at(x)).collect(),
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")))
    }
}

struct Solve {
    coefficients: DVector<f64>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

fn solve_regularized(gram: &GramMatrix, y: &DVector<f64>, lambda: f64) -> Result<Solve> {
    check_lambda(lambda)?;
    let n = gram.len();
    let g_lambda = gram.regularized(lambda);
    let chol = nalgebra::Cholesky::new(g_lambda.clone()).ok_or(Error::Factorization { n, lambda })?;
    let coefficients = chol.solve(y);
    let residual = (&g_lambda * &coefficients - y).norm();
    let limit = RESIDUAL_TOLERANCE * y.norm();
    if residual.is_nan() || residual > limit {
        return Err(Error::Residual { residual, limit });
    }
    Ok(Solve { coefficients, chol })
}

fn responses(samples: &[RegressionSample]) -> DVector<f64> {
    DVector::from_iterator(samples.len(), samples.iter().map(|s| s.y))
}

fn design_of(samples: &[RegressionSample]) -> Vec<f64> {
    samples.iter().map(|s| s.x).collect()
}

/// Solves `(G_0 + n lambda I) C = Y`.
pub fn fit_krr(kernel: &Kernel, samples: &[RegressionSample], lambda: f64) -> Result<KrrModel> {
    validate_samples(samples)?;
    let gram = build_gram(kernel, &design_of(samples))?;
    fit_krr_with_gram(&gram, samples, lambda)
}

/// As [`fit_krr`], reusing a Gram matrix already built on the sample design.
pub fn fit_krr_with_gram(gram: &GramMatrix, samples: &[RegressionSample], lambda: f64) -> Result<KrrModel> {
    validate_samples(samples)?;
    if gram.len() != samples.len() || gram.design.iter().zip(samples).any(|(&x, s)| x != s.x) {
        return Err(Error::InvalidParameter("Gram matrix was built on a different design".into()));
    }
    let solve = solve_regularized(gram, &responses(samples), lambda)?;
    Ok(KrrModel::new(gram.kernel, gram.design.clone(), lambda, solve.coefficients.as_slice().to_vec()))
}

/// Outcome of a GCV grid search.
#[derive(Debug, Clone)]
pub struct GcvSelection {
    pub lambda: f64,
    /// One score per grid entry, in grid order; `NaN` where the solve failed.
    pub scores: Vec<f64>,
    /// Grid entries that were skipped and why.
    pub skipped: Vec<(f64, String)>,
    /// Fit at the selected `lambda`.
    pub model: KrrModel,
}

/// `RSS / (n (1 - tr(G_lambda^{-1} G_0) / n)^2)` from one Cholesky factorization.
///
/// Uses `tr(G_lambda^{-1} G_0) = n - n lambda tr(G_lambda^{-1})` and
/// `tr(G_lambda^{-1}) = ||L^{-1}||_F^2`, so the denominator factor is
/// `lambda tr(G_lambda^{-1})`.
fn gcv_from_solve(solve: &Solve, lambda: f64, n: usize) -> f64 {
    let nf = n as f64;
    // Fitted values G_0 C = Y - n lambda C, so residuals are n lambda C.
    let rss = (nf * lambda * solve.coefficients.norm()).powi(2);
    let l_inv = solve
        .chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .expect("Cholesky factor has a positive diagonal");
    let trace_inv = l_inv.norm_squared();
    let factor = lambda * trace_inv;
    rss / (nf * factor * factor)
}

/// GCV score of a single `lambda`.
pub fn gcv_score(kernel: &Kernel, samples: &[RegressionSample], lambda: f64) -> Result<f64> {
    validate_samples(samples)?;
    let gram = build_gram(kernel, &design_of(samples))?;
    let solve = solve_regularized(&gram, &responses(samples), lambda)?;
    Ok(gcv_from_solve(&solve, lambda, samples.len()))
}

/// Minimizes the GCV score over `lambda_grid`. Entries whose solve fails are
/// skipped; ties go to the smaller `lambda`.
pub fn gcv_select(
    kernel: &Kernel,
    samples: &[RegressionSample],
    lambda_grid: &[f64],
) -> Result<GcvSelection> {
    validate_samples(samples)?;
    if lambda_grid.is_empty() {
        return Err(Error::LambdaGrid("grid is empty".into()));
    }
    lambda_grid.iter().try_for_each(|&l| check_lambda(l))?;
    let gram = build_gram(kernel, &design_of(samples))?;
    let y = responses(samples);
    let n = samples.len();

    let mut scores = Vec::with_capacity(lambda_grid.len());
    let mut skipped = Vec::new();
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for &lambda in lambda_grid {
        match solve_regularized(&gram, &y, lambda) {
            Ok(solve) => {
                let score = gcv_from_solve(&solve, lambda, n);
                scores.push(score);
                let better = match &best {
                    None => true,
                    Some((bl, bs, _)) => score < *bs || (score == *bs && lambda < *bl),
                };
                if better && score.is_finite() {
                    best = Some((lambda, score, solve.coefficients));
                }
            }
            Err(e) => {
                log::debug!("GCV skipped lambda = {lambda:e}: {e}");
                scores.push(f64::NAN);
                skipped.push((lambda, e.to_string()));
            }
        }
    }
    let (lambda, _, coefficients) = best.ok_or(Error::AllGridPointsFailed)?;
    Ok(GcvSelection {
        lambda,
        scores,
        skipped,
        model: KrrModel::new(*kernel, gram.design, lambda, coefficients.as_slice().to_vec()),
    })
}

/// Spectral condition number of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `|lambda|_max / |lambda|_min` as computed; a lower bound on the true
    /// value when `precision_floor_hit` is set.
    pub kappa2_measured: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// The smallest eigenvalue is below `1e-14` of the largest, i.e. at the
    /// rounding floor of the eigensolver.
    pub precision_floor_hit: bool,
    /// `1 + (1/lambda)(1 + c/(pi sqrt(n)))` when known for this matrix.
    pub kappa2_upper_bound: Option<f64>,
}

/// `kappa_2(A) = |lambda|_max / |lambda|_min` by full symmetric eigendecomposition.
pub fn condition_number_2(matrix: &DMatrix<f64>) -> Result<ConditionReport> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::InvalidParameter("matrix must be square and non-empty".into()));
    }
    let scale = matrix.amax();
    if !scale.is_finite() {
        return Err(Error::NonFinite { what: "matrix entry" });
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::new(matrix.clone());
    let abs = eig.eigenvalues.iter().map(|v| v.abs());
    let lambda_max = abs.clone().fold(0.0, f64::max);
    let lambda_min = abs.fold(f64::INFINITY, f64::min);
    Ok(ConditionReport {
        kappa2_measured: lambda_max / lambda_min,
        lambda_max,
        lambda_min,
        precision_floor_hit: lambda_min < PRECISION_FLOOR * lambda_max,
        kappa2_upper_bound: None,
    })
}

/// `kappa_2(G^c_{lambda,n}) <= 1 + (1/lambda)(1 + c/(pi sqrt(n)))`, which holds
/// with high probability over the uniform design.
pub fn kappa2_upper_bound(c: SincBandwidth, n: usize, lambda: f64) -> f64 {
    1.0 + (1.0 + c.get() / (PI * (n as f64).sqrt())) / lambda
}

/// `E kappa_2(G^c_{0,n}) >= (1/2) exp(2n log(2n/(ec)))`, valid for `c >= 5/2`
/// and `n > ec/2`.
pub fn kappa2_lower_bound_expectation(c: SincBandwidth, n: usize) -> Result<LogValue> {
    let c = c.get();
    let nf = n as f64;
    if c < 2.5 || nf <= E * c / 2.0 {
        return Err(Error::NotApplicable(format!(
            "condition-number lower bound needs c >= 5/2 and n > ec/2, got c = {c}, n = {n}"
        )));
    }
    Ok(LogValue::from_ln(0.5f64.ln() + 2.0 * nf * (2.0 * nf / (E * c)).ln()))
}

/// `lambda_opt = 8c log(4/delta) / (pi sqrt(n))` and whether it is below 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaOpt {
    pub value: f64,
    pub admissible: bool,
}

pub fn lambda_opt(c: SincBandwidth, n: usize, delta: f64) -> Result<LambdaOpt> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let value = 8.0 * c.get() * (4.0 / delta).ln() / (PI * (n as f64).sqrt());
    Ok(LambdaOpt { value, admissible: value < 1.0 })
}

/// Smallest `n` for which [`lambda_opt`] is admissible.
pub fn lambda_opt_min_sample_size(c: SincBandwidth, delta: f64) -> Result<usize> {
    let root = lambda_opt(c, 1, delta)?.value;
    let mut n = (root * root).floor() as usize;
    while !lambda_opt(c, n.max(1), delta)?.admissible {
        n += 1;
    }
    Ok(n.max(1))
}

/// `count` points spaced evenly in `log10` from `lo` to `hi` inclusive.
pub fn log_lambda_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(Error::LambdaGrid(format!(
            "need 0 < lo <= hi and count >= 1, got lo = {lo}, hi = {hi}, count = {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count).map(|i| if i == count - 1 { hi } else { 10f64.powf(a + step * i as f64) }).collect())
}

/// 25 log-spaced points in `[1e-6, 1]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_lambda_grid(1e-6, 1.0, 25).expect("valid constant grid")
}
