//! Orthonormal Legendre polynomials `P~_n = sqrt(n + 1/2) P_n` on `[-1, 1]`,
//! their Christoffel-Darboux kernel, and quadrature projections onto
//! `span{P~_0, ..., P~_N}`.
//!
//! Everything is driven by the classical recurrence
//! `(k + 1) P_{k+1} = (2k + 1) x P_k - k P_{k-1}` and scaled afterwards, so the
//! endpoint values `P~_n(1) = sqrt(n + 1/2)` come out exact up to one rounding.

use crate::quadrature::QuadratureRule;
use crate::{check_in_interval, Error, Result};

#[inline]
fn norm_factor(k: usize) -> f64 {
    (k as f64 + 0.5).sqrt()
}

/// Writes `P~_0(x), ..., P~_{out.len()-1}(x)` into `out` without a domain check.
pub fn fill_orthonormal(x: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    let mut prev = 1.0;
    out[0] = norm_factor(0);
    if len == 1 {
        return;
    }
    let mut curr = x;
    out[1] = norm_factor(1) * x;
    for k in 1..len - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * curr - kf * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
        out[k + 1] = norm_factor(k + 1) * curr;
    }
}

/// `P~_n(x)` evaluated by the recurrence, for any finite `x`.
pub fn orthonormal_extrapolated(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    let mut curr = x;
    if n == 0 {
        return norm_factor(0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * curr - kf * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    norm_factor(n) * curr
}

/// `P~_n(x)` for `x` in `[-1, 1]`.
pub fn orthonormal(n: usize, x: f64) -> Result<f64> {
    check_in_interval(x)?;
    Ok(orthonormal_extrapolated(n, x))
}

/// `[P~_0(x), ..., P~_N(x)]` from one recurrence pass.
pub fn orthonormal_all(degree: usize, x: f64) -> Result<Vec<f64>> {
    check_in_interval(x)?;
    let mut out = vec![0.0; degree + 1];
    fill_orthonormal(x, &mut out);
    Ok(out)
}

/// Values and first derivatives of `P~_0..=P~_N` at `x`.
///
/// Derivatives use `P'_{k+1} = P'_{k-1} + (2k + 1) P_k`, which holds on the
/// closed interval including the endpoints.
pub fn orthonormal_with_derivatives(degree: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_in_interval(x)?;
    let mut p = vec![0.0; degree + 1];
    let mut dp = vec![0.0; degree + 1];
    p[0] = 1.0;
    if degree >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for k in 1..degree {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
    }
    for k in 0..=degree {
        let s = norm_factor(k);
        p[k] *= s;
        dp[k] *= s;
    }
    Ok((p, dp))
}

/// Christoffel-Darboux kernel `K_N(x, y) = sum_{j<=N} P~_j(x) P~_j(y)` by direct
/// summation. Exactly symmetric in `(x, y)`.
pub fn christoffel_darboux(degree: usize, x: f64, y: f64) -> Result<f64> {
    check_in_interval(x)?;
    check_in_interval(y)?;
    let mut px = vec![0.0; degree + 1];
    let mut py = vec![0.0; degree + 1];
    fill_orthonormal(x, &mut px);
    fill_orthonormal(y, &mut py);
    Ok(px.iter().zip(&py).map(|(a, b)| a * b).sum())
}

#[inline]
fn cd_prefactor(degree: usize) -> f64 {
    let n = degree as f64;
    (n + 1.0) / ((2.0 * n + 1.0).sqrt() * (2.0 * n + 3.0).sqrt())
}

/// Closed ratio form of the kernel, valid for `x != y`:
/// `(N+1)/sqrt((2N+1)(2N+3)) * (P~_{N+1}(x) P~_N(y) - P~_N(x) P~_{N+1}(y)) / (x - y)`.
///
/// Suffers cancellation as `y -> x`; [`christoffel_darboux`] is the one to use
/// for computation.
pub fn christoffel_darboux_ratio(degree: usize, x: f64, y: f64) -> Result<f64> {
    check_in_interval(x)?;
    check_in_interval(y)?;
    if x == y {
        return Err(Error::InvalidParameter(
            "ratio form of the Christoffel-Darboux kernel needs x != y".into(),
        ));
    }
    let mut px = vec![0.0; degree + 2];
    let mut py = vec![0.0; degree + 2];
    fill_orthonormal(x, &mut px);
    fill_orthonormal(y, &mut py);
    let num = px[degree + 1] * py[degree] - px[degree] * py[degree + 1];
    Ok(cd_prefactor(degree) * num / (x - y))
}

/// Diagonal `K_N(x, x)` through the derivative form
/// `(N+1)/sqrt((2N+1)(2N+3)) * (P~'_{N+1}(x) P~_N(x) - P~'_N(x) P~_{N+1}(x))`.
pub fn christoffel_darboux_diagonal(degree: usize, x: f64) -> Result<f64> {
    let (p, dp) = orthonormal_with_derivatives(degree + 1, x)?;
    let n = degree;
    Ok(cd_prefactor(n) * (dp[n + 1] * p[n] - dp[n] * p[n + 1]))
}

/// Default node count for [`project_function`]: `max(64, N + 5)`.
pub fn projection_node_count(degree: usize) -> usize {
    64.max(degree + 5)
}

/// Coefficients `<f, P~_k>` for `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionCoefficients {
    coeffs: Vec<f64>,
}

impl ProjectionCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("projection needs at least the degree-0 coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "projection coefficient" });
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `sum_k coeffs[k] P~_k(x)`, no domain check.
    pub fn value_at(&self, x: f64) -> f64 {
        let mut basis = vec![0.0; self.coeffs.len()];
        fill_orthonormal(x, &mut basis);
        basis.iter().zip(&self.coeffs).map(|(p, c)| p * c).sum()
    }
}

/// Projection `pi_N f` computed with the given quadrature rule.
pub fn project_function<F: Fn(f64) -> f64>(
    f: F,
    degree: usize,
    rule: &QuadratureRule,
) -> Result<ProjectionCoefficients> {
    if rule.len() < degree + 1 {
        return Err(Error::InsufficientQuadrature { nodes: rule.len(), required: degree + 1 });
    }
    let mut coeffs = vec![0.0; degree + 1];
    let mut basis = vec![0.0; degree + 1];
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let ft = f(t);
        if !ft.is_finite() {
            return Err(Error::NonFinite { what: "function value" });
        }
        fill_orthonormal(t, &mut basis);
        for (c, p) in coeffs.iter_mut().zip(&basis) {
            *c += w * ft * p;
        }
    }
    ProjectionCoefficients::new(coeffs)
}
