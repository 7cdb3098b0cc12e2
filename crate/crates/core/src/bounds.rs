//! Closed-form error, eigenvalue and concentration bounds.
//!
//! Anything built from exponentials or factorials is accumulated in log space
//! and exponentiated once at the end. Quantities that can exceed the `f64`
//! range are returned as a [`LogValue`].

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A positive quantity stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// `true` when `exp(ln)` is not representable as a finite `f64`.
    pub fn overflowed(self) -> bool {
        !self.ln.exp().is_finite()
    }

    /// The value itself, or `None` on overflow.
    pub fn value(self) -> Option<f64> {
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }
}

/// Inputs shared by the regression error bounds.
///
/// Fields needed by only some bounds are optional; a bound that needs a
/// missing field fails with [`Error::MissingField`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub degree: Option<usize>,
    pub bandwidth: Option<f64>,
    pub delta: f64,
    pub s: Option<f64>,
    pub sup_norm_f: Option<f64>,
    pub l2_norm_f: Option<f64>,
    /// `||f||_{H^s}` (or a proxy such as [`brownian_sobolev_proxy`]) for the
    /// Legendre bound; the weighted prolate norm for [`theorem2_bound`], which
    /// cannot be computed here and must come from the caller.
    pub sobolev_norm: Option<f64>,
    /// `||f~||_{L^2(R)}` of a bandlimited extension.
    pub bandlimited_l2_norm: Option<f64>,
    /// Bound on the noise, `max_i |eta_i|` for a realized sample.
    pub eps_noise: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BoundInputs {
    pub fn new(n: usize, delta: f64) -> Self {
        Self {
            n,
            degree: None,
            bandwidth: None,
            delta,
            s: None,
            sup_norm_f: None,
            l2_norm_f: None,
            sobolev_norm: None,
            bandlimited_l2_norm: None,
            eps_noise: 0.0,
            c1: 1.0,
            c2: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        let norms = [
            self.sup_norm_f,
            self.l2_norm_f,
            self.sobolev_norm,
            self.bandlimited_l2_norm,
            Some(self.eps_noise),
            Some(self.c1),
            Some(self.c2),
        ];
        if norms.iter().flatten().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(
                "norms, noise level and constants must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    fn concentration_factor(&self) -> f64 {
        ((2.0 / self.delta).ln() / self.n as f64).sqrt()
    }
}

fn require<T>(v: Option<T>, name: &'static str) -> Result<T> {
    v.ok_or(Error::MissingField(name))
}

/// The terms of an error bound, reported separately so their balance can be
/// inspected. Unused terms are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub concentration: f64,
    pub truncation: f64,
    pub approximation: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.concentration + self.truncation + self.approximation
    }
}

/// `M_{f,N} = 2 (N + 1) (||f||_inf + eps) + sqrt(2) ||f||`.
pub fn legendre_m_constant(degree: usize, sup_norm_f: f64, eps_noise: f64, l2_norm_f: f64) -> f64 {
    2.0 * (degree as f64 + 1.0) * (sup_norm_f + eps_noise) + 2f64.sqrt() * l2_norm_f
}

/// `M_{f,c} = sqrt(2c / pi) (2 ||f||_inf + 2 eps + sqrt(2) ||f||)`.
pub fn sinc_m_constant(c: f64, sup_norm_f: f64, eps_noise: f64, l2_norm_f: f64) -> f64 {
    (2.0 * c / PI).sqrt() * (2.0 * sup_norm_f + 2.0 * eps_noise + 2f64.sqrt() * l2_norm_f)
}

fn legendre_concentration_term(inp: &BoundInputs) -> Result<(usize, f64)> {
    inp.validate()?;
    let degree = require(inp.degree, "degree")?;
    let sup = require(inp.sup_norm_f, "sup_norm_f")?;
    let l2 = require(inp.l2_norm_f, "l2_norm_f")?;
    let m = legendre_m_constant(degree, sup, inp.eps_noise, l2);
    Ok((degree, m * inp.concentration_factor()))
}

/// Legendre projection error bound for `f` in `H^s`:
/// `M_{f,N} sqrt(log(2/delta) / n) + c1 N^{-s} ||f||_{H^s}`.
pub fn theorem1_bound_sobolev(inp: &BoundInputs) -> Result<BoundTerms> {
    let (degree, concentration) = legendre_concentration_term(inp)?;
    let s = require(inp.s, "s")?;
    let norm = require(inp.sobolev_norm, "sobolev_norm")?;
    if degree == 0 {
        return Err(Error::InvalidParameter("the Sobolev bound needs degree N >= 1".into()));
    }
    Ok(BoundTerms { concentration, truncation: 0.0, approximation: inp.c1 * (degree as f64).powf(-s) * norm })
}

/// Legendre projection error bound for bandlimited `f`:
/// `M_{f,N} sqrt(log(2/delta) / n) + c2 exp(-(N+2) log((2N+2)/(ec))) ||f~||`.
///
/// Applicable for `N >= ec/2` only.
pub fn theorem1_bound_bandlimited(inp: &BoundInputs) -> Result<BoundTerms> {
    let (degree, concentration) = legendre_concentration_term(inp)?;
    let c = require(inp.bandwidth, "bandwidth")?;
    let norm = require(inp.bandlimited_l2_norm, "bandlimited_l2_norm")?;
    let nf = degree as f64;
    if c.is_nan() || c <= 0.0 || nf < E * c / 2.0 {
        return Err(Error::NotApplicable(format!(
            "bandlimited bound needs N >= ec/2, got N = {degree}, c = {c}"
        )));
    }
    let ln_factor = -(nf + 2.0) * ((2.0 * nf + 2.0) / (E * c)).ln();
    Ok(BoundTerms { concentration, truncation: 0.0, approximation: inp.c2 * ln_factor.exp() * norm })
}

/// Sinc projection error bound, for `c >= 6`:
/// `M_{f,c} sqrt(log(2/delta) / n) + 7/sqrt(6) (e^2/6)^{-[c/3]} ||f||
///  + [c/3]^{-s} ||f||_{H~^s}`.
pub fn theorem2_bound(inp: &BoundInputs) -> Result<BoundTerms> {
    inp.validate()?;
    let c = require(inp.bandwidth, "bandwidth")?;
    let s = require(inp.s, "s")?;
    let sup = require(inp.sup_norm_f, "sup_norm_f")?;
    let l2 = require(inp.l2_norm_f, "l2_norm_f")?;
    let weighted = require(inp.sobolev_norm, "sobolev_norm")?;
    if !(c >= 6.0 && c.is_finite()) {
        return Err(Error::NotApplicable(format!("Sinc bound needs c >= 6, got {c}")));
    }
    let m = sinc_m_constant(c, sup, inp.eps_noise, l2);
    let k = (c / 3.0).floor();
    let ln_trunc = (7.0 / 6f64.sqrt()).ln() - k * (E * E / 6.0).ln();
    Ok(BoundTerms {
        concentration: m * inp.concentration_factor(),
        truncation: ln_trunc.exp() * l2,
        approximation: k.powf(-s) * weighted,
    })
}

/// Both sides of
/// `e^{-c}/sqrt(c) sum_{k<=N} (2c)^k / k! <= (1/sqrt(6)) (e^2/6)^{-c/3}`,
/// stored as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Sides {
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

impl Lemma1Sides {
    pub fn lhs(&self) -> f64 {
        self.ln_lhs.exp()
    }

    pub fn rhs(&self) -> f64 {
        self.ln_rhs.exp()
    }

    pub fn holds(&self) -> bool {
        self.ln_lhs <= self.ln_rhs
    }
}

/// `ln sum_{k=0}^{N} (2c)^k / k!` by log-sum-exp.
fn ln_truncated_exp_series(two_c: f64, degree: usize) -> f64 {
    let ln_x = two_c.ln();
    let mut ln_terms = Vec::with_capacity(degree + 1);
    let mut ln_fact = 0.0;
    for k in 0..=degree {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        ln_terms.push(k as f64 * ln_x - ln_fact);
    }
    let max = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + ln_terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Evaluates both sides of the truncated-exponential inequality for `c >= 6`
/// and `N + 1 <= c/3`.
pub fn lemma1_lhs_rhs(c: f64, degree: usize) -> Result<Lemma1Sides> {
    if !(c >= 6.0 && c.is_finite()) || degree as f64 + 1.0 > c / 3.0 {
        return Err(Error::NotApplicable(format!(
            "inequality needs c >= 6 and N + 1 <= c/3, got c = {c}, N = {degree}"
        )));
    }
    let ln_lhs = -c - 0.5 * c.ln() + ln_truncated_exp_series(2.0 * c, degree);
    let ln_rhs = -0.5 * 6f64.ln() - (c / 3.0) * (E * E / 6.0).ln();
    Ok(Lemma1Sides { ln_lhs, ln_rhs })
}

/// Closed-form bounds on the `n`-th eigenvalue of the Sinc integral operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueBounds {
    /// `1 - 7/sqrt(c) (2c)^n / n! e^{-c}`, for `n < c / 2.7`.
    pub lower: Option<f64>,
    /// `exp(-(2n+1) log(2(n+1)/(ec)))`, for `n >= max(ec/2, 2)`.
    pub upper: Option<LogValue>,
}

pub fn sinc_eigenvalue_bounds(c: f64, n: usize) -> Result<EigenvalueBounds> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive and finite, got {c}")));
    }
    let nf = n as f64;
    let lower = (nf < c / 2.7).then(|| {
        let ln_sub = 7f64.ln() - 0.5 * c.ln() + nf * (2.0 * c).ln() - ln_factorial(n) - c;
        1.0 - ln_sub.exp()
    });
    let upper = (nf >= (E * c / 2.0).max(2.0))
        .then(|| LogValue::from_ln(-(2.0 * nf + 1.0) * (2.0 * (nf + 1.0) / (E * c)).ln()));
    Ok(EigenvalueBounds { lower, upper })
}

/// `C_{f,N} = sqrt(4 (||f||_inf + eps)^2 (N+1)^2 + 2 ||f||^2)`, the almost-sure
/// bound on the norm of one summand of the Legendre estimator.
pub fn legendre_concentration_constant(
    degree: usize,
    sup_norm_f: f64,
    eps_noise: f64,
    l2_norm_f: f64,
) -> f64 {
    let a = sup_norm_f + eps_noise;
    let np1 = degree as f64 + 1.0;
    (4.0 * a * a * np1 * np1 + 2.0 * l2_norm_f * l2_norm_f).sqrt()
}

/// `C sqrt(2 log(2/delta) / n)`: radius that `||f^_{N,n} - E f^_{N,n}||`
/// exceeds with probability at most `delta`.
pub fn pinelis_radius(constant: f64, n: usize, delta: f64) -> f64 {
    constant * (2.0 * (2.0 / delta).ln() / n as f64).sqrt()
}

/// Sobolev-norm surrogate for `sum_k X_k / k^s cos(k pi x)`:
/// `(sum_k (1 + (k pi)^2)^s (X_k / k^s)^2)^{1/2}` over the given coefficients.
///
/// This is a proxy computed from the cosine coefficients, not the
/// interpolation-space norm.
pub fn brownian_sobolev_proxy(coefficients: &[f64], s: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = (i + 1) as f64;
            let a = x * k.powf(-s);
            (1.0 + (k * PI).powi(2)).powf(s) * a * a
        })
        .sum::<f64>()
        .sqrt()
}

/// `8 sqrt(c) log(4/delta) / (sqrt(pi) n^{1/4})`, the high-probability rate of
/// Sinc kernel ridge regression at `lambda_opt`.
pub fn sinc_krr_rate(c: f64, n: usize, delta: f64) -> f64 {
    8.0 * c.sqrt() * (4.0 / delta).ln() / (PI.sqrt() * (n as f64).powf(0.25))
}
