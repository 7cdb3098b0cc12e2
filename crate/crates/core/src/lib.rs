//! Nonparametric regression on `I = [-1, 1]` with reproducing kernels.
//!
//! Three estimators of a regression function `f` from noisy samples
//! `y_i = f(x_i) + eta_i` with uniform design:
//!
//! - the empirical Legendre projection `(2/n) sum_i y_i K_N(x_i, x)` built on the
//!   Christoffel-Darboux kernel of the orthonormal Legendre polynomials,
//! - the empirical Sinc projection `(2/n) sum_i y_i K_c(x, x_i)` with the
//!   bandlimiting kernel `sin(c(x - y)) / (pi (x - y))`,
//! - Tikhonov-regularized least squares in the kernel's RKHS (kernel ridge
//!   regression), with generalized cross validation for the penalty.
//!
//! Around them sit Gauss-Legendre quadrature for exact `L^2(I)` error
//! measurement, evaluators for the closed-form error and condition-number
//! bounds, and a seeded Monte-Carlo harness ([`testbed`], [`harness`]).
//!
//! ```
//! use rkhs_regress::estimators::{fit_sinc_projection, Estimate, RegressionSample};
//! use rkhs_regress::sinc::SincBandwidth;
//!
//! let samples = vec![RegressionSample::new(0.0, 1.0).unwrap()];
//! let model = fit_sinc_projection(&samples, SincBandwidth::new(20.0).unwrap()).unwrap();
//! let at_origin = model.value_at(0.0);
//! assert!((at_origin - 40.0 / std::f64::consts::PI).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod krr;
pub mod legendre;
pub mod quadrature;
pub mod sinc;
pub mod testbed;

pub use error::{Error, Result};

/// How evaluators treat points outside `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainPolicy {
    /// Reject the point with [`Error::Domain`].
    #[default]
    Strict,
    /// Evaluate the defining formula anyway.
    Extrapolate,
}

impl DomainPolicy {
    pub fn check(self, x: f64) -> Result<()> {
        match self {
            DomainPolicy::Strict => check_in_interval(x),
            DomainPolicy::Extrapolate if x.is_finite() => Ok(()),
            DomainPolicy::Extrapolate => Err(Error::NonFinite { what: "evaluation point" }),
        }
    }
}

pub(crate) fn check_in_interval(x: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { x })
    }
}
