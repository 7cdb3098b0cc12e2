//! Empirical projection estimators and the shared prediction surface.
//!
//! With uniform design on `I`, `E[2 y P~_k(x)] = <f, P~_k>`, so
//! `(2/n) sum_i y_i K(x_i, .)` is a plug-in estimate of the kernel projection
//! of `f`. For the Legendre kernel this is unbiased for `pi_N f`; for the Sinc
//! kernel its mean is `integral K_c(., y) f(y) dy`, not `f`.

use serde::{Deserialize, Serialize};

use crate::legendre::fill_orthonormal;
use crate::quadrature::QuadratureRule;
use crate::sinc::{self, SincBandwidth};
use crate::{check_in_interval, DomainPolicy, Error, Result};

/// One observation `(x, y)` of `y = f(x) + eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionSample {
    pub x: f64,
    pub y: f64,
}

impl RegressionSample {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let s = Self { x, y };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_in_interval(self.x)?;
        if !self.y.is_finite() {
            return Err(Error::NonFinite { what: "response" });
        }
        Ok(())
    }
}

pub(crate) fn validate_samples(samples: &[RegressionSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    samples.iter().try_for_each(RegressionSample::validate)
}

/// Anything that predicts a value at a point of `I`.
pub trait Estimate {
    /// Prediction at `x` with no domain check.
    fn value_at(&self, x: f64) -> f64;

    /// Predictions at every point of `xs`, no domain check.
    fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.value_at(x)).collect()
    }

    /// Predictions at `xs`, rejecting out-of-domain points under
    /// [`DomainPolicy::Strict`].
    fn evaluate(&self, xs: &[f64], policy: DomainPolicy) -> Result<Vec<f64>> {
        xs.iter().try_for_each(|&x| policy.check(x))?;
        Ok(self.values_at(xs))
    }
}

/// `hat f_{N,n}` stored as its `N + 1` Legendre coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreProjectionModel {
    degree: usize,
    coeffs: Vec<f64>,
}

impl LegendreProjectionModel {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("coefficient vector is empty".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "coefficient" });
        }
        Ok(Self { degree: coeffs.len() - 1, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Estimate for LegendreProjectionModel {
    fn value_at(&self, x: f64) -> f64 {
        let mut basis = vec![0.0; self.degree + 1];
        fill_orthonormal(x, &mut basis);
        basis.iter().zip(&self.coeffs).map(|(p, c)| p * c).sum()
    }

    fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        let mut basis = vec![0.0; self.degree + 1];
        xs.iter()
            .map(|&x| {
                fill_orthonormal(x, &mut basis);
                basis.iter().zip(&self.coeffs).map(|(p, c)| p * c).sum()
            })
            .collect()
    }
}

/// Fits `coeffs[k] = (2/n) sum_i y_i P~_k(x_i)`.
pub fn fit_legendre_projection(
    samples: &[RegressionSample],
    degree: usize,
) -> Result<LegendreProjectionModel> {
    validate_samples(samples)?;
    let mut coeffs = vec![0.0; degree + 1];
    let mut basis = vec![0.0; degree + 1];
    for s in samples {
        fill_orthonormal(s.x, &mut basis);
        for (c, p) in coeffs.iter_mut().zip(&basis) {
            *c += s.y * p;
        }
    }
    let scale = 2.0 / samples.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    LegendreProjectionModel::from_coeffs(coeffs)
}

/// `hat f_{c,n}`: the bandwidth and the retained sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SincProjectionModel {
    bandwidth: SincBandwidth,
    samples: Vec<RegressionSample>,
    centers: Vec<f64>,
    weights: Vec<f64>,
}

impl SincProjectionModel {
    pub fn bandwidth(&self) -> SincBandwidth {
        self.bandwidth
    }

    pub fn samples(&self) -> &[RegressionSample] {
        &self.samples
    }
}

impl Estimate for SincProjectionModel {
    fn value_at(&self, x: f64) -> f64 {
        self.centers
            .iter()
            .zip(&self.weights)
            .map(|(&xi, &w)| w * sinc::kernel_at_offset(self.bandwidth, x - xi))
            .sum()
    }

    fn values_at(&self, xs: &[f64]) -> Vec<f64> {
        sinc::weighted_kernel_sums(self.bandwidth, &self.centers, &self.weights, xs)
    }
}

/// Keeps the samples; evaluation is `(2/n) sum_i y_i K_c(x, x_i)`.
pub fn fit_sinc_projection(samples: &[RegressionSample], c: SincBandwidth) -> Result<SincProjectionModel> {
    validate_samples(samples)?;
    let scale = 2.0 / samples.len() as f64;
    Ok(SincProjectionModel {
        bandwidth: c,
        samples: samples.to_vec(),
        centers: samples.iter().map(|s| s.x).collect(),
        weights: samples.iter().map(|s| scale * s.y).collect(),
    })
}

/// Node count used for `L^2` errors: `max(128, ceil(2c), 2N + 2)`.
/// Pass `None` for whichever parameter does not apply.
pub fn l2_error_node_count(c: Option<f64>, degree: Option<usize>) -> usize {
    let from_c = c.map_or(0, |c| (2.0 * c).ceil() as usize);
    let from_degree = degree.map_or(0, |n| 2 * n + 2);
    128.max(from_c).max(from_degree)
}

/// `||model - truth||_{L^2(I)}` by quadrature.
pub fn l2_error<M, F>(model: &M, truth: F, rule: &QuadratureRule) -> Result<f64>
where
    M: Estimate + ?Sized,
    F: Fn(f64) -> f64,
{
    let truth: Vec<f64> = rule.nodes().iter().map(|&t| truth(t)).collect();
    l2_error_values(model, &truth, rule)
}

/// `||model - truth||_{L^2(I)}` with the truth already evaluated at the
/// nodes of `rule`.
pub fn l2_error_values<M>(model: &M, truth: &[f64], rule: &QuadratureRule) -> Result<f64>
where
    M: Estimate + ?Sized,
{
    if truth.len() != rule.len() {
        return Err(Error::InvalidParameter(format!(
            "{} truth values for a {}-node rule",
            truth.len(),
            rule.len()
        )));
    }
    let predicted = model.values_at(rule.nodes());
    let sq: Vec<f64> = predicted.iter().zip(truth).map(|(&p, &t)| (p - t) * (p - t)).collect();
    rule.integrate_values(&sq).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::orthonormal;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn samples(pairs: &[(f64, f64)]) -> Vec<RegressionSample> {
        pairs.iter().map(|&(x, y)| RegressionSample::new(x, y).unwrap()).collect()
    }

    #[test]
    fn sample_validation() {
        assert!(matches!(RegressionSample::new(1.2, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(RegressionSample::new(0.0, f64::NAN), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(matches!(fit_legendre_projection(&[], 3), Err(Error::EmptySample)));
        let c = SincBandwidth::new(1.0).unwrap();
        assert!(matches!(fit_sinc_projection(&[], c), Err(Error::EmptySample)));
    }

    #[test]
    fn unchecked_sample_fields_are_validated_at_fit() {
        let bad = vec![RegressionSample { x: -3.0, y: 1.0 }];
        assert!(matches!(fit_legendre_projection(&bad, 2), Err(Error::Domain { .. })));
    }

    #[test]
    fn legendre_single_sample() {
        let m = fit_legendre_projection(&samples(&[(0.0, 1.0)]), 0).unwrap();
        assert_abs_diff_eq!(m.coeffs()[0], 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn legendre_zero_responses() {
        let m = fit_legendre_projection(&samples(&[(0.2, 0.0), (-0.7, 0.0)]), 6).unwrap();
        assert!(m.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(m.evaluate(&[0.1, 0.9], DomainPolicy::Strict).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn legendre_double_sum_oracle() {
        let data = samples(&[(-0.6, 0.3), (0.1, -1.1), (0.85, 2.0)]);
        let m = fit_legendre_projection(&data, 2).unwrap();
        for k in 0..=2 {
            let want: f64 = data.iter().map(|s| 2.0 / 3.0 * s.y * orthonormal(k, s.x).unwrap()).sum();
            assert_abs_diff_eq!(m.coeffs()[k], want, epsilon = 1e-15);
        }
        // Coefficient form equals the kernel form by linearity.
        for &x in &[-0.9, 0.0, 0.42] {
            let kernel_form: f64 = data
                .iter()
                .map(|s| 2.0 / 3.0 * s.y * crate::legendre::christoffel_darboux(2, s.x, x).unwrap())
                .sum();
            assert_abs_diff_eq!(m.value_at(x), kernel_form, epsilon = 1e-14);
        }
    }

    #[test]
    fn legendre_unit_constant_model() {
        let mut coeffs = vec![0.0; 5];
        coeffs[0] = 1.0;
        let m = LegendreProjectionModel::from_coeffs(coeffs).unwrap();
        for v in m.evaluate(&[-1.0, 0.3, 1.0], DomainPolicy::Strict).unwrap() {
            assert_abs_diff_eq!(v, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-16);
        }
    }

    #[test]
    fn strict_evaluation_rejects_outside_points() {
        let m = LegendreProjectionModel::from_coeffs(vec![1.0]).unwrap();
        assert!(matches!(m.evaluate(&[0.0, 1.5], DomainPolicy::Strict), Err(Error::Domain { .. })));
        assert!(m.evaluate(&[0.0, 1.5], DomainPolicy::Extrapolate).is_ok());
    }

    #[test]
    fn sinc_single_sample_at_center() {
        let c = SincBandwidth::new(20.0).unwrap();
        let m = fit_sinc_projection(&samples(&[(0.0, 1.0)]), c).unwrap();
        assert_abs_diff_eq!(m.value_at(0.0), 2.0 * 20.0 / PI, epsilon = 1e-13);
        assert_abs_diff_eq!(m.values_at(&[0.0])[0], 2.0 * 20.0 / PI, epsilon = 1e-13);
    }

    #[test]
    fn sinc_zero_responses() {
        let c = SincBandwidth::new(5.0).unwrap();
        let m = fit_sinc_projection(&samples(&[(0.2, 0.0), (0.4, 0.0)]), c).unwrap();
        assert!(m.values_at(&[-1.0, 0.0, 0.3]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sinc_double_loop_oracle() {
        let data = samples(&[(-0.83, 0.4), (-0.2, 1.3), (0.05, -0.6), (0.5, 0.9), (0.97, -0.1)]);
        let c = 30.0;
        let m = fit_sinc_projection(&data, SincBandwidth::new(c).unwrap()).unwrap();
        let grid: Vec<f64> = (0..7).map(|j| -1.0 + j as f64 / 3.0).collect();
        let batch = m.evaluate(&grid, DomainPolicy::Strict).unwrap();
        for (j, &x) in grid.iter().enumerate() {
            let mut want = 0.0;
            for s in &data {
                let t: f64 = x - s.x;
                let k = if t == 0.0 { c / PI } else { (c * t).sin() / (PI * t) };
                want += 2.0 / 5.0 * s.y * k;
            }
            assert_abs_diff_eq!(batch[j], want, epsilon = 1e-12);
            assert_abs_diff_eq!(m.value_at(x), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn l2_error_cases() {
        let rule = QuadratureRule::gauss_legendre(64).unwrap();
        let zero = LegendreProjectionModel::from_coeffs(vec![0.0; 3]).unwrap();
        assert_abs_diff_eq!(l2_error(&zero, |_| 1.0, &rule).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        let m = LegendreProjectionModel::from_coeffs(vec![0.0, 0.0, 1.0]).unwrap();
        let e = l2_error(&m, |x| crate::legendre::orthonormal_extrapolated(2, x), &rule).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn node_count_heuristic() {
        assert_eq!(l2_error_node_count(Some(20.0), None), 128);
        assert_eq!(l2_error_node_count(Some(100.2), None), 201);
        assert_eq!(l2_error_node_count(None, Some(80)), 162);
        assert_eq!(l2_error_node_count(None, None), 128);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fits_are_linear_in_responses(
                xs in proptest::collection::vec(-1.0f64..=1.0, 1..20),
                seed_y in proptest::collection::vec(-5.0f64..5.0, 20),
                seed_z in proptest::collection::vec(-5.0f64..5.0, 20),
                a in -3.0f64..3.0,
                b in -3.0f64..3.0,
            ) {
                let ys: Vec<_> = xs.iter().zip(&seed_y).map(|(&x, &y)| RegressionSample { x, y }).collect();
                let zs: Vec<_> = xs.iter().zip(&seed_z).map(|(&x, &y)| RegressionSample { x, y }).collect();
                let mix: Vec<_> = xs.iter().zip(seed_y.iter().zip(&seed_z))
                    .map(|(&x, (&y, &z))| RegressionSample { x, y: a * y + b * z }).collect();
                let fy = fit_legendre_projection(&ys, 8).unwrap();
                let fz = fit_legendre_projection(&zs, 8).unwrap();
                let fm = fit_legendre_projection(&mix, 8).unwrap();
                for k in 0..=8 {
                    let want = a * fy.coeffs()[k] + b * fz.coeffs()[k];
                    let scale = 1.0 + (a * fy.coeffs()[k]).abs() + (b * fz.coeffs()[k]).abs();
                    prop_assert!((fm.coeffs()[k] - want).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
