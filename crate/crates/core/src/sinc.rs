//! The Sinc kernel `K_c(x, y) = sin(c (x - y)) / (pi (x - y))` on `[-1, 1]^2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::QuadratureRule;
use crate::{check_in_interval, Error, Result};

/// Below this `|c (x - y)|` the kernel is evaluated by its Taylor expansion
/// `(c / pi) (1 - (c t)^2 / 6)`; the dropped term is `O((ct)^4 / 120)`.
const TAYLOR_SWITCH: f64 = 1e-6;

/// Batch evaluation uses the angle-addition form only when `|c (x - y)|`
/// is at least this large, so that the rounding of the expanded numerator
/// stays far below the kernel value.
const ANGLE_ADDITION_SWITCH: f64 = 1e-2;

/// Bandwidth `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SincBandwidth(f64);

impl SincBandwidth {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Self(c))
        } else {
            Err(Error::InvalidParameter(format!("Sinc bandwidth must be positive and finite, got {c}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Diagonal value `c / pi`.
    pub fn diagonal(self) -> f64 {
        self.0 / PI
    }
}

impl TryFrom<f64> for SincBandwidth {
    type Error = Error;
    fn try_from(c: f64) -> Result<Self> {
        Self::new(c)
    }
}

impl From<SincBandwidth> for f64 {
    fn from(c: SincBandwidth) -> f64 {
        c.0
    }
}

/// Kernel value as a function of the offset `t = x - y`.
#[inline]
pub fn kernel_at_offset(c: SincBandwidth, t: f64) -> f64 {
    let c = c.0;
    let ct = c * t;
    if ct.abs() < TAYLOR_SWITCH {
        (c / PI) * (1.0 - ct * ct / 6.0)
    } else {
        ct.sin() / (PI * t)
    }
}

/// `K_c(x, y)` for `x, y` in `[-1, 1]`.
pub fn eval_sinc_kernel(c: SincBandwidth, x: f64, y: f64) -> Result<f64> {
    check_in_interval(x)?;
    check_in_interval(y)?;
    Ok(kernel_at_offset(c, x - y))
}

/// Minimum node count that resolves the `c`-frequency oscillation of
/// `K_c`-based integrands: `max(64, ceil(2c))`.
pub fn min_resolving_nodes(c: SincBandwidth) -> usize {
    64.max((2.0 * c.0).ceil() as usize)
}

/// `||K_c(x, .)||_{L^2(I)}` by quadrature.
///
/// Logs a warning when the rule has fewer than [`min_resolving_nodes`] nodes.
pub fn kernel_row_norm(c: SincBandwidth, x: f64, rule: &QuadratureRule) -> Result<f64> {
    check_in_interval(x)?;
    let required = min_resolving_nodes(c);
    if rule.len() < required {
        log::warn!("row norm for c = {} uses {} quadrature nodes, {} recommended", c.0, rule.len(), required);
    }
    rule.integrate(|y| {
        let k = kernel_at_offset(c, x - y);
        k * k
    })
    .map(f64::sqrt)
}

/// `out[j] = sum_i weights[i] K_c(points[j], centers[i])`, no domain checks.
///
/// Far from the diagonal the numerator is expanded as
/// `sin(c x) cos(c y) - cos(c x) sin(c y)` so each pair costs a handful of
/// multiplications instead of a `sin` call.
pub fn weighted_kernel_sums(c: SincBandwidth, centers: &[f64], weights: &[f64], points: &[f64]) -> Vec<f64> {
    debug_assert_eq!(centers.len(), weights.len());
    let cv = c.0;
    let center_trig: Vec<(f64, f64)> = centers.iter().map(|&y| (cv * y).sin_cos()).collect();
    points
        .iter()
        .map(|&x| {
            let (sx, cx) = (cv * x).sin_cos();
            let mut acc = 0.0;
            for ((&y, &w), &(sy, cy)) in centers.iter().zip(weights).zip(&center_trig) {
                let t = x - y;
                let k = if (cv * t).abs() >= ANGLE_ADDITION_SWITCH {
                    (sx * cy - cx * sy) / (PI * t)
                } else {
                    kernel_at_offset(c, t)
                };
                acc += w * k;
            }
            acc
        })
        .collect()
}
