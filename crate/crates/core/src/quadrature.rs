//! Gauss-Legendre quadrature on `[-1, 1]`.
//!
//! Nodes are the roots of the degree-`m` Legendre polynomial, found by Newton
//! iteration from Tricomi's asymptotic guesses `cos(pi (i - 1/4) / (m + 1/2))`.
//! Only the non-negative half is iterated; the other half is mirrored so the
//! rule is exactly symmetric.

use crate::{Error, Result};

const NEWTON_TOLERANCE: f64 = 1e-15;
const NEWTON_MAX_ITERATIONS: usize = 100;

/// Nodes (strictly increasing, inside `(-1, 1)`) and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Classical Legendre `P_m(x)` and `P_{m-1}(x)` by the three-term recurrence.
fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut curr = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

impl QuadratureRule {
    /// The `m`-point Gauss-Legendre rule, exact for polynomials of degree `2m - 1`.
    pub fn gauss_legendre(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("quadrature rule needs at least one node".into()));
        }
        let mf = m as f64;
        let half = m / 2;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];

        // Roots are computed in descending order for i = 1..=half; root i goes to
        // slot m - i and its mirror to slot i - 1.
        for i in 1..=half {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (mf + 0.5)).cos();
            let mut converged = false;
            for _ in 0..NEWTON_MAX_ITERATIONS {
                let (p, p_prev) = legendre_pair(m, x);
                let dp = mf * (x * p - p_prev) / (x * x - 1.0);
                let step = p / dp;
                x -= step;
                if step.abs() <= NEWTON_TOLERANCE {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonConvergence { m });
            }
            let (p, p_prev) = legendre_pair(m, x);
            let dp = mf * (x * p - p_prev) / (x * x - 1.0);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[m - i] = x;
            nodes[i - 1] = -x;
            weights[m - i] = w;
            weights[i - 1] = w;
        }
        if m % 2 == 1 {
            // Middle root is exactly zero; P'_m(0) = m P_{m-1}(0).
            let (_, p_prev) = legendre_pair(m, 0.0);
            let dp = mf * p_prev;
            nodes[half] = 0.0;
            weights[half] = 2.0 / (dp * dp);
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j f(t_j)`; fails if `f` is non-finite at any node.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "integrand value" });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Weighted sum of precomputed integrand values at the nodes.
    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        debug_assert_eq!(values.len(), self.len());
        let mut acc = 0.0;
        for (&v, &w) in values.iter().zip(&self.weights) {
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "integrand value" });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// `(integral of (f - g)^2)^{1/2}` over `I`.
    pub fn l2_distance<F, G>(&self, f: F, g: G) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        self.integrate(|t| {
            let d = f(t) - g(t);
            d * d
        })
        .map(f64::sqrt)
    }
}
