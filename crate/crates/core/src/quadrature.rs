//! Expectations over unit-mean exponential fading.
//!
//! Gauss–Laguerre is tried first with node doubling. Integrands that behave
//! like `h^q` with fractional `q` near zero converge slowly under it, so a
//! double-exponential (exp-sinh) trapezoid rule takes over when doubling
//! stalls.

use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

type RuleEntry = (usize, Arc<GaussLaguerre>);

/// Gauss–Laguerre rule for `∫_0^∞ f(x) e^(-x) dx`.
#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub–Welsch construction from the Laguerre Jacobi matrix.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "rule needs at least one node"));
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jacobi[(i, i)] = (2 * i + 1) as f64;
            if i + 1 < n {
                let b = (i + 1) as f64;
                jacobi[(i, i + 1)] = b;
                jacobi[(i + 1, i)] = b;
            }
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// Shared rule of the given size, built once per process.
    pub fn cached(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<Vec<RuleEntry>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((_, rule)) = guard.iter().find(|(k, _)| *k == n) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(n)?);
        guard.push((n, Arc::clone(&rule)));
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute change between successive refinements that counts as converged.
    pub abs_tol: f64,
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Refinement levels allowed for the exp-sinh fallback.
    pub max_levels: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            initial_nodes: 64,
            max_nodes: 256,
            max_levels: 12,
        }
    }
}

/// `E[f(h)]` for `h ~ Exp(1)` with default tolerances.
pub fn expect_over_h(f: impl FnMut(f64) -> f64) -> Result<f64> {
    expect_over_h_with(f, &QuadratureOptions::default())
}

pub fn expect_over_h_with(mut f: impl FnMut(f64) -> f64, opts: &QuadratureOptions) -> Result<f64> {
    if !(opts.abs_tol > 0.0) || opts.initial_nodes == 0 {
        return Err(Error::invalid(
            "quadrature options",
            "tolerance and node count must be positive",
        ));
    }
    let mut n = opts.initial_nodes;
    let mut prev = checked(GaussLaguerre::cached(n)?.integrate(&mut f))?;
    while n * 2 <= opts.max_nodes {
        n *= 2;
        let next = checked(GaussLaguerre::cached(n)?.integrate(&mut f))?;
        if (next - prev).abs() < opts.abs_tol {
            return Ok(next);
        }
        prev = next;
    }
    exp_sinh_expectation(f, opts.abs_tol, opts.max_levels)
}

fn checked(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature {
            achieved: f64::NAN,
            tolerance: 0.0,
        })
    }
}

/// `∫_0^∞ f(x) e^(-x) dx` by the substitution `x = exp(π/2 · sinh t)` and
/// trapezoidal sums with step halving.
pub fn exp_sinh_expectation(
    mut f: impl FnMut(f64) -> f64,
    abs_tol: f64,
    max_levels: u32,
) -> Result<f64> {
    const T_LO: f64 = -5.0;
    const T_HI: f64 = 4.0;
    const MIN_LEVELS: u32 = 3;

    let mut term = |t: f64| -> Result<f64> {
        let x = (FRAC_PI_2 * t.sinh()).exp();
        if x == 0.0 || x > 745.0 {
            return Ok(0.0);
        }
        let w = x * FRAC_PI_2 * t.cosh() * (-x).exp();
        if w == 0.0 {
            return Ok(0.0);
        }
        let v = f(x) * w;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Quadrature {
                achieved: f64::NAN,
                tolerance: abs_tol,
            })
        }
    };

    let mut step = 0.5;
    let mut sum = 0.0;
    let k_max = ((T_HI - T_LO) / step).round() as i64;
    for k in 0..=k_max {
        sum += term(T_LO + k as f64 * step)?;
    }
    let mut estimate = sum * step;
    let mut change = f64::INFINITY;
    for level in 1..=max_levels {
        step *= 0.5;
        let k_max = ((T_HI - T_LO) / step).round() as i64;
        for k in (1..k_max).step_by(2) {
            sum += term(T_LO + k as f64 * step)?;
        }
        let next = sum * step;
        change = (next - estimate).abs();
        estimate = next;
        if level >= MIN_LEVELS && change < abs_tol {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature {
        achieved: change,
        tolerance: abs_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_moments_are_exact() {
        for n in [64, 128, 256] {
            let rule = GaussLaguerre::cached(n).unwrap();
            assert_eq!(rule.len(), n);
            assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
            assert!((rule.integrate(|h| h) - 1.0).abs() < 1e-12);
            assert!((rule.integrate(|h| h * h) - 2.0).abs() < 1e-12);
        }
        assert!((expect_over_h(|_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((expect_over_h(|h| h).unwrap() - 1.0).abs() < 1e-12);
        assert!((expect_over_h(|h| h * h).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nodes_are_sorted_and_weights_positive() {
        let rule = GaussLaguerre::new(32).unwrap();
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights().iter().all(|&w| w >= 0.0));
        assert_relative_eq!(
            rule.nodes()[0],
            0.044_489_365_833_267_39,
            max_relative = 1e-10
        );
    }

    #[test]
    fn fractional_power_falls_back_and_converges() {
        // E[h^q] = Γ(1 + q)
        for q in [0.2, 0.555_555_555_555_555_6, 0.8] {
            let v = expect_over_h(|h| h.powf(q)).unwrap();
            let exact = crate::special::gamma(1.0 + q).unwrap();
            assert!((v - exact).abs() < 1e-11, "q = {q}: {v} vs {exact}");
        }
        let v = exp_sinh_expectation(|h| h.powf(-0.5), 1e-12, 12).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(expect_over_h(|_| f64::NAN).is_err());
    }
}
