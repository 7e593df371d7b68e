//! Gauss-Hermite rules for the standard normal weight `(2 pi)^{-1/2} e^{-x^2/2}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point rule; the weights sum to 1.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Orthonormal probabilists' Hermite values `h_0(x), ..., h_{n}(x)`.
fn normalized_hermite(x: f64, n: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(x);
    }
    for k in 1..n {
        let next = (x * h[k] - (k as f64).sqrt() * h[k - 1]) / ((k + 1) as f64).sqrt();
        h.push(next);
    }
    h
}

impl GaussHermite {
    /// Golub-Welsch nodes polished by Newton steps on `h_n`; weights from
    /// the Christoffel function `1 / sum_k h_k(x)^2`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Quadrature("rule needs at least one node".into()));
        }
        let jacobi = DMatrix::from_fn(n, n, |i, j| if i + 1 == j || j + 1 == i { (i.max(j) as f64).sqrt() } else { 0.0 });
        let eig = SymmetricEigen::new(jacobi);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        nodes.sort_by(f64::total_cmp);
        for x in nodes.iter_mut() {
            let mut converged = false;
            for _ in 0..50 {
                let h = normalized_hermite(*x, n);
                // h_n' = sqrt(n) h_{n-1}
                let step = h[n] / ((n as f64).sqrt() * h[n - 1]);
                *x -= step;
                if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                    converged = true;
                    break;
                }
            }
            if !converged || !x.is_finite() {
                return Err(Error::Quadrature(format!("Newton refinement did not converge near {x}")));
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| 1.0 / normalized_hermite(x, n - 1).iter().map(|h| h * h).sum::<f64>())
            .collect();
        Ok(Self { nodes, weights })
    }

    /// The `n`-point rule, computed once per process.
    pub fn cached(n: usize) -> Result<Arc<Self>> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let rules = RULES.get_or_init(Default::default);
        if let Some(rule) = rules.lock().expect("rule cache poisoned").get(&n) {
            return Ok(rule.clone());
        }
        let rule = Arc::new(Self::new(n)?);
        rules.lock().expect("rule cache poisoned").insert(n, rule.clone());
        Ok(rule)
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::iter::Sum<T>,
        F: Fn(f64) -> T,
        T: std::ops::Mul<f64, Output = T>,
    {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}
