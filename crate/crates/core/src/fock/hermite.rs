//! Harmonic-oscillator eigenfunctions in the dimensionless convention
//! `ħ = m = ω = 1`, and Gauss–Hermite quadrature built from them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest order accepted by [`oscillator_eigenfunction`].
pub const DEFAULT_MAX_ORDER: usize = 200;

/// `φ_n(x) = (2ⁿ n! √π)^(−1/2) H_n(x) e^{−x²/2}`.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> Result<f64> {
    oscillator_eigenfunction_with_limit(n, x, DEFAULT_MAX_ORDER)
}

pub fn oscillator_eigenfunction_with_limit(n: usize, x: f64, max_order: usize) -> Result<f64> {
    if n > max_order {
        return Err(Error::EigenfunctionOrderOverflow {
            order: n,
            max: max_order,
        });
    }
    Ok(*recurrence(n, x).last().expect("at least one term"))
}

/// `[φ_0(x), ..., φ_n(x)]`.
pub fn eigenfunctions_upto(n: usize, x: f64) -> Result<Vec<f64>> {
    if n > DEFAULT_MAX_ORDER {
        return Err(Error::EigenfunctionOrderOverflow {
            order: n,
            max: DEFAULT_MAX_ORDER,
        });
    }
    Ok(recurrence(n, x))
}

// Upward recurrence on the normalized functions:
// φ_{k+1} = √(2/(k+1)) x φ_k − √(k/(k+1)) φ_{k−1}
fn recurrence(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n == 0 {
        return out;
    }
    out.push(2f64.sqrt() * x * out[0]);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Gauss–Hermite rule for `∫ e^{−x²} f(x) dx`.
///
/// Nodes start from the Golub–Welsch eigenvalues and are polished by Newton
/// iteration on `φ_N`; weights use the Christoffel form
/// `w_i e^{x_i²} = 1 / Σ_{k<N} φ_k(x_i)²`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // w_i e^{x_i²}: integrates φ_n φ_m directly without overflow
    function_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 1 {
            return Err(Error::InvalidQuadrature("need at least one node".into()));
        }
        if n_nodes > DEFAULT_MAX_ORDER {
            return Err(Error::InvalidQuadrature(format!(
                "{n_nodes} nodes exceeds supported maximum {DEFAULT_MAX_ORDER}"
            )));
        }
        let jacobi = DMatrix::from_fn(n_nodes, n_nodes, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        nodes.sort_by(f64::total_cmp);

        let n = n_nodes;
        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let phi = recurrence(n, *x);
                // φ_N' = √(2N) φ_{N−1} − x φ_N; the Gaussian factor cancels in the ratio
                let deriv = (2.0 * n as f64).sqrt() * phi[n - 1] - *x * phi[n];
                if deriv == 0.0 {
                    break;
                }
                let step = phi[n] / deriv;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }

        let function_weights: Vec<f64> = nodes
            .iter()
            .map(|&x| 1.0 / recurrence(n - 1, x).iter().map(|p| p * p).sum::<f64>())
            .collect();
        let weights = nodes
            .iter()
            .zip(&function_weights)
            .map(|(&x, &w)| w * (-x * x).exp())
            .collect();
        Ok(Self {
            nodes,
            weights,
            function_weights,
        })
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

    /// Weights for the `e^{−x²}`-weighted integral.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i e^{x_i²}`: weights for integrands that already carry the Gaussian.
    pub fn function_weights(&self) -> &[f64] {
        &self.function_weights
    }

    /// `∫ e^{−x²} f(x) dx`.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫ g(x) dx` for `g` decaying like `e^{−x²}` times a polynomial.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.function_weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// Gram matrix `⟨φ_n, φ_m⟩` for `n, m ≤ max_level`.
    pub fn gram_matrix(&self, max_level: usize) -> Result<DMatrix<f64>> {
        let table: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|&x| eigenfunctions_upto(max_level, x))
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(max_level + 1, max_level + 1, |n, m| {
            table
                .iter()
                .zip(&self.function_weights)
                .map(|(phi, &w)| w * phi[n] * phi[m])
                .sum()
        }))
    }
}
