//! Linear least squares and LASSO.
//!
//! [`ols_fit`] solves `min ‖y − Xw‖²` through the normal equations, refusing
//! ill-conditioned systems rather than silently pseudo-inverting.
//! [`lasso_fit`] solves `min (1/N)‖y − Xw‖² + λ‖w‖₁` by cyclic coordinate
//! descent with exact soft-threshold updates; each sweep can only lower the
//! objective, and the optimum carries a checkable subgradient certificate:
//! with `g = (2/N)Xᵀ(Xw − y)`, at the solution `|g_j| ≤ λ` where `w_j = 0`
//! and `g_j = −λ·sign(w_j)` elsewhere.

use nalgebra::DVector;

use super::Dataset;
use crate::error::{Error, Result};

/// Condition-number ceiling for the OLS normal equations.
const OLS_CONDITION_BOUND: f64 = 1e12;

/// A fitted linear model `x ↦ wᵀx + intercept`.
///
/// [`ols_fit`] and [`lasso_fit`] operate on `X` exactly as given and leave
/// `intercept` at 0; classifier training adds an explicit constant column and
/// splits it back out (see [`super::classify`]).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegressionModel {
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub intercept: f64,
}

impl RegressionModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::invalid(format!(
                "model has {} weights but input has {} features",
                self.weights.len(),
                x.len()
            )));
        }
        Ok(self
            .weights
            .iter()
            .zip(x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.intercept)
    }
}

/// Ordinary least squares via the normal equations `(XᵀX)w = Xᵀy`.
///
/// Errors with [`Error::RankDeficient`] when the condition number of `XᵀX`
/// exceeds 1e12.
pub fn ols_fit(data: &Dataset) -> Result<RegressionModel> {
    let xtx = data.x.transpose() * &data.x;
    let xty = data.x.transpose() * &data.y;

    let svd = xtx.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > OLS_CONDITION_BOUND {
        return Err(Error::RankDeficient {
            condition,
            bound: OLS_CONDITION_BOUND,
        });
    }
    let w = svd
        .solve(&xty, 0.0)
        .map_err(|e| Error::invalid(format!("normal equations solve failed: {e}")))?;
    Ok(RegressionModel {
        weights: w.iter().cloned().collect(),
        lambda: 0.0,
        intercept: 0.0,
    })
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// The Lagrangian LASSO objective `(1/N)‖y − Xw‖² + λ‖w‖₁`.
pub fn lasso_objective(data: &Dataset, lambda: f64, w: &[f64]) -> f64 {
    let wv = DVector::from_column_slice(w);
    let r = &data.y - &data.x * wv;
    r.norm_squared() / data.n_samples() as f64
        + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest subgradient-optimality violation of `w` for the LASSO objective.
///
/// 0 at an exact optimum; compare against the solver tolerance.
pub fn lasso_certificate(data: &Dataset, lambda: f64, w: &[f64]) -> f64 {
    let n = data.n_samples() as f64;
    let wv = DVector::from_column_slice(w);
    let r = &data.x * wv - &data.y;
    let g = data.x.transpose() * r * (2.0 / n);
    let mut worst: f64 = 0.0;
    for j in 0..w.len() {
        let v = if w[j] == 0.0 {
            (g[j].abs() - lambda).max(0.0)
        } else {
            (g[j] + lambda * w[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// LASSO by cyclic coordinate descent with exact soft-threshold updates.
///
/// Convergence is declared when the largest coordinate change in a sweep
/// drops below `tol`; exceeding `max_iter` sweeps yields a convergence error
/// carrying the last iterate.
pub fn lasso_fit(
    data: &Dataset,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RegressionModel> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite and ≥ 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be > 0"));
    }
    let n = data.n_samples();
    let d = data.n_features();
    let nf = n as f64;

    // Per-column squared norms; a zero column keeps its coefficient at 0.
    let col_sq: Vec<f64> = (0..d).map(|j| data.x.column(j).norm_squared()).collect();

    let mut w = vec![0.0f64; d];
    // residual r = y − Xw, maintained incrementally
    let mut r: DVector<f64> = data.y.clone();

    for _sweep in 0..max_iter {
        let mut max_delta: f64 = 0.0;
        for j in 0..d {
            if col_sq[j] == 0.0 {
                continue;
            }
            let xj = data.x.column(j);
            // ρ_j = X_jᵀ(r + X_j·w_j) = X_jᵀ·(y − Σ_{k≠j} X_k w_k); thresholding
            // in the (2/N)-scaled gradient units keeps the w = 0 fixed point
            // exact at the boundary λ = (2/N)‖Xᵀy‖_∞.
            let rho = xj.dot(&r) + col_sq[j] * w[j];
            let new_wj = soft_threshold(2.0 / nf * rho, lambda) * nf / (2.0 * col_sq[j]);
            let delta = new_wj - w[j];
            if delta != 0.0 {
                r -= xj * delta;
                w[j] = new_wj;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < tol {
            return Ok(RegressionModel {
                weights: w,
                lambda,
                intercept: 0.0,
            });
        }
    }
    Err(Error::Convergence {
        what: "lasso coordinate descent",
        iterations: max_iter,
        last_iterate: w,
    })
}
