//! Dense symmetric solves for the closed-form weight systems.

use nalgebra::{DMatrix, DVector};

use crate::core::matrix::Matrix;
use crate::error::{Error, Result};

/// Ridge added when a system is singular at the configured ridge.
pub const FALLBACK_RIDGE: f64 = 1e-8;

/// Acceptable infinity-norm residual relative to max(1, ||b||_inf).
const RESIDUAL_TOL: f64 = 1e-8;

/// Solution of a symmetric linear system plus a flag recording whether the
/// ridge fallback had to fire.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    pub ridge_fallback: bool,
}

/// Solve (A + ridge*I) x = b for symmetric positive semidefinite A.
///
/// Tries a Cholesky factorization first, then LU. If the system is singular
/// at the configured ridge, retries once with an extra ridge of
/// [`FALLBACK_RIDGE`] and a warning; a system that is still singular is an
/// error.
pub fn solve_linear(a: &Matrix, b: &[f64], ridge: f64) -> Result<LinearSolution> {
    let k = a.rows();
    if a.cols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: a.cols(),
            context: "solve_linear expects a square matrix".into(),
        });
    }
    if b.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: b.len(),
            context: "solve_linear right-hand side".into(),
        });
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "solve_linear input contains NaN or Inf".into(),
        ));
    }
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::InvalidInput("ridge must be finite and >= 0".into()));
    }

    if let Some(x) = try_solve(a, b, ridge) {
        return Ok(LinearSolution {
            x,
            ridge_fallback: false,
        });
    }
    log::warn!(
        "linear system singular at ridge {ridge:e}; retrying with ridge {:e}",
        ridge + FALLBACK_RIDGE
    );
    if let Some(x) = try_solve(a, b, ridge + FALLBACK_RIDGE) {
        return Ok(LinearSolution {
            x,
            ridge_fallback: true,
        });
    }
    Err(Error::SingularSystem(format!(
        "{k}x{k} system unsolved even with ridge {:e}",
        ridge + FALLBACK_RIDGE
    )))
}

fn try_solve(a: &Matrix, b: &[f64], ridge: f64) -> Option<Vec<f64>> {
    let k = a.rows();
    let m = DMatrix::from_fn(k, k, |i, j| a.get(i, j) + if i == j { ridge } else { 0.0 });
    let rhs = DVector::from_column_slice(b);

    let x = match m.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => m.clone().full_piv_lu().solve(&rhs)?,
    };

    // Residual check against the system actually solved.
    let mut resid: f64 = 0.0;
    for i in 0..k {
        let mut ax = 0.0;
        for j in 0..k {
            ax += m[(i, j)] * x[j];
        }
        resid = resid.max((ax - b[i]).abs());
    }
    let b_inf = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if resid <= RESIDUAL_TOL * b_inf.max(1.0) && x.iter().all(|v| v.is_finite()) {
        Some(x.as_slice().to_vec())
    } else {
        None
    }
}
