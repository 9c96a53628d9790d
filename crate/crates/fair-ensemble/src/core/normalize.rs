//! Score normalization and feature standardization helpers.

use crate::error::{Error, Result};

/// Min-max normalize a vector into [0, 1].
///
/// A constant vector maps to all zeros: a detector with no discrimination
/// carries no outlier signal.
pub fn minmax_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "minmax_normalize needs at least one value".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "minmax_normalize input contains NaN or Inf".into(),
        ));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(vec![0.0; values.len()]);
    }
    let range = max - min;
    Ok(values.iter().map(|v| (v - min) / range).collect())
}

/// Per-column zero-mean unit-variance scaling of a feature table, row-major.
///
/// Constant columns are left centered at zero (divisor clamped to 1).
pub fn standardize_columns(data: &mut [f64], rows: usize, cols: usize) {
    if rows == 0 {
        return;
    }
    for j in 0..cols {
        let mut mean = 0.0;
        for i in 0..rows {
            mean += data[i * cols + j];
        }
        mean /= rows as f64;
        let mut var = 0.0;
        for i in 0..rows {
            let d = data[i * cols + j] - mean;
            var += d * d;
        }
        var /= rows as f64;
        let sd = var.sqrt();
        let div = if sd > 0.0 { sd } else { 1.0 };
        for i in 0..rows {
            let v = &mut data[i * cols + j];
            *v = (*v - mean) / div;
        }
    }
}

/// Kahan compensated accumulator for order-stable sums.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}
