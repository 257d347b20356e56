//! Invertible robust scaling: winsorize, then median/IQR scaling, then
//! min-max to `[0, 1]`. Statistics come from training rows only.
//!
//! Percentiles use linear interpolation between order statistics
//! (`h = (n - 1) p`). Median and IQR are taken on the winsorized column and
//! the min-max bounds on the winsorized-then-robust-scaled column.
//!
//! Degenerate columns: a zero IQR is replaced by 1, and a column whose
//! scaled range collapses (`max == min`) maps to 0.5 and inverts to its
//! constant value.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LOWER_PERCENTILE: f64 = 0.01;
pub const UPPER_PERCENTILE: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub q_low: Vec<f64>,
    pub q_high: Vec<f64>,
    pub median: Vec<f64>,
    pub iqr: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// Columns whose IQR was zero and replaced by 1.
    pub iqr_guarded: Vec<bool>,
    /// Columns with `max == min` after robust scaling.
    pub constant: Vec<bool>,
}

/// Linear-interpolation percentile of an ascending slice.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "percentile of empty slice");
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_column(x: &DMatrix<f64>, j: usize) -> Vec<f64> {
    let mut col: Vec<f64> = x.column(j).iter().copied().collect();
    col.sort_by(f64::total_cmp);
    col
}

impl PreprocessStats {
    pub fn fit(train: &DMatrix<f64>) -> Result<Self> {
        let (n, d) = train.shape();
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "preprocessing needs at least 2 training rows, got {n}"
            )));
        }
        if train.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("training surfaces contain non-finite values"));
        }
        let mut stats = Self {
            q_low: Vec::with_capacity(d),
            q_high: Vec::with_capacity(d),
            median: Vec::with_capacity(d),
            iqr: Vec::with_capacity(d),
            min: Vec::with_capacity(d),
            max: Vec::with_capacity(d),
            iqr_guarded: Vec::with_capacity(d),
            constant: Vec::with_capacity(d),
        };
        for j in 0..d {
            let raw = sorted_column(train, j);
            let lo = percentile_sorted(&raw, LOWER_PERCENTILE);
            let hi = percentile_sorted(&raw, UPPER_PERCENTILE);
            // Clipping is monotone, so the clipped column stays sorted.
            let clipped: Vec<f64> = raw.iter().map(|v| v.clamp(lo, hi)).collect();
            let med = percentile_sorted(&clipped, 0.5);
            let mut iqr = percentile_sorted(&clipped, 0.75) - percentile_sorted(&clipped, 0.25);
            let guarded = iqr <= 0.0;
            if guarded {
                log::warn!("column {j}: zero interquartile range, using 1");
                iqr = 1.0;
            }
            let first = (clipped[0] - med) / iqr;
            let last = (clipped[n - 1] - med) / iqr;
            let constant = last <= first;
            if constant {
                log::warn!("column {j}: constant after scaling, mapped to 0.5");
            }
            stats.q_low.push(lo);
            stats.q_high.push(hi);
            stats.median.push(med);
            stats.iqr.push(iqr);
            stats.min.push(first);
            stats.max.push(last);
            stats.iqr_guarded.push(guarded);
            stats.constant.push(constant);
        }
        Ok(stats)
    }

    pub fn dims(&self) -> usize {
        self.median.len()
    }

    fn check_width(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.ncols() != self.dims() {
            return Err(Error::shape(format!(
                "expected {} columns, got {}",
                self.dims(),
                x.ncols()
            )));
        }
        Ok(())
    }

    pub fn transform_value(&self, j: usize, x: f64) -> f64 {
        if self.constant[j] {
            return 0.5;
        }
        let clipped = x.clamp(self.q_low[j], self.q_high[j]);
        let robust = (clipped - self.median[j]) / self.iqr[j];
        (robust - self.min[j]) / (self.max[j] - self.min[j])
    }

    pub fn inverse_value(&self, j: usize, y: f64) -> f64 {
        let robust = if self.constant[j] {
            self.min[j]
        } else {
            y * (self.max[j] - self.min[j]) + self.min[j]
        };
        robust * self.iqr[j] + self.median[j]
    }

    /// Forward chain. The last stage is not clipped; since the min-max
    /// bounds are the scaled winsorization bounds, outputs stay in `[0, 1]`
    /// for non-degenerate columns.
    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_width(x)?;
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            self.transform_value(j, x[(i, j)])
        }))
    }

    /// Inverse of the scaling stages; returns values on the winsorized scale.
    pub fn inverse_transform(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_width(y)?;
        Ok(DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| {
            self.inverse_value(j, y[(i, j)])
        }))
    }

    /// Stage-one clipping only.
    pub fn winsorize(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_width(x)?;
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            x[(i, j)].clamp(self.q_low[j], self.q_high[j])
        }))
    }
}
