//! Closed-form multi-output ridge regression and evaluation metrics.
//!
//! Features and targets are centred on their training means, the weights
//! solve `(Fc^T Fc + alpha I) W^T = Fc^T Zc` by Cholesky, and the intercept
//! `b = mean(Z) - W mean(F)` is left unpenalised.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    /// `outputs x features`.
    pub weights: DMatrix<f64>,
    pub intercept: DVector<f64>,
    pub alpha: f64,
    pub feature_mean: DVector<f64>,
    pub target_mean: DVector<f64>,
}

/// Smallest acceptable Cholesky pivot relative to the largest Gram diagonal.
const PIVOT_FLOOR: f64 = 1e-12;

fn centered(x: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let mean = x.row_mean().transpose();
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    (c, mean)
}

impl RidgeModel {
    pub fn fit(features: &DMatrix<f64>, targets: &DMatrix<f64>, alpha: f64) -> Result<Self> {
        let n = features.nrows();
        if n < 2 {
            return Err(Error::InsufficientData(format!("ridge needs at least 2 rows, got {n}")));
        }
        if targets.nrows() != n {
            return Err(Error::shape(format!(
                "{n} feature rows but {} target rows",
                targets.nrows()
            )));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        let (fc, feature_mean) = centered(features);
        let (zc, target_mean) = centered(targets);
        let ft = fc.transpose();
        let mut gram = &ft * &fc;
        let max_diag = gram.diagonal().max();
        for i in 0..gram.nrows() {
            gram[(i, i)] += alpha;
        }
        let rhs = &ft * &zc;
        let chol = gram.cholesky().ok_or(Error::Singular { alpha })?;
        let floor = PIVOT_FLOOR * max_diag.max(alpha).max(f64::MIN_POSITIVE);
        if chol.l_dirty().diagonal().iter().any(|&d| d * d <= floor) {
            return Err(Error::Singular { alpha });
        }
        let solution = chol.solve(&rhs);
        let weights = solution.transpose();
        let intercept = &target_mean - &weights * &feature_mean;
        Ok(Self {
            weights,
            intercept,
            alpha,
            feature_mean,
            target_mean,
        })
    }

    pub fn n_features(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.weights.nrows()
    }

    /// `Z_hat = F W^T + 1 b^T`.
    pub fn predict(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.ncols() != self.n_features() {
            return Err(Error::shape(format!(
                "model expects {} features, got {}",
                self.n_features(),
                features.ncols()
            )));
        }
        let mut out = features * self.weights.transpose();
        for mut row in out.row_iter_mut() {
            row += self.intercept.transpose();
        }
        Ok(out)
    }

    pub fn predict_one(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.n_features() {
            return Err(Error::shape(format!(
                "model expects {} features, got {}",
                self.n_features(),
                features.len()
            )));
        }
        let f = DVector::from_column_slice(features);
        Ok((&self.weights * f + &self.intercept).as_slice().to_vec())
    }

    /// `sum ||z - W f - b||^2 + alpha ||W||_F^2` on the given rows.
    pub fn objective(&self, features: &DMatrix<f64>, targets: &DMatrix<f64>) -> Result<f64> {
        let pred = self.predict(features)?;
        Ok((targets - pred).norm_squared() + self.alpha * self.weights.norm_squared())
    }

    /// `max |(Fc^T Fc + alpha I) W^T - Fc^T Zc|` on the centred training data.
    pub fn normal_equation_residual(&self, features: &DMatrix<f64>, targets: &DMatrix<f64>) -> f64 {
        let (fc, _) = centered(features);
        let (zc, _) = centered(targets);
        let ft = fc.transpose();
        let lhs = &ft * (&fc * self.weights.transpose()) + self.weights.transpose() * self.alpha;
        let rhs = &ft * &zc;
        (lhs - rhs).amax()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: usize,
    /// Mean over samples of the squared L2 norm of the latent error.
    pub latent_mse: f64,
    /// RMSE over every surface entry, in price units.
    pub surface_rmse: f64,
    /// `1 - SSE / SST` on the flattened latent predictions, SST around the
    /// mean of all flattened targets.
    pub r2: f64,
    pub per_day_surface_rmse: Vec<f64>,
}

pub fn evaluate(
    latent_pred: &DMatrix<f64>,
    latent_true: &DMatrix<f64>,
    surface_pred: &DMatrix<f64>,
    surface_true: &DMatrix<f64>,
) -> Result<EvalReport> {
    let n = latent_true.nrows();
    if n == 0 || latent_true.ncols() == 0 || surface_true.ncols() == 0 {
        return Err(Error::InsufficientData("cannot evaluate empty predictions".into()));
    }
    if latent_pred.shape() != latent_true.shape() || surface_pred.shape() != surface_true.shape() {
        return Err(Error::shape(format!(
            "latent {:?} vs {:?}, surface {:?} vs {:?}",
            latent_pred.shape(),
            latent_true.shape(),
            surface_pred.shape(),
            surface_true.shape()
        )));
    }
    if surface_true.nrows() != n {
        return Err(Error::shape("latent and surface sample counts differ"));
    }
    let latent_err = latent_pred - latent_true;
    let sse = latent_err.norm_squared();
    let latent_mse = sse / n as f64;
    let grand_mean = latent_true.mean();
    let sst: f64 = latent_true.iter().map(|v| (v - grand_mean).powi(2)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    let surface_err = surface_pred - surface_true;
    let surface_rmse = (surface_err.norm_squared() / surface_err.len() as f64).sqrt();
    let width = surface_err.ncols() as f64;
    let per_day_surface_rmse = surface_err
        .row_iter()
        .map(|r| (r.norm_squared() / width).sqrt())
        .collect();
    Ok(EvalReport {
        samples: n,
        latent_mse,
        surface_rmse,
        r2,
        per_day_surface_rmse,
    })
}
