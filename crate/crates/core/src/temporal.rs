//! Sliding windows over latent codes.
//!
//! The input for target day `t` is `[z_{t-k}, ..., z_{t-1}, z_{t-1} - z_{t-2}]`,
//! `d (k + 1)` wide. A series of `T` codes yields `T - k` windows with
//! targets `k..T`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct LatentSeries {
    /// `T x d`, one row per day, chronological.
    pub codes: DMatrix<f64>,
    /// Day index of each row.
    pub days: Vec<usize>,
}

impl LatentSeries {
    pub fn new(codes: DMatrix<f64>) -> Self {
        let days = (0..codes.nrows()).collect();
        Self { codes, days }
    }

    pub fn len(&self) -> usize {
        self.codes.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.codes.ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowedDataset {
    /// `N x d (k + 1)`.
    pub inputs: DMatrix<f64>,
    /// `N x d`.
    pub targets: DMatrix<f64>,
    /// Day index of each target.
    pub target_days: Vec<usize>,
    /// Earliest and latest day read by each input row.
    pub input_days: Vec<(usize, usize)>,
    pub window: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.nrows() == 0
    }

    /// Rows `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> WindowedDataset {
        WindowedDataset {
            inputs: self.inputs.rows(start, len).into_owned(),
            targets: self.targets.rows(start, len).into_owned(),
            target_days: self.target_days[start..start + len].to_vec(),
            input_days: self.input_days[start..start + len].to_vec(),
            window: self.window,
        }
    }
}

/// Builds every window of size `k` over `series`.
pub fn build_windows(series: &LatentSeries, k: usize) -> Result<WindowedDataset> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "window size must be at least 2 for the difference term, got {k}"
        )));
    }
    let t = series.len();
    if t <= k {
        return Err(Error::InsufficientData(format!(
            "{t} codes cannot form a window of size {k}"
        )));
    }
    let d = series.dim();
    let n = t - k;
    let z = &series.codes;
    let mut inputs = DMatrix::zeros(n, d * (k + 1));
    let mut targets = DMatrix::zeros(n, d);
    for row in 0..n {
        let target = row + k;
        for lag in 0..k {
            let src = target - k + lag;
            for j in 0..d {
                inputs[(row, lag * d + j)] = z[(src, j)];
            }
        }
        for j in 0..d {
            inputs[(row, k * d + j)] = z[(target - 1, j)] - z[(target - 2, j)];
            targets[(row, j)] = z[(target, j)];
        }
    }
    Ok(WindowedDataset {
        inputs,
        targets,
        target_days: (k..t).map(|i| series.days[i]).collect(),
        input_days: (k..t).map(|i| (series.days[i - k], series.days[i - 1])).collect(),
        window: k,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataSplit {
    pub train: WindowedDataset,
    pub validation: WindowedDataset,
    pub test: WindowedDataset,
}

/// Chronological split of `series`, whose first `history` rows are the
/// historical panel and whose remaining rows are realized future days.
///
/// Historical windows divide into training and the trailing `validation`
/// windows. Each future day becomes one walk-forward test window built from
/// the `k` realized codes before it.
pub fn split(series: &LatentSeries, history: usize, k: usize, validation: usize) -> Result<DataSplit> {
    if history > series.len() {
        return Err(Error::invalid(format!(
            "history length {history} exceeds series length {}",
            series.len()
        )));
    }
    if history < k + validation + 2 {
        return Err(Error::InsufficientData(format!(
            "{history} historical days cannot supply {validation} validation windows of size {k} and a training set"
        )));
    }
    let all = build_windows(series, k)?;
    let n_hist = history - k;
    let n_train = n_hist - validation;
    Ok(DataSplit {
        train: all.slice(0, n_train),
        validation: all.slice(n_train, validation),
        test: all.slice(n_hist, all.len() - n_hist),
    })
}
