use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bundle::ModelBundle;

/// Mean per-sample latencies, each sample processed on its own.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatencyReport {
    pub samples: usize,
    pub repeats: usize,
    /// Ridge prediction, decoding and inverse scaling.
    pub readout_ms_per_sample: f64,
    /// Reservoir features plus everything in `readout_ms_per_sample`.
    pub full_ms_per_sample: f64,
    /// `(reservoir label, feature time per sample)`.
    pub reservoir_ms_per_sample: Vec<(String, f64)>,
}

fn mean_ms<F>(rows: &[DMatrix<f64>], repeats: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&DMatrix<f64>) -> Result<()>,
{
    let t = Instant::now();
    for _ in 0..repeats {
        for row in rows {
            f(row)?;
        }
    }
    Ok(t.elapsed().as_secs_f64() * 1e3 / (repeats * rows.len()) as f64)
}

/// Times inference on the bundle's stored test contexts, `repeats` passes
/// over every sample.
pub fn bench_latency(bundle: &ModelBundle, repeats: usize) -> Result<LatencyReport> {
    let contexts = &bundle.test_contexts;
    let n = contexts.nrows();
    if n == 0 || repeats == 0 {
        return Err(Error::InvalidArgument(
            "benchmark needs samples and at least one repeat".into(),
        ));
    }
    let features = bundle.readout_features(contexts)?;
    let feature_rows: Vec<DMatrix<f64>> = (0..n).map(|i| features.rows(i, 1).into_owned()).collect();
    let context_rows: Vec<DMatrix<f64>> = (0..n).map(|i| contexts.rows(i, 1).into_owned()).collect();

    let readout_ms_per_sample = mean_ms(&feature_rows, repeats, |f| {
        let z = bundle.ridge.predict(f)?;
        std::hint::black_box(bundle.decode_surfaces(&z)?);
        Ok(())
    })?;
    let full_ms_per_sample = mean_ms(&context_rows, repeats, |x| {
        let z = bundle.predict_latent(x)?;
        std::hint::black_box(bundle.decode_surfaces(&z)?);
        Ok(())
    })?;
    let mut reservoir_ms_per_sample = Vec::new();
    if let Some(ensemble) = &bundle.ensemble {
        for r in ensemble.reservoirs() {
            let ms = mean_ms(&context_rows, repeats, |x| {
                std::hint::black_box(r.feature_matrix(x)?);
                Ok(())
            })?;
            reservoir_ms_per_sample.push((r.spec().label.clone(), ms));
        }
    }
    Ok(LatencyReport {
        samples: n,
        repeats,
        readout_ms_per_sample,
        full_ms_per_sample,
        reservoir_ms_per_sample,
    })
}
