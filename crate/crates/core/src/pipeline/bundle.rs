//! On-disk model bundle.
//!
//! A bundle is a directory holding `manifest.json` and one `<name>.bin` per
//! array. Array files are raw little-endian `f64` in row-major order with no
//! header; the manifest lists every array's file and shape. Complex
//! matrices are stored with a trailing dimension of 2 (`re`, `im`).

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{AeShape, AeWeights};
use crate::error::{Error, Result};
use crate::optics::ComplexMatrix;
use crate::preprocess::PreprocessStats;
use crate::readout::RidgeModel;
use crate::reservoir::{CircuitLayout, Ensemble, FeatureStandardizer, Reservoir, ReservoirSpec};

use super::config::{PipelineConfig, Variant};

pub const FORMAT_VERSION: u32 = 1;

/// Everything needed to reproduce predictions without retraining.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub variant: Variant,
    pub config: PipelineConfig,
    pub preprocess: PreprocessStats,
    pub autoencoder: AeWeights,
    pub ensemble: Option<Ensemble>,
    pub standardizer: Option<FeatureStandardizer>,
    pub ridge: RidgeModel,
    pub test_dates: Vec<String>,
    /// Walk-forward test contexts, `days x d (k + 1)`.
    pub test_contexts: DMatrix<f64>,
    pub test_latent_pred: DMatrix<f64>,
    pub test_surface_pred: DMatrix<f64>,
}

impl ModelBundle {
    /// Raw (unstandardised) reservoir features for each context row.
    pub fn quantum_features(&self, contexts: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
        self.ensemble.as_ref().map(|e| e.feature_matrix(contexts)).transpose()
    }

    /// Ridge inputs: standardised reservoir features followed by the raw
    /// context, or the context alone for the classical variant.
    pub fn readout_features(&self, contexts: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let quantum = self.quantum_features(contexts)?;
        assemble_features(quantum, self.standardizer.as_ref(), contexts)
    }

    pub fn predict_latent(&self, contexts: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.ridge.predict(&self.readout_features(contexts)?)
    }

    /// Latent codes to surfaces in price units.
    pub fn decode_surfaces(&self, latent: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.preprocess
            .inverse_transform(&self.autoencoder.decode_batch(latent)?)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut arrays = Vec::new();
        let mut put = |name: &str, shape: Vec<usize>, data: Vec<f64>| -> Result<()> {
            debug_assert_eq!(shape.iter().product::<usize>(), data.len());
            let file = format!("{name}.bin");
            let mut bytes = Vec::with_capacity(data.len() * 8);
            for v in &data {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            fs::write(dir.join(&file), bytes)?;
            arrays.push(ArrayEntry {
                name: name.to_string(),
                file,
                shape,
            });
            Ok(())
        };

        let p = &self.preprocess;
        for (name, v) in [
            ("preprocess.q_low", &p.q_low),
            ("preprocess.q_high", &p.q_high),
            ("preprocess.median", &p.median),
            ("preprocess.iqr", &p.iqr),
            ("preprocess.min", &p.min),
            ("preprocess.max", &p.max),
        ] {
            put(name, vec![v.len()], v.clone())?;
        }
        for (k, layer) in self.autoencoder.layers().iter().enumerate() {
            put(
                &format!("ae.layer{k}.weights"),
                shape2(&layer.weights),
                row_major(&layer.weights),
            )?;
            put(
                &format!("ae.layer{k}.bias"),
                vec![layer.bias.len()],
                layer.bias.as_slice().to_vec(),
            )?;
        }
        let mut reservoirs = Vec::new();
        if let Some(ens) = &self.ensemble {
            for r in ens.reservoirs() {
                let label = &r.spec().label;
                put(
                    &format!("reservoir.{label}.u1"),
                    shape_complex(r.first_unitary()),
                    complex_row_major(r.first_unitary()),
                )?;
                if let Some(u2) = r.second_unitary() {
                    put(
                        &format!("reservoir.{label}.u2"),
                        shape_complex(u2),
                        complex_row_major(u2),
                    )?;
                }
                put(
                    &format!("reservoir.{label}.w"),
                    shape2(r.projection()),
                    row_major(r.projection()),
                )?;
                reservoirs.push(ReservoirEntry {
                    label: label.clone(),
                    modes: r.spec().modes,
                    photons: r.spec().photons,
                    layout: match r.layout() {
                        CircuitLayout::Sandwich => "sandwich".into(),
                        CircuitLayout::Single => "single".into(),
                    },
                });
            }
        }
        if let Some(s) = &self.standardizer {
            put("standardizer.mean", vec![s.mean.len()], s.mean.as_slice().to_vec())?;
            put("standardizer.std", vec![s.std.len()], s.std.as_slice().to_vec())?;
        }
        let r = &self.ridge;
        put("ridge.weights", shape2(&r.weights), row_major(&r.weights))?;
        put(
            "ridge.intercept",
            vec![r.intercept.len()],
            r.intercept.as_slice().to_vec(),
        )?;
        put(
            "ridge.feature_mean",
            vec![r.feature_mean.len()],
            r.feature_mean.as_slice().to_vec(),
        )?;
        put(
            "ridge.target_mean",
            vec![r.target_mean.len()],
            r.target_mean.as_slice().to_vec(),
        )?;
        put(
            "test.contexts",
            shape2(&self.test_contexts),
            row_major(&self.test_contexts),
        )?;
        put(
            "test.latent_pred",
            shape2(&self.test_latent_pred),
            row_major(&self.test_latent_pred),
        )?;
        put(
            "test.surface_pred",
            shape2(&self.test_surface_pred),
            row_major(&self.test_surface_pred),
        )?;

        let shape = self.autoencoder.shape();
        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            variant: self.variant,
            config: self.config.to_text(),
            autoencoder_shape: [shape.input, shape.hidden1, shape.hidden2, shape.latent],
            feature_count: self.ridge.n_features(),
            reservoirs,
            preprocess_iqr_guarded: p.iqr_guarded.clone(),
            preprocess_constant: p.constant.clone(),
            standardizer_constant: self.standardizer.as_ref().map(|s| s.constant.clone()),
            ridge_alpha: r.alpha,
            test_dates: self.test_dates.clone(),
            arrays,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join("manifest.json"))
            .map_err(|e| Error::Bundle(format!("{}: {e}", dir.join("manifest.json").display())))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(Error::Bundle(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                manifest.format_version
            )));
        }
        let arrays = ArrayReader {
            dir,
            entries: &manifest.arrays,
        };
        let config = PipelineConfig::parse(&manifest.config, "bundle manifest")?;

        let vec = |name: &str| -> Result<Vec<f64>> { Ok(arrays.read(name, 1)?.1) };
        let preprocess = PreprocessStats {
            q_low: vec("preprocess.q_low")?,
            q_high: vec("preprocess.q_high")?,
            median: vec("preprocess.median")?,
            iqr: vec("preprocess.iqr")?,
            min: vec("preprocess.min")?,
            max: vec("preprocess.max")?,
            iqr_guarded: manifest.preprocess_iqr_guarded.clone(),
            constant: manifest.preprocess_constant.clone(),
        };
        let d = preprocess.median.len();
        for v in [&preprocess.q_high, &preprocess.iqr, &preprocess.min, &preprocess.max] {
            if v.len() != d {
                return Err(Error::Bundle("preprocessing arrays disagree in length".into()));
            }
        }
        if preprocess.iqr_guarded.len() != d || preprocess.constant.len() != d {
            return Err(Error::Bundle("preprocessing flags disagree in length".into()));
        }

        let [input, hidden1, hidden2, latent] = manifest.autoencoder_shape;
        let shape = AeShape {
            input,
            hidden1,
            hidden2,
            latent,
        };
        let layers = (0..6)
            .map(|k| {
                Ok((
                    arrays.matrix(&format!("ae.layer{k}.weights"))?,
                    DVector::from_vec(vec(&format!("ae.layer{k}.bias"))?),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let autoencoder = AeWeights::from_layers(shape, layers)?;

        let ensemble = if manifest.reservoirs.is_empty() {
            None
        } else {
            let reservoirs = manifest
                .reservoirs
                .iter()
                .map(|e| {
                    let spec = ReservoirSpec::new(e.label.clone(), e.modes, e.photons);
                    let u1 = arrays.complex(&format!("reservoir.{}.u1", e.label))?;
                    let w = arrays.matrix(&format!("reservoir.{}.w", e.label))?;
                    match e.layout.as_str() {
                        "sandwich" => {
                            let u2 = arrays.complex(&format!("reservoir.{}.u2", e.label))?;
                            Reservoir::from_parts(spec, CircuitLayout::Sandwich, u1, Some(u2), w)
                        }
                        "single" => Reservoir::from_parts(spec, CircuitLayout::Single, u1, None, w),
                        other => Err(Error::Bundle(format!("unknown circuit layout '{other}'"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Ensemble::new(reservoirs)?)
        };
        let standardizer = match &manifest.standardizer_constant {
            Some(constant) => Some(FeatureStandardizer {
                mean: DVector::from_vec(vec("standardizer.mean")?),
                std: DVector::from_vec(vec("standardizer.std")?),
                constant: constant.clone(),
            }),
            None => None,
        };
        let ridge = RidgeModel {
            weights: arrays.matrix("ridge.weights")?,
            intercept: DVector::from_vec(vec("ridge.intercept")?),
            alpha: manifest.ridge_alpha,
            feature_mean: DVector::from_vec(vec("ridge.feature_mean")?),
            target_mean: DVector::from_vec(vec("ridge.target_mean")?),
        };
        if ridge.n_features() != manifest.feature_count {
            return Err(Error::Bundle(format!(
                "ridge has {} features, manifest says {}",
                ridge.n_features(),
                manifest.feature_count
            )));
        }
        Ok(Self {
            variant: manifest.variant,
            config,
            preprocess,
            autoencoder,
            ensemble,
            standardizer,
            ridge,
            test_dates: manifest.test_dates.clone(),
            test_contexts: arrays.matrix("test.contexts")?,
            test_latent_pred: arrays.matrix("test.latent_pred")?,
            test_surface_pred: arrays.matrix("test.surface_pred")?,
        })
    }
}

/// `[standardize(quantum) | contexts]`.
pub(crate) fn assemble_features(
    quantum: Option<DMatrix<f64>>,
    standardizer: Option<&FeatureStandardizer>,
    contexts: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    match (quantum, standardizer) {
        (None, _) => Ok(contexts.clone()),
        (Some(q), Some(s)) => {
            let qs = s.apply(&q)?;
            let n = contexts.nrows();
            let (pq, pc) = (qs.ncols(), contexts.ncols());
            let mut out = DMatrix::zeros(n, pq + pc);
            out.columns_mut(0, pq).copy_from(&qs);
            out.columns_mut(pq, pc).copy_from(contexts);
            Ok(out)
        }
        (Some(_), None) => Err(Error::Bundle("reservoir features without a standardizer".into())),
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    variant: Variant,
    config: String,
    autoencoder_shape: [usize; 4],
    feature_count: usize,
    reservoirs: Vec<ReservoirEntry>,
    preprocess_iqr_guarded: Vec<bool>,
    preprocess_constant: Vec<bool>,
    standardizer_constant: Option<Vec<bool>>,
    ridge_alpha: f64,
    test_dates: Vec<String>,
    arrays: Vec<ArrayEntry>,
}

#[derive(Serialize, Deserialize)]
struct ReservoirEntry {
    label: String,
    modes: usize,
    photons: usize,
    layout: String,
}

#[derive(Serialize, Deserialize)]
struct ArrayEntry {
    name: String,
    file: String,
    shape: Vec<usize>,
}

struct ArrayReader<'a> {
    dir: &'a Path,
    entries: &'a [ArrayEntry],
}

impl ArrayReader<'_> {
    fn read(&self, name: &str, rank: usize) -> Result<(Vec<usize>, Vec<f64>)> {
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Bundle(format!("missing array '{name}'")))?;
        if entry.shape.len() != rank {
            return Err(Error::Bundle(format!(
                "array '{name}' has rank {}, expected {rank}",
                entry.shape.len()
            )));
        }
        let bytes = fs::read(self.dir.join(&entry.file)).map_err(|e| Error::Bundle(format!("{}: {e}", entry.file)))?;
        let expected: usize = entry.shape.iter().product();
        if bytes.len() != expected * 8 {
            return Err(Error::Bundle(format!(
                "array '{name}' holds {} bytes, shape {:?} needs {}",
                bytes.len(),
                entry.shape,
                expected * 8
            )));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok((entry.shape.clone(), data))
    }

    fn matrix(&self, name: &str) -> Result<DMatrix<f64>> {
        let (shape, data) = self.read(name, 2)?;
        Ok(DMatrix::from_row_slice(shape[0], shape[1], &data))
    }

    fn complex(&self, name: &str) -> Result<ComplexMatrix> {
        let (shape, data) = self.read(name, 3)?;
        if shape[2] != 2 {
            return Err(Error::Bundle(format!("complex array '{name}' must end in 2")));
        }
        let (r, c) = (shape[0], shape[1]);
        ComplexMatrix::new(DMatrix::from_fn(r, c, |i, j| {
            let k = 2 * (i * c + j);
            Complex64::new(data[k], data[k + 1])
        }))
    }
}

fn shape2(m: &DMatrix<f64>) -> Vec<usize> {
    vec![m.nrows(), m.ncols()]
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn shape_complex(m: &ComplexMatrix) -> Vec<usize> {
    vec![m.nrows(), m.ncols(), 2]
}

fn complex_row_major(m: &ComplexMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols() * 2);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m.get(i, j);
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}
