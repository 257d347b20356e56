use std::fmt::Write as _;
use std::ops::Range;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{train_autoencoder, AeShape};
use crate::error::{Error, Result, StageContext};
use crate::preprocess::PreprocessStats;
use crate::readout::{evaluate, EvalReport, RidgeModel};
use crate::reservoir::{Ensemble, FeatureStandardizer, Reservoir, ReservoirSpec};
use crate::temporal::{self, LatentSeries, WindowedDataset};

use super::bundle::{assemble_features, ModelBundle};
use super::config::{PipelineConfig, Variant, ALPHA_GRID};
use super::panel::SurfacePanel;

/// Day range read by one fitting step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRead {
    pub stage: String,
    pub first_day: usize,
    pub last_day: usize,
}

/// Record of which days every fitted statistic was computed from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditTrail {
    /// Last day of the training partition.
    pub training_last_day: usize,
    pub reads: Vec<AuditRead>,
}

impl AuditTrail {
    fn record(&mut self, stage: &str, days: Range<usize>) {
        self.reads.push(AuditRead {
            stage: stage.to_string(),
            first_day: days.start,
            last_day: days.end.saturating_sub(1),
        });
    }

    fn record_windows(&mut self, stage: &str, ds: &WindowedDataset) {
        let first = ds.input_days.iter().map(|d| d.0).min().unwrap_or(0);
        let last = ds.target_days.iter().copied().max().unwrap_or(0);
        self.record(stage, first..last + 1);
    }

    /// Every recorded read stays within the training partition.
    pub fn verify(&self) -> Result<()> {
        for r in &self.reads {
            if r.last_day > self.training_last_day {
                return Err(Error::Leakage(format!(
                    "{} read day {} beyond the training partition (last day {})",
                    r.stage, r.last_day, self.training_last_day
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderSummary {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_validation_mse: f64,
    pub stopped_early: bool,
}

/// Deterministic outcome of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub variant: Variant,
    pub seed: u64,
    pub feature_count: usize,
    pub alpha: f64,
    /// `(alpha, validation latent MSE)` when the classical alpha was searched.
    pub alpha_search: Option<Vec<(f64, f64)>>,
    pub train_windows: usize,
    pub validation_windows: usize,
    pub test_days: usize,
    pub autoencoder: AutoencoderSummary,
    pub validation: EvalReport,
    pub test: EvalReport,
    /// Surface RMSE of always predicting the mean training surface.
    pub naive_mean_validation_rmse: f64,
    pub naive_mean_test_rmse: f64,
    pub test_dates: Vec<String>,
}

/// Wall-clock timings; kept apart from [`TrainReport`] so reports stay
/// reproducible byte for byte.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub preprocess_seconds: f64,
    pub autoencoder_seconds: f64,
    pub feature_seconds: f64,
    pub ridge_fit_seconds: f64,
    pub total_seconds: f64,
}

pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub report: TrainReport,
    pub timings: Timings,
    pub audit: AuditTrail,
}

fn rmse(pred: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    ((pred - truth).norm_squared() / truth.len() as f64).sqrt()
}

fn surfaces_at(panel: &SurfacePanel, days: &[usize]) -> DMatrix<f64> {
    panel.values.select_rows(days)
}

/// Runs preprocessing, autoencoder training, windowing, feature extraction,
/// ridge fitting and evaluation for one variant.
pub fn run_train(config: &PipelineConfig, panel: &SurfacePanel, variant: Variant) -> Result<TrainOutcome> {
    let start = Instant::now();
    let k = config.window;
    let n_test = config.test_days;
    let n_val = config.validation_windows;
    let total = panel.len();
    if total < n_test + k + n_val + 2 {
        return Err(Error::InsufficientData(format!(
            "{total} days cannot hold {n_test} test days, {n_val} validation windows and windows of size {k}"
        )))
        .stage("split");
    }
    let history = total - n_test;
    let train_days = history - n_val;
    let mut audit = AuditTrail {
        training_last_day: train_days - 1,
        reads: Vec::new(),
    };

    let t = Instant::now();
    let train_surfaces = panel.values.rows(0, train_days).into_owned();
    audit.record("preprocess.fit", 0..train_days);
    let stats = PreprocessStats::fit(&train_surfaces).stage("preprocess")?;
    let scaled = stats.transform(&panel.values).stage("preprocess")?;
    let preprocess_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let ae_rows = scaled.rows(0, train_days).into_owned();
    let (weights, log) =
        train_autoencoder(&ae_rows, AeShape::SURFACE, &config.autoencoder, config.seed).stage("autoencoder")?;
    audit.record("autoencoder.gradient_steps", log.fit_rows.clone());
    audit.record("autoencoder.early_stopping", log.validation_rows.clone());
    let autoencoder_seconds = t.elapsed().as_secs_f64();

    let codes = weights.encode_batch(&scaled).stage("encode")?;
    let series = LatentSeries::new(codes);
    let split = temporal::split(&series, history, k, n_val).stage("windowing")?;
    let context_dim = split.train.inputs.ncols();

    let t = Instant::now();
    let ensemble = match variant {
        Variant::Qorc => Some(Ensemble::sandwich(config.reservoirs.clone(), config.seed, context_dim)),
        Variant::SimplePml => Some(
            Reservoir::single(ReservoirSpec::single_ablation(), config.seed, context_dim)
                .and_then(|r| Ensemble::new(vec![r])),
        ),
        Variant::Classical => None,
    }
    .transpose()
    .stage("reservoir")?;
    let quantum = |ds: &WindowedDataset| -> Result<Option<DMatrix<f64>>> {
        ensemble.as_ref().map(|e| e.feature_matrix(&ds.inputs)).transpose()
    };
    let q_train = quantum(&split.train).stage("features")?;
    let q_val = quantum(&split.validation).stage("features")?;
    let q_test = quantum(&split.test).stage("features")?;
    let standardizer = match &q_train {
        Some(q) => {
            audit.record_windows("standardizer.fit", &split.train);
            Some(FeatureStandardizer::fit(q).stage("standardize")?)
        }
        None => None,
    };
    let f_train = assemble_features(q_train, standardizer.as_ref(), &split.train.inputs).stage("features")?;
    let f_val = assemble_features(q_val, standardizer.as_ref(), &split.validation.inputs).stage("features")?;
    let f_test = assemble_features(q_test, standardizer.as_ref(), &split.test.inputs).stage("features")?;
    let feature_seconds = t.elapsed().as_secs_f64();

    let (alpha, alpha_search) = if variant == Variant::Classical && config.classical_alpha_search {
        let scores = ALPHA_GRID
            .iter()
            .map(|&a| {
                let m = RidgeModel::fit(&f_train, &split.train.targets, a)?;
                let pred = m.predict(&f_val)?;
                Ok((
                    a,
                    (pred - &split.validation.targets).norm_squared() / f_val.nrows() as f64,
                ))
            })
            .collect::<Result<Vec<_>>>()
            .stage("ridge")?;
        let best = scores
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty grid");
        (best.0, Some(scores))
    } else {
        (config.alpha(variant), None)
    };

    let t = Instant::now();
    audit.record_windows("ridge.fit", &split.train);
    let ridge = RidgeModel::fit(&f_train, &split.train.targets, alpha).stage("ridge")?;
    let ridge_fit_seconds = t.elapsed().as_secs_f64();

    let decode = |z: &DMatrix<f64>| -> Result<DMatrix<f64>> { stats.inverse_transform(&weights.decode_batch(z)?) };
    let z_val = ridge.predict(&f_val).stage("evaluate")?;
    let z_test = ridge.predict(&f_test).stage("evaluate")?;
    let s_val = decode(&z_val).stage("evaluate")?;
    let s_test = decode(&z_test).stage("evaluate")?;
    let truth_val = surfaces_at(panel, &split.validation.target_days);
    let truth_test = surfaces_at(panel, &split.test.target_days);
    let validation = evaluate(&z_val, &split.validation.targets, &s_val, &truth_val).stage("evaluate")?;
    let test = evaluate(&z_test, &split.test.targets, &s_test, &truth_test).stage("evaluate")?;

    let mean_surface = train_surfaces.row_mean();
    let naive = |truth: &DMatrix<f64>| {
        let pred = DMatrix::from_fn(truth.nrows(), truth.ncols(), |_, j| mean_surface[j]);
        rmse(&pred, truth)
    };
    let test_dates: Vec<String> = split.test.target_days.iter().map(|&d| panel.dates[d].clone()).collect();

    let report = TrainReport {
        variant,
        seed: config.seed,
        feature_count: ridge.n_features(),
        alpha,
        alpha_search,
        train_windows: split.train.len(),
        validation_windows: split.validation.len(),
        test_days: split.test.len(),
        autoencoder: AutoencoderSummary {
            epochs_run: log.epochs.len(),
            best_epoch: log.best_epoch,
            best_validation_mse: log.epochs[log.best_epoch].validation_mse,
            stopped_early: log.stopped_early,
        },
        naive_mean_validation_rmse: naive(&truth_val),
        naive_mean_test_rmse: naive(&truth_test),
        validation,
        test,
        test_dates: test_dates.clone(),
    };
    let bundle = ModelBundle {
        variant,
        config: config.clone(),
        preprocess: stats,
        autoencoder: weights,
        ensemble,
        standardizer,
        ridge,
        test_dates,
        test_contexts: split.test.inputs.clone(),
        test_latent_pred: z_test,
        test_surface_pred: s_test,
    };
    let timings = Timings {
        preprocess_seconds,
        autoencoder_seconds,
        feature_seconds,
        ridge_fit_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(TrainOutcome {
        bundle,
        report,
        timings,
        audit,
    })
}

fn fmt_row(out: &mut String, label: &str, r: &EvalReport, naive: Option<f64>) {
    let _ = writeln!(
        out,
        "{label:<12} {:>6} {:>14.6e} {:>14.6e} {:>10.4} {:>14}",
        r.samples,
        r.latent_mse,
        r.surface_rmse,
        r.r2,
        naive.map_or("-".to_string(), |v| format!("{v:.6e}")),
    );
}

impl TrainReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Aligned plain-text summary.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "variant {}  seed {}  features {}  alpha {}",
            self.variant, self.seed, self.feature_count, self.alpha
        );
        let _ = writeln!(
            out,
            "windows: train {}  validation {}  test {}",
            self.train_windows, self.validation_windows, self.test_days
        );
        let _ = writeln!(
            out,
            "autoencoder: {} epochs, best epoch {} (val mse {:.6e}){}",
            self.autoencoder.epochs_run,
            self.autoencoder.best_epoch,
            self.autoencoder.best_validation_mse,
            if self.autoencoder.stopped_early {
                ", early stop"
            } else {
                ""
            }
        );
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>14} {:>14} {:>10} {:>14}",
            "split", "n", "latent_mse", "surface_rmse", "r2", "naive_rmse"
        );
        fmt_row(
            &mut out,
            "validation",
            &self.validation,
            Some(self.naive_mean_validation_rmse),
        );
        fmt_row(&mut out, "test", &self.test, Some(self.naive_mean_test_rmse));
        let _ = writeln!(out, "per-day test surface rmse:");
        for (d, v) in self.test_dates.iter().zip(&self.test.per_day_surface_rmse) {
            let _ = writeln!(out, "  {d}  {v:.6e}");
        }
        out
    }
}

/// Predictions for every window of `panel` plus the day after its end.
#[derive(Clone, Debug, PartialEq)]
pub struct Forecast {
    /// Target date of each row; the final row is labelled `next`.
    pub labels: Vec<String>,
    pub latent: DMatrix<f64>,
    pub surfaces: DMatrix<f64>,
}

fn encode_panel(bundle: &ModelBundle, panel: &SurfacePanel) -> Result<LatentSeries> {
    let scaled = bundle.preprocess.transform(&panel.values).stage("preprocess")?;
    let codes = bundle.autoencoder.encode_batch(&scaled).stage("encode")?;
    Ok(LatentSeries::new(codes))
}

pub fn predict_panel(bundle: &ModelBundle, panel: &SurfacePanel) -> Result<Forecast> {
    let k = bundle.config.window;
    let series = encode_panel(bundle, panel)?;
    if series.len() < k {
        return Err(Error::InsufficientData(format!(
            "prediction needs at least {k} days, got {}",
            series.len()
        )))
        .stage("windowing");
    }
    // A zero row stands in for the unseen next day; only its target is fake.
    let padded = series.codes.clone().insert_row(series.len(), 0.0);
    let windows = temporal::build_windows(&LatentSeries::new(padded), k).stage("windowing")?;
    let latent = bundle.predict_latent(&windows.inputs).stage("readout")?;
    let surfaces = bundle.decode_surfaces(&latent).stage("decode")?;
    let mut labels: Vec<String> = panel.dates[k..].to_vec();
    labels.push("next".into());
    Ok(Forecast {
        labels,
        latent,
        surfaces,
    })
}

/// Metrics over every window of `panel`, with realized surfaces as truth.
pub fn evaluate_panel(bundle: &ModelBundle, panel: &SurfacePanel) -> Result<EvalReport> {
    let series = encode_panel(bundle, panel)?;
    let windows = temporal::build_windows(&series, bundle.config.window).stage("windowing")?;
    let latent = bundle.predict_latent(&windows.inputs).stage("readout")?;
    let surfaces = bundle.decode_surfaces(&latent).stage("decode")?;
    let truth = surfaces_at(panel, &windows.target_days);
    evaluate(&latent, &windows.targets, &surfaces, &truth).stage("evaluate")
}

/// Result of the leakage audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub variant: Variant,
    pub trail: AuditTrail,
    /// `(component, unchanged when post-training days are tampered with)`.
    pub tamper_checks: Vec<(String, bool)>,
    pub passed: bool,
}

/// Trains twice, once on `panel` and once with every day after the training
/// partition replaced by unrelated values, and requires every fitted
/// component to come out bit-identical. Also checks the recorded read
/// ranges of each fitting step.
pub fn audit_leakage(config: &PipelineConfig, panel: &SurfacePanel, variant: Variant) -> Result<LeakageReport> {
    let clean = run_train(config, panel, variant)?;
    let boundary = clean.audit.training_last_day + 1;
    let mut tampered = panel.clone();
    for i in boundary..tampered.len() {
        for j in 0..tampered.values.ncols() {
            let v = tampered.values[(i, j)];
            tampered.values[(i, j)] = 3.0 * v + 17.0 + (i * 31 + j * 7) as f64 % 13.0;
        }
    }
    let other = run_train(config, &tampered, variant)?;
    let a = &clean.bundle;
    let b = &other.bundle;
    let ens_eq = match (&a.ensemble, &b.ensemble) {
        (None, None) => true,
        (Some(x), Some(y)) => x.reservoirs().iter().zip(y.reservoirs()).all(|(r, s)| {
            r.first_unitary() == s.first_unitary()
                && r.second_unitary() == s.second_unitary()
                && r.projection() == s.projection()
        }),
        _ => false,
    };
    let tamper_checks = vec![
        ("preprocess statistics".to_string(), a.preprocess == b.preprocess),
        ("autoencoder weights".to_string(), a.autoencoder == b.autoencoder),
        (
            "autoencoder early-stop epoch".to_string(),
            clean.report.autoencoder == other.report.autoencoder,
        ),
        ("reservoir parameters".to_string(), ens_eq),
        ("feature standardizer".to_string(), a.standardizer == b.standardizer),
        ("ridge model".to_string(), a.ridge == b.ridge),
    ];
    let trail_ok = clean.audit.verify().is_ok() && clean.audit == other.audit;
    let passed = trail_ok && tamper_checks.iter().all(|(_, ok)| *ok);
    Ok(LeakageReport {
        variant,
        trail: clean.audit,
        tamper_checks,
        passed,
    })
}
