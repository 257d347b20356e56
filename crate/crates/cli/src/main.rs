use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use qorc_core::pipeline::{
    audit_leakage, bench_latency, evaluate_panel, generate, panel::grid_header, panel::SURFACE_DIM, predict_panel,
    run_train, ModelBundle, PipelineConfig, SurfacePanel, Variant,
};

#[derive(Parser)]
#[command(
    name = "qorc",
    version,
    about = "Photonic reservoir forecasting of swaption surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Plain-text `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Surface panel CSV; synthetic data is generated when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Model bundle directory.
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic surface panel to `<out>/surfaces.csv`.
    GenerateData(Common),
    /// Train a variant; writes `<out>/bundle`, `report.json`, `report.txt`, `timings.json`.
    Train {
        #[arg(long, default_value = "qorc")]
        variant: Variant,
        #[command(flatten)]
        common: Common,
    },
    /// Forecast every window of a panel plus the following day.
    Predict(Common),
    /// Score a bundle on a panel with realized surfaces.
    Evaluate(Common),
    /// Time inference on the bundle's test contexts.
    BenchLatency {
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check that no fitted statistic depends on validation or test days.
    AuditLeakage {
        #[arg(long, default_value = "qorc")]
        variant: Variant,
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    let mut config = match &common.config {
        Some(path) => PipelineConfig::load(path).context("config")?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn load_panel(common: &Common, config: &PipelineConfig) -> Result<SurfacePanel> {
    match &common.data {
        Some(path) => SurfacePanel::read_csv(path).context("load-data"),
        None => {
            info!("no --data given; generating {} synthetic days", config.synthetic.days);
            Ok(generate(&config.synthetic, config.seed).panel)
        }
    }
}

fn load_bundle(common: &Common) -> Result<ModelBundle> {
    let dir = common
        .bundle
        .as_ref()
        .context("load-bundle: --bundle <dir> is required")?;
    ModelBundle::load(dir).context("load-bundle")
}

fn out_dir(common: &Common) -> Result<&Path> {
    fs::create_dir_all(&common.out).with_context(|| format!("output: cannot create {}", common.out.display()))?;
    Ok(&common.out)
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).with_context(|| format!("output: cannot write {}", path.display()))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value).context("output")? + "\n")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenerateData(common) => {
            let config = load_config(&common)?;
            let panel = generate(&config.synthetic, config.seed).panel;
            let path = out_dir(&common)?.join("surfaces.csv");
            panel.write_csv(&path).context("output")?;
            println!("wrote {} days to {}", panel.len(), path.display());
        }
        Command::Train { variant, common } => {
            let config = load_config(&common)?;
            let panel = load_panel(&common, &config)?;
            let outcome = run_train(&config, &panel, variant).context("train")?;
            let out = out_dir(&common)?;
            let bundle_dir = common.bundle.clone().unwrap_or_else(|| out.join("bundle"));
            outcome.bundle.save(&bundle_dir).context("save-bundle")?;
            write(out.join("report.json"), &outcome.report.to_json().context("output")?)?;
            let table = outcome.report.to_table();
            write(out.join("report.txt"), &table)?;
            write(out.join("timings.json"), &json(&outcome.timings)?)?;
            print!("{table}");
            println!("bundle: {}", bundle_dir.display());
        }
        Command::Predict(common) => {
            let bundle = load_bundle(&common)?;
            let panel = match &common.data {
                Some(path) => SurfacePanel::read_csv(path).context("load-data")?,
                None => bail!("load-data: --data <csv> is required"),
            };
            let forecast = predict_panel(&bundle, &panel).context("predict")?;
            let path = out_dir(&common)?.join("predictions.csv");
            let mut text = String::from("target");
            for j in 0..SURFACE_DIM {
                text.push(',');
                text.push_str(&grid_header(j));
            }
            text.push('\n');
            for (i, label) in forecast.labels.iter().enumerate() {
                text.push_str(label);
                for v in forecast.surfaces.row(i).iter() {
                    text.push_str(&format!(",{v:?}"));
                }
                text.push('\n');
            }
            write(path.clone(), &text)?;
            println!("wrote {} forecasts to {}", forecast.labels.len(), path.display());
        }
        Command::Evaluate(common) => {
            let bundle = load_bundle(&common)?;
            let panel = match &common.data {
                Some(path) => SurfacePanel::read_csv(path).context("load-data")?,
                None => {
                    // Test days of the bundle's own synthetic panel, with enough history for the first window.
                    let config = &bundle.config;
                    let full = generate(&config.synthetic, config.seed).panel;
                    let n = config.test_days + config.window;
                    full.slice(full.len() - n, n)
                }
            };
            let report = evaluate_panel(&bundle, &panel).context("evaluate")?;
            write(out_dir(&common)?.join("evaluation.json"), &json(&report)?)?;
            println!(
                "samples {}  latent_mse {:.6e}  surface_rmse {:.6e}  r2 {:.4}",
                report.samples, report.latent_mse, report.surface_rmse, report.r2
            );
        }
        Command::BenchLatency { repeats, common } => {
            let bundle = load_bundle(&common)?;
            let report = bench_latency(&bundle, repeats).context("bench-latency")?;
            write(out_dir(&common)?.join("latency.json"), &json(&report)?)?;
            println!("readout-only: {:.4} ms/sample", report.readout_ms_per_sample);
            println!("full:         {:.4} ms/sample", report.full_ms_per_sample);
            for (label, ms) in &report.reservoir_ms_per_sample {
                println!("  {label} features: {ms:.4} ms/sample");
            }
        }
        Command::AuditLeakage { variant, common } => {
            let config = load_config(&common)?;
            let panel = load_panel(&common, &config)?;
            let report = audit_leakage(&config, &panel, variant).context("audit-leakage")?;
            write(out_dir(&common)?.join("leakage.json"), &json(&report)?)?;
            for r in &report.trail.reads {
                println!("{:<28} days {}..={}", r.stage, r.first_day, r.last_day);
            }
            for (name, ok) in &report.tamper_checks {
                println!("{:<28} {}", name, if *ok { "unchanged" } else { "CHANGED" });
            }
            if !report.passed {
                bail!(
                    "audit-leakage: fitted components depend on days after {}",
                    report.trail.training_last_day
                );
            }
            println!(
                "no leakage (training partition ends at day {})",
                report.trail.training_last_day
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
