//! End-to-end training, inference and auditing.

mod bench;
pub mod bundle;
pub mod config;
pub mod panel;
pub mod synthetic;
mod train;

pub use bench::{bench_latency, LatencyReport};
pub use bundle::ModelBundle;
pub use config::{PipelineConfig, Variant, ALPHA_GRID};
pub use panel::SurfacePanel;
pub use synthetic::{generate, SyntheticConfig};
pub use train::{
    audit_leakage, evaluate_panel, predict_panel, run_train, AuditRead, AuditTrail, AutoencoderSummary, Forecast,
    LeakageReport, Timings, TrainOutcome, TrainReport,
};
