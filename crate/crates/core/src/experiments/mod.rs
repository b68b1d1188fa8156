//! Reproducible experiment drivers: TOML configuration, training, scale-up,
//! rank sweep, manufactured-solution convergence and extrapolation studies,
//! each emitting CSV. Every command is a pure function of the configuration
//! and seed apart from wall-clock columns.

mod commands;
mod config;
mod metrics;

pub use commands::{
    basis_path, blocks_dir, cmd_extrapolate, cmd_mms, cmd_rank_sweep, cmd_sample, cmd_scaleup, cmd_train,
    extrapolation_instance, load_trained, mesh_summary, test_instance, write_metrics, write_mms, TrainRecord,
    TrainedModel,
};
pub use config::{
    ComponentSpec, ExperimentConfig, ExtrapolateConfig, MeshSpec, MmsConfig, RankSweepConfig, ScaleupConfig,
    TrainConfig,
};
pub use metrics::{loglog_slope, median, metrics_csv, mms_csv, strip_columns, MetricsRow, MmsRow};
