//! Preprocessing, reduction and learning composed into fitted pipelines,
//! plus the bundled team configurations.

mod config;
mod fitted;
mod teams;

pub use config::{DimredStage, PipelineConfig, Postprocess, PreprocessStage, TargetReduction};
pub use fitted::{fit_pipeline, FittedPipeline, FittedTransform, StageReport};
pub use teams::{load_team_config, team_config_source, TEAM_COUNT};
