//! Scoring, cross-validation, rank aggregation and significance testing.

mod cv;
mod metrics;
mod rank;
mod residual;
mod ttest;

pub use cv::{cross_validate, kfold_split, CvReport, Fold};
pub use metrics::{evaluate, mae, mse, pcc, per_subject_mae, per_subject_pcc, Metrics, PccMode};
pub use rank::{
    compute_rank_table, rank_from_local, rank_teams, team_scores, Aggregator, RankRow, RankTable, ScoreRecord, Split, TeamScores,
};
pub use residual::residual_matrix;
pub use ttest::{paired_ttest, paired_ttest_matrix, SignificanceMatrix};
