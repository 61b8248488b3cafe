//! Competition protocol: fit every pipeline, score the public and private
//! test halves and k-fold CV, then rank and test significance.

use serde::{Deserialize, Serialize};

use crate::connectome::{FeatureTable, LongitudinalDataset};
use crate::error::{Error, Result};
use crate::eval::{
    self, compute_rank_table, cross_validate, evaluate, paired_ttest_matrix, per_subject_mae, per_subject_pcc,
    Aggregator, CvReport, PccMode, RankTable, ScoreRecord, SignificanceMatrix, Split,
};
use crate::pipeline::{fit_pipeline, FittedPipeline, PipelineConfig};

/// Samples entering the paired t-tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TtestPopulation {
    /// Per-subject errors over the combined public and private test rows.
    #[default]
    PerSubject,
    /// Per-fold cross-validation scores.
    PerFold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub folds: usize,
    pub seed: u64,
    pub pcc_mode: PccMode,
    pub aggregator: Aggregator,
    pub ttest: TtestPopulation,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            folds: 5,
            seed: 0,
            pcc_mode: PccMode::Flattened,
            aggregator: Aggregator::Mean,
            ttest: TtestPopulation::PerSubject,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchInputs {
    pub train: LongitudinalDataset,
    pub test_t0: FeatureTable,
    /// Truth for the public half; its subject ids select rows of `test_t0`.
    pub public: Option<FeatureTable>,
    pub private: Option<FeatureTable>,
}

impl BenchInputs {
    pub fn validate(&self) -> Result<()> {
        self.train.targets("bench")?;
        let d = self.train.t0().n_features();
        if self.test_t0.n_features() != d {
            return Err(Error::Shape(format!("train has {d} features, test t0 has {}", self.test_t0.n_features())));
        }
        for truth in [&self.public, &self.private].into_iter().flatten() {
            if truth.n_features() != self.train.targets("bench")?.n_features() {
                return Err(Error::Shape("test truth width differs from training targets".into()));
            }
            self.test_t0.select_ids(truth.subject_ids())?;
        }
        Ok(())
    }

    /// Test rows with truth, public then private.
    fn labeled_ids(&self) -> Vec<String> {
        [&self.public, &self.private].into_iter().flatten().flat_map(|t| t.subject_ids().to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamOutcome {
    pub team: String,
    /// `None` when the team ran to completion.
    pub error: Option<String>,
    pub records: Vec<ScoreRecord>,
    pub cv: Option<CvReport>,
    /// Training rows reaching the learner in the final fit.
    pub train_rows: Option<usize>,
    #[serde(skip)]
    pub predictions: Option<FeatureTable>,
    #[serde(skip)]
    subject_mae: Vec<f64>,
    #[serde(skip)]
    subject_pcc: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResults {
    pub options: BenchOptions,
    pub teams: Vec<TeamOutcome>,
    /// Over completed teams; absent without both test truths.
    pub rank_table: Option<RankTable>,
    pub pvalues_mae: Option<SignificanceMatrix>,
    pub pvalues_pcc: Option<SignificanceMatrix>,
}

impl BenchResults {
    pub fn failures(&self) -> impl Iterator<Item = &TeamOutcome> {
        self.teams.iter().filter(|t| t.error.is_some())
    }

    pub fn records(&self) -> Vec<ScoreRecord> {
        self.teams.iter().flat_map(|t| t.records.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn run_team(config: &PipelineConfig, inputs: &BenchInputs, options: &BenchOptions) -> Result<TeamOutcome> {
    let mut config = config.clone();
    config.seed = options.seed;
    let fitted: FittedPipeline = fit_pipeline(&config, &inputs.train)?;
    let predictions = fitted.predict(&inputs.test_t0)?;
    let mut records = Vec::new();
    let (mut subject_mae, mut subject_pcc) = (Vec::new(), Vec::new());
    for (split, truth) in [(Split::Public, &inputs.public), (Split::Private, &inputs.private)] {
        let Some(truth) = truth else { continue };
        let pred = predictions.select_ids(truth.subject_ids())?;
        let m = evaluate(pred.rows(), truth.rows(), options.pcc_mode)?;
        records.push(ScoreRecord { team: config.name.clone(), split, mae: m.mae, mse: m.mse, pcc: m.pcc });
        subject_mae.extend(per_subject_mae(pred.rows(), truth.rows())?);
        subject_pcc.extend(per_subject_pcc(pred.rows(), truth.rows())?);
    }
    let cv = cross_validate(&config, &inputs.train, options.folds, options.seed, options.pcc_mode)?;
    records.extend(cv.records(&config.name));
    let train_rows = fitted.report().last().map(|r| r.rows);
    Ok(TeamOutcome {
        team: config.name.clone(),
        error: None,
        records,
        cv: Some(cv),
        train_rows,
        predictions: Some(predictions),
        subject_mae,
        subject_pcc,
    })
}

/// Runs every config. A failing team is recorded and excluded from ranking;
/// the other teams still run.
pub fn run_bench(configs: &[PipelineConfig], inputs: &BenchInputs, options: &BenchOptions) -> Result<BenchResults> {
    inputs.validate()?;
    if configs.is_empty() {
        return Err(Error::Input("no pipelines selected".into()));
    }
    let mut names: Vec<&str> = configs.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input("pipeline names must be unique".into()));
    }
    let teams: Vec<TeamOutcome> = crate::par::map_indexed(configs.len(), |i| {
        run_team(&configs[i], inputs, options).unwrap_or_else(|e| {
            log::error!("{} failed: {e}", configs[i].name);
            TeamOutcome {
                team: configs[i].name.clone(),
                error: Some(e.to_string()),
                records: Vec::new(),
                cv: None,
                train_rows: None,
                predictions: None,
                subject_mae: Vec::new(),
                subject_pcc: Vec::new(),
            }
        })
    });

    let done: Vec<&TeamOutcome> = teams.iter().filter(|t| t.error.is_none()).collect();
    let complete = inputs.public.is_some() && inputs.private.is_some();
    let rank_table = if complete && !done.is_empty() {
        let records: Vec<ScoreRecord> = done.iter().flat_map(|t| t.records.clone()).collect();
        Some(compute_rank_table(&records, options.aggregator)?)
    } else {
        if !complete {
            log::warn!("public and private truth are both required for the rank table");
        }
        None
    };

    let names: Vec<String> = done.iter().map(|t| t.team.clone()).collect();
    let population = |per_subject: fn(&TeamOutcome) -> &Vec<f64>, per_fold: fn(&eval::Metrics) -> f64| {
        done.iter()
            .map(|t| match options.ttest {
                TtestPopulation::PerSubject => per_subject(t).clone(),
                TtestPopulation::PerFold => t.cv.as_ref().map(|c| c.folds.iter().map(per_fold).collect()).unwrap_or_default(),
            })
            .collect::<Vec<Vec<f64>>>()
    };
    let has_pairs = match options.ttest {
        TtestPopulation::PerSubject => !inputs.labeled_ids().is_empty(),
        TtestPopulation::PerFold => true,
    };
    let (pvalues_mae, pvalues_pcc) = if has_pairs && done.len() >= 2 {
        (
            Some(paired_ttest_matrix(&names, &population(|t| &t.subject_mae, |m| m.mae))?),
            Some(paired_ttest_matrix(&names, &population(|t| &t.subject_pcc, |m| m.pcc))?),
        )
    } else {
        (None, None)
    };
    Ok(BenchResults { options: options.clone(), teams, rank_table, pvalues_mae, pvalues_pcc })
}

/// Table 2 layout: one row per ranked team in final-rank order.
pub fn table2_csv(results: &BenchResults) -> Result<String> {
    let table = results
        .rank_table
        .as_ref()
        .ok_or_else(|| Error::Input("no rank table: public and private truth are required".into()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record([
        "team",
        "mae_public",
        "mae_public_rank",
        "mae_private",
        "mae_private_rank",
        "mae_cv",
        "mae_cv_rank",
        "mae_rank",
        "pcc_public",
        "pcc_public_rank",
        "pcc_private",
        "pcc_private_rank",
        "pcc_cv",
        "pcc_cv_rank",
        "pcc_rank",
        "final_rank",
    ])
    .map_err(ser)?;
    let scores = eval::team_scores(&results.records())?;
    for row in table.standings() {
        let s = scores.iter().find(|s| s.team == row.team).expect("ranked teams have scores");
        let mut rec = vec![row.team.clone()];
        for c in 0..3 {
            rec.push(format!("{:.6}", s.mae[c]));
            rec.push(row.mae_local[c].to_string());
        }
        rec.push(row.mae_rank.to_string());
        for c in 0..3 {
            rec.push(format!("{:.6}", s.pcc[c]));
            rec.push(row.pcc_local[c].to_string());
        }
        rec.push(row.pcc_rank.to_string());
        rec.push(row.final_rank.to_string());
        w.write_record(&rec).map_err(ser)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?)
        .map_err(|e| Error::Serialization(e.to_string()))
}

/// Square p-value matrix with a header row and column of team names.
pub fn pvalues_csv(m: &SignificanceMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    let mut head = vec![String::from("team")];
    head.extend(m.names.iter().cloned());
    w.write_record(&head).map_err(ser)?;
    for (name, row) in m.names.iter().zip(&m.p) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|p| format!("{p:.6e}")));
        w.write_record(&rec).map_err(ser)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?)
        .map_err(|e| Error::Serialization(e.to_string()))
}
