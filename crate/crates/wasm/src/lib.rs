//! Browser bindings. Every export returns JSON text; the plain functions
//! behind them are usable (and tested) natively.

use connecto_core::connectome::{generate_synthetic, SyntheticConfig};
use connecto_core::eval::{evaluate, rank_teams, residual_matrix, Aggregator, PccMode, TeamScores};
use connecto_core::pipeline::{fit_pipeline, load_team_config, team_config_source, StageReport};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub team: String,
    pub train_subjects: usize,
    pub test_subjects: usize,
    pub features: usize,
    pub mae: f64,
    pub mse: f64,
    pub pcc: f64,
    /// MAE of predicting no change (`t1 = t0`).
    pub no_change_mae: f64,
    pub models: usize,
    pub stages: Vec<StageReport>,
    /// Mean absolute residual per edge over the test subjects, `rois × rois`.
    pub residual: Vec<Vec<f64>>,
}

/// Fits bundled team `team` on a synthetic cohort and scores a held-out quarter.
pub fn evaluate_team_json(team: u32, subjects: usize, rois: usize, drift: f64, noise: f64, seed: u64) -> Result<String, String> {
    let test = (subjects / 4).max(2);
    if subjects < test + 4 {
        return Err(format!("need at least {} subjects", test + 4));
    }
    let cohort = generate_synthetic(&SyntheticConfig::new(subjects, rois, drift, noise, seed).map_err(|e| e.to_string())?);
    let train_idx: Vec<usize> = (0..subjects - test).collect();
    let test_idx: Vec<usize> = (subjects - test..subjects).collect();
    let train = cohort.select_rows(&train_idx);
    let held = cohort.select_rows(&test_idx);

    let mut config = load_team_config(team).map_err(|e| e.to_string())?;
    config.seed = seed;
    let fitted = fit_pipeline(&config, &train).map_err(|e| e.to_string())?;
    let pred = fitted.predict(held.t0()).map_err(|e| e.to_string())?;
    let truth = held.targets("evaluate").map_err(|e| e.to_string())?;
    let m = evaluate(pred.rows(), truth.rows(), PccMode::Flattened).map_err(|e| e.to_string())?;
    let no_change = evaluate(held.t0().rows(), truth.rows(), PccMode::Flattened).map_err(|e| e.to_string())?;

    let mut residual = vec![vec![0.0; rois]; rois];
    for i in 0..test {
        let r = residual_matrix(&pred.row(i), &truth.row(i)).map_err(|e| e.to_string())?;
        for (a, row) in residual.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v += r.get(a, b) / test as f64;
            }
        }
    }
    let out = Evaluation {
        team: config.name.clone(),
        train_subjects: train_idx.len(),
        test_subjects: test,
        features: truth.n_features(),
        mae: m.mae,
        mse: m.mse,
        pcc: m.pcc,
        no_change_mae: no_change.mae,
        models: fitted.model_count(),
        stages: fitted.report().to_vec(),
        residual,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Ranks `[{team, mae: [public, private, cv], pcc: [...]}, ...]`; rows come
/// back in standings order.
pub fn rank_json(scores: &str, aggregator: &str) -> Result<String, String> {
    let scores: Vec<TeamScores> = serde_json::from_str(scores).map_err(|e| format!("scores: {e}"))?;
    let aggregator = match aggregator {
        "mean" => Aggregator::Mean,
        "product" => Aggregator::Product,
        other => return Err(format!("unknown aggregator `{other}`")),
    };
    let table = rank_teams(&scores, aggregator).map_err(|e| e.to_string())?;
    serde_json::to_string(&table.standings()).map_err(|e| e.to_string())
}

pub fn team_config_text(team: u32) -> Result<String, String> {
    team_config_source(team).map(str::to_string).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn evaluate_team(team: u32, subjects: usize, rois: usize, drift: f64, noise: f64, seed: u64) -> Result<String, JsError> {
    evaluate_team_json(team, subjects, rois, drift, noise, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rank(scores: &str, aggregator: &str) -> Result<String, JsError> {
    rank_json(scores, aggregator).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn team_config(team: u32) -> Result<String, JsError> {
    team_config_text(team).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_reports_a_symmetric_residual_map() {
        let v: serde_json::Value = serde_json::from_str(&evaluate_team_json(11, 60, 8, 0.1, 0.02, 1).unwrap()).unwrap();
        assert_eq!(v["test_subjects"], 15);
        assert_eq!(v["features"], 28);
        let r = v["residual"].as_array().unwrap();
        assert_eq!(r.len(), 8);
        for a in 0..8 {
            assert_eq!(r[a][a], 0.0);
            for b in 0..8 {
                assert_eq!(r[a][b], r[b][a]);
            }
        }
        assert!(v["mae"].as_f64().unwrap() < v["no_change_mae"].as_f64().unwrap());
    }

    #[test]
    fn evaluation_is_deterministic() {
        assert_eq!(evaluate_team_json(1, 40, 6, 0.1, 0.02, 3), evaluate_team_json(1, 40, 6, 0.1, 0.02, 3));
    }

    #[test]
    fn too_few_subjects_is_an_error() {
        assert!(evaluate_team_json(11, 5, 6, 0.1, 0.02, 0).is_err());
    }

    #[test]
    fn ranking_returns_standings() {
        let scores = r#"[
            {"team": "a", "mae": [0.03, 0.03, 0.03], "pcc": [0.8, 0.8, 0.8]},
            {"team": "b", "mae": [0.02, 0.02, 0.02], "pcc": [0.9, 0.9, 0.9]}
        ]"#;
        let v: serde_json::Value = serde_json::from_str(&rank_json(scores, "mean").unwrap()).unwrap();
        assert_eq!(v[0]["team"], "b");
        assert_eq!(v[0]["final_rank"], 1);
        assert_eq!(v[1]["final_rank"], 2);
        assert!(rank_json(scores, "median").is_err());
        assert!(rank_json("not json", "mean").is_err());
    }

    #[test]
    fn configs_are_served_by_id() {
        assert!(team_config_text(13).unwrap().contains("Team-13"));
        assert!(team_config_text(0).is_err());
    }
}
