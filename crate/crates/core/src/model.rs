//! Declarative learner specifications and the fitted models they produce.
//!
//! A [`LearnerSpec`] names a learner and its hyperparameters; [`fit`] turns
//! it into a [`Model`] that predicts every target column at once. Learners
//! that are single-output by nature are fitted once per column (with seed
//! `(seed, column)`), so for them [`fit_ffl`] and [`fit`] coincide.

use serde::{Deserialize, Serialize};

use crate::ensemble::{
    self, fit_adaboost_r2_presorted, fit_bagging, fit_gradient_boosting_presorted, fit_random_forest, fit_tree,
    BoostParams, Combiner, EnsembleModel, ForestParams, Presort, RegressionTree, TreeParams,
};
use crate::error::{Error, Result};
use crate::learners::enet::{self, ElasticNetParams, Standardized};
use crate::learners::linear::{fit_ols_columns, fit_ridge_columns};
use crate::learners::{
    bayes, fit_huber, fit_knn, fit_omp, fit_pls1, svr, BayesianLinearModel, BayesianRidgeParams, HuberParams,
    KernelModel, LinearModel, NeighborModel, SvrParams, Weighting,
};
use crate::linalg::{self, Matrix};
use crate::par;
use crate::rng::derive_seed;

fn one() -> f64 {
    1.0
}
fn five() -> usize {
    5
}
fn two() -> usize {
    2
}
fn ten() -> usize {
    10
}
fn fifty() -> usize {
    50
}
fn yes() -> bool {
    true
}
fn ada_base() -> Box<LearnerSpec> {
    Box::new(LearnerSpec::Tree(TreeParams { max_depth: Some(3), ..Default::default() }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Ols,
    Ridge {
        #[serde(default = "one")]
        lambda: f64,
    },
    Lasso {
        #[serde(default = "one")]
        alpha: f64,
    },
    ElasticNet(ElasticNetParams),
    /// `n_nonzero = None` uses a tenth of the features (at least one).
    Omp {
        #[serde(default)]
        n_nonzero: Option<usize>,
    },
    BayesianRidge(BayesianRidgeParams),
    Huber(HuberParams),
    Svr(SvrParams),
    Knn {
        #[serde(default = "five")]
        k: usize,
        #[serde(default)]
        weighting: Weighting,
    },
    Pls {
        #[serde(default = "two")]
        n_components: usize,
    },
    Tree(TreeParams),
    RandomForest(ForestParams),
    Bagging {
        base: Box<LearnerSpec>,
        #[serde(default = "ten")]
        n_estimators: usize,
        #[serde(default = "one")]
        sample_fraction: f64,
        #[serde(default = "yes")]
        bootstrap: bool,
    },
    AdaBoost {
        #[serde(default = "ada_base")]
        base: Box<LearnerSpec>,
        #[serde(default = "fifty")]
        n_estimators: usize,
        #[serde(default = "one")]
        learning_rate: f64,
    },
    GradientBoosting(BoostParams),
    Voting {
        members: Vec<LearnerSpec>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Ols => "ols",
            LearnerSpec::Ridge { .. } => "ridge",
            LearnerSpec::Lasso { .. } => "lasso",
            LearnerSpec::ElasticNet(_) => "elastic_net",
            LearnerSpec::Omp { .. } => "omp",
            LearnerSpec::BayesianRidge(_) => "bayesian_ridge",
            LearnerSpec::Huber(_) => "huber",
            LearnerSpec::Svr(_) => "svr",
            LearnerSpec::Knn { .. } => "knn",
            LearnerSpec::Pls { .. } => "pls",
            LearnerSpec::Tree(_) => "tree",
            LearnerSpec::RandomForest(_) => "random_forest",
            LearnerSpec::Bagging { .. } => "bagging",
            LearnerSpec::AdaBoost { .. } => "ada_boost",
            LearnerSpec::GradientBoosting(_) => "gradient_boosting",
            LearnerSpec::Voting { .. } => "voting",
        }
    }

    /// True for learners fitted independently per target column.
    pub fn is_columnwise(&self) -> bool {
        !matches!(
            self,
            LearnerSpec::Knn { .. }
                | LearnerSpec::Tree(_)
                | LearnerSpec::RandomForest(_)
                | LearnerSpec::Bagging { .. }
                | LearnerSpec::Voting { .. }
        )
    }

    /// Data-independent parameter checks, recursing into ensemble bases.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        match self {
            LearnerSpec::Ols => Ok(()),
            LearnerSpec::Ridge { lambda } if !(*lambda >= 0.0 && lambda.is_finite()) => {
                bad(format!("ridge lambda must be >= 0, got {lambda}"))
            }
            LearnerSpec::Lasso { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                bad(format!("lasso alpha must be > 0, got {alpha}"))
            }
            LearnerSpec::ElasticNet(p) if !(p.alpha > 0.0 && (0.0..=1.0).contains(&p.l1_ratio) && p.tol > 0.0) => {
                bad("elastic net needs alpha > 0, l1_ratio in [0, 1], tol > 0".into())
            }
            LearnerSpec::Omp { n_nonzero: Some(0) } => bad("omp n_nonzero must be >= 1".into()),
            LearnerSpec::BayesianRidge(p) if p.max_iter == 0 => bad("bayesian ridge max_iter must be >= 1".into()),
            LearnerSpec::Huber(p) => p.validate(),
            LearnerSpec::Svr(p) => p.validate(),
            LearnerSpec::Knn { k: 0, .. } => bad("knn k must be >= 1".into()),
            LearnerSpec::Pls { n_components: 0 } => bad("pls needs at least one component".into()),
            LearnerSpec::Tree(p) => p.validate(),
            LearnerSpec::RandomForest(p) => {
                if p.n_trees == 0 {
                    return bad("forest needs at least one tree".into());
                }
                p.tree_params().validate()
            }
            LearnerSpec::Bagging { base, n_estimators, sample_fraction, .. } => {
                if *n_estimators == 0 || !(*sample_fraction > 0.0 && *sample_fraction <= 1.0) {
                    return bad("bagging needs n_estimators >= 1 and sample_fraction in (0, 1]".into());
                }
                base.validate()
            }
            LearnerSpec::AdaBoost { base, n_estimators, learning_rate } => {
                if *n_estimators == 0 || !(*learning_rate > 0.0) {
                    return bad("adaboost needs n_estimators >= 1 and learning_rate > 0".into());
                }
                base.validate()
            }
            LearnerSpec::GradientBoosting(p) => {
                if !(p.learning_rate > 0.0) || !(p.subsample > 0.0 && p.subsample <= 1.0) {
                    return bad("boosting needs learning_rate > 0 and subsample in (0, 1]".into());
                }
                Ok(())
            }
            LearnerSpec::Voting { members, weights } => {
                ensemble::normalize_weights(weights.as_deref(), members.len())?;
                members.iter().try_for_each(|m| m.validate())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Bayesian(BayesianLinearModel),
    Kernel(KernelModel),
    Neighbor(NeighborModel),
    Tree(RegressionTree),
    Ensemble(EnsembleModel),
    /// Member `c` predicts output column(s) `c`, concatenated in order.
    Columns(Vec<Model>),
}

impl Model {
    pub fn n_outputs(&self) -> usize {
        match self {
            Model::Linear(_) | Model::Bayesian(_) | Model::Kernel(_) => 1,
            Model::Neighbor(m) => m.train_y.ncols(),
            Model::Tree(t) => t.n_outputs,
            Model::Ensemble(e) => e.n_outputs,
            Model::Columns(ms) => ms.iter().map(Model::n_outputs).sum(),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Matrix {
        let n = x.nrows();
        match self {
            Model::Linear(m) => Matrix::from_vec(n, 1, m.predict(x)),
            Model::Bayesian(m) => Matrix::from_vec(n, 1, m.linear.predict(x)),
            Model::Kernel(m) => Matrix::from_vec(n, 1, m.predict(x)),
            Model::Neighbor(m) => m.predict(x),
            Model::Tree(t) => t.predict(x),
            Model::Ensemble(e) => e.predict(x),
            Model::Columns(ms) => {
                let parts = par::map_indexed(ms.len(), |c| ms[c].predict(x));
                let mut out = Matrix::zeros(n, self.n_outputs());
                let mut at = 0;
                for p in parts {
                    out.columns_mut(at, p.ncols()).copy_from(&p);
                    at += p.ncols();
                }
                out
            }
        }
    }

    /// Number of independently fitted top-level models.
    pub fn model_count(&self) -> usize {
        match self {
            Model::Columns(ms) => ms.len(),
            _ => 1,
        }
    }
}

fn column(y: &Matrix, c: usize) -> Matrix {
    y.columns(c, 1).into_owned()
}

fn per_column<F>(y: &Matrix, f: F) -> Result<Model>
where
    F: Fn(usize, Vec<f64>) -> Result<Model> + Sync + Send,
{
    Ok(Model::Columns(par::try_map_indexed(y.ncols(), |c| f(c, linalg::col_vec(y, c)))?))
}

/// Fits `spec` jointly on all columns of `y`.
pub fn fit(spec: &LearnerSpec, x: &Matrix, y: &Matrix, seed: u64) -> Result<Model> {
    if x.nrows() == 0 {
        return Err(Error::InsufficientData("cannot fit on an empty table".into()));
    }
    if x.nrows() != y.nrows() {
        return Err(Error::Shape(format!("{} input rows but {} target rows", x.nrows(), y.nrows())));
    }
    if y.ncols() == 0 {
        return Err(Error::Shape("no target columns".into()));
    }
    spec.validate()?;
    let d = x.ncols();
    match spec {
        LearnerSpec::Ols => Ok(Model::Columns(fit_ols_columns(x, y)?.into_iter().map(Model::Linear).collect())),
        LearnerSpec::Ridge { lambda } => {
            Ok(Model::Columns(fit_ridge_columns(x, y, *lambda)?.into_iter().map(Model::Linear).collect()))
        }
        LearnerSpec::Lasso { alpha } => {
            fit_enet_columns(x, y, &ElasticNetParams { alpha: *alpha, l1_ratio: 1.0, ..Default::default() })
        }
        LearnerSpec::ElasticNet(p) => fit_enet_columns(x, y, p),
        LearnerSpec::Omp { n_nonzero } => {
            let k = n_nonzero.unwrap_or(((d as f64) / 10.0).round() as usize).clamp(1, d.max(1));
            if d == 0 {
                return Err(Error::InsufficientData("omp needs at least one feature".into()));
            }
            per_column(y, |_, yc| fit_omp(x, &yc, k).map(Model::Linear))
        }
        LearnerSpec::BayesianRidge(p) => {
            Ok(Model::Columns(bayes::fit_bayesian_ridge_columns(x, y, p)?.into_iter().map(Model::Bayesian).collect()))
        }
        LearnerSpec::Huber(p) => per_column(y, |_, yc| fit_huber(x, &yc, p).map(Model::Linear)),
        LearnerSpec::Svr(p) => Ok(Model::Columns(svr::fit_svr_columns(x, y, p)?.into_iter().map(Model::Kernel).collect())),
        LearnerSpec::Knn { k, weighting } => Ok(Model::Neighbor(fit_knn(x, y, *k, *weighting)?)),
        LearnerSpec::Pls { n_components } => per_column(y, |_, yc| fit_pls1(x, &yc, *n_components).map(Model::Linear)),
        LearnerSpec::Tree(p) => Ok(Model::Tree(fit_tree(x, y, p, seed)?)),
        LearnerSpec::RandomForest(p) => Ok(Model::Ensemble(fit_random_forest(x, y, p, seed)?)),
        LearnerSpec::Bagging { base, n_estimators, sample_fraction, bootstrap } => {
            Ok(Model::Ensemble(fit_bagging(x, y, base, *n_estimators, *sample_fraction, *bootstrap, seed)?))
        }
        LearnerSpec::AdaBoost { base, n_estimators, learning_rate } => {
            let presort = matches!(**base, LearnerSpec::Tree(_)).then(|| Presort::new(x));
            per_column(y, |c, yc| {
                let s = derive_seed(seed, &[c as u64]);
                fit_adaboost_r2_presorted(x, &yc, base, *n_estimators, *learning_rate, s, presort.as_ref())
                    .map(Model::Ensemble)
            })
        }
        LearnerSpec::GradientBoosting(p) => {
            let presort = Presort::new(x);
            per_column(y, |c, _| {
                fit_gradient_boosting_presorted(x, &column(y, c), p, derive_seed(seed, &[c as u64]), &presort)
                    .map(|f| Model::Ensemble(f.model))
            })
        }
        LearnerSpec::Voting { members, weights } => {
            let w = ensemble::normalize_weights(weights.as_deref(), members.len())?;
            let fitted =
                par::try_map_indexed(members.len(), |m| fit(&members[m], x, y, derive_seed(seed, &[m as u64])))?;
            let combiner = if weights.is_some() { Combiner::Weighted(w) } else { Combiner::Mean };
            Ok(Model::Ensemble(EnsembleModel { members: fitted, combiner, n_outputs: y.ncols() }))
        }
    }
}

fn fit_enet_columns(x: &Matrix, y: &Matrix, p: &ElasticNetParams) -> Result<Model> {
    let std = Standardized::new(x);
    per_column(y, |_, yc| Ok(Model::Linear(enet::solve(&std, &yc, p).model)))
}

/// Feature-focused learning: one independent model per target column, each
/// seeded with `(seed, column)`.
pub fn fit_ffl(spec: &LearnerSpec, x: &Matrix, y: &Matrix, seed: u64) -> Result<Model> {
    if spec.is_columnwise() {
        return fit(spec, x, y, seed);
    }
    if x.nrows() != y.nrows() {
        return Err(Error::Shape(format!("{} input rows but {} target rows", x.nrows(), y.nrows())));
    }
    per_column(y, |c, _| fit(spec, x, &column(y, c), derive_seed(seed, &[c as u64])))
}
