use serde::{Deserialize, Serialize};

use crate::dimred::UnivariateCandidate;
use crate::error::{Error, Result};
use crate::model::LearnerSpec;
use crate::preprocess::{ScaleMode, LOGIT_EPS};

fn d_iqr() -> f64 {
    1.5
}
fn d_zscore() -> f64 {
    3.0
}
fn d_lof_k() -> usize {
    20
}
fn d_lof_threshold() -> f64 {
    1.5
}
fn d_iforest_trees() -> usize {
    100
}
fn d_iforest_subsample() -> usize {
    256
}
fn d_iforest_threshold() -> f64 {
    0.6
}
fn d_corr() -> f64 {
    0.95
}
fn d_eps() -> f64 {
    LOGIT_EPS
}
fn d_true() -> bool {
    true
}
fn d_one() -> usize {
    1
}
fn d_loo_lambda() -> f64 {
    1e-3
}
fn d_bins() -> usize {
    10
}
fn d_folds() -> usize {
    5
}
fn d_p() -> f64 {
    0.05
}
fn d_gus_base() -> LearnerSpec {
    LearnerSpec::Ridge { lambda: 1.0 }
}

/// Preprocessing stage. Sample stages drop or add training rows only;
/// feature stages are refitted never and replayed at predict time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreprocessStage {
    AddNoise {
        sigma: f64,
        #[serde(default = "d_one")]
        copies: usize,
    },
    ZscoreOutliers {
        #[serde(default = "d_zscore")]
        k: f64,
        #[serde(default)]
        fraction: f64,
    },
    IqrOutliers {
        #[serde(default = "d_iqr")]
        multiplier: f64,
        #[serde(default)]
        fraction: f64,
    },
    Lof {
        #[serde(default = "d_lof_k")]
        k_neighbors: usize,
        #[serde(default = "d_lof_threshold")]
        threshold: f64,
    },
    IsolationForest {
        #[serde(default = "d_iforest_trees")]
        n_trees: usize,
        #[serde(default = "d_iforest_subsample")]
        subsample: usize,
        #[serde(default = "d_iforest_threshold")]
        threshold: f64,
    },
    /// One-pass leave-one-out pruning with a ridge probe.
    LooPrune {
        #[serde(default = "d_loo_lambda")]
        lambda: f64,
    },
    ConstantFeatures,
    RedundantFeatures,
    CorrelatedFeatures {
        #[serde(default = "d_corr")]
        threshold: f64,
    },
    Scaler {
        mode: ScaleMode,
    },
    /// Inverse sigmoid on inputs and, when `targets`, on training targets.
    Logit {
        #[serde(default = "d_eps")]
        eps: f64,
        #[serde(default = "d_true")]
        targets: bool,
    },
}

impl PreprocessStage {
    pub fn name(&self) -> &'static str {
        match self {
            PreprocessStage::AddNoise { .. } => "add_noise",
            PreprocessStage::ZscoreOutliers { .. } => "zscore_outliers",
            PreprocessStage::IqrOutliers { .. } => "iqr_outliers",
            PreprocessStage::Lof { .. } => "lof",
            PreprocessStage::IsolationForest { .. } => "isolation_forest",
            PreprocessStage::LooPrune { .. } => "loo_prune",
            PreprocessStage::ConstantFeatures => "constant_features",
            PreprocessStage::RedundantFeatures => "redundant_features",
            PreprocessStage::CorrelatedFeatures { .. } => "correlated_features",
            PreprocessStage::Scaler { .. } => "scaler",
            PreprocessStage::Logit { .. } => "logit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        match *self {
            PreprocessStage::AddNoise { sigma, .. } if !(sigma >= 0.0 && sigma.is_finite()) => {
                bad(format!("noise sigma must be finite and >= 0, got {sigma}"))
            }
            PreprocessStage::ZscoreOutliers { k, fraction } if !(k > 0.0) || !(0.0..1.0).contains(&fraction) => {
                bad(format!("zscore outliers need k > 0 and fraction in [0, 1), got {k}, {fraction}"))
            }
            PreprocessStage::IqrOutliers { multiplier, fraction }
                if !(multiplier >= 0.0 && multiplier.is_finite()) || !(0.0..1.0).contains(&fraction) =>
            {
                bad(format!("iqr outliers need multiplier >= 0 and fraction in [0, 1), got {multiplier}, {fraction}"))
            }
            PreprocessStage::Lof { k_neighbors, threshold } if k_neighbors == 0 || !(threshold > 0.0) => {
                bad(format!("lof needs k_neighbors >= 1 and threshold > 0, got {k_neighbors}, {threshold}"))
            }
            PreprocessStage::IsolationForest { n_trees, subsample, threshold }
                if n_trees == 0 || subsample == 0 || !(0.0..=1.0).contains(&threshold) =>
            {
                bad("isolation forest needs positive n_trees, subsample and a threshold in [0, 1]".into())
            }
            PreprocessStage::LooPrune { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => {
                bad(format!("loo prune lambda must be finite and >= 0, got {lambda}"))
            }
            PreprocessStage::CorrelatedFeatures { threshold } if !(threshold > 0.0 && threshold <= 1.0) => {
                bad(format!("correlation threshold must lie in (0, 1], got {threshold}"))
            }
            PreprocessStage::Logit { eps, .. } if !(eps > 0.0 && eps < 0.5) => {
                bad(format!("logit eps must lie in (0, 0.5), got {eps}"))
            }
            _ => Ok(()),
        }
    }
}

/// Dimensionality reduction stage, applied to inputs only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DimredStage {
    Pca {
        n_components: usize,
    },
    Tsvd {
        n_components: usize,
    },
    VarianceThreshold {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drop_lowest: Option<usize>,
    },
    SelectKBest {
        k: usize,
        #[serde(default = "d_bins")]
        bins: usize,
    },
    SelectPercentile {
        percentile: f64,
        #[serde(default = "d_bins")]
        bins: usize,
    },
    GenericUnivariate {
        candidates: Vec<UnivariateCandidate>,
        #[serde(default = "d_folds")]
        cv_folds: usize,
        #[serde(default = "d_gus_base")]
        base: LearnerSpec,
        #[serde(default = "d_bins")]
        bins: usize,
    },
    BackwardElimination {
        #[serde(default = "d_p")]
        p_threshold: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_rounds: Option<usize>,
    },
}

impl DimredStage {
    pub fn name(&self) -> &'static str {
        match self {
            DimredStage::Pca { .. } => "pca",
            DimredStage::Tsvd { .. } => "tsvd",
            DimredStage::VarianceThreshold { .. } => "variance_threshold",
            DimredStage::SelectKBest { .. } => "select_k_best",
            DimredStage::SelectPercentile { .. } => "select_percentile",
            DimredStage::GenericUnivariate { .. } => "generic_univariate",
            DimredStage::BackwardElimination { .. } => "backward_elimination",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        match self {
            DimredStage::Pca { n_components: 0 } | DimredStage::Tsvd { n_components: 0 } => {
                bad("projection needs n_components >= 1".into())
            }
            DimredStage::VarianceThreshold { threshold, drop_lowest } if threshold.is_some() == drop_lowest.is_some() => {
                bad("variance threshold needs exactly one of threshold or drop_lowest".into())
            }
            DimredStage::SelectKBest { k: 0, .. } => bad("select_k_best needs k >= 1".into()),
            DimredStage::SelectPercentile { percentile, .. } if !(*percentile > 0.0 && *percentile <= 100.0) => {
                bad(format!("percentile must lie in (0, 100], got {percentile}"))
            }
            DimredStage::SelectKBest { bins, .. }
            | DimredStage::SelectPercentile { bins, .. }
            | DimredStage::GenericUnivariate { bins, .. }
                if *bins < 2 =>
            {
                bad(format!("mutual information needs at least 2 bins, got {bins}"))
            }
            DimredStage::GenericUnivariate { candidates, cv_folds, base, .. } => {
                if candidates.is_empty() {
                    return bad("generic univariate select needs at least one candidate".into());
                }
                if *cv_folds < 2 {
                    return bad(format!("cv_folds must be >= 2, got {cv_folds}"));
                }
                base.validate()
            }
            DimredStage::BackwardElimination { p_threshold, .. } if !(*p_threshold > 0.0 && *p_threshold < 1.0) => {
                bad(format!("p_threshold must lie in (0, 1), got {p_threshold}"))
            }
            _ => Ok(()),
        }
    }
}

/// Learn in a `n_components`-dimensional PCA space of the targets and map
/// predictions back through the inverse projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetReduction {
    pub n_components: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Postprocess {
    /// Map predictions through the sigmoid; required when targets were logit-transformed.
    pub sigmoid_back: bool,
    /// Clamp predictions into `[0, 1]`.
    pub clip01: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ffl: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preprocess: Vec<PreprocessStage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dimred: Vec<DimredStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_reduction: Option<TargetReduction>,
    pub learner: LearnerSpec,
    #[serde(default)]
    pub postprocess: Postprocess,
}

impl PipelineConfig {
    pub fn new(name: impl Into<String>, learner: LearnerSpec) -> Self {
        PipelineConfig {
            name: name.into(),
            seed: 0,
            ffl: false,
            preprocess: Vec::new(),
            dimred: Vec::new(),
            target_reduction: None,
            learner,
            postprocess: Postprocess::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.preprocess {
            s.validate().map_err(|e| e.in_stage(s.name()))?;
        }
        for s in &self.dimred {
            s.validate().map_err(|e| e.in_stage(s.name()))?;
        }
        self.learner.validate().map_err(|e| e.in_stage("learner"))?;
        if let Some(TargetReduction { n_components: 0 }) = self.target_reduction {
            return Err(Error::Config("target_reduction needs n_components >= 1".into()));
        }
        let logit_targets =
            self.preprocess.iter().any(|s| matches!(s, PreprocessStage::Logit { targets: true, .. }));
        if logit_targets != self.postprocess.sigmoid_back {
            return Err(Error::Config(
                "postprocess.sigmoid_back must be set exactly when a logit stage transforms the targets".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
