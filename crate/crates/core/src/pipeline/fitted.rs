use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{DimredStage, PipelineConfig, PreprocessStage};
use crate::connectome::{FeatureTable, LongitudinalDataset};
use crate::dimred::{self, Projection};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{self, Model};
use crate::preprocess::{self, FeatureMask, IsolationForestParams, SampleMask, ScalerParams};
use crate::rng::derive_seed;

const MAGIC: &[u8; 8] = b"CNTOFIT\0";
const FORMAT_VERSION: u32 = 1;

/// A fitted input transform, replayed verbatim at predict time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedTransform {
    Select(FeatureMask),
    Scale(ScalerParams),
    Logit { eps: f64 },
    Project(Projection),
}

impl FittedTransform {
    fn apply(&self, x: &Matrix) -> Result<Matrix> {
        match self {
            FittedTransform::Select(m) => m.apply(x),
            FittedTransform::Scale(p) => p.apply(x),
            FittedTransform::Logit { eps } => preprocess::logit_transform(x, *eps),
            FittedTransform::Project(p) => p.project(x),
        }
    }
}

/// Training-set shape after a stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub rows: usize,
    pub features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    config: PipelineConfig,
    input_dim: usize,
    output_dim: usize,
    transforms: Vec<FittedTransform>,
    target_logit: Option<f64>,
    target_projection: Option<Projection>,
    model: Model,
    report: Vec<StageReport>,
}

struct Work {
    x: Matrix,
    y: Matrix,
}

impl Work {
    fn keep(&mut self, mask: &SampleMask) {
        let idx = mask.indices();
        if idx.len() < self.x.nrows() {
            log::info!("eliminated {} of {} training samples", self.x.nrows() - idx.len(), self.x.nrows());
        }
        self.x = linalg::select_rows(&self.x, &idx);
        self.y = linalg::select_rows(&self.y, &idx);
    }
}

fn preprocess_stage(
    stage: &PreprocessStage,
    w: &mut Work,
    seed: u64,
    transforms: &mut Vec<FittedTransform>,
    target_logit: &mut Option<f64>,
) -> Result<()> {
    match *stage {
        PreprocessStage::AddNoise { sigma, copies } => {
            let ds = LongitudinalDataset::new(
                FeatureTable::from_matrix(w.x.clone()),
                Some(FeatureTable::from_matrix(w.y.clone())),
            )?;
            let out = preprocess::augment_noise(&ds, sigma, copies, seed)?;
            w.y = out.targets("add_noise")?.rows().clone();
            w.x = out.t0().rows().clone();
        }
        PreprocessStage::ZscoreOutliers { k, fraction } => w.keep(&preprocess::zscore_mask(&w.x, k, fraction)?),
        PreprocessStage::IqrOutliers { multiplier, fraction } => {
            w.keep(&preprocess::iqr_mask(&w.x, multiplier, fraction)?)
        }
        PreprocessStage::Lof { k_neighbors, threshold } => {
            w.keep(&preprocess::lof_mask(&w.x, k_neighbors, threshold)?)
        }
        PreprocessStage::IsolationForest { n_trees, subsample, threshold } => {
            let p = IsolationForestParams { n_trees, subsample, seed };
            w.keep(&preprocess::iforest_mask(&w.x, &p, threshold)?)
        }
        PreprocessStage::LooPrune { lambda } => w.keep(&preprocess::loo_prune_mask(&w.x, &w.y, lambda)?),
        PreprocessStage::ConstantFeatures => select(w, transforms, preprocess::drop_constant_features(&w.x)?)?,
        PreprocessStage::RedundantFeatures => select(w, transforms, preprocess::drop_redundant_features(&w.x)?)?,
        PreprocessStage::CorrelatedFeatures { threshold } => {
            select(w, transforms, preprocess::drop_correlated_features(&w.x, threshold)?)?
        }
        PreprocessStage::Scaler { mode } => {
            let p = preprocess::fit_scaler(&w.x, mode)?;
            w.x = p.apply(&w.x)?;
            transforms.push(FittedTransform::Scale(p));
        }
        PreprocessStage::Logit { eps, targets } => {
            w.x = preprocess::logit_transform(&w.x, eps)?;
            transforms.push(FittedTransform::Logit { eps });
            if targets {
                if target_logit.is_some() {
                    return Err(Error::Config("targets are already logit-transformed".into()));
                }
                w.y = preprocess::logit_transform(&w.y, eps)?;
                *target_logit = Some(eps);
            }
        }
    }
    Ok(())
}

fn select(w: &mut Work, transforms: &mut Vec<FittedTransform>, mask: FeatureMask) -> Result<()> {
    if mask.kept_count() == 0 {
        return Err(Error::InsufficientData("stage would remove every feature".into()));
    }
    w.x = mask.apply(&w.x)?;
    transforms.push(FittedTransform::Select(mask));
    Ok(())
}

fn dimred_stage(stage: &DimredStage, w: &mut Work, seed: u64, transforms: &mut Vec<FittedTransform>) -> Result<()> {
    let report = match stage {
        DimredStage::Pca { n_components } | DimredStage::Tsvd { n_components } => {
            let p = if matches!(stage, DimredStage::Pca { .. }) {
                dimred::fit_pca(&w.x, *n_components)?
            } else {
                dimred::fit_tsvd(&w.x, *n_components)?
            };
            w.x = p.project(&w.x)?;
            transforms.push(FittedTransform::Project(p));
            return Ok(());
        }
        DimredStage::VarianceThreshold { threshold, drop_lowest } => {
            dimred::variance_threshold(&w.x, *threshold, *drop_lowest)?
        }
        DimredStage::SelectKBest { k, bins } => dimred::select_k_best_mi(&w.x, &w.y, *k, *bins)?,
        DimredStage::SelectPercentile { percentile, bins } => {
            dimred::select_percentile_mi(&w.x, &w.y, *percentile, *bins)?
        }
        DimredStage::GenericUnivariate { candidates, cv_folds, base, bins } => {
            dimred::generic_univariate_select(&w.x, &w.y, candidates, *cv_folds, base, *bins, seed)?
        }
        DimredStage::BackwardElimination { p_threshold, max_rounds } => {
            dimred::backward_elimination(&w.x, &w.y, *p_threshold, max_rounds.unwrap_or(usize::MAX))?
        }
    };
    select(w, transforms, report.selected)
}

/// Fits every stage in declared order on the labeled training set.
pub fn fit_pipeline(config: &PipelineConfig, train: &LongitudinalDataset) -> Result<FittedPipeline> {
    config.validate()?;
    let mut w = Work { x: train.t0().rows().clone(), y: train.targets("fit_pipeline")?.rows().clone() };
    let (input_dim, output_dim) = (w.x.ncols(), w.y.ncols());
    let mut transforms = Vec::new();
    let mut target_logit = None;
    let mut report = Vec::new();
    let mut index = 0u64;
    let mut record = |stage: String, w: &Work| report.push(StageReport { stage, rows: w.x.nrows(), features: w.x.ncols() });

    for stage in &config.preprocess {
        preprocess_stage(stage, &mut w, derive_seed(config.seed, &[index]), &mut transforms, &mut target_logit)
            .map_err(|e| e.in_stage(stage.name()))?;
        record(stage.name().into(), &w);
        index += 1;
    }

    let target_projection = match config.target_reduction {
        Some(t) => {
            let p = dimred::fit_pca(&w.y, t.n_components).map_err(|e| e.in_stage("target_reduction"))?;
            w.y = p.project(&w.y)?;
            Some(p)
        }
        None => None,
    };

    for stage in &config.dimred {
        dimred_stage(stage, &mut w, derive_seed(config.seed, &[index]), &mut transforms)
            .map_err(|e| e.in_stage(stage.name()))?;
        record(stage.name().into(), &w);
        index += 1;
    }

    let seed = derive_seed(config.seed, &[index]);
    let model = if config.ffl {
        model::fit_ffl(&config.learner, &w.x, &w.y, seed)
    } else {
        model::fit(&config.learner, &w.x, &w.y, seed)
    }
    .map_err(|e| e.in_stage(format!("learner:{}", config.learner.name())))?;
    record(format!("learner:{}", config.learner.name()), &w);

    Ok(FittedPipeline {
        config: config.clone(),
        input_dim,
        output_dim,
        transforms,
        target_logit,
        target_projection,
        model,
        report,
    })
}

impl FittedPipeline {
    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Trained regressors as bookkept per strategy: one per learned output
    /// column under FFL, otherwise one, even when a single-output learner was
    /// lifted internally column by column.
    pub fn model_count(&self) -> usize {
        if self.config.ffl {
            self.model.model_count()
        } else {
            1
        }
    }

    pub fn report(&self) -> &[StageReport] {
        &self.report
    }

    /// Predicts follow-up rows; always `output_dim` columns wide.
    pub fn predict_matrix(&self, t0: &Matrix) -> Result<Matrix> {
        if t0.ncols() != self.input_dim {
            return Err(Error::Shape(format!(
                "pipeline `{}` expects {} features, input has {}",
                self.config.name,
                self.input_dim,
                t0.ncols()
            )));
        }
        let mut x = t0.clone();
        for t in &self.transforms {
            x = t.apply(&x)?;
        }
        let mut y = self.model.predict(&x);
        if let Some(p) = &self.target_projection {
            y = p.reconstruct(&y)?;
        }
        if self.config.postprocess.sigmoid_back {
            y = preprocess::sigmoid_transform(&y);
        }
        if self.config.postprocess.clip01 {
            y.apply(|v| *v = v.clamp(0.0, 1.0));
        }
        debug_assert_eq!(y.ncols(), self.output_dim);
        Ok(y)
    }

    pub fn predict(&self, t0: &FeatureTable) -> Result<FeatureTable> {
        FeatureTable::new(t0.subject_ids().to_vec(), self.predict_matrix(t0.rows())?)
    }

    /// Versioned binary encoding: magic, little-endian format version, CBOR body.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        ciborium::into_writer(self, w).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 12];
        r.read_exact(&mut head).map_err(|_| Error::Serialization("truncated fitted-pipeline file".into()))?;
        if &head[..8] != MAGIC {
            return Err(Error::Serialization("not a fitted-pipeline file".into()));
        }
        let version = u32::from_le_bytes(head[8..].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "fitted-pipeline format version {version} is not supported (expected {FORMAT_VERSION})"
            )));
        }
        ciborium::from_reader(r).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
