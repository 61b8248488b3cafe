//! Random and extremely randomised forests.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_presorted, Presort, Splitter, TreeParams};
use super::{Combiner, EnsembleModel};
use crate::error::{Error, Result};
use crate::learners::kmeans::kmeans;
use crate::linalg::{self, Matrix};
use crate::model::Model;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SplitSource {
    /// One (optionally bootstrapped) sample of all rows per tree.
    Bootstrap,
    /// One tree per k-means cluster of the training rows; `k` defaults to
    /// the number of trees.
    Kmeans { k: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub splitter: Splitter,
    pub feature_fraction: f64,
    pub bootstrap: bool,
    pub split_source: SplitSource,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            splitter: Splitter::Best,
            feature_fraction: 1.0,
            bootstrap: true,
            split_source: SplitSource::Bootstrap,
        }
    }
}

impl ForestParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            splitter: self.splitter,
            feature_fraction: self.feature_fraction,
            l2_leaf: 0.0,
        }
    }
}

/// Row groups for the k-means split source. Clusters smaller than
/// `min_size` are folded, smallest first, into the cluster with the nearest
/// centroid.
pub fn kmeans_groups(x: &Matrix, k: usize, min_size: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let k = k.clamp(1, x.nrows());
    let km = kmeans(x, k, seed, 300)?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &a) in km.assignments.iter().enumerate() {
        groups[a].push(i);
    }
    let mut centroids: Vec<Option<Vec<f64>>> = (0..k).map(|c| Some(linalg::row_vec(&km.centroids, c))).collect();
    for (c, g) in groups.iter().enumerate() {
        if g.is_empty() {
            centroids[c] = None;
        }
    }
    loop {
        let live: Vec<usize> = (0..k).filter(|&c| centroids[c].is_some()).collect();
        if live.len() <= 1 {
            break;
        }
        let Some(&small) = live.iter().filter(|&&c| groups[c].len() < min_size).min_by_key(|&&c| (groups[c].len(), c)) else {
            break;
        };
        let from = centroids[small].clone().expect("live cluster");
        let target = live
            .iter()
            .copied()
            .filter(|&c| c != small)
            .min_by(|&a, &b| {
                let da = linalg::sq_dist(&from, centroids[a].as_ref().expect("live"));
                let db = linalg::sq_dist(&from, centroids[b].as_ref().expect("live"));
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("at least two live clusters");
        let moved = std::mem::take(&mut groups[small]);
        groups[target].extend(moved);
        groups[target].sort_unstable();
        centroids[small] = None;
        let members = &groups[target];
        centroids[target] = Some(
            (0..x.ncols())
                .map(|j| members.iter().map(|&i| x[(i, j)]).sum::<f64>() / members.len() as f64)
                .collect(),
        );
    }
    Ok(groups.into_iter().filter(|g| !g.is_empty()).collect())
}

pub fn fit_random_forest(x: &Matrix, y: &Matrix, p: &ForestParams, seed: u64) -> Result<EnsembleModel> {
    if p.n_trees == 0 {
        return Err(Error::Parameter("forest needs at least one tree".into()));
    }
    let n = x.nrows();
    if n == 0 {
        return Err(Error::InsufficientData("forest needs training rows".into()));
    }
    let tp = p.tree_params();
    tp.validate()?;
    let row_sets: Vec<Vec<usize>> = match p.split_source {
        SplitSource::Bootstrap => (0..p.n_trees)
            .map(|t| {
                if p.bootstrap {
                    let mut r = rng::stream(seed, &[t as u64, 0]);
                    (0..n).map(|_| r.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                }
            })
            .collect(),
        SplitSource::Kmeans { k } => {
            kmeans_groups(x, k.unwrap_or(p.n_trees), p.min_samples_leaf, rng::derive_seed(seed, &[u64::MAX]))?
        }
    };
    let presort = (tp.splitter == Splitter::Best).then(|| Presort::new(x));
    let members = crate::par::try_map_indexed(row_sets.len(), |t| {
        fit_tree_presorted(x, y, &row_sets[t], &tp, rng::stream(seed, &[t as u64, 1]), presort.as_ref()).map(Model::Tree)
    })?;
    Ok(EnsembleModel { members, combiner: Combiner::Mean, n_outputs: y.ncols() })
}
