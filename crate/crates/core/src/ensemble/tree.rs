//! Multi-output regression trees.
//!
//! A split scores `Σ_c S_L,c² / (n_L + λ) + S_R,c² / (n_R + λ)` over the
//! target columns, where `S` are target sums; leaves hold `S / (n + λ)`.
//! With `λ = 0` this is the usual variance-reduction criterion and leaves are
//! means. Ties keep the lowest feature index, then the lowest threshold.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitter {
    #[default]
    Best,
    /// One uniform threshold per candidate feature.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub splitter: Splitter,
    /// Share of features considered at each node, in `(0, 1]`.
    pub feature_fraction: f64,
    /// Leaf shrinkage `λ`.
    pub l2_leaf: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_leaf: 1, splitter: Splitter::Best, feature_fraction: 1.0, l2_leaf: 0.0 }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::Parameter("min_samples_leaf must be >= 1".into()));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::Parameter(format!("feature_fraction must lie in (0, 1], got {}", self.feature_fraction)));
        }
        if !(self.l2_leaf >= 0.0 && self.l2_leaf.is_finite()) {
            return Err(Error::Parameter(format!("l2_leaf must be >= 0, got {}", self.l2_leaf)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    /// Root is node 0. Rows with `x[feature] <= threshold` go left.
    pub nodes: Vec<Node>,
    pub n_outputs: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl RegressionTree {
    pub fn leaf_of(&self, row: &[f64]) -> usize {
        self.leaf_by(|f| row[f])
    }

    fn leaf_by(&self, value: impl Fn(usize) -> f64) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split { feature, threshold, left, right } => {
                    at = if value(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    fn leaf_value(&self, at: usize) -> &[f64] {
        match &self.nodes[at] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_by returns leaves"),
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> &[f64] {
        self.leaf_value(self.leaf_of(row))
    }

    pub fn predict(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.nrows(), self.n_outputs);
        for i in 0..x.nrows() {
            let value = self.leaf_value(self.leaf_by(|f| x[(i, f)]));
            for (c, v) in value.iter().enumerate() {
                out[(i, c)] = *v;
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &RegressionTree, at: usize) -> usize {
            match &t.nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Row order of every feature of one input matrix, by `(value, row)`.
/// Trees fitted on the same matrix share it instead of sorting per tree.
#[derive(Debug, Clone)]
pub struct Presort {
    orders: Vec<Vec<usize>>,
    nrows: usize,
}

impl Presort {
    pub fn new(x: &Matrix) -> Self {
        let rows: Vec<usize> = (0..x.nrows()).collect();
        Presort { orders: sort_columns(x, &rows), nrows: x.nrows() }
    }

    /// Orders restricted to the multiset `rows`; repeated rows stay adjacent.
    fn restrict(&self, rows: &[usize]) -> Vec<Vec<usize>> {
        if rows.len() == self.nrows && rows.iter().enumerate().all(|(k, &i)| k == i) {
            return self.orders.clone();
        }
        let mut counts = vec![0usize; self.nrows];
        for &i in rows {
            counts[i] += 1;
        }
        self.orders
            .iter()
            .map(|order| {
                let mut out = Vec::with_capacity(rows.len());
                for &i in order {
                    out.extend(std::iter::repeat_n(i, counts[i]));
                }
                out
            })
            .collect()
    }
}

fn sort_columns(x: &Matrix, rows: &[usize]) -> Vec<Vec<usize>> {
    (0..x.ncols())
        .map(|f| {
            let col = x.column(f);
            let mut order = rows.to_vec();
            order.sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            order
        })
        .collect()
}

/// Right-hand sums are `total - left`.
fn split_score(total: &[f64], left: &[f64], nl: usize, nr: usize, l2: f64) -> f64 {
    let (dl, dr) = (nl as f64 + l2, nr as f64 + l2);
    let (mut sl, mut sr) = (0.0, 0.0);
    for (t, l) in total.iter().zip(left) {
        let r = t - l;
        sl += l * l;
        sr += r * r;
    }
    sl / dl + sr / dr
}

fn add_row(acc: &mut [f64], row: &[f64]) {
    for (a, v) in acc.iter_mut().zip(row) {
        *a += v;
    }
}

struct Builder<'a> {
    /// Column-major inputs, `nrows` per column.
    x: &'a [f64],
    nrows: usize,
    d: usize,
    /// Row-major targets, `m` per row.
    yt: Vec<f64>,
    m: usize,
    p: &'a TreeParams,
    rng: Rng,
    nodes: Vec<Node>,
    total: Vec<f64>,
    left: Vec<f64>,
}

struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn col(&self, f: usize) -> &[f64] {
        &self.x[f * self.nrows..(f + 1) * self.nrows]
    }

    fn yrow(&self, i: usize) -> &[f64] {
        &self.yt[i * self.m..(i + 1) * self.m]
    }

    fn leaf_value(&self, rows: &[usize]) -> Vec<f64> {
        let denom = rows.len() as f64 + self.p.l2_leaf;
        (0..self.m).map(|c| crate::stats::sum(rows.iter().map(|&i| self.yt[i * self.m + c])) / denom).collect()
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        let first = self.yrow(rows[0]);
        rows.iter().all(|&i| self.yrow(i) == first)
    }

    fn features(&mut self) -> Vec<usize> {
        let d = self.d;
        let k = ((self.p.feature_fraction * d as f64).round() as usize).clamp(1, d);
        if k == d {
            return (0..d).collect();
        }
        let mut f = sample(&mut self.rng, d, k).into_vec();
        f.sort_unstable();
        f
    }

    /// `sorted[f]` lists the node's rows ordered by `(x[f], row)`; present for
    /// the exhaustive splitter only.
    fn best_split(&mut self, rows: &[usize], sorted: Option<&[Vec<usize>]>) -> Option<Candidate> {
        let n = rows.len();
        let leaf = self.p.min_samples_leaf;
        let l2 = self.p.l2_leaf;
        let mut total = std::mem::take(&mut self.total);
        let mut left = std::mem::take(&mut self.left);
        total.fill(0.0);
        for &i in rows {
            add_row(&mut total, self.yrow(i));
        }
        let mut best: Option<Candidate> = None;
        let mut consider = |cand: Candidate| {
            if best.as_ref().is_none_or(|b| cand.score > b.score) {
                best = Some(cand);
            }
        };
        for f in self.features() {
            left.fill(0.0);
            let col = self.col(f);
            match self.p.splitter {
                Splitter::Best => {
                    let order = &sorted.expect("exhaustive splitter keeps sorted rows")[f];
                    for k in 0..n - 1 {
                        let i = order[k];
                        add_row(&mut left, self.yrow(i));
                        let (a, b) = (col[i], col[order[k + 1]]);
                        if a == b || k + 1 < leaf || n - k - 1 < leaf {
                            continue;
                        }
                        let mut threshold = a + (b - a) / 2.0;
                        if threshold >= b {
                            threshold = a;
                        }
                        let score = split_score(&total, &left, k + 1, n - k - 1, l2);
                        consider(Candidate { score, feature: f, threshold });
                    }
                }
                Splitter::Random => {
                    let (lo, hi) =
                        rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(col[i]), hi.max(col[i])));
                    if lo >= hi {
                        continue;
                    }
                    let mut threshold = lo + self.rng.random::<f64>() * (hi - lo);
                    if threshold >= hi {
                        threshold = lo;
                    }
                    let col = self.col(f);
                    let mut nl = 0;
                    for &i in rows {
                        if col[i] <= threshold {
                            nl += 1;
                            add_row(&mut left, self.yrow(i));
                        }
                    }
                    if nl < leaf || n - nl < leaf {
                        continue;
                    }
                    let score = split_score(&total, &left, nl, n - nl, l2);
                    consider(Candidate { score, feature: f, threshold });
                }
            }
        }
        self.total = total;
        self.left = left;
        best
    }

    fn grow(&mut self, rows: Vec<usize>, sorted: Option<Vec<Vec<usize>>>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: self.leaf_value(&rows) });
        let depth_ok = self.p.max_depth.is_none_or(|m| depth < m);
        if !depth_ok || rows.len() < 2 * self.p.min_samples_leaf || self.is_pure(&rows) {
            return id;
        }
        let Some(split) = self.best_split(&rows, sorted.as_deref()) else { return id };
        let col = self.col(split.feature);
        let goes_left = |i: usize| col[i] <= split.threshold;
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| goes_left(i));
        // Stable partition keeps each child's lists sorted.
        let (sl, sr) = match sorted {
            Some(lists) => {
                let (a, b): (Vec<_>, Vec<_>) =
                    lists.into_iter().map(|list| list.into_iter().partition::<Vec<usize>, _>(|&i| goes_left(i))).unzip();
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        let left = self.grow(l, sl, depth + 1);
        let right = self.grow(r, sr, depth + 1);
        self.nodes[id] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        id
    }
}

/// Fits a tree on the given rows of `(x, y)`; `y` may have several columns.
pub fn fit_tree_rows(x: &Matrix, y: &Matrix, rows: &[usize], p: &TreeParams, rng: Rng) -> Result<RegressionTree> {
    fit_tree_presorted(x, y, rows, p, rng, None)
}

/// As [`fit_tree_rows`]; `presort` must have been built from this `x`.
pub fn fit_tree_presorted(
    x: &Matrix,
    y: &Matrix,
    rows: &[usize],
    p: &TreeParams,
    rng: Rng,
    presort: Option<&Presort>,
) -> Result<RegressionTree> {
    p.validate()?;
    if x.nrows() != y.nrows() {
        return Err(Error::Shape(format!("{} input rows but {} target rows", x.nrows(), y.nrows())));
    }
    if rows.is_empty() || x.ncols() == 0 {
        return Err(Error::InsufficientData("tree needs at least one row and one feature".into()));
    }
    if let Some(ps) = presort {
        if ps.nrows != x.nrows() || ps.orders.len() != x.ncols() {
            return Err(Error::Shape("presort was built from a different matrix".into()));
        }
    }
    let sorted = (p.splitter == Splitter::Best).then(|| match presort {
        Some(ps) => ps.restrict(rows),
        None => sort_columns(x, rows),
    });
    let m = y.ncols();
    let yt: Vec<f64> = y.transpose().as_slice().to_vec();
    let mut b = Builder {
        x: x.as_slice(),
        nrows: x.nrows(),
        d: x.ncols(),
        yt,
        m,
        p,
        rng,
        nodes: Vec::new(),
        total: vec![0.0; m],
        left: vec![0.0; m],
    };
    b.grow(rows.to_vec(), sorted, 0);
    Ok(RegressionTree { nodes: b.nodes, n_outputs: m, max_depth: p.max_depth, min_samples_leaf: p.min_samples_leaf })
}

pub fn fit_tree(x: &Matrix, y: &Matrix, p: &TreeParams, seed: u64) -> Result<RegressionTree> {
    let rows: Vec<usize> = (0..x.nrows()).collect();
    fit_tree_rows(x, y, &rows, p, crate::rng::stream(seed, &[]))
}
