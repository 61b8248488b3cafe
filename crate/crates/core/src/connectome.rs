//! Connectivity matrices, their upper-triangle feature encoding, subject
//! tables, CSV ingestion/emission and a synthetic longitudinal generator.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

pub const DEFAULT_ROIS: usize = 35;

/// Number of upper-triangle entries of an `n_rois × n_rois` matrix.
pub fn feature_count(n_rois: usize) -> usize {
    n_rois * n_rois.saturating_sub(1) / 2
}

/// Inverse of [`feature_count`]; `None` if `d` is not triangular.
pub fn rois_for_features(d: usize) -> Option<usize> {
    let n = ((1.0 + (1.0 + 8.0 * d as f64).sqrt()) / 2.0).round() as usize;
    (feature_count(n) == d && n >= 2).then_some(n)
}

/// Row-major upper-triangle index of entry `(i, j)`, `i < j < n`.
pub fn triu_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(Error::IndexDomain(format!(
            "triu_index requires 0 <= i < j < n, got i={i}, j={j}, n={n}"
        )));
    }
    Ok(i * (2 * n - i - 1) / 2 + (j - i - 1))
}

/// Symmetric, zero-diagonal matrix of edge weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityMatrix {
    weights: Matrix,
}

impl ConnectivityMatrix {
    /// Validates symmetry, zero diagonal, finiteness and nonnegativity.
    pub fn new(weights: Matrix) -> Result<Self> {
        let m = ConnectivityMatrix { weights };
        m.validate()?;
        Ok(m)
    }

    pub fn zeros(n_rois: usize) -> Self {
        ConnectivityMatrix {
            weights: Matrix::zeros(n_rois, n_rois),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        let n = w.nrows();
        if w.ncols() != n || n == 0 {
            return Err(Error::Shape(format!("connectivity matrix must be square, got {}x{}", n, w.ncols())));
        }
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(Error::Domain(format!("diagonal entry ({i},{i}) is {}", w[(i, i)])));
            }
            for j in 0..n {
                let v = w[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Domain(format!("entry ({i},{j}) = {v} is not a finite nonnegative weight")));
                }
                if v != w[(j, i)] {
                    return Err(Error::Domain(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(())
    }

    pub fn n_rois(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn vectorize(&self) -> FeatureVector {
        let n = self.n_rois();
        let mut values = Vec::with_capacity(feature_count(n));
        for i in 0..n {
            for j in (i + 1)..n {
                values.push(self.weights[(i, j)]);
            }
        }
        FeatureVector { values }
    }

    /// Rebuilds a matrix from its upper triangle. Both `(i, j)` and `(j, i)`
    /// receive the same value and the diagonal is zero. Values are not range
    /// checked, so predicted weights outside `[0, 1]` survive unchanged.
    pub fn devectorize(v: &FeatureVector, n_rois: usize) -> Result<Self> {
        let d = feature_count(n_rois);
        if v.len() != d {
            return Err(Error::Shape(format!(
                "feature vector has {} entries, {n_rois} ROIs need {d}",
                v.len()
            )));
        }
        let mut w = Matrix::zeros(n_rois, n_rois);
        let mut k = 0;
        for i in 0..n_rois {
            for j in (i + 1)..n_rois {
                w[(i, j)] = v.values[k];
                w[(j, i)] = v.values[k];
                k += 1;
            }
        }
        Ok(ConnectivityMatrix { weights: w })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("feature {k} is not finite")));
        }
        Ok(FeatureVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Subjects × features table. Row `i` belongs to `subject_ids[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    subject_ids: Vec<String>,
    rows: Matrix,
}

impl FeatureTable {
    pub fn new(subject_ids: Vec<String>, rows: Matrix) -> Result<Self> {
        if subject_ids.len() != rows.nrows() {
            return Err(Error::Shape(format!(
                "{} subject ids for {} rows",
                subject_ids.len(),
                rows.nrows()
            )));
        }
        let mut seen = HashSet::with_capacity(subject_ids.len());
        for id in &subject_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Input(format!("duplicate subject id `{id}`")));
            }
        }
        Ok(FeatureTable { subject_ids, rows })
    }

    /// Table with generated ids `S0`, `S1`, ...
    pub fn from_matrix(rows: Matrix) -> Self {
        let ids = (0..rows.nrows()).map(|i| format!("S{i}")).collect();
        FeatureTable { subject_ids: ids, rows }
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn into_rows(self) -> Matrix {
        self.rows
    }

    pub fn n_subjects(&self) -> usize {
        self.rows.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, i: usize) -> FeatureVector {
        FeatureVector {
            values: self.rows.row(i).iter().copied().collect(),
        }
    }

    /// Same ids, new values.
    pub fn with_rows(&self, rows: Matrix) -> Result<Self> {
        if rows.nrows() != self.n_subjects() {
            return Err(Error::Shape(format!(
                "replacement has {} rows, table has {}",
                rows.nrows(),
                self.n_subjects()
            )));
        }
        Ok(FeatureTable {
            subject_ids: self.subject_ids.clone(),
            rows,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        FeatureTable {
            subject_ids: idx.iter().map(|&i| self.subject_ids[i].clone()).collect(),
            rows: crate::linalg::select_rows(&self.rows, idx),
        }
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.subject_ids.iter().position(|s| s == id)
    }

    /// Rows whose ids appear in `ids`, in the order of `ids`.
    pub fn select_ids(&self, ids: &[String]) -> Result<Self> {
        let idx = ids
            .iter()
            .map(|id| {
                self.position(id)
                    .ok_or_else(|| Error::Input(format!("subject `{id}` not present")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select_rows(&idx))
    }

    pub fn read_csv<R: Read>(reader: R, expect_d: usize, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let ingest = |row: usize, column: &str, message: String| Error::Ingest {
            path: source.to_string(),
            row,
            column: column.to_string(),
            message,
        };
        let headers = rdr
            .headers()
            .map_err(|e| ingest(1, "-", e.to_string()))?
            .clone();
        let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
        if names.first().map(String::as_str) != Some("ID") {
            return Err(ingest(1, names.first().map_or("", |s| s), "first column must be `ID`".into()));
        }
        for k in 0..expect_d {
            let want = format!("f{k}");
            match names.get(k + 1) {
                Some(got) if *got == want => {}
                Some(got) => return Err(ingest(1, got, format!("expected column `{want}`"))),
                None => return Err(ingest(1, &want, format!("missing column (file has {} features, expected {expect_d})", names.len() - 1))),
            }
        }
        if names.len() != expect_d + 1 {
            return Err(ingest(1, &names[expect_d + 1], format!("unexpected column (expected {expect_d} features)")));
        }

        let mut ids = Vec::new();
        let mut seen = HashSet::new();
        let mut data = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let line = r + 2;
            let rec = rec.map_err(|e| ingest(line, "-", e.to_string()))?;
            if rec.len() != expect_d + 1 {
                let col = if rec.len() < expect_d + 1 { names[rec.len()].clone() } else { "-".into() };
                return Err(ingest(line, &col, format!("row has {} cells, expected {}", rec.len(), expect_d + 1)));
            }
            let id = rec[0].trim().to_string();
            if id.is_empty() {
                return Err(ingest(line, "ID", "empty subject id".into()));
            }
            if !seen.insert(id.clone()) {
                return Err(ingest(line, "ID", format!("duplicate subject id `{id}`")));
            }
            for k in 0..expect_d {
                let cell = rec[k + 1].trim();
                let v: f64 = cell
                    .parse()
                    .map_err(|_| ingest(line, &names[k + 1], format!("`{cell}` is not a number")))?;
                if !v.is_finite() {
                    return Err(ingest(line, &names[k + 1], format!("`{cell}` is not finite")));
                }
                data.push(v);
            }
            ids.push(id);
        }
        let rows = Matrix::from_row_slice(ids.len(), expect_d, &data);
        Ok(FeatureTable { subject_ids: ids, rows })
    }

    pub fn load_csv(path: impl AsRef<Path>, expect_d: usize) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f), expect_d, &path.display().to_string())
    }

    /// Like [`load_csv`](Self::load_csv) with the feature count taken from
    /// the header, which must be a connectome vector length.
    pub fn load_csv_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let header = text.lines().next().unwrap_or("");
        let d = header.split(',').count().saturating_sub(1);
        if rois_for_features(d).is_none() {
            return Err(Error::Ingest {
                path: path.display().to_string(),
                row: 1,
                column: "-".into(),
                message: format!("{d} feature columns is not n(n-1)/2 for any ROI count"),
            });
        }
        Self::read_csv(text.as_bytes(), d, &path.display().to_string())
    }

    /// Writes `ID,f0,..` with LF line endings and shortest round-trip decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::from("ID");
        for k in 0..self.n_features() {
            line.push_str(&format!(",f{k}"));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
        for (i, id) in self.subject_ids.iter().enumerate() {
            line.clear();
            line.push_str(id);
            for v in self.rows.row(i).iter() {
                line.push(',');
                line.push_str(&v.to_string());
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut bw = std::io::BufWriter::new(f);
        self.write_csv(&mut bw)?;
        bw.flush()?;
        Ok(())
    }
}

/// Baseline (`t0`) table and, for labeled splits, the follow-up (`t1`) table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalDataset {
    t0: FeatureTable,
    t1: Option<FeatureTable>,
}

impl LongitudinalDataset {
    pub fn new(t0: FeatureTable, t1: Option<FeatureTable>) -> Result<Self> {
        if let Some(t1) = &t1 {
            if t1.subject_ids != t0.subject_ids {
                return Err(Error::Input("t0 and t1 must list the same subjects in the same order".into()));
            }
            if t1.n_features() != t0.n_features() {
                return Err(Error::Shape(format!(
                    "t0 has {} features, t1 has {}",
                    t0.n_features(),
                    t1.n_features()
                )));
            }
        }
        Ok(LongitudinalDataset { t0, t1 })
    }

    pub fn unlabeled(t0: FeatureTable) -> Self {
        LongitudinalDataset { t0, t1: None }
    }

    pub fn t0(&self) -> &FeatureTable {
        &self.t0
    }

    pub fn t1(&self) -> Option<&FeatureTable> {
        self.t1.as_ref()
    }

    /// `t1`, or an error naming the operation that needed it.
    pub fn targets(&self, op: &str) -> Result<&FeatureTable> {
        self.t1
            .as_ref()
            .ok_or_else(|| Error::Input(format!("{op} needs a labeled dataset (t1 missing)")))
    }

    pub fn n_subjects(&self) -> usize {
        self.t0.n_subjects()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        LongitudinalDataset {
            t0: self.t0.select_rows(idx),
            t1: self.t1.as_ref().map(|t| t.select_rows(idx)),
        }
    }
}

/// Parameters of [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_subjects: usize,
    pub n_rois: usize,
    pub drift: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Latent factors shared by all subjects of a synthetic cohort.
const SYNTH_FACTORS: usize = 8;

impl SyntheticConfig {
    pub fn new(n_subjects: usize, n_rois: usize, drift: f64, noise_sigma: f64, seed: u64) -> Result<Self> {
        if n_subjects == 0 {
            return Err(Error::Parameter("n_subjects must be at least 1".into()));
        }
        if n_rois < 2 {
            return Err(Error::Parameter("n_rois must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&drift) {
            return Err(Error::Parameter(format!("drift must lie in [0, 1], got {drift}")));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::Parameter(format!("noise_sigma must be finite and >= 0, got {noise_sigma}")));
        }
        Ok(SyntheticConfig {
            n_subjects,
            n_rois,
            drift,
            noise_sigma,
            seed,
        })
    }
}

/// Synthetic cohort. Baseline edges follow a low-rank latent-factor model,
/// `t0 = 0.5 + 0.45 * (z · B) / r` with `z, B ~ U(-1, 1)`, which keeps every
/// entry inside `[0.05, 0.95]`. Follow-up edges are
/// `t1 = clip(t0 * (1 - drift) + N(0, noise_sigma), 0, 1)`.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> LongitudinalDataset {
    let d = feature_count(cfg.n_rois);
    let r = SYNTH_FACTORS.min(d);
    let mut prng = rng::stream(cfg.seed, &[0]);
    let patterns = Matrix::from_fn(r, d, |_, _| prng.random_range(-1.0..=1.0));
    let mut zrng = rng::stream(cfg.seed, &[1]);
    let mut nrng = rng::stream(cfg.seed, &[2]);
    let noise = Normal::new(0.0, cfg.noise_sigma).expect("validated sigma");

    let mut t0 = Matrix::zeros(cfg.n_subjects, d);
    let mut t1 = Matrix::zeros(cfg.n_subjects, d);
    for s in 0..cfg.n_subjects {
        let z: Vec<f64> = (0..r).map(|_| zrng.random_range(-1.0..=1.0)).collect();
        for k in 0..d {
            let latent: f64 = (0..r).map(|f| z[f] * patterns[(f, k)]).sum();
            let base = (0.5 + 0.45 * latent / r as f64).clamp(0.0, 1.0);
            t0[(s, k)] = base;
            let eps = if cfg.noise_sigma > 0.0 { noise.sample(&mut nrng) } else { 0.0 };
            t1[(s, k)] = (base * (1.0 - cfg.drift) + eps).clamp(0.0, 1.0);
        }
    }
    let width = cfg.n_subjects.to_string().len().max(3);
    let ids: Vec<String> = (0..cfg.n_subjects).map(|i| format!("S{:0width$}", i + 1)).collect();
    LongitudinalDataset {
        t0: FeatureTable {
            subject_ids: ids.clone(),
            rows: t0,
        },
        t1: Some(FeatureTable { subject_ids: ids, rows: t1 }),
    }
}
