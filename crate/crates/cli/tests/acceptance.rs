//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when a criterion fails in a way other than the documented one.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use connecto_core::connectome::{generate_synthetic, FeatureTable, LongitudinalDataset, SyntheticConfig};
use connecto_core::dimred::fit_pca;
use connecto_core::ensemble::voting_predict;
use connecto_core::eval::{
    compute_rank_table, cross_validate, evaluate, kfold_split, paired_ttest, paired_ttest_matrix, rank_from_local,
    Aggregator, PccMode, RankTable, ScoreRecord, Split,
};
use connecto_core::learners::enet::{fit_elastic_net, ElasticNetParams};
use connecto_core::learners::{fit_knn, fit_ols, fit_ridge, LinearModel, Weighting};
use connecto_core::linalg::Matrix;
use connecto_core::model::{fit, fit_ffl, LearnerSpec};
use connecto_core::pipeline::{fit_pipeline, load_team_config, TEAM_COUNT};
use connecto_core::preprocess::{iqr_bounds, iqr_mask};
use connecto_core::rng;
use rand::Rng;
use serde::Deserialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

const INSTANCES: u64 = 50;

enum Verdict {
    Pass(String),
    /// Fails exactly as analysed; does not fail the run.
    KnownFail(String),
    Fail(String),
    Skip(String),
}

fn uniform(r: &mut rng::Rng, n: usize, d: usize) -> Matrix {
    Matrix::from_fn(n, d, |_, _| r.random::<f64>() * 2.0 - 1.0)
}

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- criterion 1

#[derive(Deserialize)]
struct PrintedRow {
    team: u32,
    mae: [f64; 3],
    maer: [usize; 3],
    #[serde(rename = "maeR")]
    mae_rank: usize,
    pcc: [f64; 3],
    pccr: [usize; 3],
    #[serde(rename = "pccR")]
    pcc_rank: usize,
    #[serde(rename = "final")]
    final_rank: usize,
}

fn printed_rows() -> Vec<PrintedRow> {
    serde_json::from_str(include_str!("../../core/tests/data/table2.json")).expect("table2.json")
}

fn team_name(t: u32) -> String {
    format!("Team-{t}")
}

/// Counts of (local, measure, final) mismatches against the printed table.
fn mismatches(table: &RankTable, rows: &[PrintedRow]) -> (usize, usize, usize) {
    let (mut local, mut measure, mut fin) = (0, 0, 0);
    for p in rows {
        let r = table.row(&team_name(p.team)).expect("every team ranked");
        local += (0..3).filter(|&c| r.mae_local[c] != p.maer[c]).count();
        local += (0..3).filter(|&c| r.pcc_local[c] != p.pccr[c]).count();
        measure += (r.mae_rank != p.mae_rank) as usize + (r.pcc_rank != p.pcc_rank) as usize;
        fin += (r.final_rank != p.final_rank) as usize;
    }
    (local, measure, fin)
}

fn criterion_1() -> Verdict {
    let rows = printed_rows();
    let records: Vec<ScoreRecord> = rows
        .iter()
        .flat_map(|p| {
            [Split::Public, Split::Private, Split::CvFold(0)].into_iter().enumerate().map(move |(c, split)| ScoreRecord {
                team: team_name(p.team),
                split,
                mae: p.mae[c],
                mse: p.mae[c] * p.mae[c],
                pcc: p.pcc[c],
            })
        })
        .collect();
    let table = compute_rank_table(&records, Aggregator::Mean).expect("rank table");
    let (local, measure, fin) = mismatches(&table, &rows);
    if local + measure + fin == 0 {
        return Verdict::Pass("all local, measure and final ranks reproduced from the metric columns".into());
    }

    // The printed metrics are rounded, so distinct underlying scores can print
    // equal. Every recomputed local rank must then be <= the printed one and
    // sit on a tied printed value.
    let mut unexplained = Vec::new();
    for p in &rows {
        let r = table.row(&team_name(p.team)).unwrap();
        for c in 0..3 {
            for (got, want, value, col) in [
                (r.mae_local[c], p.maer[c], p.mae[c], rows.iter().map(|q| q.mae[c]).collect::<Vec<_>>()),
                (r.pcc_local[c], p.pccr[c], p.pcc[c], rows.iter().map(|q| q.pcc[c]).collect::<Vec<_>>()),
            ] {
                let tied = col.iter().filter(|&&v| v == value).count() > 1;
                if got != want && !(got < want && tied) {
                    unexplained.push(format!("team {} column {c}: {got} vs {want}", p.team));
                }
            }
        }
    }
    // Aggregating the printed local ranks must reproduce every printed
    // measure and final rank, ties included.
    let teams: Vec<String> = rows.iter().map(|p| team_name(p.team)).collect();
    let from_local = rank_from_local(
        &teams,
        &rows.iter().map(|p| p.maer).collect::<Vec<_>>(),
        &rows.iter().map(|p| p.pccr).collect::<Vec<_>>(),
        Aggregator::Mean,
    )
    .expect("rank from local");
    let (_, m2, f2) = mismatches(&from_local, &rows);
    let tie = ["Team-1", "Team-2", "Team-11"].iter().all(|t| from_local.row(t).unwrap().final_rank == 1)
        && from_local.row("Team-13").unwrap().final_rank == 4;
    let detail = format!(
        "{local} local, {measure} measure and {fin} final ranks differ when ranking the rounded metric columns; \
         every difference is a rounding tie ranked better than printed; aggregating the printed local ranks \
         reproduces all measure and final ranks including the 1/2/11 tie at 1 and team 13 at 4: {}",
        m2 == 0 && f2 == 0 && tie
    );
    if unexplained.is_empty() && m2 == 0 && f2 == 0 && tie {
        Verdict::KnownFail(detail)
    } else {
        Verdict::Fail(format!("{detail}; unexplained: {unexplained:?}"))
    }
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Verdict {
    let Some(dir) = std::env::var_os("CONNECTO_OASIS_DIR") else {
        return Verdict::Skip("set CONNECTO_OASIS_DIR to a directory with the OASIS-derived CSVs".into());
    };
    let dir = Path::new(&dir);
    let names = ["train_t0.csv", "train_t1.csv", "test_t0.csv", "test_t1_public.csv"];
    if let Some(missing) = names.iter().find(|n| !dir.join(n).is_file()) {
        return Verdict::Skip(format!("{} not found", dir.join(missing).display()));
    }
    let start = Instant::now();
    let run = || -> connecto_core::Result<(f64, f64, f64)> {
        let x = FeatureTable::load_csv_auto(dir.join(names[0]))?;
        let d = x.n_features();
        let train = LongitudinalDataset::new(x, Some(FeatureTable::load_csv(dir.join(names[1]), d)?))?;
        let test = FeatureTable::load_csv(dir.join(names[2]), d)?;
        let truth = FeatureTable::load_csv(dir.join(names[3]), d)?;
        let score = |team: u32| -> connecto_core::Result<(f64, f64)> {
            let pred = fit_pipeline(&load_team_config(team)?, &train)?.predict(&test)?;
            let pred = pred.select_ids(truth.subject_ids())?;
            let m = evaluate(pred.rows(), truth.rows(), PccMode::Flattened)?;
            Ok((m.mae, m.pcc))
        };
        let (mae1, pcc1) = score(1)?;
        let (mae13, _) = score(13)?;
        Ok((mae1, pcc1, mae13))
    };
    match run() {
        Ok((mae1, pcc1, mae13)) => {
            let ok = (0.028..=0.036).contains(&mae1) && pcc1 >= 0.74 && mae13 <= 0.037;
            let msg = format!(
                "team 1 public MAE {mae1:.4} PCC {pcc1:.3}, team 13 public MAE {mae13:.4} in {:.0}s",
                start.elapsed().as_secs_f64()
            );
            if ok { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
        }
        Err(e) => Verdict::Fail(format!("could not score the OASIS data: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 3

/// `[1 X] β = y` by LU on the normal equations; returns (weights, intercept).
fn normal_equations(x: &Matrix, y: &[f64]) -> (Vec<f64>, f64) {
    let (n, d) = x.shape();
    let a = Matrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let yv = Matrix::from_column_slice(n, 1, y);
    let beta = (a.transpose() * &a).lu().solve(&(a.transpose() * yv)).expect("full rank");
    ((1..=d).map(|j| beta[(j, 0)]).collect(), beta[(0, 0)])
}

/// Centred ridge system `(XcᵀXc + λI) w = Xcᵀ yc`.
fn ridge_equations(x: &Matrix, y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let (n, d) = x.shape();
    let xm: Vec<f64> = (0..d).map(|j| x.column(j).mean()).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let xc = Matrix::from_fn(n, d, |i, j| x[(i, j)] - xm[j]);
    let yc = Matrix::from_fn(n, 1, |i, _| y[i] - ym);
    let lhs = xc.transpose() * &xc + Matrix::identity(d, d) * lambda;
    let w = lhs.cholesky().expect("spd").solve(&(xc.transpose() * yc));
    let intercept = ym - (0..d).map(|j| w[(j, 0)] * xm[j]).sum::<f64>();
    (w.iter().copied().collect(), intercept)
}

fn linear_gap(m: &LinearModel, (w, b): &(Vec<f64>, f64)) -> f64 {
    m.weights.iter().zip(w).map(|(a, b)| (a - b).abs()).fold((m.intercept - b).abs(), f64::max)
}

fn oracle_linear() -> Result<String, String> {
    let (mut ols, mut ridge) = (0.0f64, 0.0f64);
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[3, 0]);
        let n = r.random_range(20..50);
        let d = r.random_range(1..8);
        let x = uniform(&mut r, n, d);
        let y: Vec<f64> = (0..n).map(|_| r.random::<f64>() * 4.0 - 2.0).collect();
        ols = ols.max(linear_gap(&fit_ols(&x, &y).map_err(|e| e.to_string())?, &normal_equations(&x, &y)));
        let lambda = r.random::<f64>() * 5.0;
        ridge = ridge.max(linear_gap(&fit_ridge(&x, &y, lambda).map_err(|e| e.to_string())?, &ridge_equations(&x, &y, lambda)));
    }
    if ols <= 1e-8 && ridge <= 1e-8 {
        Ok(format!("OLS {ols:.1e}, ridge {ridge:.1e}"))
    } else {
        Err(format!("OLS gap {ols:.1e}, ridge gap {ridge:.1e} exceed 1e-8"))
    }
}

fn oracle_pca() -> Result<String, String> {
    let mut worst = 0.0f64;
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[3, 1]);
        let n = r.random_range(15..40);
        let d = r.random_range(2..7);
        // Distinct column scales keep the spectrum well separated.
        let x = Matrix::from_fn(n, d, |_, j| (r.random::<f64>() - 0.5) * (j + 1) as f64);
        let k = r.random_range(1..=d);
        let pca = fit_pca(&x, k).map_err(|e| e.to_string())?;
        let means: Vec<f64> = (0..d).map(|j| x.column(j).mean()).collect();
        let xc = Matrix::from_fn(n, d, |i, j| x[(i, j)] - means[j]);
        let cov = xc.transpose() * &xc / (n - 1) as f64;
        let eig = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for c in 0..k {
            let v = eig.eigenvectors.column(order[c]);
            let dot: f64 = (0..d).map(|j| pca.components[(c, j)] * v[j]).sum();
            worst = worst.max((1.0 - dot.abs()).abs());
            let ev = eig.eigenvalues[order[c]];
            worst = worst.max((pca.explained_variance[c] - ev).abs() / ev.max(1e-12));
        }
    }
    if worst <= 1e-8 { Ok(format!("{worst:.1e}")) } else { Err(format!("PCA gap {worst:.1e}")) }
}

fn oracle_knn() -> Result<String, String> {
    let mut worst = 0.0f64;
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[3, 2]);
        let n = r.random_range(10..40);
        let d = r.random_range(1..6);
        let k = r.random_range(1..=n.min(7));
        // Coarse grid values force distance ties.
        let x = Matrix::from_fn(n, d, |_, _| r.random_range(0..4) as f64);
        let y = uniform(&mut r, n, 2);
        let q = Matrix::from_fn(6, d, |_, _| r.random_range(0..4) as f64);
        let model = fit_knn(&x, &y, k, Weighting::Uniform).map_err(|e| e.to_string())?;
        let pred = model.predict(&q);
        for i in 0..q.nrows() {
            let mut all: Vec<(usize, f64)> = (0..n)
                .map(|t| (t, (0..d).map(|j| (x[(t, j)] - q[(i, j)]).powi(2)).sum::<f64>()))
                .collect();
            all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            all.truncate(k);
            let row: Vec<f64> = q.row(i).iter().copied().collect();
            if model.neighbours(&row) != all {
                return Err(format!("instance {s} query {i}: neighbour sets differ"));
            }
            for c in 0..2 {
                let mean = all.iter().map(|&(t, _)| y[(t, c)]).sum::<f64>() / k as f64;
                worst = worst.max((pred[(i, c)] - mean).abs());
            }
        }
    }
    if worst <= 1e-12 { Ok(format!("neighbours identical, predictions {worst:.1e}")) } else { Err(format!("{worst:.1e}")) }
}

/// Optimality conditions of `(1/2n)‖yc − Zβ‖² + αρ‖β‖₁ + α(1−ρ)/2 ‖β‖²` on the
/// population-standardised design `Z`.
fn enet_kkt(x: &Matrix, y: &[f64], beta: &[f64], p: &ElasticNetParams) -> f64 {
    let (n, d) = x.shape();
    let nf = n as f64;
    let ym = y.iter().sum::<f64>() / nf;
    let z: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let m = x.column(j).mean();
            let sd = (x.column(j).iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf).sqrt();
            x.column(j).iter().map(|v| if sd > 0.0 { (v - m) / sd } else { 0.0 }).collect()
        })
        .collect();
    let resid: Vec<f64> = (0..n).map(|i| y[i] - ym - (0..d).map(|j| z[j][i] * beta[j]).sum::<f64>()).collect();
    let (l1, l2) = (p.alpha * p.l1_ratio, p.alpha * (1.0 - p.l1_ratio));
    (0..d)
        .map(|j| {
            let g = z[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf - l2 * beta[j];
            if beta[j] != 0.0 { (g - l1 * beta[j].signum()).abs() } else { (g.abs() - l1).max(0.0) }
        })
        .fold(0.0, f64::max)
}

fn oracle_enet() -> Result<String, String> {
    let mut worst_ratio = 0.0f64;
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[3, 3]);
        let n = r.random_range(20..50);
        let d = r.random_range(2..12);
        let x = uniform(&mut r, n, d);
        let y: Vec<f64> = (0..n).map(|i| x[(i, 0)] - 0.5 * x[(i, d - 1)] + 0.1 * r.random::<f64>()).collect();
        let p = ElasticNetParams {
            alpha: 10f64.powf(r.random_range(-3.0..0.0)),
            l1_ratio: r.random_range(0.05..=1.0),
            ..Default::default()
        };
        let fit = fit_elastic_net(&x, &y, &p).map_err(|e| e.to_string())?;
        worst_ratio = worst_ratio.max(enet_kkt(&x, &y, &fit.beta, &p) / p.tol);
    }
    if worst_ratio <= 10.0 {
        Ok(format!("max KKT residual {worst_ratio:.2}·tol"))
    } else {
        Err(format!("KKT residual {worst_ratio:.2}·tol"))
    }
}

fn oracle_voting() -> Result<String, String> {
    let specs = [
        LearnerSpec::Ridge { lambda: 0.5 },
        LearnerSpec::Knn { k: 3, weighting: Weighting::Uniform },
        LearnerSpec::Ols,
        LearnerSpec::Lasso { alpha: 0.01 },
    ];
    let mut worst = 0.0f64;
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[3, 4]);
        let n = r.random_range(15..40);
        let x = uniform(&mut r, n, 3);
        let y = uniform(&mut r, n, 2);
        let m = r.random_range(2..=specs.len());
        let members = specs[..m].iter().map(|sp| fit(sp, &x, &y, s)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let q = uniform(&mut r, 7, 3);
        let voted = voting_predict(&members, None, &q).map_err(|e| e.to_string())?;
        let mut mean = Matrix::zeros(7, 2);
        for member in &members {
            mean += member.predict(&q);
        }
        mean /= m as f64;
        worst = worst.max(max_abs_diff(&voted, &mean));
    }
    if worst <= 1e-12 { Ok(format!("{worst:.1e}")) } else { Err(format!("voting gap {worst:.1e}")) }
}

fn criterion_3() -> Verdict {
    let parts = [
        ("linear", oracle_linear()),
        ("pca", oracle_pca()),
        ("knn", oracle_knn()),
        ("elastic-net", oracle_enet()),
        ("voting", oracle_voting()),
    ];
    let msg = parts
        .iter()
        .map(|(name, r)| format!("{name}: {}", r.as_ref().unwrap_or_else(|e| e)))
        .collect::<Vec<_>>()
        .join("; ");
    if parts.iter().all(|(_, r)| r.is_ok()) {
        Verdict::Pass(format!("{INSTANCES} instances each; {msg}"))
    } else {
        Verdict::Fail(msg)
    }
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Verdict {
    let mut worst = 0.0f64;
    for s in 0..INSTANCES {
        let mut r = rng::stream(s, &[4]);
        let x = uniform(&mut r, 40, 20);
        let y = uniform(&mut r, 40, 20);
        let ffl = match fit_ffl(&LearnerSpec::Ols, &x, &y, s) {
            Ok(m) => m,
            Err(e) => return Verdict::Fail(e.to_string()),
        };
        // Joint multi-output normal equations.
        let a = Matrix::from_fn(40, 21, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
        let b = (a.transpose() * &a).lu().solve(&(a.transpose() * &y)).expect("full rank");
        let q = uniform(&mut r, 10, 20);
        let qa = Matrix::from_fn(10, 21, |i, j| if j == 0 { 1.0 } else { q[(i, j - 1)] });
        worst = worst.max(max_abs_diff(&ffl.predict(&q), &(qa * b)));
    }
    let msg = format!("{INSTANCES} random 40x20->20 problems, max prediction gap {worst:.1e}");
    if worst <= 1e-9 { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
}

// ---------------------------------------------------------------- criterion 5

/// Linear-interpolation quantile at position `(n − 1)q`.
fn quantile_oracle(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn criterion_5() -> Verdict {
    let mut r = rng::stream(5, &[]);
    let x = Matrix::from_fn(37, 100, |_, _| r.random::<f64>());
    let bounds = match iqr_bounds(&x, 1.5) {
        Ok(b) => b,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let mut exact = 0;
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        let (q1, q3) = (quantile_oracle(&col, 0.25), quantile_oracle(&col, 0.75));
        let iqr = q3 - q1;
        exact += (lo == q1 - 1.5 * iqr && hi == q3 + 1.5 * iqr) as usize;
    }

    // Rows sitting exactly on a bound are kept; one ulp past is removed.
    let base: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
    let (q1, q3) = (quantile_oracle(&base, 0.25), quantile_oracle(&base, 0.75));
    let upper = q3 + 1.5 * (q3 - q1);
    let with = |v: f64| {
        let mut c = base.clone();
        c[11] = v;
        Matrix::from_column_slice(12, 1, &c)
    };
    // Replacing the maximum leaves both quartiles unchanged.
    let on_bound = iqr_mask(&with(upper), 1.5, 0.0).map(|m| m.keep()[11]);
    let past_bound = iqr_mask(&with(upper.next_up()), 1.5, 0.0).map(|m| m.keep()[11]);
    let boundary_ok = matches!((on_bound, past_bound), (Ok(true), Ok(false)));

    let msg = format!("{exact}/100 columns bit-identical to the quantile oracle; bound-inclusive keep rule: {boundary_ok}");
    if exact == 100 && boundary_ok { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let sigma = 0.02;
    let cfg = SyntheticConfig::new(150, 35, 0.1, sigma, 6).expect("config");
    let ds = generate_synthetic(&cfg);
    let (k, seed) = (5, 0);
    let team = match cross_validate(&load_team_config(11).expect("team 11"), &ds, k, seed, PccMode::Flattened) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    // Baseline: every held-out subject gets the training mean of each feature.
    let y = ds.t1().expect("targets").rows();
    let mut base_pcc = Vec::new();
    for f in kfold_split(ds.n_subjects(), k, seed).expect("folds") {
        let means: Vec<f64> = (0..y.ncols()).map(|c| f.train.iter().map(|&i| y[(i, c)]).sum::<f64>() / f.train.len() as f64).collect();
        let pred = Matrix::from_fn(f.test.len(), y.ncols(), |_, c| means[c]);
        let truth = Matrix::from_fn(f.test.len(), y.ncols(), |i, c| y[(f.test[i], c)]);
        base_pcc.push(evaluate(&pred, &truth, PccMode::Flattened).expect("metrics").pcc);
    }
    let base = base_pcc.iter().sum::<f64>() / base_pcc.len() as f64;
    let floor = sigma * (2.0 / std::f64::consts::PI).sqrt();
    let msg = format!(
        "team 11 5-fold MAE {:.5} (bound {:.5}), PCC {:.3} vs per-feature-mean baseline {:.3} in {:.1}s",
        team.mean.mae,
        1.1 * floor,
        team.mean.pcc,
        base,
        start.elapsed().as_secs_f64()
    );
    if team.mean.mae <= 1.1 * floor && team.mean.pcc - base >= 0.2 { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
}

// ---------------------------------------------------------------- criterion 7

fn bench_once(data: &Path, out: &Path, jobs: &str) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_connecto"))
        .env_remove("CONNECTO_SEED")
        .args(["--jobs", jobs, "bench", "--pipelines", "all", "--seed", "11"])
        .arg("--train-t0")
        .arg(data.join("train_t0.csv"))
        .arg("--train-t1")
        .arg(data.join("train_t1.csv"))
        .arg("--test-t0")
        .arg(data.join("test_t0.csv"))
        .arg("--test-t1-public")
        .arg(data.join("test_t1_public.csv"))
        .arg("--test-t1-private")
        .arg(data.join("test_t1_private.csv"))
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("bench exited with {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    std::fs::read(out.join("results.json")).map_err(|e| e.to_string())
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    // Smallest cohort every bundled config accepts: 153 features cover the
    // largest k-best, and 56 rows per training fold cover the 50-component PCA.
    let synth = Command::new(env!("CARGO_BIN_EXE_connecto"))
        .env_remove("CONNECTO_SEED")
        .args(["synth", "--subjects", "70", "--test-subjects", "40", "--rois", "18", "--seed", "7", "--out"])
        .arg(dir.path().join("data"))
        .output();
    if !matches!(&synth, Ok(o) if o.status.success()) {
        return Verdict::Fail("synth failed".into());
    }
    let data = dir.path().join("data");
    let mut runs = Vec::new();
    for (i, jobs) in ["1", "1", "8", "8"].into_iter().enumerate() {
        match bench_once(&data, &dir.path().join(format!("run{i}")), jobs) {
            Ok(bytes) => runs.push((jobs, bytes)),
            Err(e) => return Verdict::Fail(e),
        }
    }
    let teams = serde_json::from_slice::<serde_json::Value>(&runs[0].1)
        .ok()
        .and_then(|v| v["teams"].as_array().map(|t| t.iter().filter(|t| t["error"].is_null()).count()))
        .unwrap_or(0);
    let same_1 = runs[0].1 == runs[1].1;
    let same_8 = runs[2].1 == runs[3].1;
    let across = runs[0].1 == runs[2].1;
    let msg = format!(
        "{teams}/{TEAM_COUNT} configs completed; identical results.json: jobs 1 {same_1}, jobs 8 {same_8}, across {across} in {:.0}s",
        start.elapsed().as_secs_f64()
    );
    if same_1 && same_8 && teams == TEAM_COUNT as usize { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Verdict {
    let cases: [(&[f64], &[f64]); 3] = [
        (
            &[0.031, 0.029, 0.035, 0.040, 0.027, 0.033, 0.030, 0.036, 0.034, 0.028],
            &[0.033, 0.030, 0.034, 0.043, 0.029, 0.036, 0.031, 0.035, 0.037, 0.030],
        ),
        (&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.5, 1.9, 3.7, 4.1, 5.9]),
        (&[0.2, 0.4, 0.1, 0.9, 0.5, 0.3, 0.8], &[0.25, 0.1, 0.3, 0.6, 0.55, 0.2, 0.9]),
    ];
    let mut worst = 0.0f64;
    for (a, b) in cases {
        let n = a.len() as f64;
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mean = d.iter().sum::<f64>() / n;
        let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let t = mean / (sd / n.sqrt());
        let oracle = 2.0 * StudentsT::new(0.0, 1.0, n - 1.0).expect("df").sf(t.abs());
        match paired_ttest(a, b) {
            Ok(p) => worst = worst.max((p - oracle).abs()),
            Err(e) => return Verdict::Fail(e.to_string()),
        }
    }
    let mut r = rng::stream(8, &[]);
    let names: Vec<String> = (0..5).map(|i| format!("t{i}")).collect();
    let errors: Vec<Vec<f64>> = (0..5).map(|_| (0..12).map(|_| r.random::<f64>()).collect()).collect();
    let shape_ok = match paired_ttest_matrix(&names, &errors) {
        Ok(m) => (0..5).all(|i| m.p[i][i] == 1.0 && (0..5).all(|j| m.p[i][j] == m.p[j][i])),
        Err(_) => false,
    };
    let msg = format!("max p-value gap {worst:.1e}; matrix symmetric with unit diagonal: {shape_ok}");
    if worst <= 1e-6 && shape_ok { Verdict::Pass(msg) } else { Verdict::Fail(msg) }
}

fn main() {
    // `cargo test -- <filter>` passes arguments; this target always runs in full.
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("1 rank protocol from the printed metric columns", criterion_1),
        ("2 OASIS score reproduction", criterion_2),
        ("3 oracle equivalence suite", criterion_3),
        ("4 FFL separability", criterion_4),
        ("5 IQR bounds and keep rule", criterion_5),
        ("6 synthetic recovery", criterion_6),
        ("7 bench determinism", criterion_7),
        ("8 paired t-test", criterion_8),
    ];
    let mut failed = false;
    for (name, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, msg) = match verdict {
            Verdict::Pass(m) => ("PASS", m),
            Verdict::KnownFail(m) => ("FAIL", m),
            Verdict::Fail(m) => {
                failed = true;
                ("FAIL", m)
            }
            Verdict::Skip(m) => ("SKIP", m),
        };
        println!("criterion {name}: {tag} ({secs:.1}s) {msg}");
    }
    if failed {
        eprintln!("acceptance: unexpected failure");
        std::process::exit(1);
    }
}
