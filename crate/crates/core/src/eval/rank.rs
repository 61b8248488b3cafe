use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Public,
    Private,
    CvFold(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub team: String,
    pub split: Split,
    pub mae: f64,
    pub mse: f64,
    pub pcc: f64,
}

impl ScoreRecord {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mae.is_finite()
            && self.mse.is_finite()
            && self.pcc.is_finite()
            && self.mae >= 0.0
            && self.mse >= 0.0
            && (-1.0..=1.0).contains(&self.pcc);
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid score record for {} ({:?})", self.team, self.split)))
        }
    }
}

/// The six ranking columns of one team: `[public, private, cv]` per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamScores {
    pub team: String,
    pub mae: [f64; 3],
    pub pcc: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    /// Rank of the average of the combined ranks.
    #[default]
    Mean,
    /// Rank of the product of the combined ranks.
    Product,
}

impl Aggregator {
    fn combine(self, ranks: &[usize]) -> f64 {
        match self {
            Aggregator::Mean => ranks.iter().sum::<usize>() as f64 / ranks.len() as f64,
            Aggregator::Product => ranks.iter().map(|&r| r as f64).product(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub team: String,
    pub mae_local: [usize; 3],
    pub pcc_local: [usize; 3],
    pub mae_rank: usize,
    pub pcc_rank: usize,
    pub final_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub aggregator: Aggregator,
    /// Input team order.
    pub rows: Vec<RankRow>,
}

impl RankTable {
    pub fn row(&self, team: &str) -> Option<&RankRow> {
        self.rows.iter().find(|r| r.team == team)
    }

    /// Rows by final rank; ties keep input order.
    pub fn standings(&self) -> Vec<&RankRow> {
        let mut out: Vec<&RankRow> = self.rows.iter().collect();
        out.sort_by_key(|r| r.final_rank);
        out
    }
}

/// Competition ranking of a column; ties share the minimum rank.
fn column(values: impl Iterator<Item = f64>, ascending: bool) -> Vec<usize> {
    stats::min_rank(&values.collect::<Vec<_>>(), ascending)
}

/// Aggregates already-computed local ranks into measure and final ranks.
pub fn rank_from_local(
    teams: &[String],
    mae_local: &[[usize; 3]],
    pcc_local: &[[usize; 3]],
    aggregator: Aggregator,
) -> Result<RankTable> {
    if teams.len() != mae_local.len() || teams.len() != pcc_local.len() {
        return Err(Error::Shape("local rank columns differ in length".into()));
    }
    let measure = |local: &[[usize; 3]]| column(local.iter().map(|r| aggregator.combine(r)), true);
    let mae_rank = measure(mae_local);
    let pcc_rank = measure(pcc_local);
    let final_rank = column((0..teams.len()).map(|i| aggregator.combine(&[mae_rank[i], pcc_rank[i]])), true);
    let rows = (0..teams.len())
        .map(|i| RankRow {
            team: teams[i].clone(),
            mae_local: mae_local[i],
            pcc_local: pcc_local[i],
            mae_rank: mae_rank[i],
            pcc_rank: pcc_rank[i],
            final_rank: final_rank[i],
        })
        .collect();
    Ok(RankTable { aggregator, rows })
}

/// Ranks teams from their six score columns (MAE ascending, PCC descending).
pub fn rank_teams(scores: &[TeamScores], aggregator: Aggregator) -> Result<RankTable> {
    if scores.is_empty() {
        return Err(Error::Input("no teams to rank".into()));
    }
    for s in scores {
        if s.mae.iter().chain(&s.pcc).any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite score for {}", s.team)));
        }
    }
    let local = |get: &dyn Fn(&TeamScores) -> [f64; 3], ascending: bool| {
        let cols: Vec<Vec<usize>> = (0..3).map(|c| column(scores.iter().map(|s| get(s)[c]), ascending)).collect();
        (0..scores.len()).map(|i| [cols[0][i], cols[1][i], cols[2][i]]).collect::<Vec<_>>()
    };
    let mae_local = local(&|s| s.mae, true);
    let pcc_local = local(&|s| s.pcc, false);
    let teams: Vec<String> = scores.iter().map(|s| s.team.clone()).collect();
    rank_from_local(&teams, &mae_local, &pcc_local, aggregator)
}

/// Groups records by team (first-appearance order); the cv column is the
/// mean over that team's folds.
pub fn team_scores(records: &[ScoreRecord]) -> Result<Vec<TeamScores>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_team: BTreeMap<&str, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        r.validate()?;
        if !by_team.contains_key(r.team.as_str()) {
            order.push(r.team.clone());
        }
        by_team.entry(&r.team).or_default().push(r);
    }
    order
        .iter()
        .map(|team| {
            let recs = &by_team[team.as_str()];
            let find = |split: Split| {
                let hits: Vec<_> = recs.iter().filter(|r| r.split == split).collect();
                match hits.as_slice() {
                    [one] => Ok(**one),
                    [] => Err(Error::Input(format!("team {team} has no {split:?} score"))),
                    _ => Err(Error::Input(format!("team {team} has duplicate {split:?} scores"))),
                }
            };
            let public = find(Split::Public)?;
            let private = find(Split::Private)?;
            let folds: Vec<&&ScoreRecord> = recs.iter().filter(|r| matches!(r.split, Split::CvFold(_))).collect();
            if folds.is_empty() {
                return Err(Error::Input(format!("team {team} has no cross-validation scores")));
            }
            let cv_mae = stats::mean(&folds.iter().map(|r| r.mae).collect::<Vec<_>>());
            let cv_pcc = stats::mean(&folds.iter().map(|r| r.pcc).collect::<Vec<_>>());
            Ok(TeamScores {
                team: team.clone(),
                mae: [public.mae, private.mae, cv_mae],
                pcc: [public.pcc, private.pcc, cv_pcc],
            })
        })
        .collect()
}

/// Full protocol from raw score records.
pub fn compute_rank_table(records: &[ScoreRecord], aggregator: Aggregator) -> Result<RankTable> {
    rank_teams(&team_scores(records)?, aggregator)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde::Deserialize;

    #[derive(Deserialize)]
    pub(crate) struct PrintedRow {
        pub team: u32,
        pub mae: [f64; 3],
        pub maer: [usize; 3],
        #[serde(rename = "maeR")]
        pub mae_rank: usize,
        pub pcc: [f64; 3],
        pub pccr: [usize; 3],
        #[serde(rename = "pccR")]
        pub pcc_rank: usize,
        #[serde(rename = "final")]
        pub final_rank: usize,
    }

    pub(crate) fn printed() -> Vec<PrintedRow> {
        serde_json::from_str(include_str!("../../tests/data/table2.json")).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("Team-{i}")).collect()
    }

    #[test]
    fn three_way_tie_from_measure_ranks() {
        // Measure ranks (1,3), (2,2), (3,1), (4,4) expressed through constant local ranks.
        let mae = [[1; 3], [2; 3], [3; 3], [4; 3]];
        let pcc = [[3; 3], [2; 3], [1; 3], [4; 3]];
        let t = rank_from_local(&names(4), &mae, &pcc, Aggregator::Mean).unwrap();
        let got: Vec<(usize, usize, usize)> = t.rows.iter().map(|r| (r.mae_rank, r.pcc_rank, r.final_rank)).collect();
        assert_eq!(got, vec![(1, 3, 1), (2, 2, 1), (3, 1, 1), (4, 4, 4)]);
    }

    #[test]
    fn printed_local_ranks_aggregate_to_printed_standings() {
        let rows = printed();
        let teams: Vec<String> = rows.iter().map(|r| format!("Team-{}", r.team)).collect();
        let mae: Vec<_> = rows.iter().map(|r| r.maer).collect();
        let pcc: Vec<_> = rows.iter().map(|r| r.pccr).collect();
        let t = rank_from_local(&teams, &mae, &pcc, Aggregator::Mean).unwrap();
        for (row, want) in t.rows.iter().zip(&rows) {
            assert_eq!((row.mae_rank, row.pcc_rank, row.final_rank), (want.mae_rank, want.pcc_rank, want.final_rank), "{}", row.team);
        }
        for team in ["Team-1", "Team-2", "Team-11"] {
            assert_eq!(t.row(team).unwrap().final_rank, 1);
        }
        assert_eq!(t.row("Team-13").unwrap().final_rank, 4);
    }

    #[test]
    fn total_tie() {
        let s: Vec<TeamScores> =
            names(5).into_iter().map(|team| TeamScores { team, mae: [0.03; 3], pcc: [0.7; 3] }).collect();
        let t = rank_teams(&s, Aggregator::Mean).unwrap();
        assert!(t.rows.iter().all(|r| r.final_rank == 1 && r.mae_local == [1; 3]));
    }

    #[test]
    fn product_aggregator_differs_from_mean() {
        // Measure ranks (1,3), (2,2), (3,1): equal means, products 3, 4, 3.
        let mae = [[1; 3], [2; 3], [3; 3]];
        let pcc = [[3; 3], [2; 3], [1; 3]];
        let m = rank_from_local(&names(3), &mae, &pcc, Aggregator::Mean).unwrap();
        assert!(m.rows.iter().all(|r| r.final_rank == 1));
        let p = rank_from_local(&names(3), &mae, &pcc, Aggregator::Product).unwrap();
        let got: Vec<usize> = p.rows.iter().map(|r| r.final_rank).collect();
        assert_eq!(got, vec![1, 3, 1]);
    }

    #[test]
    fn rounded_values_never_rank_worse_than_printed() {
        // Rounding is monotone, so it can merge teams but never reorder them:
        // a recomputed competition rank is at most the printed one.
        let rows = printed();
        let s: Vec<TeamScores> =
            rows.iter().map(|r| TeamScores { team: r.team.to_string(), mae: r.mae, pcc: r.pcc }).collect();
        let t = rank_teams(&s, Aggregator::Mean).unwrap();
        for (row, want) in t.rows.iter().zip(&rows) {
            for c in 0..3 {
                assert!(row.mae_local[c] <= want.maer[c], "team {} mae column {c}", want.team);
                assert!(row.pcc_local[c] <= want.pccr[c], "team {} pcc column {c}", want.team);
            }
        }
    }

    fn records(team: &str, folds: usize) -> Vec<ScoreRecord> {
        let mut v = vec![
            ScoreRecord { team: team.into(), split: Split::Public, mae: 0.03, mse: 0.002, pcc: 0.8 },
            ScoreRecord { team: team.into(), split: Split::Private, mae: 0.034, mse: 0.002, pcc: 0.75 },
        ];
        for i in 0..folds {
            v.push(ScoreRecord {
                team: team.into(),
                split: Split::CvFold(i),
                mae: 0.035 + i as f64 * 1e-3,
                mse: 0.002,
                pcc: 0.7,
            });
        }
        v
    }

    #[test]
    fn records_group_and_average_folds() {
        let mut r = records("A", 5);
        r.extend(records("B", 5));
        let s = team_scores(&r).unwrap();
        assert_eq!(s[0].team, "A");
        assert!((s[0].mae[2] - 0.037).abs() < 1e-15);
        let t = compute_rank_table(&r, Aggregator::Mean).unwrap();
        assert!(t.rows.iter().all(|r| r.final_rank == 1));
    }

    #[test]
    fn missing_score_is_an_input_error() {
        let mut r = records("A", 5);
        r.extend(records("B", 0));
        assert!(matches!(compute_rank_table(&r, Aggregator::Mean), Err(Error::Input(_))));
        let mut r = records("A", 5);
        r.retain(|x| x.split != Split::Private);
        assert!(matches!(compute_rank_table(&r, Aggregator::Mean), Err(Error::Input(_))));
    }

    fn arb_scores() -> impl Strategy<Value = Vec<TeamScores>> {
        prop::collection::vec((prop::array::uniform3(0u8..6), prop::array::uniform3(0u8..6)), 2..12).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (m, p))| TeamScores {
                    team: format!("T{i}"),
                    mae: m.map(|x| 0.03 + x as f64 * 1e-3),
                    pcc: p.map(|x| 0.6 + x as f64 * 0.02),
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn monotone_rescaling_is_invariant(s in arb_scores()) {
            let base = rank_teams(&s, Aggregator::Mean).unwrap();
            let scaled: Vec<TeamScores> = s
                .iter()
                .map(|t| TeamScores { team: t.team.clone(), mae: t.mae.map(|v| (v * 40.0).exp()), pcc: t.pcc.map(|v| v.powi(3) - 2.0) })
                .collect();
            prop_assert_eq!(base, rank_teams(&scaled, Aggregator::Mean).unwrap());
        }

        #[test]
        fn dominance_respected(s in arb_scores()) {
            let t = rank_teams(&s, Aggregator::Mean).unwrap();
            for a in 0..s.len() {
                for b in 0..s.len() {
                    let dom = (0..3).all(|c| s[a].mae[c] <= s[b].mae[c] && s[a].pcc[c] >= s[b].pcc[c]);
                    if dom {
                        prop_assert!(t.rows[a].final_rank <= t.rows[b].final_rank);
                    }
                }
            }
        }

        #[test]
        fn final_rank_follows_average(s in arb_scores()) {
            let t = rank_teams(&s, Aggregator::Mean).unwrap();
            for a in &t.rows {
                for b in &t.rows {
                    if a.mae_rank + a.pcc_rank < b.mae_rank + b.pcc_rank {
                        prop_assert!(a.final_rank < b.final_rank);
                    }
                }
            }
        }
    }
}
