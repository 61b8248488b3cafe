use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use connecto_core::bench::{self, BenchInputs, BenchOptions, TtestPopulation};
use connecto_core::connectome::{generate_synthetic, FeatureTable, LongitudinalDataset, SyntheticConfig};
use connecto_core::eval::{residual_matrix, Aggregator, PccMode};
use connecto_core::pipeline::{fit_pipeline, load_team_config, team_config_source, FittedPipeline, PipelineConfig, TEAM_COUNT};

use crate::args::{AggregatorArg, BenchArgs, Cli, Command, ConfigArgs, PccModeArg, PredictArgs, SynthArgs, TtestArg};
use crate::manifest::Recorder;

type Failure = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    PartialFailure,
    UsageOrInput,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        ExitCode::from(match o {
            Outcome::Success => 0,
            Outcome::PartialFailure => 1,
            Outcome::UsageOrInput => 2,
        })
    }
}

pub fn run(cli: Cli) -> Result<Outcome, Failure> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    pool.install(|| match cli.command {
        Command::Bench(a) => bench(a),
        Command::Predict(a) => predict(a),
        Command::Synth(a) => synth(a),
        Command::Config(a) => config(a),
    })
}

/// `CONNECTO_SEED` wins over the flag.
fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var("CONNECTO_SEED") {
        Ok(v) => Ok(v.trim().parse().map_err(|_| format!("CONNECTO_SEED `{v}` is not an unsigned integer"))?),
        Err(_) => Ok(flag),
    }
}

fn require_file(p: &Path) -> Result<(), Failure> {
    if p.is_file() {
        Ok(())
    } else {
        Err(format!("input file not found: {}", p.display()).into())
    }
}

fn load_table(p: &Path, d: Option<usize>) -> Result<FeatureTable, Failure> {
    require_file(p)?;
    Ok(match d {
        Some(d) => FeatureTable::load_csv(p, d)?,
        None => FeatureTable::load_csv_auto(p)?,
    })
}

fn parse_teams(spec: &str) -> Result<Vec<u32>, Failure> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("all") {
        return Ok((1..=TEAM_COUNT).collect());
    }
    if spec.is_empty() || spec.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    let mut teams = Vec::new();
    for part in spec.split(',') {
        let t: u32 = part.trim().parse().map_err(|_| format!("`{part}` is not a team id"))?;
        if !(1..=TEAM_COUNT).contains(&t) {
            return Err(format!("team {t} is outside 1..={TEAM_COUNT}").into());
        }
        if !teams.contains(&t) {
            teams.push(t);
        }
    }
    Ok(teams)
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>, written: &mut Vec<PathBuf>) -> Result<(), Failure> {
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

fn bench(a: BenchArgs) -> Result<Outcome, Failure> {
    let rec = Recorder::start();
    let seed = effective_seed(a.seed)?;
    let train_t0 = load_table(&a.train_t0, None)?;
    let d = train_t0.n_features();
    let train = LongitudinalDataset::new(train_t0, Some(load_table(&a.train_t1, Some(d))?))?;
    let inputs = BenchInputs {
        train,
        test_t0: load_table(&a.test_t0, Some(d))?,
        public: a.test_t1_public.as_deref().map(|p| load_table(p, Some(d))).transpose()?,
        private: a.test_t1_private.as_deref().map(|p| load_table(p, Some(d))).transpose()?,
    };

    let mut configs = Vec::new();
    let mut config_text = String::new();
    for t in parse_teams(&a.pipelines)? {
        config_text.push_str(team_config_source(t)?);
        configs.push(load_team_config(t)?);
    }
    for p in &a.configs {
        require_file(p)?;
        let text = fs::read_to_string(p)?;
        configs.push(PipelineConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))?);
        config_text.push_str(&text);
    }
    let options = BenchOptions {
        folds: a.folds,
        seed,
        pcc_mode: match a.pcc_mode {
            PccModeArg::Flattened => PccMode::Flattened,
            PccModeArg::PerSubject => PccMode::PerSubject,
        },
        aggregator: match a.aggregator {
            AggregatorArg::Mean => Aggregator::Mean,
            AggregatorArg::Product => Aggregator::Product,
        },
        ttest: match a.ttest {
            TtestArg::PerSubject => TtestPopulation::PerSubject,
            TtestArg::PerFold => TtestPopulation::PerFold,
        },
    };
    let results = bench::run_bench(&configs, &inputs, &options)?;

    fs::create_dir_all(&a.out)?;
    let mut written = Vec::new();
    write(a.out.join("results.json"), results.to_json()? + "\n", &mut written)?;
    if results.rank_table.is_some() {
        write(a.out.join("table2.csv"), bench::table2_csv(&results)?, &mut written)?;
    }
    if let Some(m) = &results.pvalues_mae {
        write(a.out.join("pvalues_mae.csv"), bench::pvalues_csv(m)?, &mut written)?;
    }
    if let Some(m) = &results.pvalues_pcc {
        write(a.out.join("pvalues_pcc.csv"), bench::pvalues_csv(m)?, &mut written)?;
    }
    if a.residuals {
        let truth: Vec<&FeatureTable> = [&inputs.public, &inputs.private].into_iter().flatten().collect();
        for team in results.teams.iter().filter(|t| t.error.is_none()) {
            let Some(pred) = &team.predictions else { continue };
            let dir = a.out.join("residuals").join(&team.team);
            fs::create_dir_all(&dir)?;
            for table in &truth {
                for (i, id) in table.subject_ids().iter().enumerate() {
                    let p = pred.row(pred.position(id).ok_or_else(|| format!("no prediction for {id}"))?);
                    let m = residual_matrix(&p, &table.row(i))?;
                    let body: String = m
                        .weights()
                        .row_iter()
                        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
                        .collect();
                    write(dir.join(format!("{id}.csv")), body, &mut written)?;
                }
            }
        }
    }

    let mut input_paths: Vec<&Path> = vec![&a.train_t0, &a.train_t1, &a.test_t0];
    input_paths.extend(a.test_t1_public.as_deref());
    input_paths.extend(a.test_t1_private.as_deref());
    input_paths.extend(a.configs.iter().map(PathBuf::as_path));
    let manifest = rec.finish(seed, &config_text, &input_paths, &written)?;
    fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;

    for t in results.failures() {
        eprintln!("pipeline {} failed: {}", t.team, t.error.as_deref().unwrap_or(""));
    }
    if let Some(table) = &results.rank_table {
        for row in table.standings() {
            println!("{:>3}  {:<12} mae rank {:>2}  pcc rank {:>2}", row.final_rank, row.team, row.mae_rank, row.pcc_rank);
        }
    }
    Ok(if results.failures().next().is_some() { Outcome::PartialFailure } else { Outcome::Success })
}

fn predict(a: PredictArgs) -> Result<Outcome, Failure> {
    let rec = Recorder::start();
    let mut inputs: Vec<&Path> = Vec::new();
    let (fitted, config_text, seed) = if let Some(model) = &a.model {
        require_file(model)?;
        inputs.push(model);
        let fp = FittedPipeline::load(model)?;
        let text = fp.config().to_toml()?;
        let seed = fp.config().seed;
        (fp, text, seed)
    } else {
        let (mut cfg, text) = match (&a.config, a.team) {
            (Some(p), None) => {
                require_file(p)?;
                inputs.push(p);
                let text = fs::read_to_string(p)?;
                (PipelineConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))?, text)
            }
            (None, Some(t)) => (load_team_config(t)?, team_config_source(t)?.to_string()),
            _ => return Err("predict needs --model, --config or --team".into()),
        };
        let (Some(t0), Some(t1)) = (&a.train_t0, &a.train_t1) else {
            return Err("fitting a pipeline needs --train-t0 and --train-t1".into());
        };
        inputs.extend([t0.as_path(), t1.as_path()]);
        cfg.seed = effective_seed(a.seed.unwrap_or(cfg.seed))?;
        let x = load_table(t0, None)?;
        let d = x.n_features();
        let train = LongitudinalDataset::new(x, Some(load_table(t1, Some(d))?))?;
        let seed = cfg.seed;
        (fit_pipeline(&cfg, &train)?, text, seed)
    };
    let test = load_table(&a.input, None)?;
    inputs.push(&a.input);
    let pred = fitted.predict(&test)?;
    let mut written = Vec::new();
    pred.save_csv(&a.out)?;
    written.push(a.out.clone());
    if let Some(p) = &a.save_model {
        fitted.save(p)?;
        written.push(p.clone());
    }
    let manifest = rec.finish(seed, &config_text, &inputs, &written)?;
    let mut mpath = a.out.clone().into_os_string();
    mpath.push(".manifest.json");
    fs::write(mpath, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(Outcome::Success)
}

fn synth(a: SynthArgs) -> Result<Outcome, Failure> {
    let rec = Recorder::start();
    let seed = effective_seed(a.seed)?;
    if a.subjects == 0 || a.test_subjects < 2 {
        return Err("synth needs at least 1 training and 2 test subjects".into());
    }
    let total = a.subjects + a.test_subjects;
    let all = generate_synthetic(&SyntheticConfig::new(total, a.rois, a.drift, a.noise, seed)?);
    let idx = |r: std::ops::Range<usize>| r.collect::<Vec<_>>();
    let train = all.select_rows(&idx(0..a.subjects));
    let test = all.select_rows(&idx(a.subjects..total));
    let test_t1 = test.targets("synth")?;
    let half = a.test_subjects / 2;
    fs::create_dir_all(&a.out)?;
    let mut written = Vec::new();
    let tables = [
        ("train_t0.csv", train.t0().clone()),
        ("train_t1.csv", train.targets("synth")?.clone()),
        ("test_t0.csv", test.t0().clone()),
        ("test_t1.csv", test_t1.clone()),
        ("test_t1_public.csv", test_t1.select_rows(&idx(0..half))),
        ("test_t1_private.csv", test_t1.select_rows(&idx(half..a.test_subjects))),
    ];
    for (name, table) in tables {
        let p = a.out.join(name);
        table.save_csv(&p)?;
        written.push(p);
    }
    let params = format!(
        "subjects={} test_subjects={} rois={} drift={} noise={}",
        a.subjects, a.test_subjects, a.rois, a.drift, a.noise
    );
    let manifest = rec.finish(seed, &params, &[], &written)?;
    fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(Outcome::Success)
}

fn config(a: ConfigArgs) -> Result<Outcome, Failure> {
    print!("{}", team_config_source(a.team)?);
    Ok(Outcome::Success)
}
