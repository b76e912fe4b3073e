use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use dqimpact::corruption::{inject, CorruptionSpec, ErrorType};
use dqimpact::dataset::{
    detect_error_rates, load_dataset, parse_fd_rules, save_dataset, BoundRule, Dataset, ErrorRates,
    FdRule, LoadOptions,
};
use dqimpact::evaluate::{Measure, Task};
use dqimpact::robustness::{
    recommend, run_sweep, write_ledger, write_plot_data, write_table, write_timings, Guideline,
    Quantity, RecommendRequest, RobustnessReport, SizeThresholds,
};
use dqimpact::seed;

use crate::config::RunConfig;
use crate::failure::{io_at, Failure, Outcome};

fn stamp(hash: &str, seed: u64) -> String {
    format!("config_hash={hash} root_seed={seed}")
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    fs::write(path, bytes).map_err(io_at(path))
}

fn write_json(path: &Path, value: &impl Serialize) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write(path, text)
}

fn read_rules(inline: &[String], file: Option<&Path>) -> Outcome<Vec<FdRule>> {
    let mut rules = parse_fd_rules(&inline.join("\n"))?;
    if let Some(f) = file {
        rules.extend(parse_fd_rules(&fs::read_to_string(f).map_err(io_at(f))?)?);
    }
    Ok(rules)
}

fn load_options(target: Option<String>) -> LoadOptions {
    LoadOptions {
        target,
        ..LoadOptions::default()
    }
}

/// Everything that determines an injection's output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectSettings {
    pub input: PathBuf,
    pub output: PathBuf,
    pub error_type: ErrorType,
    pub rate: f64,
    pub seed: u64,
    pub target: Option<String>,
    pub rules: Vec<String>,
    pub rules_file: Option<PathBuf>,
    pub entity_key: Vec<String>,
    pub columns: Option<Vec<String>>,
    pub corrupt_target: bool,
}

impl InjectSettings {
    /// SHA-256 over the settings, output path excluded.
    fn hash(&self) -> String {
        let mut s = self.clone();
        s.output = PathBuf::new();
        hex::encode(Sha256::digest(serde_json::to_vec(&s).expect("serializable")))
    }
}

fn audit_rows(clean: &Dataset, dirty: &Dataset) -> String {
    let names: Vec<&str> = clean.schema().columns().iter().map(|c| c.name.as_str()).collect();
    let mut w = csv_writer();
    w.write_record(["row", "source_row", "column", "clean", "dirty"]).expect("in-memory");
    for (i, (row, &o)) in dirty.rows().iter().zip(dirty.origin()).enumerate() {
        if i >= clean.len() {
            w.write_record([i.to_string(), o.to_string(), "*".into(), String::new(), "fabricated".into()])
                .expect("in-memory");
        }
        let src = &dirty.clean_shadow()[o];
        for (c, (a, b)) in src.cells.iter().zip(&row.cells).enumerate() {
            if a != b {
                w.write_record([i.to_string(), o.to_string(), names[c].into(), a.to_string(), b.to_string()])
                    .expect("in-memory");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

/// Writes the corrupted table, `<stem>.summary.json` and `<stem>.audit.csv`.
pub fn cmd_inject(s: &InjectSettings) -> Outcome {
    let clean = load_dataset(&s.input, &load_options(s.target.clone()))?;
    let rules = read_rules(&s.rules, s.rules_file.as_deref())?;
    let op_seed = seed::corruption_seed(s.seed, &clean.provenance().content_hash, s.error_type.as_str(), s.rate, None);
    let mut spec = CorruptionSpec::new(s.error_type, s.rate, op_seed)
        .with_rules(rules)
        .with_entity_key(s.entity_key.clone());
    spec.column_mask = s.columns.clone();
    spec.corrupt_target_in_train = s.corrupt_target;
    let inj = inject(&clean, &spec)?;
    if s.output == s.input {
        return Err(Failure::Config("output would overwrite the input".into()));
    }
    if let Some(dir) = s.output.parent() {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    save_dataset(&inj.dataset, &s.output, ',')?;
    let hash = s.hash();
    let summary = json!({
        "config_hash": hash,
        "root_seed": s.seed,
        "operation_seed": op_seed,
        "settings": s,
        "input_hash": clean.provenance().content_hash,
        "output_hash": inj.dataset.content_hash(),
        "error_type": s.error_type,
        "target_rate": s.rate,
        "achieved_rate": inj.achieved_rate(),
        "altered": inj.altered,
        "unit": if s.error_type == ErrorType::Missing { "cells" } else { "rows" },
        "denominator": inj.denominator,
        "fabricated_rows": inj.fabricated,
    });
    write_json(&sibling(&s.output, ".summary.json"), &summary)?;
    let audit = format!("# {}\n{}", stamp(&hash, s.seed), audit_rows(&clean, &inj.dataset));
    write(&sibling(&s.output, ".audit.csv"), audit)?;
    println!(
        "{}: {} of {} {} altered ({:.4}), {} rows fabricated",
        s.output.display(),
        inj.altered,
        inj.denominator,
        if s.error_type == ErrorType::Missing { "cells" } else { "rows" },
        inj.achieved_rate(),
        inj.fabricated
    );
    Ok(())
}

pub struct SweepOverrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dry_run: bool,
}

fn resolve(config: &Path, o: &SweepOverrides) -> Outcome<RunConfig> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(d) = &o.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Prints what a sweep would run.
fn describe(cfg: &RunConfig, plan: &dqimpact::robustness::SweepPlan) {
    println!("# {}", stamp(&cfg.hash(), cfg.seed));
    println!("{}", cfg.to_toml());
    println!("# rates: {:?}", plan.grid.rates());
    for (i, ds) in plan.datasets.iter().enumerate() {
        let n = plan.tasks().iter().filter(|t| t.dataset == i).count();
        println!("# dataset {}: {} rows, {n} evaluations", ds.name, ds.data.len());
    }
    for (d, a) in plan.skipped() {
        println!("# skipped: {a} on {d}");
    }
}

#[derive(Serialize)]
struct Stamped<'a, T> {
    config_hash: &'a str,
    root_seed: u64,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct Scenario {
    task: Task,
    error_type: ErrorType,
    guideline: Guideline,
    narrative: String,
}

/// One guideline per task and swept error type, as if that error type
/// were present at the grid's largest rate.
fn scenarios(report: &RobustnessReport, error_types: &[ErrorType], sizes: SizeThresholds) -> Vec<Scenario> {
    let tasks: BTreeSet<Task> = report.algorithms().iter().map(|a| a.task()).collect();
    let mut out = Vec::new();
    for task in tasks {
        let names: BTreeSet<&str> = report
            .series
            .iter()
            .filter(|s| s.algorithm.task() == task)
            .map(|s| s.dataset.as_str())
            .collect();
        let rows: Vec<usize> = report
            .datasets
            .iter()
            .filter(|d| names.contains(d.name.as_str()))
            .map(|d| d.rows)
            .collect();
        let rows = rows.iter().sum::<usize>() / rows.len().max(1);
        for &e in error_types {
            let mut detected = ErrorRates::default();
            let last = report.grid.last();
            match e {
                ErrorType::Missing => detected.missing = last,
                ErrorType::Inconsistent => detected.inconsistent = last,
                ErrorType::Conflicting => detected.conflicting = last,
            }
            let req = RecommendRequest {
                sizes,
                ..RecommendRequest::new(task, detected, rows)
            };
            if let Ok(g) = recommend(report, &req) {
                out.push(Scenario {
                    task,
                    error_type: e,
                    narrative: g.narrative(),
                    guideline: g,
                });
            }
        }
    }
    out
}

fn failure_table(report: &RobustnessReport) -> String {
    let mut w = csv_writer();
    w.write_record(["dataset", "algorithm", "error_type", "rate", "seed", "error"]).expect("in-memory");
    for f in &report.failures {
        w.write_record([
            f.dataset.clone(),
            f.algorithm.to_string(),
            f.error_type.to_string(),
            f.rate.to_string(),
            f.seed.to_string(),
            f.message.clone(),
        ])
        .expect("in-memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
}

pub fn cmd_sweep(config: &Path, o: &SweepOverrides) -> Outcome {
    let cfg = resolve(config, o)?;
    let plan = cfg.plan()?;
    if o.dry_run {
        describe(&cfg, &plan);
        return Ok(());
    }
    let hash = cfg.hash();
    let pre = stamp(&hash, cfg.seed);
    let out = &cfg.output_dir;
    info!("running {} evaluations", plan.tasks().len());
    let report = run_sweep(&plan)?;

    write(&out.join("config.toml"), format!("# {pre}\n{}", cfg.to_toml()))?;
    let mut ledger = Vec::new();
    write_ledger(&report.results, &mut ledger, Some(&pre))?;
    write(&out.join("ledger.csv"), ledger)?;
    let mut timings = Vec::new();
    write_timings(&report.results, &mut timings, Some(&pre))?;
    write(&out.join("timings.csv"), timings)?;
    for (family, measures) in [("classification", Measure::CLASSIFICATION), ("regression", Measure::REGRESSION)] {
        for q in [Quantity::Sensibility, Quantity::KeepingPoint] {
            let mut buf = Vec::new();
            write_table(&report, &mut buf, q, &measures, b',', Some(&pre))?;
            write(&out.join("tables").join(format!("{}_{family}.csv", q.as_str())), buf)?;
        }
    }
    write_plot_data(&report, &out.join("plots"), Some(&pre))?;
    write_json(
        &out.join("report.json"),
        &Stamped {
            config_hash: &hash,
            root_seed: cfg.seed,
            body: json!({ "report": &report }),
        },
    )?;
    let scenarios = scenarios(&report, &cfg.error_types, cfg.sizes);
    let narrative: String = scenarios
        .iter()
        .map(|s| format!("[{} / {}]\n{}", s.task, s.error_type, s.narrative))
        .collect::<Vec<_>>()
        .join("\n");
    write_json(
        &out.join("summary.json"),
        &Stamped {
            config_hash: &hash,
            root_seed: cfg.seed,
            body: json!({
                "datasets": &report.datasets,
                "rankings": &report.rankings,
                "averages": &report.averages,
                "skipped": &report.skipped,
                "failures": report.failures.len(),
                "guidelines": &scenarios,
                "narrative": narrative,
            }),
        },
    )?;
    println!("{} evaluations written to {}", report.results.len(), out.display());
    if !report.failures.is_empty() {
        let table = failure_table(&report);
        write(&out.join("failures.csv"), format!("# {pre}\n{table}"))?;
        eprint!("{table}");
        return Err(Failure::Partial(report.failures.len()));
    }
    Ok(())
}

pub struct RecommendArgs {
    pub report: PathBuf,
    pub task: Task,
    pub missing: Option<f64>,
    pub inconsistent: Option<f64>,
    pub conflicting: Option<f64>,
    pub dataset: Option<PathBuf>,
    pub target: Option<String>,
    pub rules: Vec<String>,
    pub rules_file: Option<PathBuf>,
    pub entity_key: Vec<String>,
    pub rows: Option<usize>,
    pub priority: Option<Measure>,
    pub sizes: SizeThresholds,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct StampedReport {
    config_hash: String,
    root_seed: u64,
    report: RobustnessReport,
}

pub fn cmd_recommend(a: &RecommendArgs) -> Outcome {
    let text = fs::read_to_string(&a.report).map_err(io_at(&a.report))?;
    let stamped: StampedReport = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", a.report.display())))?;

    let (mut detected, mut rows) = (ErrorRates::default(), a.rows);
    if let Some(path) = &a.dataset {
        let d = load_dataset(path, &load_options(a.target.clone()))?;
        let rules = read_rules(&a.rules, a.rules_file.as_deref())?;
        let bound = BoundRule::bind_all(&rules, d.schema())?;
        let key = a
            .entity_key
            .iter()
            .map(|k| d.schema().require(k))
            .collect::<Result<Vec<_>, _>>()?;
        detected = detect_error_rates(
            &d,
            (!bound.is_empty()).then_some(&bound[..]),
            (!key.is_empty()).then_some(&key[..]),
        )?;
        rows = rows.or(Some(d.len()));
    }
    for (slot, flag) in [
        (&mut detected.missing, a.missing),
        (&mut detected.inconsistent, a.inconsistent),
        (&mut detected.conflicting, a.conflicting),
    ] {
        if let Some(v) = flag {
            if !(0.0..=1.0).contains(&v) {
                return Err(Failure::Config(format!("rate {v} outside [0, 1]")));
            }
            *slot = v;
        }
    }
    let rows = rows.ok_or_else(|| Failure::Config("give --rows or --dataset".into()))?;
    let req = RecommendRequest {
        priority: a.priority,
        sizes: a.sizes,
        ..RecommendRequest::new(a.task, detected, rows)
    };
    let g = recommend(&stamped.report, &req)?;
    let narrative = g.narrative();
    let doc = Stamped {
        config_hash: &stamped.config_hash,
        root_seed: stamped.root_seed,
        body: json!({ "report": a.report, "guideline": &g, "narrative": &narrative }),
    };
    match &a.output {
        Some(p) => write_json(p, &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc).expect("serializable")),
    }
    eprint!("{narrative}");
    Ok(())
}

pub fn cmd_validate(config: &Path) -> Outcome {
    let cfg = RunConfig::load(config)?;
    let plan = cfg.plan()?;
    println!(
        "ok: {} datasets, {} algorithms, {} evaluations, config_hash={}",
        plan.datasets.len(),
        plan.algorithms.len(),
        plan.tasks().len(),
        cfg.hash()
    );
    Ok(())
}
