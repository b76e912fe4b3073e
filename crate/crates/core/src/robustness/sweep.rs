//! Rate sweeps over datasets, algorithms and error types.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{keeping_index, total_variation, RateGrid};
use crate::corruption::{CorruptionSpec, ErrorType};
use crate::dataset::{Dataset, FdRule};
use crate::evaluate::{cross_validate, Algorithm, AlgorithmSpec, CvOptions, EvalResult, Measure, Task};
use crate::seed;
use crate::{Error, Result};

/// Degradation tolerance `k` per measure family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// For precision, recall and F-measure.
    pub classification: f64,
    /// For RMSD, NRMSD and CV(RMSD).
    pub regression: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            classification: 0.10,
            regression: 0.10,
        }
    }
}

impl Thresholds {
    pub fn for_measure(&self, m: Measure) -> f64 {
        if Measure::CLASSIFICATION.contains(&m) {
            self.classification
        } else {
            self.regression
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classification > 0.0 && self.regression > 0.0 {
            Ok(())
        } else {
            Err(Error::Config("thresholds must be positive".into()))
        }
    }
}

/// One dataset of a sweep with what its corruptions need.
#[derive(Clone, Debug)]
pub struct SweepDataset {
    pub name: String,
    pub data: Dataset,
    pub rules: Vec<FdRule>,
    pub entity_key: Vec<String>,
    pub column_mask: Option<Vec<String>>,
    /// Restricts the plan's algorithms on this dataset.
    pub algorithms: Option<Vec<Algorithm>>,
}

impl SweepDataset {
    pub fn new(name: impl Into<String>, data: Dataset) -> SweepDataset {
        SweepDataset {
            name: name.into(),
            data,
            rules: Vec::new(),
            entity_key: Vec::new(),
            column_mask: None,
            algorithms: None,
        }
    }

    fn accepts(&self, algo: Algorithm) -> bool {
        let categorical = self.data.schema().has_categorical_target();
        let fits = match algo.task() {
            Task::Regression => !categorical,
            _ => categorical,
        };
        fits && self.algorithms.as_ref().is_none_or(|list| list.contains(&algo))
    }

    fn corruption(&self, error_type: ErrorType, rate: f64, seed: u64) -> CorruptionSpec {
        let mut spec = CorruptionSpec::new(error_type, rate, seed)
            .with_rules(self.rules.clone())
            .with_entity_key(self.entity_key.clone());
        spec.column_mask = self.column_mask.clone();
        spec
    }
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub datasets: Vec<SweepDataset>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub error_types: Vec<ErrorType>,
    pub grid: RateGrid,
    pub root_seed: u64,
    /// Seeded repetitions per grid point; the series use their mean.
    pub repeats: usize,
    pub thresholds: Thresholds,
    pub cv: CvOptions,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms".into()));
        }
        if self.error_types.is_empty() {
            return Err(Error::Config("no error types".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        self.grid.validate()?;
        if self.grid.start != 0.0 {
            return Err(Error::Config("the rate grid must start at 0".into()));
        }
        self.thresholds.validate()?;
        for a in &self.algorithms {
            a.validate()?;
        }
        Ok(())
    }

    /// Every (dataset, algorithm, error type, rate, repeat) evaluation, in
    /// a fixed order.
    pub fn tasks(&self) -> Vec<SweepTask> {
        let rates = self.grid.rates();
        let mut out = Vec::new();
        for (di, ds) in self.datasets.iter().enumerate() {
            let hash = &ds.data.provenance().content_hash;
            for (ai, algo) in self.algorithms.iter().enumerate() {
                if !ds.accepts(algo.algorithm()) {
                    continue;
                }
                for &error_type in &self.error_types {
                    for (ri, &rate) in rates.iter().enumerate() {
                        let point =
                            seed::corruption_seed(self.root_seed, hash, error_type.as_str(), rate, None);
                        for repeat in 0..self.repeats {
                            out.push(SweepTask {
                                dataset: di,
                                algorithm: ai,
                                error_type,
                                rate_index: ri,
                                rate,
                                repeat,
                                seed: seed::child(point, "repeat", repeat as u64),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// (dataset, algorithm) pairs left out because the target kind or the
    /// dataset's algorithm list rules them out.
    pub fn skipped(&self) -> Vec<(String, Algorithm)> {
        let mut out = Vec::new();
        for ds in &self.datasets {
            for a in &self.algorithms {
                if !ds.accepts(a.algorithm()) {
                    out.push((ds.name.clone(), a.algorithm()));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepTask {
    pub dataset: usize,
    pub algorithm: usize,
    pub error_type: ErrorType,
    pub rate_index: usize,
    pub rate: f64,
    pub repeat: usize,
    pub seed: u64,
}

/// Corrupts and cross-validates one sweep point.
pub fn evaluate_task(plan: &SweepPlan, task: &SweepTask) -> Result<EvalResult> {
    let ds = &plan.datasets[task.dataset];
    let spec = ds.corruption(task.error_type, task.rate, task.seed);
    cross_validate(&ds.data, &plan.algorithms[task.algorithm], &spec, &plan.cv, task.seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub rows: usize,
    pub content_hash: String,
}

/// One measure of one (dataset, algorithm, error type) combination along
/// the grid, averaged over repeats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub error_type: ErrorType,
    pub measure: Measure,
    pub rates: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub sensibility: Option<f64>,
    pub keeping_point: Option<f64>,
    pub notes: Vec<String>,
}

/// Mean sensibility and keeping point of an algorithm across datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmAverage {
    pub algorithm: Algorithm,
    pub error_type: ErrorType,
    pub measure: Measure,
    pub sensibility: Option<f64>,
    pub keeping_point: Option<f64>,
    /// Mean value at the first grid rate.
    pub clean_value: Option<f64>,
    pub datasets: usize,
}

/// Algorithms from least to most sensitive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub error_type: ErrorType,
    pub measure: Measure,
    pub order: Vec<(Algorithm, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub error_type: ErrorType,
    pub rate: f64,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub root_seed: u64,
    pub grid: RateGrid,
    pub repeats: usize,
    pub thresholds: Thresholds,
    pub datasets: Vec<DatasetInfo>,
    /// Every successful evaluation, in plan order.
    pub results: Vec<EvalResult>,
    pub series: Vec<SeriesRecord>,
    pub averages: Vec<AlgorithmAverage>,
    pub rankings: Vec<Ranking>,
    pub failures: Vec<Failure>,
    pub skipped: Vec<(String, Algorithm)>,
}

impl RobustnessReport {
    pub fn average(&self, algorithm: Algorithm, error_type: ErrorType, measure: Measure) -> Option<&AlgorithmAverage> {
        self.averages
            .iter()
            .find(|a| a.algorithm == algorithm && a.error_type == error_type && a.measure == measure)
    }

    pub fn series_for(
        &self,
        dataset: &str,
        algorithm: Algorithm,
        error_type: ErrorType,
        measure: Measure,
    ) -> Option<&SeriesRecord> {
        self.series.iter().find(|s| {
            s.dataset == dataset
                && s.algorithm == algorithm
                && s.error_type == error_type
                && s.measure == measure
        })
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut out: Vec<Algorithm> = self.averages.iter().map(|a| a.algorithm).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Runs every task of `plan` through [`evaluate_task`] and assembles the
/// report.
pub fn run_sweep(plan: &SweepPlan) -> Result<RobustnessReport> {
    run_sweep_with(plan, |task| evaluate_task(plan, task))
}

/// As [`run_sweep`] with a caller-supplied evaluation per task.
pub fn run_sweep_with<F>(plan: &SweepPlan, evaluate: F) -> Result<RobustnessReport>
where
    F: Fn(&SweepTask) -> Result<EvalResult> + Sync,
{
    plan.validate()?;
    let tasks = plan.tasks();
    let outcomes: Vec<Result<EvalResult>> = tasks
        .par_iter()
        .map(|t| {
            evaluate(t).map(|mut r| {
                r.dataset = plan.datasets[t.dataset].name.clone();
                r
            })
        })
        .collect();
    Ok(assemble(plan, &tasks, outcomes))
}

type ComboKey = (usize, usize, ErrorType);

fn assemble(plan: &SweepPlan, tasks: &[SweepTask], outcomes: Vec<Result<EvalResult>>) -> RobustnessReport {
    let rates = plan.grid.rates();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut failed: std::collections::BTreeSet<ComboKey> = Default::default();
    // combo -> rate index -> repeat results
    let mut grouped: BTreeMap<ComboKey, Vec<Vec<EvalResult>>> = BTreeMap::new();
    for (task, outcome) in tasks.iter().zip(outcomes) {
        let key = (task.dataset, task.algorithm, task.error_type);
        match outcome {
            Ok(r) => {
                grouped.entry(key).or_insert_with(|| vec![Vec::new(); rates.len()])[task.rate_index]
                    .push(r.clone());
                results.push(r);
            }
            Err(e) => {
                failed.insert(key);
                failures.push(Failure {
                    dataset: plan.datasets[task.dataset].name.clone(),
                    algorithm: plan.algorithms[task.algorithm].algorithm(),
                    error_type: task.error_type,
                    rate: task.rate,
                    seed: task.seed,
                    message: e.to_string(),
                });
            }
        }
    }

    let mut series = Vec::new();
    for (key, per_rate) in &grouped {
        if failed.contains(key) {
            continue;
        }
        let (di, ai, error_type) = *key;
        let algorithm = plan.algorithms[ai].algorithm();
        let measures = match algorithm.task() {
            Task::Regression => Measure::REGRESSION,
            _ => Measure::CLASSIFICATION,
        };
        for measure in measures {
            let mut notes = Vec::new();
            let values: Vec<Option<f64>> = per_rate
                .iter()
                .zip(&rates)
                .map(|(runs, rate)| {
                    let defined: Vec<f64> = runs.iter().filter_map(|r| r.value(measure)).collect();
                    if defined.len() < runs.len() {
                        notes.push(format!(
                            "{measure} undefined in {} of {} runs at rate {rate}",
                            runs.len() - defined.len(),
                            runs.len()
                        ));
                    }
                    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
                })
                .collect();
            let (sensibility, keeping_point) =
                summarize_series(&rates, &values, measure, plan.thresholds.for_measure(measure), &mut notes);
            series.push(SeriesRecord {
                dataset: plan.datasets[di].name.clone(),
                algorithm,
                error_type,
                measure,
                rates: rates.clone(),
                values,
                sensibility,
                keeping_point,
                notes,
            });
        }
    }
    series.sort_by(|a, b| {
        (&a.dataset, a.algorithm, a.error_type, a.measure).cmp(&(&b.dataset, b.algorithm, b.error_type, b.measure))
    });

    let averages = average(&series);
    let rankings = rank(&averages);
    RobustnessReport {
        root_seed: plan.root_seed,
        grid: plan.grid,
        repeats: plan.repeats,
        thresholds: plan.thresholds,
        datasets: plan
            .datasets
            .iter()
            .map(|d| DatasetInfo {
                name: d.name.clone(),
                rows: d.data.len(),
                content_hash: d.data.provenance().content_hash.clone(),
            })
            .collect(),
        results,
        series,
        averages,
        rankings,
        failures,
        skipped: plan.skipped(),
    }
}

/// Sensibility and keeping point over the defined points of a series.
/// Undefined points are dropped with a note; a series needs its baseline
/// for a keeping point and two defined points for either quantity.
pub(crate) fn summarize_series(
    rates: &[f64],
    values: &[Option<f64>],
    measure: Measure,
    k: f64,
    notes: &mut Vec<String>,
) -> (Option<f64>, Option<f64>) {
    let defined: Vec<(f64, f64)> = rates
        .iter()
        .zip(values)
        .filter_map(|(&r, v)| v.map(|v| (r, v)))
        .collect();
    if defined.len() < values.len() {
        let dropped: Vec<String> = rates
            .iter()
            .zip(values)
            .filter(|(_, v)| v.is_none())
            .map(|(r, _)| r.to_string())
            .collect();
        notes.push(format!("rates excluded as undefined: {}", dropped.join(" ")));
    }
    if defined.len() < 2 {
        notes.push("fewer than two defined grid points; sensibility undefined".into());
        return (None, None);
    }
    let ys: Vec<f64> = defined.iter().map(|p| p.1).collect();
    let sensibility = Some(total_variation(&ys));
    let keeping = if values[0].is_some() {
        Some(defined[keeping_index(&ys, measure.direction(), k)].0)
    } else {
        notes.push("baseline undefined; no keeping point".into());
        None
    };
    (sensibility, keeping)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn average(series: &[SeriesRecord]) -> Vec<AlgorithmAverage> {
    let mut groups: BTreeMap<(Algorithm, ErrorType, Measure), Vec<&SeriesRecord>> = BTreeMap::new();
    for s in series {
        groups.entry((s.algorithm, s.error_type, s.measure)).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|((algorithm, error_type, measure), members)| AlgorithmAverage {
            algorithm,
            error_type,
            measure,
            sensibility: mean(members.iter().filter_map(|s| s.sensibility)),
            keeping_point: mean(members.iter().filter_map(|s| s.keeping_point)),
            clean_value: mean(members.iter().filter_map(|s| s.values.first().copied().flatten())),
            datasets: members.len(),
        })
        .collect()
}

fn rank(averages: &[AlgorithmAverage]) -> Vec<Ranking> {
    let mut groups: BTreeMap<(ErrorType, Measure), Vec<(Algorithm, f64)>> = BTreeMap::new();
    for a in averages {
        if let Some(s) = a.sensibility {
            groups.entry((a.error_type, a.measure)).or_default().push((a.algorithm, s));
        }
    }
    groups
        .into_iter()
        .map(|((error_type, measure), mut order)| {
            order.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
            Ranking {
                error_type,
                measure,
                order,
            }
        })
        .collect()
}
