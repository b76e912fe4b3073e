//! Algorithm selection and cleaning targets from a robustness report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::sweep::RobustnessReport;
use crate::corruption::ErrorType;
use crate::dataset::ErrorRates;
use crate::evaluate::{Algorithm, Measure, Task};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizeThresholds {
    /// Row counts below this are small.
    pub small: usize,
    /// Row counts at or above this are large.
    pub large: usize,
}

impl Default for SizeThresholds {
    fn default() -> Self {
        SizeThresholds {
            small: 1000,
            large: 10000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeThresholds {
    pub fn classify(&self, rows: usize) -> SizeClass {
        if rows < self.small {
            SizeClass::Small
        } else if rows >= self.large {
            SizeClass::Large
        } else {
            SizeClass::Medium
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecommendRequest {
    pub task: Task,
    pub detected: ErrorRates,
    pub data_size: usize,
    /// Defaults to the F-measure, or RMSD for regression.
    pub priority: Option<Measure>,
    pub sizes: SizeThresholds,
}

impl RecommendRequest {
    pub fn new(task: Task, detected: ErrorRates, data_size: usize) -> RecommendRequest {
        RecommendRequest {
            task,
            detected,
            data_size,
            priority: None,
            sizes: SizeThresholds::default(),
        }
    }

    fn priority(&self) -> Result<Measure> {
        let family = task_measures(self.task);
        match self.priority {
            None => Ok(family[if self.task == Task::Regression { 0 } else { 2 }]),
            Some(m) if family.contains(&m) => Ok(m),
            Some(m) => Err(Error::Config(format!("measure {m} does not apply to {}", self.task))),
        }
    }
}

fn task_measures(task: Task) -> [Measure; 3] {
    match task {
        Task::Regression => Measure::REGRESSION,
        _ => Measure::CLASSIFICATION,
    }
}

fn rate_of(r: &ErrorRates, e: ErrorType) -> f64 {
    match e {
        ErrorType::Missing => r.missing,
        ErrorType::Inconsistent => r.inconsistent,
        ErrorType::Conflicting => r.conflicting,
    }
}

/// Highest detected rate; ties go to the earlier of missing,
/// inconsistent, conflicting.
pub fn dominant_error(r: &ErrorRates) -> ErrorType {
    let mut best = ErrorType::Missing;
    for e in ErrorType::ALL {
        if rate_of(r, e) > rate_of(r, best) {
            best = e;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub algorithm: Algorithm,
    /// Clean-data value per measure of the task.
    pub clean: Vec<(Measure, Option<f64>)>,
    /// Mean sensibility under the dominant error type for the priority
    /// measure.
    pub sensibility: Option<f64>,
    /// Why the algorithm falls short, empty for accepted candidates.
    pub shortfalls: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CleaningTarget {
    pub error_type: ErrorType,
    pub detected: f64,
    pub keeping_point: Option<f64>,
    /// Rate to clean down to; `None` leaves this error type as it is.
    pub target: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guideline {
    pub task: Task,
    pub detected: ErrorRates,
    pub dominant: ErrorType,
    pub priority: Measure,
    pub size_class: SizeClass,
    pub candidates: Vec<Candidate>,
    pub recommended: Option<Algorithm>,
    /// The least sensitive candidate, which differs from the
    /// recommendation when the size rule applies.
    pub least_sensitive: Option<Algorithm>,
    pub size_rule_applied: bool,
    pub cleaning_targets: Vec<CleaningTarget>,
    /// Closest rejected algorithms when no candidate qualifies.
    pub nearest_misses: Vec<Candidate>,
    pub notes: Vec<String>,
}

fn shortfalls(task: Task, clean: &[(Measure, Option<f64>)], notes: &mut Vec<String>, algo: Algorithm) -> Vec<String> {
    let mut out = Vec::new();
    for &(m, v) in clean {
        let limit = match (task, m) {
            (Task::Regression, Measure::Nrmsd) => 0.5,
            (Task::Regression, _) => 1.0,
            _ => 0.70,
        };
        match v {
            None if task == Task::Regression && m != Measure::Rmsd => {
                notes.push(format!("{algo}: clean {m} undefined, not used for acceptance"))
            }
            None => out.push(format!("clean {m} unavailable")),
            Some(v) => {
                let ok = if task == Task::Regression { v < limit } else { v > limit };
                if !ok {
                    let rel = if task == Task::Regression { "<" } else { ">" };
                    out.push(format!("clean {m} {v:.4} not {rel} {limit}"));
                }
            }
        }
    }
    out
}

/// Scores how far a rejected algorithm is from acceptance; smaller is
/// closer.
fn miss_distance(task: Task, c: &Candidate) -> f64 {
    c.clean
        .iter()
        .map(|&(m, v)| {
            let v = match v {
                Some(v) => v,
                None => return 0.0,
            };
            match (task, m) {
                (Task::Regression, Measure::Nrmsd) => (v - 0.5).max(0.0),
                (Task::Regression, _) => (v - 1.0).max(0.0),
                _ => (0.70 - v).max(0.0),
            }
        })
        .sum()
}

fn preferred(task: Task, size: SizeClass) -> Option<Algorithm> {
    match (task, size) {
        (Task::Classification, SizeClass::Small) => Some(Algorithm::Logistic),
        (Task::Clustering, SizeClass::Large) => Some(Algorithm::Dbscan),
        _ => None,
    }
}

/// Picks an algorithm for the task and sets cleaning targets.
///
/// Candidates are the task's algorithms whose clean-data measures all
/// pass the acceptance bar (P, R and F above 0.70; RMSD and CV below 1.0
/// and NRMSD below 0.5). Small classification data prefers logistic
/// regression and large clustering data prefers DBSCAN when they are
/// candidates; otherwise the candidate with the lowest sensibility for the
/// dominant error type and the priority measure wins. Each error type
/// whose detected rate exceeds the chosen algorithm's keeping point gets
/// that keeping point as its cleaning target.
pub fn recommend(report: &RobustnessReport, req: &RecommendRequest) -> Result<Guideline> {
    let priority = req.priority()?;
    let dominant = dominant_error(&req.detected);
    let size_class = req.sizes.classify(req.data_size);
    let measures = task_measures(req.task);
    let mut notes = Vec::new();

    let algorithms: Vec<Algorithm> = report
        .algorithms()
        .into_iter()
        .filter(|a| a.task() == req.task)
        .collect();
    if algorithms.is_empty() {
        return Err(Error::Config(format!("the report has no {} algorithms", req.task)));
    }

    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for algo in algorithms {
        let clean: Vec<(Measure, Option<f64>)> = measures
            .iter()
            .map(|&m| {
                let vals: Vec<f64> = ErrorType::ALL
                    .iter()
                    .filter_map(|&e| report.average(algo, e, m).and_then(|a| a.clean_value))
                    .collect();
                (m, (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64))
            })
            .collect();
        let sensibility = report.average(algo, dominant, priority).and_then(|a| a.sensibility);
        let short = shortfalls(req.task, &clean, &mut notes, algo);
        let c = Candidate {
            algorithm: algo,
            clean,
            sensibility,
            shortfalls: short,
        };
        if c.shortfalls.is_empty() {
            accepted.push(c);
        } else {
            rejected.push(c);
        }
    }

    let least_sensitive = accepted
        .iter()
        .filter_map(|c| c.sensibility.map(|s| (s, c.algorithm)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|p| p.1);
    for c in accepted.iter().filter(|c| c.sensibility.is_none()) {
        notes.push(format!(
            "{}: no sensibility under {dominant} errors for {priority}",
            c.algorithm
        ));
    }
    let pref = preferred(req.task, size_class).filter(|p| accepted.iter().any(|c| c.algorithm == *p));
    let size_rule_applied = pref.is_some();
    let recommended = pref.or(least_sensitive);

    let nearest_misses = if accepted.is_empty() {
        let mut r = rejected.clone();
        r.sort_by(|a, b| {
            miss_distance(req.task, a)
                .total_cmp(&miss_distance(req.task, b))
                .then(a.algorithm.cmp(&b.algorithm))
        });
        r.truncate(3);
        r
    } else {
        Vec::new()
    };

    let cleaning_targets = match recommended {
        Some(algo) => ErrorType::ALL
            .iter()
            .map(|&e| {
                let detected = rate_of(&req.detected, e);
                let keeping_point = report.average(algo, e, priority).and_then(|a| a.keeping_point);
                if keeping_point.is_none() {
                    notes.push(format!("{algo}: no keeping point under {e} errors"));
                }
                CleaningTarget {
                    error_type: e,
                    detected,
                    keeping_point,
                    target: keeping_point.filter(|&kp| detected > kp),
                }
            })
            .collect(),
        None => Vec::new(),
    };

    let mut candidates = accepted;
    candidates.extend(rejected);
    Ok(Guideline {
        task: req.task,
        detected: req.detected,
        dominant,
        priority,
        size_class,
        candidates,
        recommended,
        least_sensitive,
        size_rule_applied,
        cleaning_targets,
        nearest_misses,
        notes,
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl Guideline {
    pub fn accepted(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(|c| c.shortfalls.is_empty())
    }

    /// Plain-text account of the decision.
    pub fn narrative(&self) -> String {
        let mut s = String::new();
        let d = &self.detected;
        let _ = writeln!(
            s,
            "Detected error rates: missing {}, inconsistent {}, conflicting {}. Dominant type: {}.",
            pct(d.missing),
            pct(d.inconsistent),
            pct(d.conflicting),
            self.dominant
        );
        let names: Vec<&str> = self.accepted().map(|c| c.algorithm.as_str()).collect();
        let Some(algo) = self.recommended else {
            let _ = writeln!(s, "No acceptable {} algorithm on clean data.", self.task);
            for m in &self.nearest_misses {
                let _ = writeln!(s, "Nearest miss: {} ({}).", m.algorithm, m.shortfalls.join("; "));
            }
            return s;
        };
        let _ = writeln!(s, "Acceptable {} algorithms: {}.", self.task, names.join(", "));
        if self.size_rule_applied {
            let _ = writeln!(
                s,
                "Recommended: {} by the data-size rule ({:?} data); least sensitive candidate: {}.",
                algo,
                self.size_class,
                self.least_sensitive.map_or("none", |a| a.as_str())
            );
        } else {
            let _ = writeln!(
                s,
                "Recommended: {algo}, the least sensitive candidate for {} under {} errors.",
                self.priority, self.dominant
            );
        }
        for t in &self.cleaning_targets {
            match (t.target, t.keeping_point) {
                (Some(target), _) => {
                    let _ = writeln!(s, "Clean {} errors from {} down to {}.", t.error_type, pct(t.detected), pct(target));
                }
                (None, Some(kp)) => {
                    let _ = writeln!(
                        s,
                        "{} errors at {} are within the keeping point {}; no cleaning needed.",
                        t.error_type,
                        pct(t.detected),
                        pct(kp)
                    );
                }
                (None, None) => {
                    let _ = writeln!(s, "{} errors: no keeping point measured.", t.error_type);
                }
            }
        }
        s
    }
}
