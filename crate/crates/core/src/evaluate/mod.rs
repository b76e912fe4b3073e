//! Accuracy measures, cluster matching and the k-fold evaluation protocol.
//!
//! [`cross_validate`] corrupts a clean dataset once, splits the original
//! rows into seeded folds, imputes each training fold and applies the same
//! fill values to its test fold, trains, and scores the held-out rows
//! against the clean values. Clustering methods run once on the whole
//! corrupted dataset instead.

pub mod algorithm;
pub mod matching;
pub mod measures;

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cluster::{default_eps, DbscanParams};
use crate::corruption::{inject, CorruptionSpec, ErrorType, Imputer};
use crate::dataset::Dataset;
use crate::encode::FeatureEncoder;
use crate::seed;
use crate::{Error, Result};

pub use algorithm::{Algorithm, AlgorithmSpec, LinearParams, PolynomialParams, Task};
pub use matching::match_clusters;
pub use measures::{
    harmonic, macro_precision_recall_f, regression_measures, ClassMeasures, Direction, Measure,
    RegressionMeasures,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub measure: Measure,
    /// `None` when undefined on every fold.
    pub value: Option<f64>,
    pub fold_values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub error_type: ErrorType,
    pub rate: f64,
    pub achieved_rate: f64,
    pub seed: u64,
    pub measures: Vec<MeasureValue>,
    /// log10 of the mean wall time in milliseconds of one full evaluation.
    pub time_log10_ms: Option<f64>,
    pub flags: Vec<String>,
}

impl EvalResult {
    pub fn value(&self, m: Measure) -> Option<f64> {
        self.measures
            .iter()
            .find(|v| v.measure == m)
            .and_then(|v| v.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvOptions {
    pub folds: usize,
    /// Timed repetitions of the whole evaluation; 0 disables timing.
    pub timing_repeats: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            timing_repeats: 5,
        }
    }
}

/// Fold index per row: a seeded shuffle cut into contiguous, nearly equal
/// slices (the first `n % folds` slices get one extra row).
pub fn fold_partition(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Parameter("at least two folds are needed".into()));
    }
    if folds > n {
        return Err(Error::Parameter(format!("{folds} folds for {n} rows")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut fold_of = vec![0; n];
    let (base, extra) = (n / folds, n % folds);
    let mut pos = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        for &i in &order[pos..pos + size] {
            fold_of[i] = f;
        }
        pos += size;
    }
    Ok(fold_of)
}

/// Per-fold outcome of one evaluation pass.
enum Scores {
    Class(Vec<ClassMeasures>),
    Regression(Vec<RegressionMeasures>),
}

struct Pass {
    scores: Scores,
    flags: Vec<String>,
}

/// DBSCAN radius from the clean data when the spec leaves it open.
fn resolve_eps(clean: &Dataset, algo: &AlgorithmSpec) -> Result<Option<f64>> {
    match algo {
        AlgorithmSpec::Dbscan(DbscanParams { eps: None, min_pts }) => {
            let filled = Imputer::fit(clean).apply(clean)?;
            let pts = FeatureEncoder::fit(&filled).encode_all(&filled)?;
            Ok(Some(default_eps(&pts, *min_pts)?))
        }
        _ => Ok(None),
    }
}

fn supervised_pass(
    clean: &Dataset,
    dirty: &Dataset,
    algo: &AlgorithmSpec,
    folds: usize,
    seed: u64,
) -> Result<Pass> {
    let fold_rows = fold_partition(clean.len(), folds, seed::child(seed, "folds", 0))?;
    let mut fold_of_shadow = vec![usize::MAX; clean.clean_shadow().len()];
    for (j, &o) in clean.origin().iter().enumerate() {
        fold_of_shadow[o] = fold_rows[j];
    }
    let mut class_scores = Vec::new();
    let mut reg_scores = Vec::new();
    let mut flags = Vec::new();
    for f in 0..folds {
        let mut run = || -> Result<()> {
            let mut train_idx = Vec::new();
            let mut test_idx = Vec::new();
            for (i, &o) in dirty.origin().iter().enumerate() {
                let in_test = fold_of_shadow[o] == f;
                if !in_test {
                    train_idx.push(i);
                } else if i < clean.len() {
                    test_idx.push(i);
                }
            }
            let train = dirty.select(&train_idx);
            let test = dirty.select(&test_idx);
            let imputer = Imputer::fit(&train);
            let train = imputer.apply(&train)?;
            let test = imputer.apply(&test)?;
            match algo.task() {
                Task::Classification => {
                    let model = algo.train_classifier(&train, seed::child(seed, "model", f as u64))?;
                    let pred = model.predict_all(&test)?;
                    let truth = test.clean_labels()?;
                    class_scores.push(macro_precision_recall_f(
                        &pred,
                        &truth,
                        clean.schema().n_classes(),
                    )?);
                }
                Task::Regression => {
                    let fitted = algo.fit_regression(&train)?;
                    if fitted.ridge && !flags.iter().any(|x| x == "ridge") {
                        flags.push("ridge".to_string());
                    }
                    let pred = fitted.model.predict_all(&test)?;
                    let truth = (0..test.len())
                        .map(|i| test.clean_target_value(i))
                        .collect::<Result<Vec<_>>>()?;
                    reg_scores.push(regression_measures(&pred, &truth)?);
                }
                Task::Clustering => unreachable!("clustering is fold-free"),
            }
            Ok(())
        };
        run().map_err(|e| e.in_fold(f))?;
    }
    let scores = match algo.task() {
        Task::Classification => Scores::Class(class_scores),
        _ => Scores::Regression(reg_scores),
    };
    Ok(Pass { scores, flags })
}

fn clustering_pass(clean: &Dataset, dirty: &Dataset, algo: &AlgorithmSpec, eps: Option<f64>, seed: u64) -> Result<Pass> {
    let n_c = clean.schema().n_classes();
    if n_c == 0 {
        return Err(Error::Unsupported(
            "clustering evaluation needs a categorical target".into(),
        ));
    }
    let filled = Imputer::fit(dirty).apply(dirty)?;
    let clustering = algo.cluster(&filled, n_c, eps, seed::child(seed, "model", 0))?;
    let truth = filled.clean_labels()?;
    let pred = match_clusters(&clustering, &truth, n_c)?;
    let mut flags = Vec::new();
    if clustering.noise_count() > 0 {
        flags.push(format!("noise={}", clustering.noise_count()));
    }
    Ok(Pass {
        scores: Scores::Class(vec![macro_precision_recall_f(&pred, &truth, n_c)?]),
        flags,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn summarize(scores: &Scores, flags: &mut Vec<String>) -> Vec<MeasureValue> {
    match scores {
        Scores::Class(folds) => {
            let p = mean(folds.iter().map(|m| m.precision)).unwrap_or(0.0);
            let r = mean(folds.iter().map(|m| m.recall)).unwrap_or(0.0);
            vec![
                MeasureValue {
                    measure: Measure::Precision,
                    value: Some(p),
                    fold_values: folds.iter().map(|m| Some(m.precision)).collect(),
                },
                MeasureValue {
                    measure: Measure::Recall,
                    value: Some(r),
                    fold_values: folds.iter().map(|m| Some(m.recall)).collect(),
                },
                MeasureValue {
                    measure: Measure::FMeasure,
                    value: Some(harmonic(p, r)),
                    fold_values: folds.iter().map(|m| Some(m.f_measure)).collect(),
                },
            ]
        }
        Scores::Regression(folds) => {
            let mut out = vec![MeasureValue {
                measure: Measure::Rmsd,
                value: mean(folds.iter().map(|m| m.rmsd)),
                fold_values: folds.iter().map(|m| Some(m.rmsd)).collect(),
            }];
            for (measure, get) in [
                (Measure::Nrmsd, (|m: &RegressionMeasures| m.nrmsd) as fn(&RegressionMeasures) -> Option<f64>),
                (Measure::CvRmsd, |m: &RegressionMeasures| m.cv),
            ] {
                let values: Vec<Option<f64>> = folds.iter().map(get).collect();
                let undefined = values.iter().filter(|v| v.is_none()).count();
                if undefined > 0 {
                    flags.push(format!("{measure}_undefined_folds={undefined}"));
                }
                out.push(MeasureValue {
                    measure,
                    value: mean(values.iter().flatten().copied()),
                    fold_values: values,
                });
            }
            out
        }
    }
}

/// Corrupts `clean` per `corruption`, evaluates `algo` and returns the
/// fold-averaged measures. Precision and recall are averaged over folds
/// and the F-measure is their harmonic mean.
pub fn cross_validate(
    clean: &Dataset,
    algo: &AlgorithmSpec,
    corruption: &CorruptionSpec,
    opts: &CvOptions,
    seed: u64,
) -> Result<EvalResult> {
    algo.validate()?;
    let injection = inject(clean, corruption)?;
    let dirty = &injection.dataset;
    let eps = resolve_eps(clean, algo)?;
    let evaluate = || match algo.task() {
        Task::Clustering => clustering_pass(clean, dirty, algo, eps, seed),
        _ => supervised_pass(clean, dirty, algo, opts.folds, seed),
    };
    let start = Instant::now();
    let pass = evaluate()?;
    let mut elapsed = start.elapsed().as_secs_f64();
    for _ in 1..opts.timing_repeats {
        let start = Instant::now();
        evaluate()?;
        elapsed += start.elapsed().as_secs_f64();
    }
    let time_log10_ms = (opts.timing_repeats > 0)
        .then(|| (elapsed * 1000.0 / opts.timing_repeats as f64).max(1e-6).log10());
    let mut flags = pass.flags;
    if injection.fabricated > 0 {
        flags.push(format!("fabricated_rows={}", injection.fabricated));
    }
    let measures = summarize(&pass.scores, &mut flags);
    Ok(EvalResult {
        dataset: clean
            .provenance()
            .source
            .as_ref()
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        algorithm: algo.algorithm(),
        error_type: corruption.error_type,
        rate: corruption.rate,
        achieved_rate: injection.achieved_rate(),
        seed,
        measures,
        time_log10_ms,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{labelled, numeric};

    #[test]
    fn folds_cover_rows_once() {
        let f = fold_partition(23, 10, 4).unwrap();
        let mut sizes = vec![0; 10];
        for &x in &f {
            sizes[x] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert_eq!(sizes.iter().filter(|&&s| s == 3).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 2).count(), 7);
        assert!(fold_partition(3, 1, 0).is_err());
        assert!(fold_partition(3, 4, 0).is_err());
    }

    #[test]
    fn clean_run_equals_manual_folds() {
        let xs: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
        let d = labelled(&xs, &["a", "a", "b", "b"]);
        let algo = AlgorithmSpec::Knn(crate::classify::KnnParams { k: 1 });
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.0, 1);
        let opts = CvOptions { folds: 2, timing_repeats: 0 };
        let r = cross_validate(&d, &algo, &spec, &opts, 9).unwrap();
        // manual: run the same two folds by hand
        let folds = fold_partition(4, 2, seed::child(9, "folds", 0)).unwrap();
        let mut ps = Vec::new();
        let mut rs = Vec::new();
        for f in 0..2 {
            let train: Vec<usize> = (0..4).filter(|&i| folds[i] != f).collect();
            let test: Vec<usize> = (0..4).filter(|&i| folds[i] == f).collect();
            assert_eq!(test.len(), 2);
            let m = crate::classify::train_knn(&d.select(&train), 1).unwrap();
            let pred: Vec<usize> = test.iter().map(|&i| m.predict(&d.rows()[i]).unwrap()).collect();
            let truth: Vec<usize> = test.iter().map(|&i| d.label(i).unwrap()).collect();
            let s = macro_precision_recall_f(&pred, &truth, 2).unwrap();
            ps.push(s.precision);
            rs.push(s.recall);
        }
        assert_eq!(r.value(Measure::Precision), Some((ps[0] + ps[1]) / 2.0));
        assert_eq!(r.value(Measure::Recall), Some((rs[0] + rs[1]) / 2.0));
        assert_eq!(r.time_log10_ms, None);
    }

    #[test]
    fn repeated_runs_agree() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let ys: Vec<f64> = (0..40).map(|i| 2.0 * i as f64 + (i % 3) as f64).collect();
        let d = numeric(&xs, &ys);
        let algo = AlgorithmSpec::default_for(Algorithm::LeastSquares);
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.2, 3);
        let opts = CvOptions { folds: 5, timing_repeats: 0 };
        let a = cross_validate(&d, &algo, &spec, &opts, 1).unwrap();
        let b = cross_validate(&d, &algo, &spec, &opts, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.value(Measure::Rmsd).unwrap() > 0.0);
    }

    #[test]
    fn clustering_is_fold_free() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![if i < 10 { 0.0 } else { 5.0 } + i as f64 * 0.01]).collect();
        let ys: Vec<&str> = (0..20).map(|i| if i < 10 { "a" } else { "b" }).collect();
        let d = labelled(&xs, &ys);
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.0, 0);
        let opts = CvOptions { folds: 10, timing_repeats: 1 };
        let r = cross_validate(&d, &AlgorithmSpec::default_for(Algorithm::KMeans), &spec, &opts, 0).unwrap();
        assert_eq!(r.value(Measure::FMeasure), Some(1.0));
        assert_eq!(r.measures[0].fold_values.len(), 1);
        assert!(r.time_log10_ms.is_some());
    }
}
