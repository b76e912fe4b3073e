use std::path::PathBuf;

use dqimpact::corruption::{inject, CorruptionSpec, ErrorType, Imputer};
use dqimpact::dataset::{detect_error_rates, load_dataset, save_dataset, BoundRule, LoadOptions};
use dqimpact::evaluate::{cross_validate, Algorithm, AlgorithmSpec, CvOptions, Measure, Task};
use dqimpact::robustness::{
    recommend, run_sweep, RateGrid, RecommendRequest, SweepDataset, SweepPlan, Thresholds,
};
use dqimpact::synthetic;

fn iris() -> dqimpact::dataset::Dataset {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv");
    load_dataset(p, &LoadOptions::default()).unwrap()
}

fn quick() -> CvOptions {
    CvOptions {
        folds: 5,
        timing_repeats: 0,
    }
}

#[test]
fn clean_iris_is_learnable() {
    let d = iris();
    assert_eq!((d.len(), d.schema().n_classes()), (150, 3));
    let clean = CorruptionSpec::new(ErrorType::Missing, 0.0, 0);
    for algo in Algorithm::ALL {
        if algo.task() != Task::Classification || algo == Algorithm::Logistic {
            continue;
        }
        let r = cross_validate(&d, &AlgorithmSpec::default_for(algo), &clean, &quick(), 5).unwrap();
        let f = r.value(Measure::FMeasure).unwrap();
        assert!(f > 0.85, "{algo}: F {f}");
    }
}

#[test]
fn multiclass_logistic_is_refused() {
    let d = iris();
    let clean = CorruptionSpec::new(ErrorType::Missing, 0.0, 0);
    let algo = AlgorithmSpec::default_for(Algorithm::Logistic);
    assert!(cross_validate(&d, &algo, &clean, &quick(), 0).is_err());
}

#[test]
fn fabricated_rows_stay_out_of_test_folds() {
    let d = synthetic::mixed(200, 3).unwrap();
    let spec = CorruptionSpec::new(ErrorType::Conflicting, 0.3, 8).with_entity_key(synthetic::mixed_key());
    let inj = inject(&d, &spec).unwrap();
    assert!(inj.fabricated > 0);
    let r = cross_validate(&d, &AlgorithmSpec::default_for(Algorithm::NaiveBayes), &spec, &quick(), 8).unwrap();
    assert!(r.flags.iter().any(|f| f.starts_with("fabricated_rows=")));
    assert!((r.achieved_rate - 0.3).abs() < 1e-12);
}

#[test]
fn detected_rates_match_injection() {
    let d = synthetic::mixed(500, 4).unwrap();
    let rules = BoundRule::bind_all(&synthetic::mixed_rules(), d.schema()).unwrap();
    let spec = CorruptionSpec::new(ErrorType::Missing, 0.2, 1);
    let dirty = inject(&d, &spec).unwrap().dataset;
    let key = [d.schema().require("id").unwrap()];
    let rates = detect_error_rates(&dirty, Some(&rules), Some(&key)).unwrap();
    assert!((rates.missing - 0.2).abs() < 1e-12);
    let filled = Imputer::fit(&dirty).apply(&dirty).unwrap();
    assert_eq!(filled.missing_cells(), 0);
}

#[test]
fn saved_corruption_reloads_identically() {
    let d = synthetic::mixed(50, 2).unwrap();
    let dirty = inject(&d, &CorruptionSpec::new(ErrorType::Missing, 0.25, 5)).unwrap().dataset;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dirty.csv");
    save_dataset(&dirty, &path, ',').unwrap();
    let back = load_dataset(&path, &LoadOptions::default()).unwrap();
    assert_eq!(back.canonical_text(), dirty.canonical_text());
}

#[test]
fn sweep_then_recommend() {
    let mut mixed = SweepDataset::new("mixed", synthetic::mixed(240, 6).unwrap());
    mixed.rules = synthetic::mixed_rules();
    mixed.entity_key = synthetic::mixed_key();
    mixed.column_mask = Some(vec!["zip".into(), "city".into(), "x1".into(), "x2".into()]);
    let algorithms = [Algorithm::DecisionTree, Algorithm::Knn, Algorithm::NaiveBayes];
    let plan = SweepPlan {
        datasets: vec![mixed],
        algorithms: algorithms.iter().map(|&a| AlgorithmSpec::default_for(a)).collect(),
        error_types: ErrorType::ALL.to_vec(),
        grid: RateGrid::new(0.0, 0.2, 2).unwrap(),
        root_seed: 3,
        repeats: 1,
        thresholds: Thresholds::default(),
        cv: quick(),
    };
    let report = run_sweep(&plan).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert_eq!(report.series.len(), 3 * 3 * 3);
    assert_eq!(report.rankings.len(), 3 * 3);
    let req = RecommendRequest::new(
        Task::Classification,
        dqimpact::dataset::ErrorRates {
            missing: 0.1,
            inconsistent: 0.3,
            conflicting: 0.0,
        },
        240,
    );
    let g = recommend(&report, &req).unwrap();
    assert_eq!(g.dominant, ErrorType::Inconsistent);
    let chosen = g.recommended.expect("an algorithm clears the bar on clean data");
    let ranking = report
        .rankings
        .iter()
        .find(|r| r.error_type == ErrorType::Inconsistent && r.measure == Measure::FMeasure)
        .unwrap();
    let accepted: Vec<Algorithm> = g.accepted().map(|c| c.algorithm).collect();
    let best = ranking.order.iter().find(|(a, _)| accepted.contains(a)).unwrap().0;
    assert_eq!(chosen, best);
    assert_eq!(g.cleaning_targets.len(), 3);
}
