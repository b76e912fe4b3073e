use std::path::PathBuf;

use dqimpact::dataset::{load_dataset, LoadOptions};
use dqimpact::synthetic;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn shipped_regression_data_matches_generator() {
    let expected = synthetic::regression(200, 0.1, 42).unwrap().canonical_text();
    let path = data("synthetic_regression.csv");
    let loaded = load_dataset(&path, &LoadOptions::default()).unwrap();
    assert_eq!(loaded.canonical_text(), expected);
    assert_eq!(loaded.len(), 200);
}

#[test]
fn iris_shape() {
    let d = load_dataset(data("iris.csv"), &LoadOptions::default()).unwrap();
    assert_eq!((d.len(), d.schema().n_features(), d.schema().n_classes()), (150, 4, 3));
}
