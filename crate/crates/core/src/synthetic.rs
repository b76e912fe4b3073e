//! Seeded synthetic datasets for tests, examples and sweeps.

use rand::Rng as _;

use crate::dataset::{Cell, Column, ColumnKind, ColumnRole, Dataset, FdRule, Record, Schema};
use crate::seed;
use crate::Result;

/// `y = 3 + 2 x1 - x2 + 0.5 x3^2 + e` with `x1, x2, x3` uniform on
/// `[0, 1)`, `[0, 1)` and `[-1, 1)` and `e` uniform on `[-noise, noise)`.
pub fn regression(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let cols = vec![
        Column::new("x1", ColumnKind::Numeric, ColumnRole::Feature),
        Column::new("x2", ColumnKind::Numeric, ColumnRole::Feature),
        Column::new("x3", ColumnKind::Numeric, ColumnRole::Feature),
        Column::new("y", ColumnKind::Numeric, ColumnRole::Target),
    ];
    let rows = (0..n)
        .map(|_| {
            let x1: f64 = rng.random();
            let x2: f64 = rng.random();
            let x3: f64 = rng.random_range(-1.0..1.0);
            let e = if noise > 0.0 { rng.random_range(-noise..noise) } else { 0.0 };
            let y = 3.0 + 2.0 * x1 - x2 + 0.5 * x3 * x3 + e;
            Record::new([x1, x2, x3, y].map(round6).map(Cell::Numeric).to_vec())
        })
        .collect();
    Dataset::new(Schema::new(cols)?, rows)
}

/// Six decimals keep the values exact through a text round trip.
fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// A table with an entity key `id`, a dependency `zip -> city`, two
/// numeric features and a three-class target.
pub fn mixed(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let cols = vec![
        Column::new("id", ColumnKind::Categorical, ColumnRole::Feature),
        Column::new("zip", ColumnKind::Categorical, ColumnRole::Feature),
        Column::new("city", ColumnKind::Categorical, ColumnRole::Feature),
        Column::new("x1", ColumnKind::Numeric, ColumnRole::Feature),
        Column::new("x2", ColumnKind::Numeric, ColumnRole::Feature),
        Column::new("class", ColumnKind::Categorical, ColumnRole::Target),
    ];
    let rows = (0..n)
        .map(|i| {
            let zip = rng.random_range(0..20u32);
            let x1 = round6(rng.random::<f64>() * 10.0);
            let x2 = round6(rng.random::<f64>() * 10.0);
            let class = match x1 + x2 {
                s if s < 8.0 => "low",
                s if s < 12.0 => "mid",
                _ => "high",
            };
            Record::new(vec![
                Cell::Categorical(format!("e{i}")),
                Cell::Categorical(format!("z{zip:02}")),
                Cell::Categorical(format!("c{}", zip / 4)),
                Cell::Numeric(x1),
                Cell::Numeric(x2),
                Cell::Categorical(class.into()),
            ])
        })
        .collect();
    Dataset::new(Schema::new(cols)?, rows)
}

/// The dependency that holds in [`mixed`].
pub fn mixed_rules() -> Vec<FdRule> {
    vec![FdRule::new(vec!["zip".into()], "city").expect("valid rule")]
}

/// The entity key of [`mixed`].
pub fn mixed_key() -> Vec<String> {
    vec!["id".into()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{detect_error_rates, BoundRule};

    #[test]
    fn deterministic_and_clean() {
        let a = regression(50, 0.1, 3).unwrap();
        assert_eq!(a, regression(50, 0.1, 3).unwrap());
        assert_ne!(a, regression(50, 0.1, 4).unwrap());
        let d = mixed(300, 1).unwrap();
        let rules = BoundRule::bind_all(&mixed_rules(), d.schema()).unwrap();
        let key = vec![d.schema().require("id").unwrap()];
        let r = detect_error_rates(&d, Some(&rules), Some(&key)).unwrap();
        assert_eq!((r.missing, r.inconsistent, r.conflicting), (0.0, 0.0, 0.0));
        assert_eq!(d.schema().n_classes(), 3);
    }

    #[test]
    fn noiseless_regression_follows_formula() {
        let d = regression(20, 0.0, 0).unwrap();
        for row in d.rows() {
            let v: Vec<f64> = row.cells.iter().map(|c| c.as_f64().unwrap()).collect();
            let y = 3.0 + 2.0 * v[0] - v[1] + 0.5 * v[2] * v[2];
            assert!((y - v[3]).abs() < 1e-5);
        }
    }
}
