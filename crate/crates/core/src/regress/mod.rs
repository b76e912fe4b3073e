//! Regression algorithms: least squares, Gaussian maximum likelihood,
//! polynomial expansion and stepwise selection.
//!
//! Only numeric features take part; categorical features are dropped with
//! a warning. Inputs must be imputed first.

pub mod linalg;
pub mod mle;
pub mod stepwise;

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Dataset, Record};
use crate::{Error, Result};

pub use linalg::LinearFit;
pub use mle::{fit_maximum_likelihood, MleParams};
pub use stepwise::{fit_stepwise, StepwiseParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegressionModel {
    Linear {
        columns: Vec<usize>,
        weights: Vec<f64>,
        bias: f64,
    },
    /// `weights[j][p]` multiplies `x_j^(p + 1)`.
    Polynomial {
        columns: Vec<usize>,
        degree: usize,
        weights: Vec<Vec<f64>>,
        bias: f64,
    },
    Stepwise {
        selected: Vec<usize>,
        weights: Vec<f64>,
        bias: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fitted {
    pub model: RegressionModel,
    /// The fit needed ridge damping.
    pub ridge: bool,
}

impl RegressionModel {
    pub fn predict(&self, r: &Record) -> Result<f64> {
        let x = |c: usize| {
            r.cells
                .get(c)
                .ok_or_else(|| Error::Schema(format!("record has no column {c}")))?
                .as_f64()
                .ok_or_else(|| Error::Schema(format!("column {c} is not a numeric value")))
        };
        match self {
            RegressionModel::Linear {
                columns,
                weights,
                bias,
            }
            | RegressionModel::Stepwise {
                selected: columns,
                weights,
                bias,
            } => {
                let mut y = *bias;
                for (&c, w) in columns.iter().zip(weights) {
                    y += w * x(c)?;
                }
                Ok(y)
            }
            RegressionModel::Polynomial {
                columns,
                weights,
                bias,
                ..
            } => {
                let mut y = *bias;
                for (&c, ws) in columns.iter().zip(weights) {
                    let v = x(c)?;
                    let mut pow = 1.0;
                    for w in ws {
                        pow *= v;
                        y += w * pow;
                    }
                }
                Ok(y)
            }
        }
    }

    pub fn predict_all(&self, d: &Dataset) -> Result<Vec<f64>> {
        d.rows().iter().map(|r| self.predict(r)).collect()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            RegressionModel::Linear { weights, .. } | RegressionModel::Stepwise { weights, .. } => {
                weights.clone()
            }
            RegressionModel::Polynomial { weights, .. } => weights.concat(),
        }
    }

    pub fn bias(&self) -> f64 {
        match self {
            RegressionModel::Linear { bias, .. }
            | RegressionModel::Polynomial { bias, .. }
            | RegressionModel::Stepwise { bias, .. } => *bias,
        }
    }
}

/// Numeric feature columns, the design matrix over them, and the target.
pub(crate) fn design(d: &Dataset) -> Result<(Vec<usize>, Vec<Vec<f64>>, Vec<f64>)> {
    let schema = d.schema();
    if schema.target_column().kind != ColumnKind::Numeric {
        return Err(Error::Unsupported("regression needs a numeric target".into()));
    }
    if d.is_empty() {
        return Err(Error::EmptyInput("training set has no rows".into()));
    }
    let mut columns = Vec::new();
    for c in schema.feature_indices() {
        let col = &schema.columns()[c];
        if col.kind == ColumnKind::Numeric {
            columns.push(c);
        } else {
            log::warn!("dropping categorical feature `{}` from regression", col.name);
        }
    }
    let x = d
        .rows()
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|&c| {
                    r.cells[c].as_f64().ok_or_else(|| {
                        Error::Schema(format!(
                            "feature `{}` has missing cells; impute first",
                            schema.columns()[c].name
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let y = (0..d.len())
        .map(|i| d.target_value(i))
        .collect::<Result<Vec<_>>>()?;
    Ok((columns, x, y))
}

fn solve(x: &[Vec<f64>], y: &[f64], ridge_fallback: bool) -> Result<LinearFit> {
    let fit = linalg::least_squares(x, y, ridge_fallback)
        .ok_or_else(|| Error::Singular("normal equations are singular".into()))?;
    if !fit.bias.is_finite() || fit.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Singular("least-squares solution is not finite".into()));
    }
    Ok(fit)
}

/// Least squares on all numeric features.
pub fn fit_least_squares(train: &Dataset, ridge_fallback: bool) -> Result<Fitted> {
    let (columns, x, y) = design(train)?;
    let fit = solve(&x, &y, ridge_fallback)?;
    Ok(Fitted {
        model: RegressionModel::Linear {
            columns,
            weights: fit.weights,
            bias: fit.bias,
        },
        ridge: fit.ridge,
    })
}

/// `[x_1, x_1^2, .., x_1^d, x_2, ..]`
pub fn expand_powers(x: &[f64], degree: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() * degree);
    for &v in x {
        let mut pow = 1.0;
        for _ in 0..degree {
            pow *= v;
            out.push(pow);
        }
    }
    out
}

pub fn fit_polynomial(train: &Dataset, degree: usize, ridge_fallback: bool) -> Result<Fitted> {
    if degree == 0 {
        return Err(Error::Parameter("polynomial degree must be at least 1".into()));
    }
    let (columns, x, y) = design(train)?;
    let expanded: Vec<Vec<f64>> = x.iter().map(|r| expand_powers(r, degree)).collect();
    let fit = solve(&expanded, &y, ridge_fallback)?;
    Ok(Fitted {
        model: RegressionModel::Polynomial {
            columns,
            degree,
            weights: fit.weights.chunks(degree).map(<[f64]>::to_vec).collect(),
            bias: fit.bias,
        },
        ridge: fit.ridge,
    })
}

/// Evaluates `model` on one record.
pub fn predict(model: &RegressionModel, query: &Record) -> Result<f64> {
    model.predict(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::numeric;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..5).map(|i| 2.0 * i as f64 + 1.0).collect();
        let f = fit_least_squares(&numeric(&xs, &ys), false).unwrap();
        assert!((f.model.coefficients()[0] - 2.0).abs() < 1e-9);
        assert!((f.model.bias() - 1.0).abs() < 1e-9);
        assert!(!f.ridge);
    }

    #[test]
    fn constant_target() {
        let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let f = fit_least_squares(&numeric(&xs, &[4.0; 6]), false).unwrap();
        assert!(f.model.coefficients().iter().all(|w| w.abs() < 1e-12));
        assert!((f.model.bias() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parabola() {
        let xs: Vec<Vec<f64>> = (-3..=3).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (-3..=3).map(|i| (i * i) as f64).collect();
        let d = numeric(&xs, &ys);
        let f = fit_polynomial(&d, 2, false).unwrap();
        let c = f.model.coefficients();
        assert!(c[0].abs() < 1e-8 && (c[1] - 1.0).abs() < 1e-8 && f.model.bias().abs() < 1e-8);
        let q = Record::new(vec![crate::dataset::Cell::Numeric(4.0), crate::dataset::Cell::Numeric(0.0)]);
        assert!((f.model.predict(&q).unwrap() - 16.0).abs() < 1e-7);
    }

    #[test]
    fn degree_one_is_least_squares() {
        let xs: Vec<Vec<f64>> = (0..9).map(|i| vec![(i * 7 % 5) as f64, (i % 3) as f64]).collect();
        let ys: Vec<f64> = (0..9).map(|i| (i * i % 11) as f64).collect();
        let d = numeric(&xs, &ys);
        let a = fit_least_squares(&d, false).unwrap().model;
        let b = fit_polynomial(&d, 1, false).unwrap().model;
        assert_eq!(a.coefficients(), b.coefficients());
        assert_eq!(a.bias(), b.bias());
    }

    #[test]
    fn linear_prediction() {
        let m = RegressionModel::Linear {
            columns: vec![0],
            weights: vec![2.0],
            bias: 1.0,
        };
        let r = Record::new(vec![crate::dataset::Cell::Numeric(3.0)]);
        assert_eq!(predict(&m, &r).unwrap(), 7.0);
        assert!(predict(&m, &Record::new(vec![])).is_err());
    }

    proptest! {
        #[test]
        fn perturbation_never_lowers_sse(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -10.0f64..10.0), 4..25),
            deltas in prop::collection::vec((-1e-3f64..1e-3, -1e-3f64..1e-3, -1e-3f64..1e-3), 100),
        ) {
            let x: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0, p.1]).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.2).collect();
            let fit = linalg::least_squares(&x, &y, true).unwrap();
            prop_assume!(!fit.ridge);
            let base = linalg::sse(&fit.weights, fit.bias, &x, &y);
            for (a, b, c) in deltas {
                let w = [fit.weights[0] + a, fit.weights[1] + b];
                prop_assert!(linalg::sse(&w, fit.bias + c, &x, &y) >= base - 1e-9 * (1.0 + base));
            }
        }

        #[test]
        fn residuals_are_orthogonal(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -10.0f64..10.0), 4..25),
        ) {
            let x: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0, p.1]).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.2).collect();
            let fit = linalg::least_squares(&x, &y, true).unwrap();
            prop_assume!(!fit.ridge);
            let r: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - linalg::linear_predict(&fit.weights, fit.bias, xi)).collect();
            prop_assert!(r.iter().sum::<f64>().abs() < 1e-8);
            for j in 0..2 {
                prop_assert!(x.iter().zip(&r).map(|(xi, ri)| xi[j] * ri).sum::<f64>().abs() < 1e-8);
            }
        }

        #[test]
        fn higher_degree_fits_no_worse(
            pts in prop::collection::vec((0.0f64..3.0, -10.0f64..10.0), 8..30),
        ) {
            let xs: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let d = numeric(&xs, &ys);
            let mut prev = f64::INFINITY;
            for deg in 1..=3 {
                let Ok(f) = fit_polynomial(&d, deg, false) else { break };
                let pred = f.model.predict_all(&d).unwrap();
                let sse: f64 = pred.iter().zip(&ys).map(|(p, y)| (p - y).powi(2)).sum();
                prop_assert!(sse <= prev + 1e-9 * (1.0 + prev));
                prev = sse;
            }
        }
    }
}
