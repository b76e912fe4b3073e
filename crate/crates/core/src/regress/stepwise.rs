//! Stepwise selection by partial F-tests.
//!
//! A forward step adds the unselected column with the smallest p-value if
//! that p-value is below `alpha_in`. A backward step then drops the
//! selected column with the largest p-value if it exceeds `alpha_out`. The
//! loop stops when neither step changes the set; the final model is least
//! squares on the selected columns.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::linalg::{least_squares, sse};
use super::{design, Fitted, RegressionModel};
use crate::dataset::Dataset;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepwiseParams {
    pub alpha_in: f64,
    pub alpha_out: f64,
}

impl Default for StepwiseParams {
    fn default() -> Self {
        StepwiseParams {
            alpha_in: 0.05,
            alpha_out: 0.10,
        }
    }
}

struct Problem<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    tss: f64,
    ridge: bool,
}

impl Problem<'_> {
    fn subset_sse(&mut self, cols: &[usize]) -> f64 {
        let xs: Vec<Vec<f64>> = self
            .x
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        let fit = least_squares(&xs, self.y, true).expect("ridge fallback always solves");
        self.ridge |= fit.ridge;
        sse(&fit.weights, fit.bias, &xs, self.y)
    }

    /// p-value of the extra column in `big` over `small`.
    fn partial_p(&self, sse_small: f64, sse_big: f64, big_len: usize) -> Option<f64> {
        let n = self.y.len();
        let df = n.checked_sub(big_len + 1).filter(|&d| d > 0)? as f64;
        let tiny = 1e-12 * self.tss.max(f64::MIN_POSITIVE);
        if sse_small <= tiny {
            return Some(1.0);
        }
        if sse_big <= tiny {
            return Some(0.0);
        }
        let f = ((sse_small - sse_big).max(0.0)) / (sse_big / df);
        let dist = FisherSnedecor::new(1.0, df).ok()?;
        Some(dist.sf(f))
    }
}

/// Column positions (into the numeric design) chosen by the procedure.
pub fn select_columns(x: &[Vec<f64>], y: &[f64], params: &StepwiseParams) -> Result<(Vec<usize>, bool)> {
    let (ai, ao) = (params.alpha_in, params.alpha_out);
    if !(0.0 < ai && ai <= ao && ao < 1.0) {
        return Err(Error::Parameter(
            "stepwise needs 0 < alpha_in <= alpha_out < 1".into(),
        ));
    }
    let p = x.first().map_or(0, Vec::len);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut prob = Problem {
        x,
        y,
        tss: y.iter().map(|v| (v - mean).powi(2)).sum(),
        ridge: false,
    };
    let mut selected: Vec<usize> = Vec::new();
    for _ in 0..4 * (p + 1) {
        let mut changed = false;
        let base = prob.subset_sse(&selected);
        let mut best: Option<(f64, usize)> = None;
        for j in (0..p).filter(|j| !selected.contains(j)) {
            let mut cols = selected.clone();
            cols.push(j);
            cols.sort_unstable();
            let s = prob.subset_sse(&cols);
            if let Some(pv) = prob.partial_p(base, s, cols.len()) {
                if best.is_none_or(|b| pv < b.0) {
                    best = Some((pv, j));
                }
            }
        }
        if let Some((pv, j)) = best {
            if pv < ai {
                selected.push(j);
                selected.sort_unstable();
                changed = true;
            }
        }
        let full = prob.subset_sse(&selected);
        let mut worst: Option<(f64, usize)> = None;
        for &j in &selected {
            let rest: Vec<usize> = selected.iter().copied().filter(|&c| c != j).collect();
            let s = prob.subset_sse(&rest);
            if let Some(pv) = prob.partial_p(s, full, selected.len()) {
                if worst.is_none_or(|w| pv > w.0) {
                    worst = Some((pv, j));
                }
            }
        }
        if let Some((pv, j)) = worst {
            if pv > ao {
                selected.retain(|&c| c != j);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((selected, prob.ridge))
}

pub fn fit_stepwise(train: &Dataset, params: &StepwiseParams) -> Result<Fitted> {
    let (columns, x, y) = design(train)?;
    let (chosen, mut ridge) = select_columns(&x, &y, params)?;
    let xs: Vec<Vec<f64>> = x
        .iter()
        .map(|r| chosen.iter().map(|&c| r[c]).collect())
        .collect();
    let fit = least_squares(&xs, &y, true).expect("ridge fallback always solves");
    ridge |= fit.ridge;
    Ok(Fitted {
        model: RegressionModel::Stepwise {
            selected: chosen.iter().map(|&c| columns[c]).collect(),
            weights: fit.weights,
            bias: fit.bias,
        },
        ridge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::fit_least_squares;
    use crate::testutil::numeric;
    use rand::Rng as _;

    #[test]
    fn picks_the_generating_column() {
        let mut rng = crate::seed::rng(5);
        let x: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0] + 2.0).collect();
        let (sel, _) = select_columns(&x, &y, &StepwiseParams::default()).unwrap();
        assert_eq!(sel, vec![0]);
        // oracle: among all subsets, {0} is the smallest with zero error
        for mask in 0u32..8 {
            let cols: Vec<usize> = (0..3).filter(|c| mask >> c & 1 == 1).collect();
            let xs: Vec<Vec<f64>> = x.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
            let f = least_squares(&xs, &y, true).unwrap();
            let exact = sse(&f.weights, f.bias, &xs, &y) < 1e-12;
            assert_eq!(exact, cols.contains(&0));
        }
    }

    #[test]
    fn single_significant_feature_equals_least_squares() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..20).map(|i| 0.5 * i as f64 + ((i * 7) % 3) as f64 * 0.1).collect();
        let d = numeric(&xs, &ys);
        let s = fit_stepwise(&d, &StepwiseParams::default()).unwrap().model;
        let l = fit_least_squares(&d, true).unwrap().model;
        assert_eq!(s.coefficients(), l.coefficients());
        assert_eq!(s.bias(), l.bias());
    }

    #[test]
    fn subset_fits_no_better_than_full_model() {
        let mut rng = crate::seed::rng(8);
        let x: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[1] - 0.2 * r[3] + rng.random_range(-0.5..0.5)).collect();
        let d = numeric(&x, &y);
        let s = fit_stepwise(&d, &StepwiseParams::default()).unwrap().model;
        let l = fit_least_squares(&d, true).unwrap().model;
        let err = |m: &RegressionModel| -> f64 {
            m.predict_all(&d).unwrap().iter().zip(&y).map(|(p, t)| (p - t).powi(2)).sum()
        };
        assert!(err(&s) >= err(&l) - 1e-9);
    }

    #[test]
    fn alpha_order_is_checked() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let p = StepwiseParams { alpha_in: 0.2, alpha_out: 0.1 };
        assert!(select_columns(&x, &[0.0, 1.0, 2.0], &p).is_err());
    }
}
