//! Gaussian maximum-likelihood linear regression by coordinate ascent.
//!
//! Features are standardized on the training data. Each iteration takes a
//! steepest-ascent step in `(w, b)` with the exact line search for the
//! current variance, then sets the variance to its closed-form maximizer.
//! Both moves never lower the log-likelihood.

use serde::{Deserialize, Serialize};

use super::linalg::column_scaling;
use super::{design, Fitted, RegressionModel};
use crate::dataset::Dataset;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MleParams {
    pub max_iters: usize,
    /// Stop once the squared gradient norm per row falls below this.
    pub tol: f64,
}

impl Default for MleParams {
    fn default() -> Self {
        MleParams {
            max_iters: 20_000,
            tol: 1e-26,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub variance: f64,
    /// Log-likelihood after each iteration.
    pub trace: Vec<f64>,
}

pub fn gaussian_log_likelihood(sse: f64, n: usize, variance: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * (2.0 * std::f64::consts::PI * variance).ln() - sse / (2.0 * variance)
}

fn residuals(z: &[Vec<f64>], y: &[f64], beta: &[f64], b: f64) -> Vec<f64> {
    z.iter()
        .zip(y)
        .map(|(r, yi)| yi - b - r.iter().zip(beta).map(|(v, w)| v * w).sum::<f64>())
        .collect()
}

pub fn mle_ascent(x: &[Vec<f64>], y: &[f64], params: &MleParams) -> Result<MleFit> {
    let n = y.len();
    if n == 0 {
        return Err(Error::EmptyInput("no rows".into()));
    }
    let p = x.first().map_or(0, Vec::len);
    let (mean, sd) = column_scaling(x);
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().zip(&mean).zip(&sd).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let y_var = y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64;
    let floor = 1e-24 * y_var.max(1.0);

    let mut beta = vec![0.0; p];
    let mut b = 0.0;
    let mut r = residuals(&z, y, &beta, b);
    let mut sse: f64 = r.iter().map(|v| v * v).sum();
    let mut variance = (sse / n as f64).max(floor);
    let mut trace = vec![gaussian_log_likelihood(sse, n, variance)];

    for _ in 0..params.max_iters {
        // gradient of the log-likelihood times variance
        let mut g = vec![0.0; p];
        let mut gb = 0.0;
        for (row, ri) in z.iter().zip(&r) {
            for (gj, v) in g.iter_mut().zip(row) {
                *gj += v * ri;
            }
            gb += ri;
        }
        let gnorm = g.iter().map(|v| v * v).sum::<f64>() + gb * gb;
        if gnorm / (n as f64) < params.tol * y_var.max(1.0) {
            break;
        }
        // exact line search: step = |g|^2 / |A g|^2
        let ag: Vec<f64> = z
            .iter()
            .map(|row| gb + row.iter().zip(&g).map(|(v, gj)| v * gj).sum::<f64>())
            .collect();
        let denom: f64 = ag.iter().map(|v| v * v).sum();
        if !(denom > 0.0) {
            break;
        }
        let step = gnorm / denom;
        let next_beta: Vec<f64> = beta.iter().zip(&g).map(|(w, gj)| w + step * gj).collect();
        let next_b = b + step * gb;
        let next_r: Vec<f64> = r.iter().zip(&ag).map(|(ri, a)| ri - step * a).collect();
        let next_sse: f64 = next_r.iter().map(|v| v * v).sum();
        if !next_sse.is_finite() {
            return Err(Error::Divergence("log-likelihood became non-finite".into()));
        }
        if next_sse >= sse {
            break;
        }
        beta = next_beta;
        b = next_b;
        r = next_r;
        sse = next_sse;
        variance = (sse / n as f64).max(floor);
        let ll = gaussian_log_likelihood(sse, n, variance);
        if !ll.is_finite() {
            return Err(Error::Divergence("log-likelihood became non-finite".into()));
        }
        trace.push(ll);
    }
    let weights: Vec<f64> = beta.iter().zip(&sd).map(|(w, s)| w / s).collect();
    let bias = b - weights.iter().zip(&mean).map(|(w, m)| w * m).sum::<f64>();
    Ok(MleFit {
        weights,
        bias,
        variance,
        trace,
    })
}

pub fn fit_maximum_likelihood(train: &Dataset, params: &MleParams) -> Result<Fitted> {
    let (columns, x, y) = design(train)?;
    let fit = mle_ascent(&x, &y, params)?;
    Ok(Fitted {
        model: RegressionModel::Linear {
            columns,
            weights: fit.weights,
            bias: fit.bias,
        },
        ridge: false,
    })
}
