//! Binary logistic regression fitted by batch gradient ascent on the mean
//! log-likelihood over [`FeatureEncoder`]-scaled features.

use serde::{Deserialize, Serialize};

use super::require_classes;
use crate::dataset::{Dataset, Record};
use crate::encode::FeatureEncoder;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    pub lr: f64,
    pub iters: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { lr: 0.1, iters: 500 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    encoder: FeatureEncoder,
    weights: Vec<f64>,
    bias: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(w: &[f64], b: f64, x: &[f64]) -> f64 {
    b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
}

/// Mean log-likelihood of 0/1 labels `ys`.
pub fn log_likelihood(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let s: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let z = linear(w, b, x);
            y * z - softplus(z)
        })
        .sum();
    s / xs.len() as f64
}

/// Gradient of [`log_likelihood`] with respect to `(w, b)`.
pub fn gradient(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64]) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let r = y - sigmoid(linear(w, b, x));
        for (g, v) in gw.iter_mut().zip(x) {
            *g += r * v;
        }
        gb += r;
    }
    gw.iter_mut().for_each(|g| *g /= n);
    (gw, gb / n)
}

impl Logistic {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `P(class 1 | record)`.
    pub fn probability(&self, r: &Record) -> Result<f64> {
        let x = self.encoder.encode(r)?;
        Ok(sigmoid(linear(&self.weights, self.bias, &x)))
    }

    /// Class 1 when the probability is at least one half.
    pub fn predict(&self, r: &Record) -> Result<usize> {
        Ok(usize::from(self.probability(r)? >= 0.5))
    }
}

pub fn train_logistic(train: &Dataset, params: &LogisticParams) -> Result<Logistic> {
    require_classes(train)?;
    if train.schema().n_classes() > 2 {
        return Err(Error::Unsupported(format!(
            "logistic regression is binary; target has {} classes",
            train.schema().n_classes()
        )));
    }
    if !(params.lr > 0.0) || !params.lr.is_finite() {
        return Err(Error::Parameter("learning rate must be positive".into()));
    }
    let encoder = FeatureEncoder::fit(train);
    let xs = encoder.encode_all(train)?;
    let ys: Vec<f64> = train.labels()?.into_iter().map(|y| y as f64).collect();
    let mut w = vec![0.0; encoder.width()];
    let mut b = 0.0;
    for it in 0..params.iters {
        let (gw, gb) = gradient(&w, b, &xs, &ys);
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi += params.lr * g;
        }
        b += params.lr * gb;
        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence(format!(
                "logistic weights became non-finite at iteration {it}"
            )));
        }
    }
    Ok(Logistic {
        encoder,
        weights: w,
        bias: b,
    })
}

/// Predicted label of `query` under `model`.
pub fn logistic_classify(model: &Logistic, query: &Record) -> Result<usize> {
    model.predict(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::labelled;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_reference_points() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_data_is_learned() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let ys: Vec<&str> = (0..40).map(|i| if i < 20 { "lo" } else { "hi" }).collect();
        let d = labelled(&xs, &ys);
        let m = train_logistic(&d, &LogisticParams { lr: 1.0, iters: 3000 }).unwrap();
        let correct = d
            .rows()
            .iter()
            .enumerate()
            .filter(|(i, r)| m.predict(r).unwrap() == d.label(*i).unwrap())
            .count();
        assert!(correct >= 38, "{correct}");
    }

    #[test]
    fn multiclass_is_rejected() {
        let d = labelled(&[vec![0.0], vec![1.0], vec![2.0]], &["a", "b", "c"]);
        assert!(matches!(
            train_logistic(&d, &LogisticParams::default()),
            Err(Error::Unsupported(_))
        ));
    }

    proptest! {
        #[test]
        fn likelihood_is_concave_along_gradient(
            xs in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 3..12),
            seed in 0u64..1000,
        ) {
            let ys: Vec<f64> = (0..xs.len()).map(|i| ((seed >> (i % 10)) & 1) as f64).collect();
            let w = vec![0.1, -0.2];
            let (g, gb) = gradient(&w, 0.0, &xs, &ys);
            let step = 1e-3;
            let w2: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            // a small ascent step never lowers the likelihood
            prop_assert!(log_likelihood(&w2, step * gb, &xs, &ys) >= log_likelihood(&w, 0.0, &xs, &ys) - 1e-12);
        }
    }
}
