//! Accuracy measures: macro precision, recall and F-measure for labels,
//! and RMSD, NRMSD and CV(RMSD) for real values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Precision,
    Recall,
    FMeasure,
    Rmsd,
    Nrmsd,
    CvRmsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl Measure {
    pub const CLASSIFICATION: [Measure; 3] = [Measure::Precision, Measure::Recall, Measure::FMeasure];
    pub const REGRESSION: [Measure; 3] = [Measure::Rmsd, Measure::Nrmsd, Measure::CvRmsd];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Precision => "precision",
            Measure::Recall => "recall",
            Measure::FMeasure => "f_measure",
            Measure::Rmsd => "rmsd",
            Measure::Nrmsd => "nrmsd",
            Measure::CvRmsd => "cv_rmsd",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Measure::Precision | Measure::Recall | Measure::FMeasure => Direction::HigherBetter,
            _ => Direction::LowerBetter,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Measure::Precision,
            Measure::Recall,
            Measure::FMeasure,
            Measure::Rmsd,
            Measure::Nrmsd,
            Measure::CvRmsd,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown measure `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMeasures {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl ClassMeasures {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        ClassMeasures {
            precision,
            recall,
            f_measure: harmonic(precision, recall),
        }
    }
}

/// Macro-averaged measures over classes `0..n_c`. A predicted label
/// outside that range (cluster noise) counts as wrong for every class. A
/// class that is never predicted, or never true, contributes 0 to the
/// corresponding average.
pub fn macro_precision_recall_f(pred: &[usize], truth: &[usize], n_c: usize) -> Result<ClassMeasures> {
    if pred.is_empty() || truth.is_empty() {
        return Err(Error::EmptyInput("no labels to score".into()));
    }
    if pred.len() != truth.len() {
        return Err(Error::Parameter(format!(
            "{} predictions for {} true labels",
            pred.len(),
            truth.len()
        )));
    }
    if n_c == 0 || truth.iter().any(|&t| t >= n_c) {
        return Err(Error::Parameter("true label outside the class range".into()));
    }
    let mut correct = vec![0usize; n_c];
    let mut predicted = vec![0usize; n_c];
    let mut actual = vec![0usize; n_c];
    for (&p, &t) in pred.iter().zip(truth) {
        actual[t] += 1;
        if p < n_c {
            predicted[p] += 1;
            if p == t {
                correct[p] += 1;
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = (0..n_c).map(|i| ratio(correct[i], predicted[i])).sum::<f64>() / n_c as f64;
    let r = (0..n_c).map(|i| ratio(correct[i], actual[i])).sum::<f64>() / n_c as f64;
    Ok(ClassMeasures::from_pr(p, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionMeasures {
    pub rmsd: f64,
    /// `None` when the predictions have zero range.
    pub nrmsd: Option<f64>,
    /// `None` when the predictions have zero mean.
    pub cv: Option<f64>,
}

/// RMSD, and RMSD divided by the range and by the mean of the
/// *predicted* values.
pub fn regression_measures(pred: &[f64], truth: &[f64]) -> Result<RegressionMeasures> {
    if pred.is_empty() {
        return Err(Error::EmptyInput("no values to score".into()));
    }
    if pred.len() != truth.len() {
        return Err(Error::Parameter(format!(
            "{} predictions for {} true values",
            pred.len(),
            truth.len()
        )));
    }
    let n = pred.len() as f64;
    let rmsd = (pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / n).sqrt();
    let (lo, hi) = pred
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = pred.iter().sum::<f64>() / n;
    Ok(RegressionMeasures {
        rmsd,
        nrmsd: (hi > lo).then(|| rmsd / (hi - lo)),
        cv: (mean != 0.0).then(|| rmsd / mean),
    })
}
