//! Rate grids, metric series, sensibility and keeping point.

use serde::{Deserialize, Serialize};

use crate::evaluate::{Direction, Measure};
use crate::{Error, Result};

const GRID_TOL: f64 = 1e-9;

/// The error-rate grid `a, a+x, ..., a+bx` as fractions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateGrid {
    pub start: f64,
    pub step: f64,
    pub steps: usize,
}

impl Default for RateGrid {
    fn default() -> Self {
        RateGrid {
            start: 0.0,
            step: 0.02,
            steps: 25,
        }
    }
}

impl RateGrid {
    pub fn new(start: f64, step: f64, steps: usize) -> Result<RateGrid> {
        let g = RateGrid { start, step, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("rate grid must be finite".into()));
        }
        if self.start < 0.0 {
            return Err(Error::Config("rate grid starts below 0".into()));
        }
        if self.steps > 0 && self.step <= 0.0 {
            return Err(Error::Config("rate grid step must be positive".into()));
        }
        if self.last() > 1.0 + GRID_TOL {
            return Err(Error::Config(format!("rate grid ends at {} > 1", self.last())));
        }
        Ok(())
    }

    pub fn last(&self) -> f64 {
        self.start + self.steps as f64 * self.step
    }

    pub fn rates(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .map(|r| r.min(1.0))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Values of one measure along a rate grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    measure: Measure,
    rates: Vec<f64>,
    values: Vec<f64>,
}

impl MetricSeries {
    /// Rates must ascend with uniform spacing and match `values` in length.
    pub fn new(measure: Measure, rates: Vec<f64>, values: Vec<f64>) -> Result<MetricSeries> {
        if rates.len() != values.len() {
            return Err(Error::Parameter(format!(
                "{} rates but {} values",
                rates.len(),
                values.len()
            )));
        }
        if rates.len() >= 2 {
            let step = rates[1] - rates[0];
            if step <= 0.0 {
                return Err(Error::Parameter("rates must ascend".into()));
            }
            let uniform = rates
                .windows(2)
                .all(|w| ((w[1] - w[0]) - step).abs() <= GRID_TOL * step.max(1.0));
            if !uniform {
                return Err(Error::Parameter("rates must be evenly spaced".into()));
            }
        }
        Ok(MetricSeries {
            measure,
            rates,
            values,
        })
    }

    pub fn from_grid(measure: Measure, grid: &RateGrid, values: Vec<f64>) -> Result<MetricSeries> {
        MetricSeries::new(measure, grid.rates(), values)
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn direction(&self) -> Direction {
        self.measure.direction()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn two_points(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::Parameter(format!("a series needs two points, got {n}")))
    } else {
        Ok(())
    }
}

pub(crate) fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[0] - w[1]).abs()).sum()
}

/// Sum of absolute changes between consecutive grid points.
pub fn sensibility(s: &MetricSeries) -> Result<f64> {
    two_points(s.len())?;
    Ok(total_variation(&s.values))
}

/// First-violation scan against the baseline `values[0]`.
pub(crate) fn keeping_index(values: &[f64], direction: Direction, k: f64) -> usize {
    let base = values[0];
    let drop = |y: f64| match direction {
        Direction::HigherBetter => base - y,
        Direction::LowerBetter => y - base,
    };
    values
        .iter()
        .skip(1)
        .position(|&y| drop(y) > k)
        .unwrap_or(values.len() - 1)
}

/// The grid rate just before the measure first falls more than `k` below
/// its value at the first rate (rises above, for lower-better measures);
/// the last rate when it never does.
pub fn keeping_point(s: &MetricSeries, k: f64) -> Result<f64> {
    two_points(s.len())?;
    if k.is_nan() || k <= 0.0 {
        return Err(Error::Parameter(format!("threshold {k} must be positive")));
    }
    Ok(s.rates[keeping_index(&s.values, s.direction(), k)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pct(v: &[f64]) -> MetricSeries {
        let rates = (0..v.len()).map(|i| i as f64 * 0.1).collect();
        MetricSeries::new(Measure::Precision, rates, v.iter().map(|x| x / 100.0).collect()).unwrap()
    }

    #[test]
    fn grid_defaults() {
        let g = RateGrid::default();
        let r = g.rates();
        assert_eq!(r.len(), 26);
        assert_eq!(r[25], 0.5);
        assert_eq!(RateGrid::new(0.0, 0.1, 5).unwrap().rates()[3], 0.3);
        assert!(RateGrid::new(0.0, 0.1, 11).is_err());
        assert!(RateGrid::new(0.0, 0.0, 3).is_err());
        assert_eq!(RateGrid::new(0.0, 0.0, 0).unwrap().rates(), vec![0.0]);
    }

    #[test]
    fn series_checks_spacing() {
        assert!(MetricSeries::new(Measure::Rmsd, vec![0.0, 0.1, 0.3], vec![1.0; 3]).is_err());
        assert!(MetricSeries::new(Measure::Rmsd, vec![0.0, 0.1], vec![1.0; 3]).is_err());
        let one = MetricSeries::new(Measure::Rmsd, vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(sensibility(&one), Err(Error::Parameter(_))));
        assert!(matches!(keeping_point(&one, 0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn iris_example() {
        let s = pct(&[78.37, 84.16, 78.08, 74.36, 64.99, 58.71]);
        assert!((sensibility(&s).unwrap() - 0.3124).abs() < 5e-5);
        assert!((keeping_point(&s, 0.1).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(sensibility(&pct(&[50.0; 4])).unwrap(), 0.0);
    }

    #[test]
    fn lower_better_mirrors() {
        let s = MetricSeries::new(Measure::Rmsd, vec![0.0, 0.1, 0.2, 0.3], vec![1.0, 1.05, 1.2, 0.9])
            .unwrap();
        assert!((keeping_point(&s, 0.1).unwrap() - 0.1).abs() < 1e-12);
        assert!((keeping_point(&s, 0.5).unwrap() - 0.3).abs() < 1e-12);
    }

    fn series() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 2..12)
    }

    proptest! {
        #[test]
        fn bounded_below_by_endpoints(v in series()) {
            let s = pct(&v.iter().map(|x| x * 100.0).collect::<Vec<_>>());
            let tv = sensibility(&s).unwrap();
            let ends = (s.values()[0] - s.values()[s.len() - 1]).abs();
            prop_assert!(tv >= ends - 1e-12);
            let mut sorted = s.values().to_vec();
            sorted.sort_by(f64::total_cmp);
            let mono = MetricSeries::new(Measure::Precision, s.rates().to_vec(), sorted).unwrap();
            let tv_mono = sensibility(&mono).unwrap();
            let ends_mono = mono.values()[mono.len() - 1] - mono.values()[0];
            prop_assert!((tv_mono - ends_mono).abs() < 1e-9);
        }

        #[test]
        fn reversal_and_shift_invariant(v in series(), c in -5.0f64..5.0) {
            let tv = total_variation(&v);
            let rev: Vec<f64> = v.iter().rev().copied().collect();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            prop_assert!((total_variation(&rev) - tv).abs() < 1e-12);
            prop_assert!((total_variation(&shifted) - tv).abs() < 1e-9);
        }

        #[test]
        fn keeping_point_monotone_in_k(v in series(), k1 in 0.001f64..0.5, dk in 0.0f64..0.5) {
            let s = pct(&v.iter().map(|x| x * 100.0).collect::<Vec<_>>());
            let a = keeping_point(&s, k1).unwrap();
            let b = keeping_point(&s, k1 + dk).unwrap();
            prop_assert!(b >= a);
            prop_assert!(s.rates().contains(&a));
            prop_assert_eq!(keeping_point(&s, f64::INFINITY).unwrap(), s.rates()[s.len() - 1]);
        }
    }
}
