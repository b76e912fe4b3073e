//! Node impurity measures over class-count vectors.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn total(counts: &[usize]) -> Result<f64> {
    let n: usize = counts.iter().sum();
    if n == 0 {
        Err(Error::UndefinedNode)
    } else {
        Ok(n as f64)
    }
}

/// `1 - sum p_i^2`.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let n = total(counts)?;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(counts: &[usize]) -> Result<f64> {
    let n = total(counts)?;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

/// `1 - max p_i`.
pub fn misclassification_error(counts: &[usize]) -> Result<f64> {
    let n = total(counts)?;
    let max = counts.iter().copied().max().unwrap_or(0);
    Ok(1.0 - max as f64 / n)
}

/// Entropy of `parent` minus the size-weighted entropy of `partitions`.
/// The partitions must add up to the parent class by class.
pub fn information_gain(parent: &[usize], partitions: &[Vec<usize>]) -> Result<f64> {
    let n = total(parent)?;
    for p in partitions {
        if p.len() != parent.len() {
            return Err(Error::Parameter("partition class count differs from parent".into()));
        }
    }
    for (k, &c) in parent.iter().enumerate() {
        if partitions.iter().map(|p| p[k]).sum::<usize>() != c {
            return Err(Error::Parameter("partitions do not cover the parent".into()));
        }
    }
    let mut weighted = 0.0;
    for p in partitions {
        let m: usize = p.iter().sum();
        if m > 0 {
            weighted += m as f64 / n * entropy(p)?;
        }
    }
    Ok(entropy(parent)? - weighted)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
    Gain,
    Error,
}

impl Criterion {
    pub fn impurity(self, counts: &[usize]) -> f64 {
        let r = match self {
            Criterion::Gini => gini(counts),
            Criterion::Gain => entropy(counts),
            Criterion::Error => misclassification_error(counts),
        };
        r.unwrap_or(0.0)
    }

    /// Impurity decrease of a binary split; larger is better. For `Gain`
    /// this is the information gain.
    pub fn improvement(self, parent: &[usize], left: &[usize], right: &[usize]) -> f64 {
        let n: usize = parent.iter().sum();
        let nl: usize = left.iter().sum();
        let nr = n - nl;
        if n == 0 {
            return 0.0;
        }
        let w = |m: usize, c: &[usize]| {
            if m == 0 {
                0.0
            } else {
                m as f64 / n as f64 * self.impurity(c)
            }
        };
        self.impurity(parent) - w(nl, left) - w(nr, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        assert_eq!(gini(&[5, 5]).unwrap(), 0.5);
        assert_eq!(gini(&[10, 0]).unwrap(), 0.0);
        // 1 - (1/16 + 9/16)
        assert_eq!(gini(&[1, 3]).unwrap(), 0.375);
        assert_eq!(entropy(&[5, 5]).unwrap(), 1.0);
        assert_eq!(misclassification_error(&[10, 0]).unwrap(), 0.0);
        let gain = information_gain(&[4, 4], &[vec![4, 0], vec![0, 4]]).unwrap();
        assert!((gain - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_node_is_undefined() {
        assert!(matches!(gini(&[0, 0]), Err(Error::UndefinedNode)));
        assert!(matches!(entropy(&[]), Err(Error::UndefinedNode)));
        assert!(matches!(misclassification_error(&[0]), Err(Error::UndefinedNode)));
    }

    #[test]
    fn partitions_must_cover_parent() {
        assert!(information_gain(&[4, 4], &[vec![4, 0], vec![0, 3]]).is_err());
    }

    #[test]
    fn maxima_at_uniform_counts() {
        for nc in 2..=4usize {
            let uniform = vec![6; nc];
            let bound = 1.0 - 1.0 / nc as f64;
            assert!((gini(&uniform).unwrap() - bound).abs() < 1e-12);
            assert!((misclassification_error(&uniform).unwrap() - bound).abs() < 1e-12);
            assert!((entropy(&uniform).unwrap() - (nc as f64).log2()).abs() < 1e-12);
            // every other composition of 6*nc is no larger
            let total = 6 * nc;
            let mut v = vec![0; nc];
            v[0] = total;
            loop {
                assert!(gini(&v).unwrap() <= bound + 1e-12);
                assert!(misclassification_error(&v).unwrap() <= bound + 1e-12);
                assert!(entropy(&v).unwrap() <= (nc as f64).log2() + 1e-12);
                // next composition
                let Some(i) = (0..nc - 1).rev().find(|&i| v[i] > 0) else { break };
                v[i] -= 1;
                let rest: usize = v[i + 1..].iter().sum::<usize>() + 1;
                for x in &mut v[i + 1..] {
                    *x = 0;
                }
                v[i + 1] = rest;
            }
        }
    }

    proptest! {
        #[test]
        fn zero_iff_pure(counts in prop::collection::vec(0usize..20, 2..5)) {
            prop_assume!(counts.iter().sum::<usize>() > 0);
            let n: usize = counts.iter().sum();
            let pure = counts.iter().any(|&c| c == n);
            prop_assert_eq!(gini(&counts).unwrap().abs() < 1e-15, pure);
            prop_assert_eq!(entropy(&counts).unwrap().abs() < 1e-15, pure);
            prop_assert_eq!(misclassification_error(&counts).unwrap().abs() < 1e-15, pure);
        }

        #[test]
        fn gain_is_non_negative(
            table in prop::collection::vec(prop::collection::vec(0usize..10, 3), 1..5)
        ) {
            let parent: Vec<usize> = (0..3).map(|k| table.iter().map(|p| p[k]).sum()).collect();
            prop_assume!(parent.iter().sum::<usize>() > 0);
            prop_assert!(information_gain(&parent, &table).unwrap() >= -1e-12);
        }
    }
}
