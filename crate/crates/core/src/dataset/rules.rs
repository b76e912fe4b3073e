use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CellKey, Dataset, Schema};
use crate::{Error, Result};

/// A functional dependency `lhs -> rhs` by column name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdRule {
    pub lhs: Vec<String>,
    pub rhs: String,
}

impl fmt::Display for FdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs.join(","), self.rhs)
    }
}

impl FdRule {
    pub fn new(lhs: Vec<String>, rhs: impl Into<String>) -> Result<Self> {
        let rule = FdRule {
            lhs,
            rhs: rhs.into(),
        };
        if rule.lhs.is_empty() || rule.lhs.iter().any(String::is_empty) || rule.rhs.is_empty() {
            return Err(Error::Parse {
                path: "<rules>".into(),
                line: 0,
                message: format!("incomplete rule `{rule}`"),
            });
        }
        if rule.lhs.contains(&rule.rhs) {
            return Err(Error::Cycle(format!("`{}` appears on both sides of `{rule}`", rule.rhs)));
        }
        Ok(rule)
    }

    pub fn bind(&self, schema: &Schema) -> Result<BoundRule> {
        let lhs = self
            .lhs
            .iter()
            .map(|c| schema.require(c))
            .collect::<Result<Vec<_>>>()?;
        let rhs = schema.require(&self.rhs)?;
        Ok(BoundRule {
            rule: self.clone(),
            lhs,
            rhs,
        })
    }
}

/// An [`FdRule`] resolved to column indices of a schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRule {
    pub rule: FdRule,
    pub lhs: Vec<usize>,
    pub rhs: usize,
}

impl BoundRule {
    pub fn bind_all(rules: &[FdRule], schema: &Schema) -> Result<Vec<BoundRule>> {
        rules.iter().map(|r| r.bind(schema)).collect()
    }

    /// Row groups sharing a complete (non-missing) lhs value.
    pub(crate) fn groups(&self, d: &Dataset) -> HashMap<Vec<CellKey>, Vec<usize>> {
        group_rows(d, &self.lhs)
    }
}

pub(crate) fn group_rows(d: &Dataset, cols: &[usize]) -> HashMap<Vec<CellKey>, Vec<usize>> {
    let mut groups: HashMap<Vec<CellKey>, Vec<usize>> = HashMap::new();
    for (i, r) in d.rows().iter().enumerate() {
        let key: Option<Vec<CellKey>> = cols.iter().map(|&c| r.cells[c].key()).collect();
        if let Some(key) = key {
            groups.entry(key).or_default().push(i);
        }
    }
    groups
}

/// Parses one rule per line in the form `A,B -> C`. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_fd_rules(text: &str) -> Result<Vec<FdRule>> {
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::Parse {
            path: "<rules>".into(),
            line: i as u64 + 1,
            message: format!("missing `->` in `{line}`"),
        })?;
        let lhs = lhs.split(',').map(|s| s.trim().to_string()).collect();
        let rule = FdRule::new(lhs, rhs.trim()).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: "<rules>".into(),
                line: i as u64 + 1,
                message,
            },
            other => other,
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub missing: f64,
    pub inconsistent: f64,
    pub conflicting: f64,
}

/// Measures the three error rates of `d`.
///
/// * missing: missing cells over all feature cells;
/// * inconsistent: rows belonging to an lhs group of some rule whose rhs
///   takes two or more distinct values;
/// * conflicting: rows belonging to an entity-key group whose members
///   disagree on some non-key column.
///
/// Passing `None` skips a measurement (rate 0); passing an empty rule list
/// or key is a configuration error.
pub fn detect_error_rates(
    d: &Dataset,
    rules: Option<&[BoundRule]>,
    entity_key: Option<&[usize]>,
) -> Result<ErrorRates> {
    let features = d.schema().feature_indices();
    let rows = d.len().max(1) as f64;
    let total = (d.len() * features.len()).max(1) as f64;
    let missing = d
        .rows()
        .iter()
        .map(|r| features.iter().filter(|&&c| r.cells[c].is_missing()).count())
        .sum::<usize>() as f64
        / total;

    let inconsistent = match rules {
        None => 0.0,
        Some([]) => {
            return Err(Error::Config(
                "inconsistency detection requested without rules".into(),
            ))
        }
        Some(rules) => inconsistent_rows(d, rules).len() as f64 / rows,
    };
    let conflicting = match entity_key {
        None => 0.0,
        Some([]) => {
            return Err(Error::Config(
                "conflict detection requested without an entity key".into(),
            ))
        }
        Some(key) => conflicting_rows(d, key).len() as f64 / rows,
    };
    Ok(ErrorRates {
        missing,
        inconsistent,
        conflicting,
    })
}

pub(crate) fn inconsistent_rows(d: &Dataset, rules: &[BoundRule]) -> HashSet<usize> {
    let mut flagged = HashSet::new();
    for rule in rules {
        for members in rule.groups(d).values() {
            if distinct_values(d, members, rule.rhs) >= 2 {
                flagged.extend(members.iter().copied());
            }
        }
    }
    flagged
}

pub(crate) fn conflicting_rows(d: &Dataset, key: &[usize]) -> HashSet<usize> {
    let others: Vec<usize> = (0..d.schema().arity()).filter(|c| !key.contains(c)).collect();
    let mut flagged = HashSet::new();
    for members in group_rows(d, key).values() {
        if members.len() > 1 && others.iter().any(|&c| distinct_values(d, members, c) >= 2) {
            flagged.extend(members.iter().copied());
        }
    }
    flagged
}

fn distinct_values(d: &Dataset, members: &[usize], col: usize) -> usize {
    members
        .iter()
        .filter_map(|&i| d.cell(i, col).key())
        .collect::<HashSet<_>>()
        .len()
}
