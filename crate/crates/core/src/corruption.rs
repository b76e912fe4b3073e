//! Seeded injection of missing, inconsistent and conflicting values, and
//! mean/mode imputation.
//!
//! Rates use cells as the denominator for missing values and rows for the
//! other two types. Every row chosen for an inconsistent or conflicting
//! error is itself altered; partner rows fabricated to complete a
//! violation are verbatim copies of the chosen row taken before the
//! change, so the altered-row count is exact.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::{BoundRule, Cell, CellKey, ColumnKind, Dataset, FdRule, Record};
use crate::seed::{self, Rng};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorType {
    Missing,
    Inconsistent,
    Conflicting,
}

impl ErrorType {
    pub const ALL: [ErrorType; 3] = [
        ErrorType::Missing,
        ErrorType::Inconsistent,
        ErrorType::Conflicting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::Missing => "missing",
            ErrorType::Inconsistent => "inconsistent",
            ErrorType::Conflicting => "conflicting",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErrorType::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown error type `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub error_type: ErrorType,
    pub rate: f64,
    pub seed: u64,
    /// Columns eligible for corruption. Defaults to the feature columns,
    /// plus the target when `corrupt_target_in_train` is set.
    pub column_mask: Option<Vec<String>>,
    pub corrupt_target_in_train: bool,
    pub rules: Vec<FdRule>,
    pub entity_key: Vec<String>,
}

impl CorruptionSpec {
    pub fn new(error_type: ErrorType, rate: f64, seed: u64) -> Self {
        CorruptionSpec {
            error_type,
            rate,
            seed,
            column_mask: None,
            corrupt_target_in_train: false,
            rules: Vec::new(),
            entity_key: Vec::new(),
        }
    }

    pub fn with_rules(mut self, rules: Vec<FdRule>) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_entity_key(mut self, key: Vec<String>) -> Self {
        self.entity_key = key;
        self
    }

    pub fn with_mask(mut self, mask: Vec<String>) -> Self {
        self.column_mask = Some(mask);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::Config(format!("rate {} outside [0, 1]", self.rate)));
        }
        match self.error_type {
            ErrorType::Inconsistent if self.rules.is_empty() => Err(Error::Config(
                "inconsistent injection needs at least one rule".into(),
            )),
            ErrorType::Conflicting if self.entity_key.is_empty() => Err(Error::Config(
                "conflicting injection needs an entity key".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Column indices eligible for corruption.
    pub fn mask(&self, d: &Dataset) -> Result<Vec<usize>> {
        let schema = d.schema();
        let target = schema.target_index();
        let mut mask = match &self.column_mask {
            Some(names) => names
                .iter()
                .map(|n| schema.require(n))
                .collect::<Result<Vec<_>>>()?,
            None => {
                let mut m = schema.feature_indices();
                if self.corrupt_target_in_train {
                    m.push(target);
                }
                m
            }
        };
        if mask.contains(&target) && !self.corrupt_target_in_train {
            return Err(Error::Config(
                "column mask includes the target but corrupt_target_in_train is off".into(),
            ));
        }
        mask.sort_unstable();
        mask.dedup();
        Ok(mask)
    }
}

/// Output of an injection together with what was changed.
#[derive(Clone, Debug)]
pub struct Injection {
    pub dataset: Dataset,
    /// Cells (missing) or rows (inconsistent, conflicting) altered.
    pub altered: usize,
    /// Eligible cells (missing) or input rows (other types).
    pub denominator: usize,
    /// Partner rows appended to complete a violation.
    pub fabricated: usize,
}

impl Injection {
    pub fn achieved_rate(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.altered as f64 / self.denominator as f64
        }
    }
}

/// Dispatches on `spec.error_type`.
pub fn inject(d: &Dataset, spec: &CorruptionSpec) -> Result<Injection> {
    spec.validate()?;
    match spec.error_type {
        ErrorType::Missing => missing(d, spec),
        ErrorType::Inconsistent => inconsistent(d, spec),
        ErrorType::Conflicting => conflicting(d, spec),
    }
}

pub fn inject_missing(d: &Dataset, spec: &CorruptionSpec) -> Result<Dataset> {
    expect_type(spec, ErrorType::Missing)?;
    inject(d, spec).map(|i| i.dataset)
}

pub fn inject_inconsistent(d: &Dataset, spec: &CorruptionSpec) -> Result<Dataset> {
    expect_type(spec, ErrorType::Inconsistent)?;
    inject(d, spec).map(|i| i.dataset)
}

pub fn inject_conflicting(d: &Dataset, spec: &CorruptionSpec) -> Result<Dataset> {
    expect_type(spec, ErrorType::Conflicting)?;
    inject(d, spec).map(|i| i.dataset)
}

fn expect_type(spec: &CorruptionSpec, t: ErrorType) -> Result<()> {
    if spec.error_type != t {
        return Err(Error::Config(format!(
            "spec is for {} errors, not {t}",
            spec.error_type
        )));
    }
    Ok(())
}

fn target_count(rate: f64, denominator: usize) -> usize {
    (rate * denominator as f64).round() as usize
}

fn missing(d: &Dataset, spec: &CorruptionSpec) -> Result<Injection> {
    let mask = spec.mask(d)?;
    let eligible = d.len() * mask.len();
    if spec.rate > 0.0 && eligible == 0 {
        return Err(Error::Config("no eligible cells for missing injection".into()));
    }
    let wanted = target_count(spec.rate, eligible);
    let present: Vec<(usize, usize)> = (0..d.len())
        .flat_map(|r| mask.iter().map(move |&c| (r, c)))
        .filter(|&(r, c)| !d.cell(r, c).is_missing())
        .collect();
    let take = wanted.min(present.len());
    let mut rng = seed::rng(spec.seed);
    let mut rows = d.rows().to_vec();
    for i in index::sample(&mut rng, present.len(), take).into_iter() {
        let (r, c) = present[i];
        rows[r].cells[c] = Cell::Missing;
    }
    Ok(Injection {
        dataset: d.derive(rows, d.origin().to_vec())?,
        altered: take,
        denominator: eligible,
        fabricated: 0,
    })
}

/// Row groups keyed on a column set, kept current while cells change.
struct GroupIndex {
    cols: Vec<usize>,
    groups: HashMap<Vec<CellKey>, Vec<usize>>,
}

impl GroupIndex {
    fn build(cols: Vec<usize>, rows: &[Record]) -> Self {
        let mut g = GroupIndex {
            cols,
            groups: HashMap::new(),
        };
        for (i, r) in rows.iter().enumerate() {
            g.insert(i, r);
        }
        g
    }

    fn key(&self, r: &Record) -> Option<Vec<CellKey>> {
        self.cols.iter().map(|&c| r.cells[c].key()).collect()
    }

    fn insert(&mut self, i: usize, r: &Record) {
        if let Some(k) = self.key(r) {
            self.groups.entry(k).or_default().push(i);
        }
    }

    fn remove(&mut self, i: usize, r: &Record) {
        if let Some(k) = self.key(r) {
            if let Some(v) = self.groups.get_mut(&k) {
                v.retain(|&x| x != i);
            }
        }
    }

    fn others(&self, i: usize, r: &Record) -> Vec<usize> {
        self.key(r)
            .and_then(|k| self.groups.get(&k))
            .map(|v| v.iter().copied().filter(|&x| x != i).collect())
            .unwrap_or_default()
    }
}

/// Working copy of a dataset under row-level corruption.
struct RowEditor {
    rows: Vec<Record>,
    origin: Vec<usize>,
    indexes: Vec<GroupIndex>,
    fabricated: usize,
}

impl RowEditor {
    fn new(d: &Dataset, index_cols: Vec<Vec<usize>>) -> Self {
        let rows = d.rows().to_vec();
        let indexes = index_cols
            .into_iter()
            .map(|cols| GroupIndex::build(cols, &rows))
            .collect();
        RowEditor {
            rows,
            origin: d.origin().to_vec(),
            indexes,
            fabricated: 0,
        }
    }

    fn duplicate(&mut self, r: usize) {
        let copy = self.rows[r].clone();
        let i = self.rows.len();
        for g in &mut self.indexes {
            g.insert(i, &copy);
        }
        self.origin.push(self.origin[r]);
        self.rows.push(copy);
        self.fabricated += 1;
    }

    fn set(&mut self, r: usize, col: usize, value: Cell) {
        let touched: Vec<usize> = (0..self.indexes.len())
            .filter(|&g| self.indexes[g].cols.contains(&col))
            .collect();
        for &g in &touched {
            self.indexes[g].remove(r, &self.rows[r]);
        }
        self.rows[r].cells[col] = value;
        for &g in &touched {
            self.indexes[g].insert(r, &self.rows[r]);
        }
    }

    /// Picks a replacement for `rows[r][col]` from `domain`, never the
    /// current value and, when the rows in `peers` agree on one value,
    /// preferably not that value either.
    fn replacement(&self, r: usize, col: usize, peers: &[usize], domain: &[Cell], rng: &mut Rng) -> Option<Cell> {
        let current = self.rows[r].cells[col].key();
        let mut peer_keys = peers.iter().filter_map(|&p| self.rows[p].cells[col].key());
        let uniform = peer_keys.next().filter(|first| peer_keys.all(|k| &k == first));
        let differs = |c: &&Cell| c.key() != current;
        let preferred: Vec<&Cell> = domain
            .iter()
            .filter(differs)
            .filter(|c| uniform.is_none() || c.key() != uniform)
            .collect();
        let pool = if preferred.is_empty() {
            domain.iter().filter(differs).collect()
        } else {
            preferred
        };
        if pool.is_empty() {
            None
        } else {
            Some(pool[rng.random_range(0..pool.len())].clone())
        }
    }

    fn finish(self, d: &Dataset, altered: usize, denominator: usize) -> Result<Injection> {
        let fabricated = self.fabricated;
        Ok(Injection {
            dataset: d.derive(self.rows, self.origin)?,
            altered,
            denominator,
            fabricated,
        })
    }
}

fn inconsistent(d: &Dataset, spec: &CorruptionSpec) -> Result<Injection> {
    let mask = spec.mask(d)?;
    let rules = BoundRule::bind_all(&spec.rules, d.schema())?;
    let mut domains = Vec::with_capacity(rules.len());
    for rule in &rules {
        if !mask.contains(&rule.rhs) {
            return Err(Error::Config(format!(
                "rule `{}` has its right-hand side outside the column mask",
                rule.rule
            )));
        }
        let domain = d.clean_domain(rule.rhs);
        if domain.len() < 2 {
            return Err(Error::InjectionImpossible(format!(
                "rule `{}`: `{}` takes a single value",
                rule.rule, rule.rule.rhs
            )));
        }
        domains.push(domain);
    }

    let n = d.len();
    let applicable = |row: &Record| -> Vec<usize> {
        (0..rules.len())
            .filter(|&k| rules[k].lhs.iter().all(|&c| !row.cells[c].is_missing()))
            .collect()
    };
    let candidates: Vec<usize> = (0..n).filter(|&r| !applicable(&d.rows()[r]).is_empty()).collect();
    let take = target_count(spec.rate, n).min(candidates.len());

    let mut rng = seed::rng(spec.seed);
    let chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), take)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    let mut ed = RowEditor::new(d, rules.iter().map(|r| r.lhs.clone()).collect());
    let mut altered = 0;
    for r in chosen {
        let usable = applicable(&ed.rows[r]);
        if usable.is_empty() {
            continue;
        }
        let k = usable[rng.random_range(0..usable.len())];
        let rule = &rules[k];
        let mut peers = ed.indexes[k].others(r, &ed.rows[r]);
        if peers.is_empty() {
            ed.duplicate(r);
            peers = ed.indexes[k].others(r, &ed.rows[r]);
        }
        if let Some(v) = ed.replacement(r, rule.rhs, &peers, &domains[k], &mut rng) {
            ed.set(r, rule.rhs, v);
            altered += 1;
        }
    }
    ed.finish(d, altered, n)
}

fn conflicting(d: &Dataset, spec: &CorruptionSpec) -> Result<Injection> {
    let mask = spec.mask(d)?;
    let key = spec
        .entity_key
        .iter()
        .map(|n| d.schema().require(n))
        .collect::<Result<Vec<_>>>()?;
    let free: Vec<usize> = mask.iter().copied().filter(|c| !key.contains(c)).collect();
    if free.is_empty() {
        return Err(Error::Config(
            "every eligible column is part of the entity key".into(),
        ));
    }
    let domains: Vec<(usize, Vec<Cell>)> = free
        .iter()
        .map(|&c| (c, d.clean_domain(c)))
        .filter(|(_, dom)| dom.len() >= 2)
        .collect();
    if domains.is_empty() {
        return Err(Error::InjectionImpossible(
            "no non-key column takes two or more values".into(),
        ));
    }

    let n = d.len();
    let candidates: Vec<usize> = (0..n)
        .filter(|&r| key.iter().all(|&c| !d.cell(r, c).is_missing()))
        .collect();
    let take = target_count(spec.rate, n).min(candidates.len());
    let mut rng = seed::rng(spec.seed);
    let chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), take)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    let mut ed = RowEditor::new(d, vec![key]);
    let mut altered = 0;
    for r in chosen {
        let mut peers = ed.indexes[0].others(r, &ed.rows[r]);
        if peers.is_empty() {
            ed.duplicate(r);
            peers = ed.indexes[0].others(r, &ed.rows[r]);
        }
        let (col, domain) = &domains[rng.random_range(0..domains.len())];
        if let Some(v) = ed.replacement(r, *col, &peers, domain, &mut rng) {
            ed.set(r, *col, v);
            altered += 1;
        }
    }
    ed.finish(d, altered, n)
}

/// Per-column fill values: the mean of numeric columns and the mode of
/// categorical ones (ties to the first-seen value).
#[derive(Clone, Debug, PartialEq)]
pub struct Imputer {
    fills: Vec<Option<Cell>>,
    names: Vec<String>,
}

impl Imputer {
    pub fn fit(d: &Dataset) -> Imputer {
        let schema = d.schema();
        let fills = schema
            .columns()
            .iter()
            .enumerate()
            .map(|(c, col)| match col.kind {
                ColumnKind::Numeric => {
                    let (sum, count) = d
                        .rows()
                        .iter()
                        .filter_map(|r| r.cells[c].as_f64())
                        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
                    (count > 0).then(|| Cell::Numeric(sum / count as f64))
                }
                ColumnKind::Categorical => {
                    let mut counts: Vec<(&str, usize)> = Vec::new();
                    for r in d.rows() {
                        if let Some(s) = r.cells[c].as_str() {
                            match counts.iter_mut().find(|(k, _)| *k == s) {
                                Some(e) => e.1 += 1,
                                None => counts.push((s, 1)),
                            }
                        }
                    }
                    let mut best: Option<(&str, usize)> = None;
                    for (k, n) in counts {
                        if best.is_none_or(|(_, b)| n > b) {
                            best = Some((k, n));
                        }
                    }
                    best.map(|(k, _)| Cell::Categorical(k.to_string()))
                }
            })
            .collect();
        Imputer {
            fills,
            names: schema.columns().iter().map(|c| c.name.clone()).collect(),
        }
    }

    pub fn fill_value(&self, col: usize) -> Option<&Cell> {
        self.fills[col].as_ref()
    }

    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        let mut rows = d.rows().to_vec();
        for r in &mut rows {
            for (c, cell) in r.cells.iter_mut().enumerate() {
                if cell.is_missing() {
                    *cell = self.fills[c]
                        .clone()
                        .ok_or_else(|| Error::ImputationImpossible(self.names[c].clone()))?;
                }
            }
        }
        d.derive(rows, d.origin().to_vec())
    }
}

/// Fills missing cells of `d` from its own column means and modes.
pub fn impute(d: &Dataset) -> Result<Dataset> {
    Imputer::fit(d).apply(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{detect_error_rates, parse_fd_rules, Column, ColumnRole, Schema};

    fn grid(rows: usize, cols: usize) -> Dataset {
        let mut columns: Vec<Column> = (0..cols)
            .map(|c| Column::new(format!("f{c}"), ColumnKind::Numeric, ColumnRole::Feature))
            .collect();
        columns.push(Column::new("y", ColumnKind::Categorical, ColumnRole::Target));
        let data = (0..rows)
            .map(|r| {
                let mut cells: Vec<Cell> =
                    (0..cols).map(|c| Cell::Numeric((r * cols + c) as f64)).collect();
                cells.push(Cell::Categorical(if r % 2 == 0 { "a" } else { "b" }.into()));
                Record::new(cells)
            })
            .collect();
        Dataset::new(Schema::new(columns).unwrap(), data).unwrap()
    }

    fn students() -> Dataset {
        let columns = vec![
            Column::new("StudentNo", ColumnKind::Numeric, ColumnRole::Feature),
            Column::new("Name", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("City", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("Country", ColumnKind::Categorical, ColumnRole::Target),
        ];
        let rows = [
            (170302.0, "Alice", "NYC", "U.S.A"),
            (170302.0, "Alice", "NYC", "U.S.A"),
            (170304.0, "Bob", "NYC", "U.S.A"),
            (170305.0, "Steven", "LA", "FR"),
        ]
        .iter()
        .map(|(no, name, city, country)| {
            Record::new(vec![
                Cell::Numeric(*no),
                Cell::Categorical(name.to_string()),
                Cell::Categorical(city.to_string()),
                Cell::Categorical(country.to_string()),
            ])
        })
        .collect();
        Dataset::new(Schema::new(columns).unwrap(), rows).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let d = grid(10, 4);
        for t in ErrorType::ALL {
            let spec = CorruptionSpec::new(t, 0.0, 1)
                .with_rules(parse_fd_rules("f0 -> f1").unwrap())
                .with_entity_key(vec!["f0".into()]);
            let out = inject(&d, &spec).unwrap().dataset;
            assert_eq!(out.rows(), d.rows(), "{t}");
        }
    }

    #[test]
    fn quarter_of_forty_cells() {
        let d = grid(10, 4);
        let out = inject_missing(&d, &CorruptionSpec::new(ErrorType::Missing, 0.25, 3)).unwrap();
        assert_eq!(out.missing_cells(), 10);
        assert_eq!(out.clean_shadow(), d.rows());
        // target column untouched
        assert!(out.rows().iter().all(|r| !r.cells[4].is_missing()));
    }

    #[test]
    fn same_seed_same_output() {
        let d = grid(20, 3);
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.4, 99);
        assert_eq!(
            inject_missing(&d, &spec).unwrap().rows(),
            inject_missing(&d, &spec).unwrap().rows()
        );
    }

    #[test]
    fn missing_needs_eligible_cells() {
        let d = grid(3, 1);
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.5, 1).with_mask(vec![]);
        assert!(matches!(inject(&d, &spec), Err(Error::Config(_))));
    }

    #[test]
    fn target_in_mask_needs_the_flag() {
        let d = grid(3, 1);
        let spec = CorruptionSpec::new(ErrorType::Missing, 0.5, 1).with_mask(vec!["y".into()]);
        assert!(matches!(inject(&d, &spec), Err(Error::Config(_))));
    }

    #[test]
    fn student_name_violation() {
        let d = students();
        let rules = parse_fd_rules("StudentNo -> Name").unwrap();
        // one of four rows; whichever row is picked must end up violating
        for s in 0..20 {
            let spec = CorruptionSpec::new(ErrorType::Inconsistent, 0.25, s).with_rules(rules.clone());
            let inj = inject(&d, &spec).unwrap();
            assert_eq!(inj.altered, 1);
            let bound = BoundRule::bind_all(&rules, d.schema()).unwrap();
            let rates = detect_error_rates(&inj.dataset, Some(&bound), None).unwrap();
            assert!(rates.inconsistent * inj.dataset.len() as f64 >= 2.0 - 1e-9);
        }
    }

    #[test]
    fn single_valued_rhs_is_impossible() {
        let d = grid(4, 2);
        let mut rows = d.rows().to_vec();
        for r in &mut rows {
            r.cells[1] = Cell::Numeric(1.0);
        }
        let d = Dataset::new(d.schema().clone(), rows).unwrap();
        let spec = CorruptionSpec::new(ErrorType::Inconsistent, 0.5, 1)
            .with_rules(parse_fd_rules("f0 -> f1").unwrap());
        assert!(matches!(inject(&d, &spec), Err(Error::InjectionImpossible(_))));
    }

    #[test]
    fn conflicting_duplicates_singletons() {
        let d = students();
        let spec = CorruptionSpec::new(ErrorType::Conflicting, 0.5, 5)
            .with_entity_key(vec!["StudentNo".into(), "Name".into()]);
        let inj = inject(&d, &spec).unwrap();
        assert_eq!(inj.altered, 2);
        let key = [0, 1];
        let rates = detect_error_rates(&inj.dataset, None, Some(&key)).unwrap();
        assert!(rates.conflicting >= 0.5 - 0.25);
        assert_eq!(inj.dataset.origin().len(), inj.dataset.len());
    }

    #[test]
    fn all_key_columns_is_a_config_error() {
        let d = students();
        let spec = CorruptionSpec::new(ErrorType::Conflicting, 0.5, 5)
            .with_entity_key(vec!["StudentNo".into(), "Name".into(), "City".into()]);
        assert!(matches!(inject(&d, &spec), Err(Error::Config(_))));
    }

    #[test]
    fn impute_mean_and_mode() {
        let columns = vec![
            Column::new("x", ColumnKind::Numeric, ColumnRole::Feature),
            Column::new("c", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("y", ColumnKind::Categorical, ColumnRole::Target),
        ];
        let cells = [
            (Cell::Numeric(1.0), Cell::Categorical("a".into())),
            (Cell::Missing, Cell::Categorical("a".into())),
            (Cell::Numeric(3.0), Cell::Categorical("b".into())),
            (Cell::Numeric(2.0), Cell::Missing),
        ];
        let rows = cells
            .iter()
            .map(|(x, c)| Record::new(vec![x.clone(), c.clone(), Cell::Categorical("t".into())]))
            .collect();
        let d = Dataset::new(Schema::new(columns).unwrap(), rows).unwrap();
        let out = impute(&d).unwrap();
        assert_eq!(out.cell(1, 0), &Cell::Numeric(2.0));
        assert_eq!(out.cell(3, 1), &Cell::Categorical("a".into()));
        assert_eq!(impute(&out).unwrap().rows(), out.rows());
    }

    #[test]
    fn mode_ties_go_to_first_seen() {
        let columns = vec![
            Column::new("c", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("y", ColumnKind::Categorical, ColumnRole::Target),
        ];
        let rows = ["b", "a", "a", "b"]
            .iter()
            .map(|s| Record::new(vec![Cell::Categorical(s.to_string()), Cell::Categorical("t".into())]))
            .chain(std::iter::once(Record::new(vec![Cell::Missing, Cell::Categorical("t".into())])))
            .collect();
        let d = Dataset::new(Schema::new(columns).unwrap(), rows).unwrap();
        assert_eq!(impute(&d).unwrap().cell(4, 0), &Cell::Categorical("b".into()));
    }

    #[test]
    fn fully_missing_column_cannot_be_imputed() {
        let d = grid(3, 2);
        let spec = CorruptionSpec::new(ErrorType::Missing, 1.0, 1).with_mask(vec!["f1".into()]);
        let out = inject_missing(&d, &spec).unwrap();
        match impute(&out) {
            Err(Error::ImputationImpossible(c)) => assert_eq!(c, "f1"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
