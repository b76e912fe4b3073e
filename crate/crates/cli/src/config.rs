//! Run configuration: a TOML file with every key documented in the README.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dqimpact::corruption::ErrorType;
use dqimpact::dataset::{load_dataset, parse_fd_rules, BoundRule, FdRule, LoadOptions};
use dqimpact::evaluate::{Algorithm, AlgorithmSpec, CvOptions};
use dqimpact::robustness::{RateGrid, SizeThresholds, SweepDataset, SweepPlan, Thresholds};

use crate::failure::{io_at, Failure, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub load: LoadOptions,
    /// Functional dependencies, `A,B -> C` each.
    #[serde(default)]
    pub rules: Vec<String>,
    /// File with one rule per line, read in addition to `rules`.
    pub rules_file: Option<PathBuf>,
    #[serde(default)]
    pub entity_key: Vec<String>,
    pub column_mask: Option<Vec<String>>,
    /// Only these algorithms run on this dataset.
    pub algorithms: Option<Vec<Algorithm>>,
}

/// An algorithm by name with default parameters, `"all"`, or a table with
/// `name` and parameter overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmEntry {
    Name(String),
    Spec(AlgorithmSpec),
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    pub error_types: Vec<ErrorType>,
    #[serde(default)]
    pub grid: RateGrid,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub sizes: SizeThresholds,
    #[serde(default)]
    pub cv: CvOptions,
    pub datasets: Vec<DatasetConfig>,
    pub algorithms: Vec<AlgorithmEntry>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Outcome<RunConfig> {
        toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))
    }

    /// Reads `path` and makes dataset paths absolute relative to it.
    pub fn load(path: &Path) -> Outcome<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(io_at(path))?;
        let mut cfg = RunConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let base = std::path::absolute(base).map_err(io_at(base))?;
        for d in &mut cfg.datasets {
            d.path = base.join(&d.path);
            if let Some(r) = &mut d.rules_file {
                *r = base.join(&*r);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 over the resolved configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn algorithm_specs(&self) -> Outcome<Vec<AlgorithmSpec>> {
        let mut out = Vec::new();
        for entry in &self.algorithms {
            match entry {
                AlgorithmEntry::Name(n) if n == "all" => {
                    out.extend(Algorithm::ALL.into_iter().map(AlgorithmSpec::default_for))
                }
                AlgorithmEntry::Name(n) => {
                    out.push(AlgorithmSpec::default_for(n.parse::<Algorithm>()?))
                }
                AlgorithmEntry::Spec(s) => out.push(s.clone()),
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &out {
            if !seen.insert(s.algorithm()) {
                return Err(Failure::Config(format!("algorithm {} listed twice", s.algorithm())));
            }
        }
        Ok(out)
    }

    /// Checks everything that does not need the data.
    pub fn validate(&self) -> Outcome<()> {
        if self.datasets.is_empty() {
            return Err(Failure::Config("no datasets".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Failure::Config("no algorithms".into()));
        }
        if self.error_types.is_empty() {
            return Err(Failure::Config("no error types".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if !names.insert(&d.name) {
                return Err(Failure::Config(format!("dataset name `{}` used twice", d.name)));
            }
        }
        if self.sizes.small > self.sizes.large {
            return Err(Failure::Config("sizes.small exceeds sizes.large".into()));
        }
        for s in self.algorithm_specs()? {
            s.validate()?;
        }
        self.grid.validate()?;
        self.thresholds.validate()?;
        Ok(())
    }

    /// Loads the datasets and builds the sweep plan.
    pub fn plan(&self) -> Outcome<SweepPlan> {
        self.validate()?;
        let mut datasets = Vec::new();
        for dc in &self.datasets {
            let data = load_dataset(&dc.path, &dc.load)?;
            let mut rules: Vec<FdRule> = parse_fd_rules(&dc.rules.join("\n"))?;
            if let Some(f) = &dc.rules_file {
                let text = std::fs::read_to_string(f).map_err(io_at(f))?;
                rules.extend(parse_fd_rules(&text)?);
            }
            BoundRule::bind_all(&rules, data.schema())?;
            for k in &dc.entity_key {
                data.schema().require(k)?;
            }
            let mut ds = SweepDataset::new(dc.name.clone(), data);
            ds.rules = rules;
            ds.entity_key = dc.entity_key.clone();
            ds.column_mask = dc.column_mask.clone();
            ds.algorithms = dc.algorithms.clone();
            datasets.push(ds);
        }
        let plan = SweepPlan {
            datasets,
            algorithms: self.algorithm_specs()?,
            error_types: self.error_types.clone(),
            grid: self.grid,
            root_seed: self.seed,
            repeats: self.repeats,
            thresholds: self.thresholds,
            cv: self.cv.clone(),
        };
        plan.validate()?;
        for et in &plan.error_types {
            for ds in &plan.datasets {
                let missing_setup = match et {
                    ErrorType::Inconsistent => ds.rules.is_empty(),
                    ErrorType::Conflicting => ds.entity_key.is_empty(),
                    ErrorType::Missing => false,
                };
                if missing_setup {
                    return Err(Failure::Config(format!(
                        "dataset `{}` needs {} for {et} errors",
                        ds.name,
                        if *et == ErrorType::Inconsistent { "rules" } else { "an entity_key" }
                    )));
                }
            }
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7
error_types = ["missing"]
algorithms = ["knn", { name = "kmeans", n_init = 3 }]

[grid]
start = 0.0
step = 0.1
steps = 5

[[datasets]]
name = "iris"
path = "iris.csv"
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.repeats, 1);
        assert_eq!(c.cv.folds, 10);
        let specs = c.algorithm_specs().unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[1].algorithm(), Algorithm::KMeans);
        let again = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.hash(), c.hash());
    }

    #[test]
    fn rejects_unknown_keys_and_empty_lists() {
        assert!(RunConfig::parse(&format!("{SAMPLE}\nbogus = 1\n")).is_err());
        let empty = SAMPLE.replace(r#"algorithms = ["knn", { name = "kmeans", n_init = 3 }]"#, "algorithms = []");
        let c = RunConfig::parse(&empty).unwrap();
        assert!(matches!(c.validate(), Err(Failure::Config(_))));
        let bad = SAMPLE.replace("n_init = 3", "n_init = 3, wobble = 1");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut c = RunConfig::parse(SAMPLE).unwrap();
        let h = c.hash();
        c.output_dir = PathBuf::from("elsewhere");
        assert_eq!(c.hash(), h);
        c.seed = 8;
        assert_ne!(c.hash(), h);
    }
}
