//! Delimited renderings of a report: the per-algorithm tables, the
//! results ledger, timings and per-series plot data.
//!
//! Every writer takes an optional preamble, written as a leading `#`
//! comment line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sweep::RobustnessReport;
use crate::corruption::ErrorType;
use crate::evaluate::{EvalResult, Measure};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Sensibility,
    KeepingPoint,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Sensibility => "sensibility",
            Quantity::KeepingPoint => "keeping_point",
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer<W: Write>(w: W, delimiter: u8) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(delimiter)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        path: "<output>".into(),
        line: 0,
        message: e.to_string(),
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn preamble<W: Write>(w: &mut W, text: Option<&str>) -> std::io::Result<()> {
    if let Some(t) = text {
        for line in t.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

/// Algorithm rows against `{error_type}_{measure}` columns, holding the
/// cross-dataset mean of `quantity`. Only algorithms with at least one of
/// `measures` appear.
pub fn table(report: &RobustnessReport, quantity: Quantity, measures: &[Measure]) -> Vec<Vec<String>> {
    let error_types: Vec<ErrorType> = ErrorType::ALL
        .into_iter()
        .filter(|e| report.averages.iter().any(|a| a.error_type == *e))
        .collect();
    let mut header = vec!["algorithm".to_string()];
    for e in &error_types {
        for m in measures {
            header.push(format!("{e}_{m}"));
        }
    }
    let mut rows = vec![header];
    for algo in report.algorithms() {
        if !report.averages.iter().any(|a| a.algorithm == algo && measures.contains(&a.measure)) {
            continue;
        }
        let mut row = vec![algo.to_string()];
        for &e in &error_types {
            for &m in measures {
                let avg = report.average(algo, e, m);
                row.push(fmt_opt(avg.and_then(|a| match quantity {
                    Quantity::Sensibility => a.sensibility,
                    Quantity::KeepingPoint => a.keeping_point,
                })));
            }
        }
        rows.push(row);
    }
    rows
}

pub fn write_table<W: Write>(
    report: &RobustnessReport,
    mut w: W,
    quantity: Quantity,
    measures: &[Measure],
    delimiter: u8,
    pre: Option<&str>,
) -> Result<()> {
    preamble(&mut w, pre).map_err(|e| Error::io("<table>", e))?;
    let mut out = writer(w, delimiter);
    for row in table(report, quantity, measures) {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<table>", e))
}

pub const LEDGER_HEADER: [&str; 13] = [
    "dataset",
    "algorithm",
    "error_type",
    "rate",
    "achieved_rate",
    "seed",
    "precision",
    "recall",
    "f_measure",
    "rmsd",
    "nrmsd",
    "cv_rmsd",
    "flags",
];

/// One row per evaluation with fold-mean measures. Timing is kept out so
/// that reruns give identical bytes; see [`write_timings`].
pub fn write_ledger<W: Write>(results: &[EvalResult], mut w: W, pre: Option<&str>) -> Result<()> {
    preamble(&mut w, pre).map_err(|e| Error::io("<ledger>", e))?;
    let mut out = writer(w, b',');
    out.write_record(LEDGER_HEADER).map_err(csv_err)?;
    for r in results {
        let mut row = vec![
            r.dataset.clone(),
            r.algorithm.to_string(),
            r.error_type.to_string(),
            r.rate.to_string(),
            r.achieved_rate.to_string(),
            r.seed.to_string(),
        ];
        for m in Measure::CLASSIFICATION.into_iter().chain(Measure::REGRESSION) {
            row.push(fmt_opt(r.value(m)));
        }
        row.push(r.flags.join(";"));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<ledger>", e))
}

/// `dataset, algorithm, error_type, rate, seed, time_log10_ms`.
pub fn write_timings<W: Write>(results: &[EvalResult], mut w: W, pre: Option<&str>) -> Result<()> {
    preamble(&mut w, pre).map_err(|e| Error::io("<timings>", e))?;
    let mut out = writer(w, b',');
    out.write_record(["dataset", "algorithm", "error_type", "rate", "seed", "time_log10_ms"])
        .map_err(csv_err)?;
    for r in results {
        out.write_record([
            r.dataset.clone(),
            r.algorithm.to_string(),
            r.error_type.to_string(),
            r.rate.to_string(),
            r.seed.to_string(),
            fmt_opt(r.time_log10_ms),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<timings>", e))
}

fn file_part(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// One `rate,value` file per series in `dir`, named
/// `{dataset}__{algorithm}__{error_type}__{measure}.csv`. Undefined
/// values are left empty.
pub fn write_plot_data(report: &RobustnessReport, dir: &Path, pre: Option<&str>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::new();
    for s in &report.series {
        let name = format!(
            "{}__{}__{}__{}.csv",
            file_part(&s.dataset),
            s.algorithm,
            s.error_type,
            s.measure
        );
        let path = dir.join(name);
        let mut buf = Vec::new();
        preamble(&mut buf, pre).map_err(io_err(&path))?;
        {
            let mut out = writer(&mut buf, b',');
            out.write_record(["rate", "value"]).map_err(csv_err)?;
            for (r, v) in s.rates.iter().zip(&s.values) {
                out.write_record([r.to_string(), fmt_opt(*v)]).map_err(csv_err)?;
            }
            out.flush().map_err(io_err(&path))?;
        }
        fs::write(&path, buf).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
