//! Robustness of algorithms to dirty data.
//!
//! *Sensibility* is the total variation of a measure along an error-rate
//! grid `a, a+x, ..., a+bx`. The *keeping point* is the last grid rate
//! before the measure first degrades by more than a tolerance `k` relative
//! to its value at `a`. [`run_sweep`] evaluates every combination of
//! dataset, algorithm and error type along the grid and summarises both
//! quantities per algorithm; [`recommend`] turns a report into an
//! algorithm choice and cleaning targets.

mod guideline;
mod metrics;
mod output;
mod sweep;

pub use guideline::{
    dominant_error, recommend, Candidate, CleaningTarget, Guideline, RecommendRequest, SizeClass,
    SizeThresholds,
};
pub use metrics::{keeping_point, sensibility, MetricSeries, RateGrid};
pub use output::{table, write_ledger, write_plot_data, write_table, write_timings, Quantity, LEDGER_HEADER};
pub use sweep::{
    evaluate_task, run_sweep, run_sweep_with, AlgorithmAverage, DatasetInfo, Failure, Ranking,
    RobustnessReport, SeriesRecord, SweepDataset, SweepPlan, SweepTask, Thresholds,
};
