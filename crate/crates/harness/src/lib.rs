//! Evaluation protocol, reporting and experiment plumbing.
//!
//! A trained checkpoint is evaluated on an evenly spaced lattice of
//! preference weights. Each lattice point yields a mean discounted return,
//! and the resulting (weight, return) pairs are scored with the indicators
//! from `morl-metrics`: hypervolume, sparsity, expected utility, cosine
//! similarity and per-objective rank correlation.

mod config;
mod demo;
mod error;
mod evaluate;
mod report;
mod run;
mod scatter;

pub use config::{load_config, parse_config, parse_partial_config, CorrelationChoice, EvalConfig, ReturnScale, RunConfig, RunSection, Stage};
pub use demo::{dynamic_demo, write_demo_csv, DemoConfig, DemoLog, DemoSegment, DemoStep, SwitchPoint};
pub use error::HarnessError;
pub use evaluate::{
    check_compatible, evaluate, evaluate_with, is_conditioned_id, read_records, run_episode, write_records, Actor,
    CheckpointActor, EpisodeOutcome, EvaluationPoint, EvaluationRecord,
};
pub use report::{build_report, read_report_csv, write_report_csv, write_report_markdown, ReportRow, Spread};
pub use run::{execute, run_config, RunSummary};
pub use scatter::{render_scatter_svg, write_scatter_csv};

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
