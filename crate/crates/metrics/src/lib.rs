//! Solution-set indicators for multi-objective agents.
//!
//! Mainstream indicators (hypervolume, sparsity, expected utility, cosine
//! similarity) describe the geometry of a solution set. The controllability
//! family instead asks whether each objective's return moves monotonically
//! with its conditioning weight, measured per objective by a rank
//! correlation between the weight components and the induced returns.

mod controllability;
mod error;
mod hypervolume;
mod indicators;
mod normalize;
mod pareto;
mod rank;
mod solution;

pub use controllability::{
    controllability, controllability_with, ControllabilityReport, CorrelationMethod, KendallQuality,
    MappingQuality, SpearmanQuality,
};
pub use error::MetricsError;
pub use hypervolume::{hypervolume, hypervolume_by_slicing, hypervolume_sweep_2d};
pub use indicators::{
    cosine_alignment, expected_utility, expected_utility_stats, sparsity, CosineStats, UtilityStats,
};
pub use normalize::{denormalize, minmax_range, nadir_reference, normalize, normalize_set, NormalizationRange};
pub use pareto::{dominates, pareto_filter, ParetoFront};
pub use rank::{average_ranks, kendall_tau, spearman, Correlation};
pub use solution::{read_solution_csv, write_solution_csv, SolutionEntry, SolutionSet};

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;
