//! Statistics of filter coefficients and the closed-form estimator of `(s0, α)`.

mod estimate;
mod feasible;
mod stats;

pub(crate) use estimate::result_fields;
pub use estimate::{
    estimate, estimate_row, estimate_with_constants, write_results_csv, EstimateResult, PanelEstimate, SkippedLevel,
    RESULT_COLUMNS,
};
pub use feasible::{adjust, forward_map, in_region, solve, Case, FeasiblePoint};
pub use stats::{first_statistic, second_statistic, statistics, StatisticsRow};
