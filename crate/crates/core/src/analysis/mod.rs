//! Statistics relating isomorphism measures to task performance: log
//! transform, Pearson correlation, OLS and forward stepwise regression, and
//! source/target selection analyses.

mod correlation;
mod regression;
mod selection;
mod table;

pub use correlation::{
    correlate_measures, join, log_transform, pearson, CorrelationRow, CorrelationTable, Joined, JoinedRow, Variable,
};
pub use regression::{ols, ols_named, stepwise_regression, t_test_p_value, RegressionReport};
pub use selection::{selection_analysis, GroupResult, SelectionMode, SelectionReport, SkippedGroup, GROUP_FLOOR};
pub use table::{Linguistic, PerfRow, PerformanceTable};
