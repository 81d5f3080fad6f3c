//! Scenario ingestion, trial execution, statistics and result emission.

mod bundled;
pub mod report;
pub mod scenario;
pub mod trials;

pub use bundled::{bundled_names, lookup as bundled_scenario};
pub use report::{emit_cost_curve, emit_csv, CostCurvePlot};
pub use scenario::{Scenario, ScenarioFile};
pub use trials::{lower_median, run_trials, summarize, SummaryRow, TrialRecord};
