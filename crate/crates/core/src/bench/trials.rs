use rayon::prelude::*;

use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::planner::{plan, PlanOutcome};

/// Outcome of one seeded planning run, times in milliseconds.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub success: bool,
    /// `(ms, cost)` of the first solution.
    pub first_solution: Option<(f64, f64)>,
    /// `(ms, cost)` of the last improvement.
    pub final_solution: Option<(f64, f64)>,
    pub cost_timeline: Vec<(f64, f64)>,
    pub iterations: u64,
    pub nodes: usize,
    pub propagations: u64,
}

impl TrialRecord {
    pub fn from_outcome(seed: u64, outcome: &PlanOutcome) -> Self {
        let timeline: Vec<(f64, f64)> = outcome
            .stats
            .cost_timeline
            .iter()
            .map(|p| (p.elapsed * 1e3, p.cost))
            .collect();
        TrialRecord {
            seed,
            success: outcome.success(),
            first_solution: timeline.first().copied(),
            final_solution: timeline.last().copied(),
            cost_timeline: timeline,
            iterations: outcome.stats.iterations,
            nodes: outcome.node_count,
            propagations: outcome.stats.propagations_attempted,
        }
    }
}

/// Per-scenario aggregate. Medians are over successful trials; `NaN` when
/// no trial succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub n_trials: usize,
    pub n_success: usize,
    /// Percentage in [0, 100]; `NaN` for zero trials.
    pub success_rate: f64,
    pub median_first_ms: f64,
    pub median_first_cost: f64,
    pub median_final_ms: f64,
    pub median_final_cost: f64,
    pub reference_cost: Option<f64>,
}

impl SummaryRow {
    pub fn normalized_first_cost(&self) -> f64 {
        self.median_first_cost / self.reference_cost.unwrap_or(f64::NAN)
    }

    pub fn normalized_final_cost(&self) -> f64 {
        self.median_final_cost / self.reference_cost.unwrap_or(f64::NAN)
    }
}

/// Middle order statistic; the lower of the two middle values for even
/// counts. `NaN` for an empty input.
pub fn lower_median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

pub fn summarize(name: &str, records: &[TrialRecord], reference_cost: Option<f64>) -> SummaryRow {
    let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.success).collect();
    let col = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> f64 {
        lower_median(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
    };
    SummaryRow {
        scenario: name.to_string(),
        n_trials: records.len(),
        n_success: ok.len(),
        success_rate: if records.is_empty() {
            f64::NAN
        } else {
            100.0 * ok.len() as f64 / records.len() as f64
        },
        median_first_ms: col(&|r| r.first_solution.map(|s| s.0)),
        median_first_cost: col(&|r| r.first_solution.map(|s| s.1)),
        median_final_ms: col(&|r| r.final_solution.map(|s| s.0)),
        median_final_cost: col(&|r| r.final_solution.map(|s| s.1)),
        reference_cost,
    }
}

/// Runs `scenario.n_trials` independent plans (trial `k` seeded with
/// `base_seed + k`), `jobs` trials at a time. Records are returned in trial order.
pub fn run_trials(scenario: &Scenario, jobs: usize) -> Result<(Vec<TrialRecord>, SummaryRow)> {
    let run_one = |k: usize| -> Result<TrialRecord> {
        let config = scenario.trial_config(k);
        let outcome = plan(&scenario.problem, &config)?;
        Ok(TrialRecord::from_outcome(config.seed, &outcome))
    };
    let records: Vec<TrialRecord> = if jobs <= 1 {
        (0..scenario.n_trials).map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start trial pool: {e}")))?;
        pool.install(|| {
            (0..scenario.n_trials)
                .into_par_iter()
                .map(run_one)
                .collect::<Result<_>>()
        })?
    };
    let summary = summarize(&scenario.name, &records, scenario.reference_cost);
    Ok((records, summary))
}
