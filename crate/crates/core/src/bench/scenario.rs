//! Scenario files: a JSON document describing one problem, its solver
//! configuration and the trial matrix.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsModel, QuadcopterParams};
use crate::environment::{load_environment, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::problem::{
    CostKind, CostMetric, GoalRegion, GridResolution, Interval, PlannerConfig, PlanningProblem,
    State, DEFAULT_CELL_CEILING,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostSpec {
    Kind(CostKind),
    Full(CostMetric),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_params: Option<serde_json::Value>,
    pub environment: EnvironmentSpec,
    pub x_init: Vec<f64>,
    pub goal: GoalRegion,
    pub cost: CostSpec,
    pub state_bounds: Vec<Interval>,
    pub control_bounds: Vec<Interval>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_ceiling: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub lambda: usize,
    pub i_max: u32,
    pub t_prop: f64,
    pub capacity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode_step: Option<f64>,
    pub collision_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_propagations: Option<u64>,
    #[serde(default)]
    pub deactivate_after_expansion: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialSpec {
    pub n: usize,
    pub base_seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

/// Raw scenario document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub problem: ProblemSpec,
    pub decomposition: DecompositionSpec,
    pub planner: PlannerSpec,
    pub trials: TrialSpec,
    /// Divisor applied to summary costs (e.g. an analytic lower bound).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_cost: Option<f64>,
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub problem: PlanningProblem,
    /// Configuration of trial 0; [`Scenario::trial_config`] derives the others.
    pub config: PlannerConfig,
    pub n_trials: usize,
    pub base_seed: u64,
    pub reference_cost: Option<f64>,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(path, e.into_inner().to_string())
        })?;
        Self::from_file(file)
    }

    /// Loads a bundled scenario by name, or a scenario file by path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(text) = super::bundled::lookup(name_or_path) {
            return Self::from_json_str(text);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::UnknownScenario(name_or_path.to_string()));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_json_str(&text)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let p = &file.problem;
        let model = parse_model(&p.model, p.model_params.as_ref())?;
        if p.state_bounds.len() != model.state_dim() {
            return Err(Error::schema(
                "problem.state_bounds",
                format!(
                    "{} entries, model `{}` has state dimension {}",
                    p.state_bounds.len(),
                    p.model,
                    model.state_dim()
                ),
            ));
        }
        let environment =
            load_environment(&p.environment, model.position_dims(), Some(&p.state_bounds))?;
        let cost = match &p.cost {
            CostSpec::Kind(kind) => CostMetric {
                kind: *kind,
                lipschitz_hint: None,
            },
            CostSpec::Full(m) => m.clone(),
        };
        let problem = PlanningProblem {
            model,
            environment,
            x_init: State(p.x_init.clone()),
            goal: p.goal.clone(),
            cost,
            control_bounds: p.control_bounds.clone(),
        };
        problem.validate()?;

        let d = &file.decomposition;
        let resolution = match (&d.delta, &d.cells) {
            (Some(delta), None) => GridResolution::Delta(*delta),
            (None, Some(cells)) => GridResolution::Cells(cells.clone()),
            _ => {
                return Err(Error::schema(
                    "decomposition",
                    "exactly one of `delta` or `cells` is required",
                ))
            }
        };
        if let (Some(dims), GridResolution::Cells(cells)) = (&d.dims, &resolution) {
            if dims.len() != cells.len() {
                return Err(Error::schema(
                    "decomposition.cells",
                    format!("{} counts for {} dims", cells.len(), dims.len()),
                ));
            }
        }

        let pl = &file.planner;
        let config = PlannerConfig {
            grid_dims: d.dims.clone(),
            resolution,
            cell_ceiling: d.cell_ceiling.unwrap_or(DEFAULT_CELL_CEILING),
            lambda: pl.lambda,
            i_max: pl.i_max,
            t_max: pl.t_max_ms.map(Duration::from_millis),
            max_iterations: pl.max_iterations,
            max_propagations: pl.max_propagations,
            t_prop: pl.t_prop,
            capacity: pl.capacity,
            seed: file.trials.base_seed,
            workers: file.trials.workers,
            ode_step: pl.ode_step,
            collision_step: pl.collision_step,
            deactivate_after_expansion: pl.deactivate_after_expansion,
        };
        config
            .validate()
            .map_err(|e| Error::schema("planner", e.to_string()))?;
        if let Some(r) = file.reference_cost {
            if !(r > 0.0) {
                return Err(Error::schema("reference_cost", "must be positive"));
            }
        }
        Ok(Scenario {
            name: file.name,
            problem,
            config,
            n_trials: file.trials.n,
            base_seed: file.trials.base_seed,
            reference_cost: file.reference_cost,
        })
    }

    /// Seed of trial `k`: `base_seed + k`.
    pub fn trial_seed(&self, k: usize) -> u64 {
        self.base_seed.wrapping_add(k as u64)
    }

    pub fn trial_config(&self, k: usize) -> PlannerConfig {
        PlannerConfig {
            seed: self.trial_seed(k),
            ..self.config.clone()
        }
    }
}

fn parse_model(id: &str, params: Option<&serde_json::Value>) -> Result<DynamicsModel> {
    let no_params = |model: DynamicsModel| match params {
        None => Ok(model),
        Some(v) if v.as_object().is_some_and(|o| o.is_empty()) => Ok(model),
        Some(_) => Err(Error::schema(
            "problem.model_params",
            format!("model `{id}` takes no parameters"),
        )),
    };
    match id {
        "double_integrator_4d" | "double_integrator_2d" => {
            no_params(DynamicsModel::double_integrator_2d())
        }
        "double_integrator_6d" | "double_integrator_3d" => {
            no_params(DynamicsModel::double_integrator_3d())
        }
        "dubins_airplane_6d" => no_params(DynamicsModel::DubinsAirplane),
        "quadcopter_12d" => {
            let p: QuadcopterParams = match params {
                None => QuadcopterParams::default(),
                Some(v) => serde_json::from_value(v.clone())
                    .map_err(|e| Error::schema("problem.model_params", e.to_string()))?,
            };
            if !(p.mass > 0.0) || p.inertia.iter().any(|i| !(*i > 0.0)) {
                return Err(Error::schema(
                    "problem.model_params",
                    "mass and inertia must be positive",
                ));
            }
            Ok(DynamicsModel::Quadcopter(p))
        }
        other => Err(Error::schema(
            "problem.model",
            format!("unknown model `{other}`"),
        )),
    }
}
