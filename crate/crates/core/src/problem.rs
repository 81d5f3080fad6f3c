//! Shared domain types: states, controls, segments, cost metrics, goal
//! regions and the planning problem / solver configuration.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsModel;
use crate::environment::Environment;
use crate::error::{Error, Result};

/// Duration-proportional cost (per second) assigned to segments whose
/// position never moves, so that every segment keeps a strictly positive cost.
pub const ZERO_DISPLACEMENT_COST_RATE: f64 = 1e-6;

/// A point in the state space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub Vec<f64>);

impl State {
    pub fn new(coords: Vec<f64>) -> Self {
        State(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        State(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Euclidean distance between the projections of `self` and `other` onto `dims`.
    pub fn projected_distance(&self, other: &State, dims: &[usize]) -> f64 {
        dims.iter()
            .map(|&d| {
                let diff = self.0[d] - other.0[d];
                diff * diff
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A control input, held constant over a propagation segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Control(pub Vec<f64>);

impl Control {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Interval { lo: v[0], hi: v[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    PathLength,
    ControlDuration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMetric {
    pub kind: CostKind,
    /// Lipschitz constant of the cost; carried for reference only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_hint: Option<f64>,
}

impl CostMetric {
    pub fn path_length() -> Self {
        CostMetric {
            kind: CostKind::PathLength,
            lipschitz_hint: None,
        }
    }

    pub fn control_duration() -> Self {
        CostMetric {
            kind: CostKind::ControlDuration,
            lipschitz_hint: None,
        }
    }
}

/// Sum of Euclidean distances between consecutive samples projected onto `dims`.
pub fn polyline_length(samples: &[State], dims: &[usize]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[0].projected_distance(&w[1], dims))
        .sum()
}

/// Cost of a segment under `metric`.
///
/// `position_dims` selects the coordinates measured by the path-length metric.
/// A segment with exactly zero displacement is charged
/// [`ZERO_DISPLACEMENT_COST_RATE`] per second instead.
pub fn segment_cost(
    samples: &[State],
    duration: f64,
    metric: &CostMetric,
    position_dims: &[usize],
) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidSegment(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if !(duration > 0.0) {
        return Err(Error::InvalidSegment(format!(
            "duration must be positive, got {duration}"
        )));
    }
    Ok(match metric.kind {
        CostKind::ControlDuration => duration,
        CostKind::PathLength => {
            let length = polyline_length(samples, position_dims);
            if length == 0.0 {
                ZERO_DISPLACEMENT_COST_RATE * duration
            } else {
                length
            }
        }
    })
}

/// A densely sampled path from a parent state to a candidate child.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySegment {
    pub samples: Vec<State>,
    pub control: Control,
    pub duration: f64,
    pub incremental_cost: f64,
}

impl TrajectorySegment {
    pub fn start(&self) -> &State {
        &self.samples[0]
    }

    pub fn end(&self) -> &State {
        self.samples
            .last()
            .expect("segment has at least two samples")
    }
}

/// A ball over a subset of state dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub dims: Vec<usize>,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl GoalRegion {
    pub fn validate(&self, state_dim: usize) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Problem("goal dims must be nonempty".into()));
        }
        if self.dims.len() != self.center.len() {
            return Err(Error::Problem(format!(
                "goal has {} dims but a {}-entry center",
                self.dims.len(),
                self.center.len()
            )));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d >= state_dim) {
            return Err(Error::Problem(format!(
                "goal dimension {d} outside state dimension {state_dim}"
            )));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Problem(format!(
                "goal radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Problem("goal center must be finite".into()));
        }
        Ok(())
    }

    pub fn distance(&self, state: &State) -> f64 {
        self.dims
            .iter()
            .zip(&self.center)
            .map(|(&d, &c)| {
                let diff = state[d] - c;
                diff * diff
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Boundary-inclusive goal membership.
pub fn in_goal(state: &State, goal: &GoalRegion) -> bool {
    goal.distance(state) <= goal.radius
}

/// Everything that defines one planning query.
#[derive(Clone, Debug)]
pub struct PlanningProblem {
    pub model: DynamicsModel,
    pub environment: Environment,
    pub x_init: State,
    pub goal: GoalRegion,
    pub cost: CostMetric,
    pub control_bounds: Vec<Interval>,
}

impl PlanningProblem {
    pub fn state_bounds(&self) -> &[Interval] {
        &self.environment.state_bounds
    }

    /// Checks the problem invariants, including validity of the start state.
    pub fn validate(&self) -> Result<()> {
        let n = self.model.state_dim();
        if self.environment.state_bounds.len() != n {
            return Err(Error::Problem(format!(
                "state_bounds has {} entries, model `{}` needs {n}",
                self.environment.state_bounds.len(),
                self.model.id()
            )));
        }
        if self.control_bounds.len() != self.model.control_dim() {
            return Err(Error::Problem(format!(
                "control_bounds has {} entries, model `{}` needs {}",
                self.control_bounds.len(),
                self.model.id(),
                self.model.control_dim()
            )));
        }
        if let Some(b) = self.control_bounds.iter().find(|b| !(b.lo <= b.hi)) {
            return Err(Error::Problem(format!(
                "control bound [{}, {}] has lo > hi",
                b.lo, b.hi
            )));
        }
        if self.environment.workspace_bounds.len() != self.model.position_dims().len() {
            return Err(Error::Problem(format!(
                "workspace is {}-dimensional but model `{}` has {} position dims",
                self.environment.workspace_bounds.len(),
                self.model.id(),
                self.model.position_dims().len()
            )));
        }
        if self.x_init.dim() != n || !self.x_init.is_finite() {
            return Err(Error::Problem(format!(
                "x_init must be a finite {n}-vector, got {:?}",
                self.x_init.coords()
            )));
        }
        self.goal.validate(n)?;
        for (&d, &c) in self.goal.dims.iter().zip(&self.goal.center) {
            if !self.environment.state_bounds[d].contains(c) {
                return Err(Error::Problem(format!(
                    "goal center coordinate {c} outside state bounds of dimension {d}"
                )));
            }
        }
        if !crate::environment::is_state_valid(&self.x_init, &self.environment, &self.model) {
            return Err(Error::Problem(
                "x_init is not a valid state in the environment".into(),
            ));
        }
        Ok(())
    }
}

/// How the region grid is sized.
#[derive(Clone, Debug, PartialEq)]
pub enum GridResolution {
    /// Target cell diagonal; the grid is made at least this fine.
    Delta(f64),
    /// Explicit cell count per decomposed dimension.
    Cells(Vec<usize>),
}

/// Default maximum number of grid cells.
pub const DEFAULT_CELL_CEILING: usize = 1 << 25;

#[derive(Clone, Debug)]
pub struct PlannerConfig {
    /// State dimensions covered by the region grid; `None` means the defaults
    /// chosen by [`crate::decomposition::default_grid_dims`].
    pub grid_dims: Option<Vec<usize>>,
    pub resolution: GridResolution,
    pub cell_ceiling: usize,
    pub lambda: usize,
    pub i_max: u32,
    pub t_max: Option<Duration>,
    pub max_iterations: Option<u64>,
    pub max_propagations: Option<u64>,
    pub t_prop: f64,
    pub capacity: usize,
    pub seed: u64,
    pub workers: usize,
    /// Integration step; `None` resolves to `min(t_prop / 10, 0.02)`.
    pub ode_step: Option<f64>,
    pub collision_step: f64,
    pub deactivate_after_expansion: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            grid_dims: None,
            resolution: GridResolution::Delta(1.0),
            cell_ceiling: DEFAULT_CELL_CEILING,
            lambda: 8,
            i_max: 5,
            t_max: Some(Duration::from_secs(1)),
            max_iterations: None,
            max_propagations: None,
            t_prop: 1.0,
            capacity: 1 << 20,
            seed: 0,
            workers: 1,
            ode_step: None,
            collision_step: 0.05,
            deactivate_after_expansion: false,
        }
    }
}

impl PlannerConfig {
    pub fn ode_step(&self) -> f64 {
        self.ode_step
            .unwrap_or_else(|| (self.t_prop / 10.0).min(0.02))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.lambda < 1 {
            return fail("lambda must be >= 1".into());
        }
        if self.i_max < 1 {
            return fail("i_max must be >= 1".into());
        }
        if self.capacity < 1 {
            return fail("capacity must be >= 1".into());
        }
        if self.workers < 1 {
            return fail("workers must be >= 1".into());
        }
        if !(self.t_prop > 0.0) || !self.t_prop.is_finite() {
            return fail(format!("t_prop must be positive, got {}", self.t_prop));
        }
        let h = self.ode_step();
        if !(h > 0.0) || h > self.t_prop {
            return fail(format!("ode_step must lie in (0, t_prop], got {h}"));
        }
        if !(self.collision_step > 0.0) {
            return fail(format!(
                "collision_step must be positive, got {}",
                self.collision_step
            ));
        }
        match &self.resolution {
            GridResolution::Delta(d) if !(*d > 0.0) => {
                return fail(format!("delta must be positive, got {d}"))
            }
            GridResolution::Cells(c) if c.iter().any(|&n| n < 1) => {
                return fail("every cell count must be >= 1".into())
            }
            _ => {}
        }
        if self.t_max.is_none() && self.max_iterations.is_none() && self.max_propagations.is_none()
        {
            return fail(
                "at least one of t_max, max_iterations, max_propagations is required".into(),
            );
        }
        Ok(())
    }
}
