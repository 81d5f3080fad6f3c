//! Point-robot workspace with primitive obstacles, state validity and
//! resolution-based segment validation.

use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsModel;
use crate::error::{Error, Result};
use crate::problem::{Interval, State};

/// A closed obstacle primitive in workspace coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Obstacle {
    Box { min: Vec<f64>, max: Vec<f64> },
    Sphere { center: Vec<f64>, radius: f64 },
}

impl Obstacle {
    pub fn dim(&self) -> usize {
        match self {
            Obstacle::Box { min, .. } => min.len(),
            Obstacle::Sphere { center, .. } => center.len(),
        }
    }

    /// Closed containment: touching the boundary counts as a hit.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Obstacle::Box { min, max } => p
                .iter()
                .zip(min.iter().zip(max))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi),
            Obstacle::Sphere { center, radius } => {
                let d2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius
            }
        }
    }

    fn validate(&self, dim: usize, path: &str) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::schema(
                path,
                format!(
                    "obstacle is {}-dimensional, workspace is {dim}-dimensional",
                    self.dim()
                ),
            ));
        }
        match self {
            Obstacle::Box { min, max } => {
                if max.len() != min.len() {
                    return Err(Error::schema(path, "box min and max differ in length"));
                }
                if min.iter().chain(max).any(|v| !v.is_finite()) {
                    return Err(Error::schema(path, "box corners must be finite"));
                }
                if let Some(axis) = (0..min.len()).find(|&i| min[i] > max[i]) {
                    return Err(Error::schema(
                        path,
                        format!(
                            "box min > max on axis {axis} ({} > {})",
                            min[axis], max[axis]
                        ),
                    ));
                }
            }
            Obstacle::Sphere { center, radius } => {
                if center.iter().any(|v| !v.is_finite()) {
                    return Err(Error::schema(path, "sphere center must be finite"));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::schema(
                        path,
                        format!("sphere radius must be positive, got {radius}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Environment fragment as written in a scenario file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub workspace_bounds: Vec<Interval>,
    /// Full-state box; falls back to the problem-level `state_bounds` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_bounds: Option<Vec<Interval>>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub workspace_bounds: Vec<Interval>,
    pub state_bounds: Vec<Interval>,
    pub obstacles: Vec<Obstacle>,
}

impl Environment {
    /// True if `p` lies inside the workspace and outside every obstacle.
    pub fn is_position_free(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(&self.workspace_bounds)
            .all(|(v, b)| b.contains(*v))
            && !self.obstacles.iter().any(|o| o.contains(p))
    }
}

/// Builds a validated [`Environment`] from its scenario fragment.
///
/// `position_dims` names the state coordinates that hold the workspace
/// position; `fallback_state_bounds` is used if the fragment has none.
pub fn load_environment(
    spec: &EnvironmentSpec,
    position_dims: &[usize],
    fallback_state_bounds: Option<&[Interval]>,
) -> Result<Environment> {
    let dim = spec.workspace_bounds.len();
    if !(2..=3).contains(&dim) {
        return Err(Error::schema(
            "environment.workspace_bounds",
            format!("workspace must be 2- or 3-dimensional, got {dim}"),
        ));
    }
    for (i, b) in spec.workspace_bounds.iter().enumerate() {
        if !(b.lo < b.hi) {
            return Err(Error::schema(
                format!("environment.workspace_bounds[{i}]"),
                format!("lo must be < hi, got [{}, {}]", b.lo, b.hi),
            ));
        }
    }
    let state_bounds = match (&spec.state_bounds, fallback_state_bounds) {
        (Some(b), _) => b.clone(),
        (None, Some(b)) => b.to_vec(),
        (None, None) => {
            return Err(Error::schema(
                "environment.state_bounds",
                "missing (no problem-level state_bounds either)",
            ))
        }
    };
    for (i, b) in state_bounds.iter().enumerate() {
        if !(b.lo <= b.hi) {
            return Err(Error::schema(
                format!("environment.state_bounds[{i}]"),
                format!("lo must be <= hi, got [{}, {}]", b.lo, b.hi),
            ));
        }
    }
    if position_dims.len() != dim {
        return Err(Error::schema(
            "environment.workspace_bounds",
            format!(
                "model has {} position dims, workspace has {dim}",
                position_dims.len()
            ),
        ));
    }
    for (axis, &d) in position_dims.iter().enumerate() {
        let sb = state_bounds.get(d).ok_or_else(|| {
            Error::schema(
                "environment.state_bounds",
                format!("no bound for dimension {d}"),
            )
        })?;
        let wb = spec.workspace_bounds[axis];
        if wb.lo < sb.lo || wb.hi > sb.hi {
            return Err(Error::schema(
                format!("environment.workspace_bounds[{axis}]"),
                "workspace must lie within the position slice of state_bounds",
            ));
        }
    }
    for (i, o) in spec.obstacles.iter().enumerate() {
        o.validate(dim, &format!("environment.obstacles[{i}]"))?;
    }
    Ok(Environment {
        workspace_bounds: spec.workspace_bounds.clone(),
        state_bounds,
        obstacles: spec.obstacles.clone(),
    })
}

fn position_of(x: &State, dims: &[usize], out: &mut [f64]) {
    for (o, &d) in out.iter_mut().zip(dims) {
        *o = x[d];
    }
}

/// State constraints, workspace bounds and obstacle clearance.
pub fn is_state_valid(x: &State, env: &Environment, model: &DynamicsModel) -> bool {
    if x.dim() != env.state_bounds.len() {
        return false;
    }
    if !x
        .coords()
        .iter()
        .zip(&env.state_bounds)
        .all(|(v, b)| b.contains(*v))
    {
        return false;
    }
    let dims = model.position_dims();
    let mut p = [0.0; 3];
    position_of(x, dims, &mut p[..dims.len()]);
    env.is_position_free(&p[..dims.len()])
}

/// Validates every sample and, between samples farther apart than
/// `collision_step`, linearly interpolated positions.
///
/// Interpolation uses the smallest power-of-two subdivision whose spacing is
/// at most `collision_step`, so a smaller step always checks a superset of
/// the points checked by a larger one.
pub fn is_segment_valid(
    samples: &[State],
    env: &Environment,
    model: &DynamicsModel,
    collision_step: f64,
) -> bool {
    if !samples.iter().all(|s| is_state_valid(s, env, model)) {
        return false;
    }
    let dims = model.position_dims();
    let k = dims.len();
    let (mut a, mut b, mut p) = ([0.0; 3], [0.0; 3], [0.0; 3]);
    for w in samples.windows(2) {
        position_of(&w[0], dims, &mut a[..k]);
        position_of(&w[1], dims, &mut b[..k]);
        let dist = w[0].projected_distance(&w[1], dims);
        if !(dist > collision_step) {
            continue;
        }
        let mut parts: u64 = 1;
        while dist / parts as f64 > collision_step {
            parts *= 2;
        }
        for j in 1..parts {
            let t = j as f64 / parts as f64;
            for i in 0..k {
                p[i] = a[i] + t * (b[i] - a[i]);
            }
            if !env.is_position_free(&p[..k]) {
                return false;
            }
        }
    }
    true
}
