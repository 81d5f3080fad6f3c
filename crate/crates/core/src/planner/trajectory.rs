use super::store::NodeStore;
use crate::dynamics::propagate_ode;
use crate::problem::{segment_cost, Control, PlannerConfig, PlanningProblem, State};

/// One re-integrated edge of an extracted trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryEdge {
    pub control: Control,
    pub duration: f64,
    pub cost: f64,
    /// Index into [`Trajectory::states`] of the edge's final sample.
    pub end_sample: usize,
}

/// A root-to-leaf path re-integrated from the stored controls.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub edges: Vec<TrajectoryEdge>,
    pub cost: f64,
}

/// Walks parent links from `leaf` to the root and re-integrates every
/// stored `(control, duration)` pair.
///
/// # Panics
/// On a broken parent chain or a stored edge that no longer integrates.
pub fn extract_trajectory(
    store: &NodeStore,
    leaf: u32,
    problem: &PlanningProblem,
    config: &PlannerConfig,
) -> Trajectory {
    let mut path = store.path_to_root(leaf);
    path.reverse();
    let root = store.node(path[0]);
    assert!(root.parent.is_none(), "path does not end at the root");

    let h = config.ode_step();
    let dims = problem.model.position_dims();
    let mut states = vec![root.state.clone()];
    let mut edges = Vec::with_capacity(path.len() - 1);
    let mut cost = 0.0;
    for &id in &path[1..] {
        let node = store.node(id);
        let incoming = node
            .incoming
            .as_ref()
            .expect("non-root node without incoming edge");
        let start = states.last().expect("nonempty").clone();
        let samples = propagate_ode(
            &start,
            &incoming.control,
            incoming.duration,
            h,
            &problem.model,
        )
        .expect("stored edge diverged on re-integration");
        let c = segment_cost(&samples, incoming.duration, &problem.cost, dims)
            .expect("re-integrated edge has >= 2 samples");
        cost += c;
        states.extend(samples.into_iter().skip(1));
        edges.push(TrajectoryEdge {
            control: incoming.control.clone(),
            duration: incoming.duration,
            cost: c,
            end_sample: states.len() - 1,
        });
    }
    Trajectory {
        states,
        edges,
        cost,
    }
}
