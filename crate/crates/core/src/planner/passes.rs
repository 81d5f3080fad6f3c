//! The three data-parallel passes of one planner iteration.
//!
//! Each pass fans out over the current rayon pool. Work items share only the
//! region table (atomic), the slot reservation counter (atomic) and read-only
//! views of the tree; results are gathered in item order, so a one-thread
//! pool reproduces the same sequence on every run.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::store::{Candidate, NodeStatus, NodeStore};
use super::BestSolution;
use crate::decomposition::{encode_cost, RegionGrid, UpdateOutcome};
use crate::dynamics::{propagate_ode, sample_control, sample_duration};
use crate::environment::is_segment_valid;
use crate::problem::{in_goal, segment_cost, GoalRegion, PlannerConfig, PlanningProblem};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Private RNG stream of one expansion work item.
pub fn work_item_rng(seed: u64, iteration: u64, node: u32, branch: u32) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ iteration);
    h = splitmix64(h ^ node as u64);
    h = splitmix64(h ^ branch as u64);
    ChaCha8Rng::seed_from_u64(h)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropagateCounts {
    pub attempted: u64,
    pub valid: u64,
    pub admitted: u64,
    /// A valid, region-improving candidate was discarded for lack of space.
    pub capacity_hit: bool,
}

/// Bounded reservation of V_U slots, so the number of admitted candidates
/// never exceeds the free capacity of the store.
pub struct SlotReservation {
    limit: usize,
    taken: AtomicUsize,
}

impl SlotReservation {
    pub fn new(limit: usize) -> Self {
        SlotReservation {
            limit,
            taken: AtomicUsize::new(0),
        }
    }

    pub fn try_take(&self) -> bool {
        self.taken
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |t| {
                (t < self.limit).then_some(t + 1)
            })
            .is_ok()
    }
}

/// Region admission for one candidate: lowers the region minimum and
/// reports whether the candidate belongs in V_U.
pub fn submit_candidate(grid: &RegionGrid, candidate: &Candidate) -> UpdateOutcome {
    grid.try_update(candidate.region, candidate.acc_cost)
}

/// Expands every node in `active` `config.lambda` times and returns the
/// admitted candidates (V_U) in work-item order.
pub fn propagate_pass(
    store: &NodeStore,
    grid: &RegionGrid,
    active: &[u32],
    problem: &PlanningProblem,
    config: &PlannerConfig,
    iteration: u64,
) -> (Vec<Candidate>, PropagateCounts) {
    let lambda = config.lambda;
    let h = config.ode_step();
    let position_dims = problem.model.position_dims();
    let slots = SlotReservation::new(store.remaining());
    let valid = AtomicU64::new(0);
    let capacity_hit = AtomicU64::new(0);
    let items = active.len() * lambda;

    let candidates: Vec<Candidate> = (0..items)
        .into_par_iter()
        .filter_map(|item| {
            let node_id = active[item / lambda];
            let branch = (item % lambda) as u32;
            let parent = store.node(node_id);
            let mut rng = work_item_rng(config.seed, iteration, node_id, branch);
            let control = sample_control(&mut rng, &problem.control_bounds);
            let duration = sample_duration(&mut rng, config.t_prop);

            let samples =
                propagate_ode(&parent.state, &control, duration, h, &problem.model).ok()?;
            if !is_segment_valid(
                &samples,
                &problem.environment,
                &problem.model,
                config.collision_step,
            ) {
                return None;
            }
            valid.fetch_add(1, Ordering::Relaxed);

            let incremental =
                segment_cost(&samples, duration, &problem.cost, position_dims).ok()?;
            let mut samples = samples;
            let state = samples.pop().expect("propagation yields >= 2 samples");
            let region = grid.region_index(&state);
            let acc_cost = parent.acc_cost + incremental;
            if encode_cost(acc_cost) > grid.cost_bits(region) {
                return None;
            }
            if !slots.try_take() {
                capacity_hit.store(1, Ordering::Relaxed);
                return None;
            }
            let candidate = Candidate {
                parent: node_id,
                state,
                control,
                duration,
                acc_cost,
                region,
            };
            submit_candidate(grid, &candidate)
                .admits()
                .then_some(candidate)
        })
        .collect();

    let counts = PropagateCounts {
        attempted: items as u64,
        valid: valid.into_inner(),
        admitted: candidates.len() as u64,
        capacity_hit: capacity_hit.into_inner() != 0,
    };
    (candidates, counts)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneCounts {
    pub terminal: u64,
    pub deactivated: u64,
    pub reactivated: u64,
}

/// A status change made by a pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub node: u32,
    pub from: NodeStatus,
    pub to: NodeStatus,
}

fn dominated(grid: &RegionGrid, acc_cost: f64, region: usize) -> bool {
    encode_cost(acc_cost) > grid.cost_bits(region)
}

fn has_dominated_ancestor(store: &NodeStore, grid: &RegionGrid, id: u32) -> bool {
    let mut cur = store.node(id).parent;
    while let Some(p) = cur {
        let n = store.node(p);
        if dominated(grid, n.acc_cost, n.region) {
            return true;
        }
        cur = n.parent;
    }
    false
}

fn classify(store: &NodeStore, grid: &RegionGrid, id: u32, i_max: u32) -> (NodeStatus, u32) {
    let status = store.status(id);
    let i_count = store.i_count(id);
    let node = store.node(id);
    match status {
        NodeStatus::Terminal | NodeStatus::Unexplored => (status, i_count),
        _ if dominated(grid, node.acc_cost, node.region) => (NodeStatus::Terminal, i_count),
        NodeStatus::Inactive => {
            let bumped = i_count + 1;
            if bumped > i_max {
                (NodeStatus::Active, 0)
            } else {
                (NodeStatus::Inactive, bumped)
            }
        }
        NodeStatus::Active => {
            if has_dominated_ancestor(store, grid, id) {
                (NodeStatus::Inactive, 0)
            } else {
                (NodeStatus::Active, i_count)
            }
        }
    }
}

/// Reclassifies every stored node against the current region minima:
/// dominated nodes become Terminal, long-inactive region-minimal nodes are
/// reactivated, and active nodes below a dominated ancestor are parked.
pub fn prune_pass(
    store: &mut NodeStore,
    grid: &RegionGrid,
    i_max: u32,
    mut on_transition: impl FnMut(Transition),
) -> PruneCounts {
    let next: Vec<(NodeStatus, u32)> = {
        let view = &*store;
        (0..view.len() as u32)
            .into_par_iter()
            .map(|id| classify(view, grid, id, i_max))
            .collect()
    };
    let mut counts = PruneCounts::default();
    for (id, (to, i_count)) in next.into_iter().enumerate() {
        let from = store.status[id];
        store.i_count[id] = i_count;
        if from == to {
            continue;
        }
        store.status[id] = to;
        match to {
            NodeStatus::Terminal => counts.terminal += 1,
            NodeStatus::Inactive => counts.deactivated += 1,
            NodeStatus::Active => counts.reactivated += 1,
            NodeStatus::Unexplored => unreachable!(),
        }
        on_transition(Transition {
            node: id as u32,
            from,
            to,
        });
    }
    counts
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct UpdateCounts {
    pub committed: u64,
    pub dropped: u64,
    /// Candidates that were still region-minimal but found the store full.
    pub capacity_hit: bool,
    pub best_improved: bool,
}

/// Commits every candidate that still holds its region minimum, drops the
/// rest, and lowers `best` when a committed goal node is strictly cheaper.
/// `candidates` is consumed, leaving V_U empty.
pub fn update_tree_pass(
    store: &mut NodeStore,
    grid: &RegionGrid,
    candidates: Vec<Candidate>,
    goal: &GoalRegion,
    best: &mut BestSolution,
    mut on_transition: impl FnMut(Transition),
) -> UpdateCounts {
    let total = candidates.len() as u64;
    let survivors: Vec<(Candidate, bool)> = candidates
        .into_par_iter()
        .filter(|c| encode_cost(c.acc_cost) == grid.cost_bits(c.region))
        .map(|c| {
            let reached = in_goal(&c.state, goal);
            (c, reached)
        })
        .collect();

    let mut counts = UpdateCounts::default();
    let mut best_new: Option<(f64, u32)> = None;
    for (c, reached) in survivors {
        let cost = c.acc_cost;
        match store.commit(c) {
            Some(id) => {
                counts.committed += 1;
                on_transition(Transition {
                    node: id,
                    from: NodeStatus::Unexplored,
                    to: NodeStatus::Active,
                });
                let current = best_new.map_or(best.cost, |(c, _)| c);
                if reached && cost < current {
                    best_new = Some((cost, id));
                }
            }
            None => counts.capacity_hit = true,
        }
    }
    counts.dropped = total - counts.committed;
    if let Some((cost, leaf)) = best_new {
        best.cost = cost;
        best.leaf = Some(leaf);
        counts.best_improved = true;
    }
    counts
}
