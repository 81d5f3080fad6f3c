//! Region-guided parallel tree search.
//!
//! Each iteration runs three passes separated by barriers: propagate the
//! active set, reclassify every stored node against the region minima, then
//! commit the surviving candidates and update the best solution.

mod passes;
mod store;
mod trajectory;

use std::time::Instant;

pub use passes::{
    propagate_pass, prune_pass, submit_candidate, update_tree_pass, work_item_rng, PropagateCounts,
    PruneCounts, SlotReservation, Transition, UpdateCounts,
};
pub use store::{Candidate, Incoming, Node, NodeStatus, NodeStore};
pub use trajectory::{extract_trajectory, Trajectory, TrajectoryEdge};

use crate::decomposition::RegionGrid;
use crate::error::{Error, Result};
use crate::problem::{PlannerConfig, PlanningProblem};

/// Best goal-reaching node found so far.
#[derive(Clone, Debug, PartialEq)]
pub struct BestSolution {
    /// +inf until a solution exists.
    pub cost: f64,
    pub leaf: Option<u32>,
    /// Elapsed seconds at the end of the iteration that found it.
    pub found_at: f64,
    pub iteration: u64,
}

impl BestSolution {
    pub fn none() -> Self {
        BestSolution {
            cost: f64::INFINITY,
            leaf: None,
            found_at: f64::NAN,
            iteration: 0,
        }
    }

    pub fn is_found(&self) -> bool {
        self.leaf.is_some()
    }
}

/// A best-cost improvement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimelinePoint {
    pub iteration: u64,
    pub elapsed: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlannerStats {
    pub iterations: u64,
    pub propagations_attempted: u64,
    pub propagations_valid: u64,
    pub propagations_admitted: u64,
    pub nodes_committed: u64,
    pub candidates_dropped: u64,
    pub nodes_pruned_terminal: u64,
    pub nodes_deactivated: u64,
    pub nodes_reactivated: u64,
    /// Strictly decreasing in cost.
    pub cost_timeline: Vec<TimelinePoint>,
    pub first_solution: Option<TimelinePoint>,
    pub capacity_exhausted: bool,
    /// Wall-clock seconds spent in the main loop.
    pub elapsed: f64,
}

/// Hooks for instrumenting a run.
pub trait Observer {
    fn on_transition(&mut self, _t: Transition) {}
    /// Called after every completed iteration.
    fn on_iteration(&mut self, _planner: &Planner) {}
}

impl Observer for () {}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub best: BestSolution,
    pub trajectory: Option<Trajectory>,
    pub stats: PlannerStats,
    pub node_count: usize,
}

impl PlanOutcome {
    pub fn success(&self) -> bool {
        self.best.is_found()
    }
}

/// One planning run. Not reusable across problems.
pub struct Planner {
    problem: PlanningProblem,
    config: PlannerConfig,
    grid: RegionGrid,
    store: NodeStore,
    best: BestSolution,
    stats: PlannerStats,
    pool: rayon::ThreadPool,
    iteration: u64,
}

impl Planner {
    pub fn new(problem: PlanningProblem, config: PlannerConfig) -> Result<Self> {
        config.validate()?;
        problem.validate()?;
        let grid = RegionGrid::for_problem(&problem, &config)?;
        let root_region = grid.region_index(&problem.x_init);
        grid.try_update(root_region, 0.0);
        let store = NodeStore::with_root(config.capacity, problem.x_init.clone(), root_region);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Planner {
            problem,
            config,
            grid,
            store,
            best: BestSolution::none(),
            stats: PlannerStats::default(),
            pool,
            iteration: 0,
        })
    }

    pub fn problem(&self) -> &PlanningProblem {
        &self.problem
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn grid(&self) -> &RegionGrid {
        &self.grid
    }

    pub fn store(&self) -> &NodeStore {
        &self.store
    }

    pub fn best(&self) -> &BestSolution {
        &self.best
    }

    pub fn stats(&self) -> &PlannerStats {
        &self.stats
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    fn budget_exhausted(&self, elapsed: f64) -> bool {
        let c = &self.config;
        c.t_max.is_some_and(|t| elapsed >= t.as_secs_f64())
            || c.max_iterations.is_some_and(|n| self.iteration >= n)
            || c.max_propagations
                .is_some_and(|n| self.stats.propagations_attempted >= n)
    }

    /// Runs one propagate / prune / update iteration. Solutions found in it
    /// are stamped with `clock.elapsed()` at the closing barrier.
    pub fn step(&mut self, observer: &mut (dyn Observer + Send), clock: &Instant) {
        let Planner {
            problem,
            config,
            grid,
            store,
            best,
            stats,
            pool,
            iteration,
        } = self;

        pool.install(|| {
            let active = store.active();
            let (candidates, pc) =
                propagate_pass(store, grid, &active, problem, config, *iteration);
            stats.propagations_attempted += pc.attempted;
            stats.propagations_valid += pc.valid;
            stats.propagations_admitted += pc.admitted;
            stats.capacity_exhausted |= pc.capacity_hit;

            if config.deactivate_after_expansion {
                for &id in &active {
                    store.set_status(id, NodeStatus::Inactive, 0);
                    observer.on_transition(Transition {
                        node: id,
                        from: NodeStatus::Active,
                        to: NodeStatus::Inactive,
                    });
                }
                stats.nodes_deactivated += active.len() as u64;
            }

            let prune = prune_pass(store, grid, config.i_max, |t| observer.on_transition(t));
            stats.nodes_pruned_terminal += prune.terminal;
            stats.nodes_deactivated += prune.deactivated;
            stats.nodes_reactivated += prune.reactivated;

            let update = update_tree_pass(store, grid, candidates, &problem.goal, best, |t| {
                observer.on_transition(t)
            });
            stats.nodes_committed += update.committed;
            stats.candidates_dropped += update.dropped;
            stats.capacity_exhausted |= update.capacity_hit || store.is_full();

            *iteration += 1;
            stats.iterations = *iteration;
            let elapsed = clock.elapsed().as_secs_f64();
            stats.elapsed = elapsed;
            if update.best_improved {
                best.found_at = elapsed;
                best.iteration = *iteration;
                let point = TimelinePoint {
                    iteration: *iteration,
                    elapsed,
                    cost: best.cost,
                };
                stats.first_solution.get_or_insert(point);
                stats.cost_timeline.push(point);
            }
        });
        observer.on_iteration(self);
    }

    /// Iterates until a budget (time, iterations or propagations) runs out.
    pub fn run(&mut self, observer: &mut (dyn Observer + Send)) -> PlanOutcome {
        let clock = Instant::now();
        while !self.budget_exhausted(clock.elapsed().as_secs_f64()) {
            self.step(observer, &clock);
        }
        self.stats.elapsed = clock.elapsed().as_secs_f64();
        self.outcome()
    }

    /// Snapshot of the current best solution, with its trajectory re-integrated.
    pub fn outcome(&self) -> PlanOutcome {
        let trajectory = self
            .best
            .leaf
            .map(|leaf| extract_trajectory(&self.store, leaf, &self.problem, &self.config));
        PlanOutcome {
            best: self.best.clone(),
            trajectory,
            stats: self.stats.clone(),
            node_count: self.store.len(),
        }
    }
}

/// Solves `problem` under `config`.
pub fn plan(problem: &PlanningProblem, config: &PlannerConfig) -> Result<PlanOutcome> {
    plan_with_observer(problem, config, &mut ())
}

pub fn plan_with_observer(
    problem: &PlanningProblem,
    config: &PlannerConfig,
    observer: &mut (dyn Observer + Send),
) -> Result<PlanOutcome> {
    let mut planner = Planner::new(problem.clone(), config.clone())?;
    Ok(planner.run(observer))
}
