//! Data-parallel kinodynamic motion planning.
//!
//! The planner grows a tree by forward-integrating randomly sampled controls
//! from every active node, keeps only the cheapest node that reaches each cell
//! of a hypercube decomposition of the state space, and prunes or parks nodes
//! whose paths are dominated. Costs per cell are tracked with lock-free atomic
//! minima so the expansion pass can run on any number of workers.
//!
//! Modules:
//! - [`problem`]: states, controls, costs, goal regions, problem and config types
//! - [`dynamics`]: double integrator, Dubins airplane and quadcopter models, RK4
//! - [`environment`]: primitive obstacles and validity checking
//! - [`decomposition`]: the region grid and its atomic cost table
//! - [`planner`]: the propagate / prune / update loop
//! - [`bench`]: scenario files, trial execution and reporting

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod decomposition;
pub mod dynamics;
pub mod environment;
pub mod error;
pub mod planner;
pub mod problem;

pub use decomposition::{RegionGrid, UpdateOutcome};
pub use dynamics::DynamicsModel;
pub use environment::{Environment, Obstacle};
pub use error::{Error, Result};
pub use planner::{plan, BestSolution, PlanOutcome, Planner, PlannerStats, Trajectory};
pub use problem::{
    in_goal, segment_cost, Control, CostKind, CostMetric, GoalRegion, GridResolution, Interval,
    PlannerConfig, PlanningProblem, State,
};
