#![allow(dead_code)]

use kinopax::bench::Scenario;
use kinopax::dynamics::propagate_ode;
use kinopax::planner::{NodeStatus, Observer, Planner, Transition};
use kinopax::segment_cost;

/// A bundled scenario with every budget cleared, so callers can set their own.
pub fn scenario(name: &str) -> Scenario {
    let mut s = Scenario::load(name).unwrap();
    s.config.t_max = None;
    s.config.max_iterations = None;
    s.config.max_propagations = None;
    s
}

/// Observer that checks the tree invariants after every transition and iteration.
#[derive(Default)]
pub struct InvariantChecker {
    status: Vec<NodeStatus>,
    last_best: f64,
    checked_nodes: usize,
    pub iterations: u64,
    pub transitions: u64,
    pub violations: Vec<String>,
}

impl InvariantChecker {
    pub fn new() -> Self {
        InvariantChecker {
            status: vec![NodeStatus::Active],
            last_best: f64::INFINITY,
            ..Default::default()
        }
    }

    fn violation(&mut self, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(msg);
        } else if self.violations.len() == 20 {
            self.violations.push("...".into());
        }
    }
}

impl Observer for InvariantChecker {
    fn on_transition(&mut self, t: Transition) {
        self.transitions += 1;
        let id = t.node as usize;
        if t.from == NodeStatus::Unexplored {
            if id != self.status.len() {
                self.violation(format!("commit of node {id} out of insertion order"));
                return;
            }
            self.status.push(NodeStatus::Unexplored);
        }
        let Some(&recorded) = self.status.get(id) else {
            self.violation(format!("transition of unknown node {id}"));
            return;
        };
        if recorded != t.from {
            self.violation(format!(
                "node {id}: transition from {:?} but recorded {recorded:?}",
                t.from
            ));
        }
        if !t.from.can_become(t.to) || t.from == t.to {
            self.violation(format!("node {id}: illegal {:?} -> {:?}", t.from, t.to));
        }
        self.status[id] = t.to;
    }

    fn on_iteration(&mut self, planner: &Planner) {
        self.iterations += 1;
        let store = planner.store();
        let grid = planner.grid();
        let problem = planner.problem();

        let best = planner.best().cost;
        if best > self.last_best {
            self.violation(format!("best cost rose from {} to {best}", self.last_best));
        }
        self.last_best = best;

        if self.status.len() != store.len() {
            self.violation(format!(
                "observed {} nodes, store holds {}",
                self.status.len(),
                store.len()
            ));
        }
        for (id, node) in store.nodes().iter().enumerate() {
            if node.acc_cost < grid.cost(node.region) {
                self.violation(format!(
                    "node {id} cost {} below region minimum {}",
                    node.acc_cost,
                    grid.cost(node.region)
                ));
            }
            if self.status.get(id) != Some(&store.status(id as u32)) {
                self.violation(format!("node {id} status diverged from transitions"));
            }
        }

        let h = planner.config().ode_step();
        let dims = problem.model.position_dims();
        for id in self.checked_nodes.max(1)..store.len() {
            let node = store.node(id as u32);
            let parent_id = node.parent.expect("non-root without parent");
            if parent_id as usize >= id {
                self.violation(format!("node {id} has parent {parent_id}"));
                continue;
            }
            let parent = store.node(parent_id);
            let inc = node.incoming.as_ref().expect("non-root without edge");
            let samples =
                propagate_ode(&parent.state, &inc.control, inc.duration, h, &problem.model)
                    .expect("stored edge re-integrates");
            let seg = segment_cost(&samples, inc.duration, &problem.cost, dims).unwrap();
            let expect = parent.acc_cost + seg;
            if (expect - node.acc_cost).abs() > 1e-9 * expect.abs().max(1e-300) {
                self.violation(format!(
                    "node {id}: stored cost {} vs re-integrated {expect}",
                    node.acc_cost
                ));
            }
            if samples.last().unwrap() != &node.state {
                self.violation(format!(
                    "node {id}: stored state differs from re-integration"
                ));
            }
        }
        self.checked_nodes = store.len();
    }
}

use kinopax::dynamics::{sample_control, sample_duration, DynamicsModel};
use kinopax::{Control, Interval, State};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Max-norm distance with angle coordinates compared modulo 2π.
pub fn state_error(a: &State, b: &State, model: &DynamicsModel) -> f64 {
    let angles = model.angle_dims();
    (0..a.dim())
        .map(|i| {
            let d = a[i] - b[i];
            if angles.contains(&i) {
                kinopax::dynamics::wrap_angle(d).abs()
            } else {
                d.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// RK4 error ratio under step halving for a turning, climbing, accelerating
/// Dubins airplane, measured against a fine-step reference.
pub fn dubins_order_ratio() -> (f64, f64, f64) {
    let model = DynamicsModel::DubinsAirplane;
    let x = State(vec![0.0, 0.0, 5.0, 0.3, 0.05, 1.2]);
    let u = Control(vec![0.4, -0.2, 0.3]);
    let dt = 2.0;
    let end = |h: f64| {
        kinopax::dynamics::propagate_ode(&x, &u, dt, h, &model)
            .unwrap()
            .pop()
            .unwrap()
    };
    let reference = end(1e-4);
    let e1 = state_error(&end(0.2), &reference, &model);
    let e2 = state_error(&end(0.1), &reference, &model);
    (e1 / e2, e1, e2)
}

/// Largest deviation, in standard errors, of the sample means of controls and
/// durations from their analytic means over `n` draws.
pub fn sampling_mean_z_scores(n: usize, seed: u64) -> Vec<f64> {
    let bounds = vec![
        Interval::new(-1.0, 1.0),
        Interval::new(0.0, 4.0),
        Interval::new(2.0 * 9.81 * 0.7, 2.0 * 9.81 * 1.3),
    ];
    let t_prop = 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![0.0; bounds.len() + 1];
    for _ in 0..n {
        let u = sample_control(&mut rng, &bounds);
        for (s, v) in sums.iter_mut().zip(u.coords()) {
            *s += v;
        }
        sums[bounds.len()] += sample_duration(&mut rng, t_prop);
    }
    let mut ranges: Vec<(f64, f64)> = bounds.iter().map(|b| (b.lo, b.hi)).collect();
    ranges.push((0.0, t_prop));
    sums.iter()
        .zip(ranges)
        .map(|(s, (lo, hi))| {
            let mean = s / n as f64;
            let se = (hi - lo) / 12f64.sqrt() / (n as f64).sqrt();
            (mean - 0.5 * (lo + hi)).abs() / se
        })
        .collect()
}
