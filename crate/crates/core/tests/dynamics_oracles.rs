mod common;

use common::{dubins_order_ratio, sampling_mean_z_scores, state_error};
use kinopax::dynamics::{propagate_ode, DynamicsModel, QuadcopterParams};
use kinopax::{Control, State};

fn euler(model: &DynamicsModel, x: &State, u: &Control, dt: f64, h: f64) -> State {
    let steps = (dt / h).round() as usize;
    let mut cur = x.0.clone();
    let mut d = vec![0.0; cur.len()];
    for _ in 0..steps {
        model.derivative(&cur, u.coords(), &mut d);
        for (c, v) in cur.iter_mut().zip(&d) {
            *c += h * v;
        }
    }
    State(cur)
}

fn quad_matches_euler(x: State, u: Control) {
    let model = DynamicsModel::Quadcopter(QuadcopterParams::default());
    let rk4 = propagate_ode(&x, &u, 0.5, 0.01, &model)
        .unwrap()
        .pop()
        .unwrap();
    let oracle = euler(&model, &x, &u, 0.5, 1e-5);
    let err = state_error(&rk4, &oracle, &model);
    assert!(err <= 1e-4, "max coordinate error {err}");
}

#[test]
fn quadcopter_hover_matches_euler_oracle() {
    let hover = QuadcopterParams::default().hover_thrust();
    let mut x = vec![0.0; 12];
    x[..3].copy_from_slice(&[1.0, 1.0, 5.0]);
    quad_matches_euler(State(x.clone()), Control(vec![hover, 0.0, 0.0, 0.0]));

    x[9..].copy_from_slice(&[0.05, -0.04, 0.02]);
    x[6..9].copy_from_slice(&[0.02, -0.03, 0.4]);
    quad_matches_euler(State(x), Control(vec![hover * 1.05, 0.1, -0.08, 0.03]));
}

#[test]
fn dubins_rk4_is_fourth_order() {
    let (ratio, e1, e2) = dubins_order_ratio();
    assert!(ratio >= 12.0, "ratio {ratio} (errors {e1:e}, {e2:e})");
}

#[test]
fn dubins_level_flight_is_straight() {
    let model = DynamicsModel::DubinsAirplane;
    let x = State(vec![1.0, 2.0, 3.0, std::f64::consts::FRAC_PI_2, 0.0, 1.5]);
    let end = propagate_ode(&x, &Control(vec![0.0; 3]), 2.0, 0.1, &model)
        .unwrap()
        .pop()
        .unwrap();
    assert!((end[0] - 1.0).abs() < 1e-12);
    assert!((end[1] - 5.0).abs() < 1e-12);
    assert_eq!(end[2], 3.0);
}

#[test]
fn sampling_means_within_three_sigma() {
    for seed in [1, 2, 3] {
        let z = sampling_mean_z_scores(100_000, seed);
        assert!(z.iter().all(|&v| v < 3.0), "seed {seed}: z = {z:?}");
    }
}

#[test]
fn double_integrator_2d_is_exact_on_quadratics() {
    let model = DynamicsModel::double_integrator_2d();
    let x = State(vec![0.0, 1.0, 0.5, 0.0]);
    let end = propagate_ode(&x, &Control(vec![1.0, -2.0]), 1.0, 0.3, &model)
        .unwrap()
        .pop()
        .unwrap();
    let expect = [1.0, 0.0, 1.5, -2.0];
    for (a, b) in end.coords().iter().zip(expect) {
        assert!((a - b).abs() < 1e-12, "{:?}", end.coords());
    }
}
