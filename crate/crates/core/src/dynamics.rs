//! Dynamics models and fixed-step RK4 forward propagation.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Control, Interval, State};

/// Physical parameters of the quadcopter model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadcopterParams {
    pub mass: f64,
    pub gravity: f64,
    /// Principal moments of inertia (Ixx, Iyy, Izz).
    pub inertia: [f64; 3],
    /// Lever arm converting the roll/pitch control forces into torques.
    pub arm_length: f64,
}

impl Default for QuadcopterParams {
    fn default() -> Self {
        QuadcopterParams {
            mass: 1.0,
            gravity: 9.81,
            inertia: [1.0, 1.0, 1.0],
            arm_length: 1.0,
        }
    }
}

impl QuadcopterParams {
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

/// The supported dynamics models.
///
/// State layouts:
/// - double integrator: positions then velocities, controls are accelerations;
/// - Dubins airplane: `(x, y, z, heading, flight-path angle, speed)`, controls
///   `(turn rate, pitch rate, longitudinal acceleration)`;
/// - quadcopter: `(x, y, z, vx, vy, vz, roll, pitch, yaw, p, q, r)`, controls
///   `(thrust, roll force, pitch force, yaw torque)`.
#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsModel {
    /// Point mass with `spatial_dims` position axes (2 or 3).
    DoubleIntegrator {
        spatial_dims: usize,
    },
    DubinsAirplane,
    Quadcopter(QuadcopterParams),
}

const XY: [usize; 2] = [0, 1];
const XYZ: [usize; 3] = [0, 1, 2];

impl DynamicsModel {
    pub fn double_integrator_2d() -> Self {
        DynamicsModel::DoubleIntegrator { spatial_dims: 2 }
    }

    pub fn double_integrator_3d() -> Self {
        DynamicsModel::DoubleIntegrator { spatial_dims: 3 }
    }

    pub fn id(&self) -> &'static str {
        match self {
            DynamicsModel::DoubleIntegrator { spatial_dims: 2 } => "double_integrator_4d",
            DynamicsModel::DoubleIntegrator { .. } => "double_integrator_6d",
            DynamicsModel::DubinsAirplane => "dubins_airplane_6d",
            DynamicsModel::Quadcopter(_) => "quadcopter_12d",
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            DynamicsModel::DoubleIntegrator { spatial_dims } => 2 * spatial_dims,
            DynamicsModel::DubinsAirplane => 6,
            DynamicsModel::Quadcopter(_) => 12,
        }
    }

    pub fn control_dim(&self) -> usize {
        match self {
            DynamicsModel::DoubleIntegrator { spatial_dims } => *spatial_dims,
            DynamicsModel::DubinsAirplane => 3,
            DynamicsModel::Quadcopter(_) => 4,
        }
    }

    pub fn position_dims(&self) -> &'static [usize] {
        match self {
            DynamicsModel::DoubleIntegrator { spatial_dims: 2 } => &XY,
            _ => &XYZ,
        }
    }

    /// Dimensions holding angles, wrapped to (-pi, pi] after every step.
    pub fn angle_dims(&self) -> &'static [usize] {
        match self {
            DynamicsModel::DoubleIntegrator { .. } => &[],
            DynamicsModel::DubinsAirplane => &[3, 4],
            DynamicsModel::Quadcopter(_) => &[6, 7, 8],
        }
    }

    /// Writes `f(x, u)` into `out`.
    pub fn derivative(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        match self {
            DynamicsModel::DoubleIntegrator { spatial_dims } => {
                let d = *spatial_dims;
                out[..d].copy_from_slice(&x[d..2 * d]);
                out[d..2 * d].copy_from_slice(&u[..d]);
            }
            DynamicsModel::DubinsAirplane => {
                let (heading, gamma, speed) = (x[3], x[4], x[5]);
                let (sg, cg) = gamma.sin_cos();
                let (sh, ch) = heading.sin_cos();
                out[0] = speed * cg * ch;
                out[1] = speed * cg * sh;
                out[2] = speed * sg;
                out[3] = u[0];
                out[4] = u[1];
                out[5] = u[2];
            }
            DynamicsModel::Quadcopter(p) => quadcopter_derivative(p, x, u, out),
        }
    }
}

fn quadcopter_derivative(p: &QuadcopterParams, x: &[f64], u: &[f64], out: &mut [f64]) {
    let (roll, pitch, yaw) = (x[6], x[7], x[8]);
    let (rate_p, rate_q, rate_r) = (x[9], x[10], x[11]);
    let (sphi, cphi) = roll.sin_cos();
    let (sth, cth) = pitch.sin_cos();
    let (spsi, cpsi) = yaw.sin_cos();
    let tth = sth / cth;

    let thrust_acc = u[0] / p.mass;
    // Third column of the ZYX body-to-world rotation.
    let bz = [
        cphi * sth * cpsi + sphi * spsi,
        cphi * sth * spsi - sphi * cpsi,
        cphi * cth,
    ];

    out[0] = x[3];
    out[1] = x[4];
    out[2] = x[5];
    out[3] = thrust_acc * bz[0];
    out[4] = thrust_acc * bz[1];
    out[5] = thrust_acc * bz[2] - p.gravity;

    out[6] = rate_p + (rate_q * sphi + rate_r * cphi) * tth;
    out[7] = rate_q * cphi - rate_r * sphi;
    out[8] = (rate_q * sphi + rate_r * cphi) / cth;

    let [ixx, iyy, izz] = p.inertia;
    let tau = [p.arm_length * u[1], p.arm_length * u[2], u[3]];
    out[9] = ((iyy - izz) * rate_q * rate_r + tau[0]) / ixx;
    out[10] = ((izz - ixx) * rate_p * rate_r + tau[1]) / iyy;
    out[11] = ((ixx - iyy) * rate_p * rate_q + tau[2]) / izz;
}

/// Wraps an angle into (-pi, pi]; values already in range are returned unchanged.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Number of integration steps for a segment of `dt` seconds at step `h`.
fn step_count(dt: f64, h: f64) -> usize {
    ((dt / h) - 1e-9).ceil().max(1.0) as usize
}

/// Integrates `model` from `x` under constant control `u` for `dt` seconds with
/// classical RK4 at step `h`. Returns the states at `0, h, 2h, ..., dt`, the
/// last step shortened to land exactly on `dt`.
pub fn propagate_ode(
    x: &State,
    u: &Control,
    dt: f64,
    h: f64,
    model: &DynamicsModel,
) -> Result<Vec<State>> {
    let n = model.state_dim();
    let steps = step_count(dt, h);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(x.clone());

    let mut cur = x.0.clone();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let uc = u.coords();

    for i in 0..steps {
        let step = if i + 1 == steps {
            dt - h * (steps - 1) as f64
        } else {
            h
        };
        model.derivative(&cur, uc, &mut k1);
        for j in 0..n {
            tmp[j] = cur[j] + 0.5 * step * k1[j];
        }
        model.derivative(&tmp, uc, &mut k2);
        for j in 0..n {
            tmp[j] = cur[j] + 0.5 * step * k2[j];
        }
        model.derivative(&tmp, uc, &mut k3);
        for j in 0..n {
            tmp[j] = cur[j] + step * k3[j];
        }
        model.derivative(&tmp, uc, &mut k4);

        for j in 0..n {
            cur[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if cur.iter().any(|v| !v.is_finite()) {
            return Err(Error::PropagationDiverged {
                time: h * i as f64 + step,
            });
        }
        for &a in model.angle_dims() {
            cur[a] = wrap_angle(cur[a]);
        }
        samples.push(State(cur.clone()));
    }
    Ok(samples)
}

/// Draws each control axis independently and uniformly from its bounds.
pub fn sample_control<R: Rng + ?Sized>(rng: &mut R, bounds: &[Interval]) -> Control {
    Control(
        bounds
            .iter()
            .map(|b| {
                if b.lo == b.hi {
                    b.lo
                } else {
                    rng.gen_range(b.lo..=b.hi)
                }
            })
            .collect(),
    )
}

/// Draws a duration uniformly from `(0, t_prop]`.
pub fn sample_duration<R: Rng + ?Sized>(rng: &mut R, t_prop: f64) -> f64 {
    // gen::<f64>() is in [0, 1), so 1 - it is in (0, 1].
    t_prop * (1.0 - rng.gen::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn final_state(samples: &[State]) -> &[f64] {
        samples.last().unwrap().coords()
    }

    #[test]
    fn double_integrator_constant_velocity() {
        let m = DynamicsModel::double_integrator_3d();
        let x = State(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let out = propagate_ode(&x, &Control(vec![0.0; 3]), 1.0, 0.1, &m).unwrap();
        assert_eq!(out.len(), 11);
        let f = final_state(&out);
        let expect = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{f:?}");
        }
    }

    #[test]
    fn double_integrator_constant_acceleration() {
        let m = DynamicsModel::double_integrator_3d();
        let out = propagate_ode(
            &State::zeros(6),
            &Control(vec![1.0, 0.0, 0.0]),
            1.0,
            0.1,
            &m,
        )
        .unwrap();
        let f = final_state(&out);
        let expect = [0.5, 0.0, 0.0, 1.0, 0.0, 0.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{f:?}");
        }
    }

    #[test]
    fn last_step_lands_on_duration() {
        let m = DynamicsModel::double_integrator_2d();
        let x = State(vec![0.0, 0.0, 1.0, 0.0]);
        let out = propagate_ode(&x, &Control(vec![0.0, 0.0]), 0.25, 0.1, &m).unwrap();
        // 0, 0.1, 0.2, 0.25
        assert_eq!(out.len(), 4);
        assert!((out[3][0] - 0.25).abs() < 1e-15);
        assert!((out[2][0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn first_sample_is_input_bit_exact() {
        let m = DynamicsModel::DubinsAirplane;
        let x = State(vec![0.1, 0.2, 0.3, 3.0, 0.1, 1.5]);
        let out = propagate_ode(&x, &Control(vec![0.7, 0.0, 0.1]), 0.3, 0.02, &m).unwrap();
        assert_eq!(out[0], x);
    }

    #[test]
    fn heading_wraps() {
        let m = DynamicsModel::DubinsAirplane;
        let x = State(vec![0.0, 0.0, 0.0, 3.0, 0.0, 1.0]);
        let out = propagate_ode(&x, &Control(vec![1.0, 0.0, 0.0]), 1.0, 0.05, &m).unwrap();
        for s in &out {
            assert!(s[3] > -PI && s[3] <= PI);
        }
        let expect = wrap_angle(4.0);
        assert!((final_state(&out)[3] - expect).abs() < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(0.5), 0.5);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn diverging_propagation_is_an_error() {
        let m = DynamicsModel::DoubleIntegrator { spatial_dims: 2 };
        let x = State(vec![0.0, 0.0, f64::MAX, 0.0]);
        let err = propagate_ode(&x, &Control(vec![f64::MAX, 0.0]), 1.0, 0.1, &m);
        assert!(matches!(err, Err(Error::PropagationDiverged { .. })));
    }

    #[test]
    fn hover_is_an_equilibrium() {
        let p = QuadcopterParams::default();
        let m = DynamicsModel::Quadcopter(p.clone());
        let x = State(vec![
            1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.0,
        ]);
        let u = Control(vec![p.hover_thrust(), 0.0, 0.0, 0.0]);
        let out = propagate_ode(&x, &u, 1.0, 0.01, &m).unwrap();
        for (a, b) in final_state(&out).iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reversing_double_integrator_returns_to_start() {
        let m = DynamicsModel::double_integrator_3d();
        let x0 = State(vec![1.0, -2.0, 0.5, 0.3, -0.7, 0.2]);
        let u = Control(vec![0.4, -0.9, 0.25]);
        let fwd = propagate_ode(&x0, &u, 1.3, 0.02, &m).unwrap();
        let mut back_start = fwd.last().unwrap().clone();
        for v in &mut back_start.0[3..] {
            *v = -*v;
        }
        let back = propagate_ode(&back_start, &u, 1.3, 0.02, &m).unwrap();
        for d in 0..3 {
            assert!((final_state(&back)[d] - x0[d]).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_control_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bounds = vec![Interval::new(0.7, 0.7); 4];
        assert_eq!(sample_control(&mut rng, &bounds).0, vec![0.7; 4]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let bounds = vec![Interval::new(-1.0, 1.0); 3];
        let a = sample_control(&mut ChaCha8Rng::seed_from_u64(99), &bounds);
        let b = sample_control(&mut ChaCha8Rng::seed_from_u64(99), &bounds);
        assert_eq!(a, b);
        assert!(a.0.iter().all(|v| (-1.0..=1.0).contains(v)));
        let da = sample_duration(&mut ChaCha8Rng::seed_from_u64(5), 1.0);
        let db = sample_duration(&mut ChaCha8Rng::seed_from_u64(5), 1.0);
        assert_eq!(da.to_bits(), db.to_bits());
    }

    #[test]
    fn duration_in_half_open_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let d = sample_duration(&mut rng, 1.0);
            assert!(d > 0.0 && d <= 1.0);
        }
    }
}
