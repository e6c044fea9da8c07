//! Vertex gain synthesis: plant linearization and integral-augmented
//! continuous-time LQR solved by integrating the matrix Riccati ODE to
//! stationarity.
//!
//! Each scheduling vertex carries a two-state deviation model (rotor speed,
//! pitch). The model is augmented with the tracking integral (whose
//! derivative is the negative speed deviation) and a stabilizing state
//! feedback is computed for it. Closed-loop stability of every vertex is
//! certified with the Routh-Hurwitz criterion on the characteristic
//! polynomial, independently of any eigenvalue solver.

use nalgebra::{Matrix2, Matrix3, RowVector3, Vector2, Vector3};

use crate::aero::AeroModel;
use crate::error::{Error, Result};
use crate::turbine::TurbineParams;

/// Linear deviation model of one scheduling vertex:
/// `d/dt (d_omega, d_beta) = A (d_omega, d_beta) + B u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexModel {
    pub a: Matrix2<f64>,
    pub b: Vector2<f64>,
}

/// LQR weights for the integral-augmented design. State order:
/// `(d_omega, d_beta, x_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqrWeights {
    pub q: Matrix3<f64>,
    pub r: f64,
}

impl LqrWeights {
    /// Diagonal weighting.
    pub fn diagonal(q: [f64; 3], r: f64) -> Result<Self> {
        if q.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(r.is_finite() && r > 0.0) {
            return Err(Error::Config(format!(
                "LQR weights need q >= 0 and r > 0, got q = {q:?}, r = {r}"
            )));
        }
        Ok(Self {
            q: Matrix3::from_diagonal(&Vector3::new(q[0], q[1], q[2])),
            r,
        })
    }
}

/// State feedback of one vertex, split by role: `u = -k_x . dx + k_i x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexGain {
    /// Feedback on the deviation states `(d_omega, d_beta)`.
    pub k_x: Vector2<f64>,
    /// Gain on the tracking integral.
    pub k_i: f64,
}

/// Augments a vertex model with the tracking integral
/// `d/dt x_i = -d_omega`.
pub fn augment(model: &VertexModel) -> (Matrix3<f64>, Vector3<f64>) {
    let a = &model.a;
    #[rustfmt::skip]
    let a_aug = Matrix3::new(
        a[(0, 0)], a[(0, 1)], 0.0,
        a[(1, 0)], a[(1, 1)], 0.0,
        -1.0,      0.0,       0.0,
    );
    let b_aug = Vector3::new(model.b[0], model.b[1], 0.0);
    (a_aug, b_aug)
}

/// Solves the continuous algebraic Riccati equation
/// `A' P + P A - P B B' P / r + Q = 0`
/// by integrating the differential Riccati equation with adaptive RK4 steps
/// until the derivative norm vanishes. Returns the stabilizing solution.
pub fn solve_care(
    a: &Matrix3<f64>,
    b: &Vector3<f64>,
    q: &Matrix3<f64>,
    r: f64,
) -> Result<Matrix3<f64>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "control weight must be positive, got {r}"
        )));
    }
    let s = b * b.transpose() / r;
    let deriv = |p: &Matrix3<f64>| a.transpose() * p + p * a - p * s * p + q;
    let rk4 = |p: &Matrix3<f64>, h: f64| {
        let k1 = deriv(p);
        let k2 = deriv(&(p + 0.5 * h * k1));
        let k3 = deriv(&(p + 0.5 * h * k2));
        let k4 = deriv(&(p + h * k3));
        p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let mut p = *q;
    let mut h = 0.01 / (1.0 + a.norm());
    let stationary_tol = 1e-11;
    for _ in 0..400_000 {
        if deriv(&p).norm() <= stationary_tol * (1.0 + p.norm()) {
            return Ok(0.5 * (p + p.transpose()));
        }
        // Keep h inside the RK4 stability region of the current closed-loop
        // dynamics, otherwise the iteration orbits the stationary point
        // instead of contracting onto it.
        let h_cap = 1.5 / (1.0 + (a - s * p).norm());
        h = h.min(h_cap);
        // Step doubling: one full step vs two half steps gives a local error
        // estimate that keeps the quadratic ODE inside the stability region.
        let full = rk4(&p, h);
        let half = rk4(&rk4(&p, 0.5 * h), 0.5 * h);
        let finite = full.iter().all(|v| v.is_finite()) && half.iter().all(|v| v.is_finite());
        let scale = 1.0 + p.norm();
        let err = if finite {
            (full - half).norm()
        } else {
            f64::INFINITY
        };
        if !finite || err > 1e-7 * scale || half.norm() > 50.0 * scale {
            h *= 0.5;
            if h < 1e-13 {
                return Err(Error::Domain(
                    "Riccati integration step collapsed; system likely not stabilizable".into(),
                ));
            }
            continue;
        }
        p = 0.5 * (half + half.transpose());
        if err < 1e-9 * scale {
            h = (1.8 * h).min(h_cap);
        }
    }
    Err(Error::Domain(
        "Riccati integration did not reach stationarity".into(),
    ))
}

/// LQR state feedback `K = B' P / r` for the augmented system.
pub fn lqr_gain(a: &Matrix3<f64>, b: &Vector3<f64>, w: &LqrWeights) -> Result<RowVector3<f64>> {
    let p = solve_care(a, b, &w.q, w.r)?;
    Ok((b.transpose() * p) / w.r)
}

/// Routh-Hurwitz test for a 3x3 matrix: all eigenvalues strictly in the left
/// half plane iff the characteristic polynomial `s^3 + c2 s^2 + c1 s + c0`
/// satisfies `c2 > 0`, `c0 > 0` and `c2 c1 > c0`.
pub fn is_hurwitz(m: &Matrix3<f64>) -> bool {
    let c2 = -m.trace();
    // Sum of principal 2x2 minors.
    let c1 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let c0 = -m.determinant();
    c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0
}

/// Synthesizes one stabilizing vertex gain and certifies the closed loop.
pub fn synthesize_vertex(model: &VertexModel, w: &LqrWeights, vertex: usize) -> Result<VertexGain> {
    let (a_aug, b_aug) = augment(model);
    let k = lqr_gain(&a_aug, &b_aug, w).map_err(|e| Error::Synthesis {
        vertex,
        reason: e.to_string(),
    })?;
    let closed = a_aug - b_aug * k;
    if !is_hurwitz(&closed) {
        return Err(Error::Synthesis {
            vertex,
            reason: "closed-loop vertex matrix is not Hurwitz".into(),
        });
    }
    // u = -K x_aug = -(K1, K2) . dx - K3 x_i, reported as u = -k_x . dx + k_i x_i.
    Ok(VertexGain {
        k_x: Vector2::new(k[0], k[1]),
        k_i: -k[2],
    })
}

/// Synthesizes gains for every vertex model with shared weights.
pub fn synthesize_gains(models: &[VertexModel], w: &LqrWeights) -> Result<Vec<VertexGain>> {
    models
        .iter()
        .enumerate()
        .map(|(i, m)| synthesize_vertex(m, w, i))
        .collect()
}

/// Closed-loop matrix of a vertex under its gain (for inspection/tests).
pub fn closed_loop(model: &VertexModel, gain: &VertexGain) -> Matrix3<f64> {
    let (a_aug, b_aug) = augment(model);
    let k = RowVector3::new(gain.k_x[0], gain.k_x[1], -gain.k_i);
    a_aug - b_aug * k
}

/// Finite-difference linearization of the rigid-drivetrain rotor/pitch
/// dynamics at an operating point.
#[derive(Debug, Clone)]
pub struct LinearizedPlant {
    /// State matrix over `(d_omega, d_beta)`.
    pub a: Matrix2<f64>,
    /// Input column for generator torque.
    pub b_torque: Vector2<f64>,
    /// Input column for the pitch reference.
    pub b_pitch: Vector2<f64>,
    /// Variables whose derivative used a one-sided difference because the
    /// operating point sits on a domain boundary.
    pub one_sided: Vec<&'static str>,
}

/// Linearizes the `(omega, beta)` dynamics at `(omega_r, beta, v)` by central
/// differences (one-sided at domain boundaries, reported in `one_sided`).
///
/// The nominal inputs are the torque balancing the aerodynamic torque and a
/// pitch reference equal to the current pitch, so the expansion point is
/// drift-free in pitch and the rate limiter stays inactive.
pub fn linearize_at(
    omega_r: f64,
    beta: f64,
    v: f64,
    params: &TurbineParams,
    aero: &AeroModel,
) -> Result<LinearizedPlant> {
    let tau = params.pitch_time_constant;
    let omega_dot = |omega: f64, beta: f64, t_g: f64| -> Result<f64> {
        Ok(
            (crate::turbine::aero_torque(omega, beta, v, params, aero)? - params.gear_ratio * t_g)
                / params.inertia,
        )
    };
    let t_g0 = crate::turbine::aero_torque(omega_r, beta, v, params, aero)? / params.gear_ratio;

    let mut one_sided = Vec::new();
    let h_omega = 1e-4 * params.rated_rotor_speed;
    let h_beta = 1e-4 * (params.pitch_max - params.pitch_min);
    let h_torque = 1e-4 * params.rated_generator_torque;

    // d omega_dot / d omega: keep the evaluation above the torque floor.
    let floor = params.omega_floor();
    let (o_lo, o_hi, o_div) = if omega_r - h_omega <= floor {
        one_sided.push("omega_r");
        (omega_r, omega_r + h_omega, h_omega)
    } else {
        (omega_r - h_omega, omega_r + h_omega, 2.0 * h_omega)
    };
    let a11 = (omega_dot(o_hi, beta, t_g0)? - omega_dot(o_lo, beta, t_g0)?) / o_div;

    // d omega_dot / d beta.
    let (b_lo, b_hi, b_div) = if beta - h_beta < params.pitch_min {
        one_sided.push("beta");
        (beta, beta + h_beta, h_beta)
    } else if beta + h_beta > params.pitch_max {
        one_sided.push("beta");
        (beta - h_beta, beta, h_beta)
    } else {
        (beta - h_beta, beta + h_beta, 2.0 * h_beta)
    };
    let a12 = (omega_dot(omega_r, b_hi, t_g0)? - omega_dot(omega_r, b_lo, t_g0)?) / b_div;

    // d omega_dot / d T_g (exactly -n_g / J; the central difference of a
    // linear map reproduces it to rounding).
    let b1_torque = (omega_dot(omega_r, beta, t_g0 + h_torque)?
        - omega_dot(omega_r, beta, t_g0 - h_torque)?)
        / (2.0 * h_torque);

    // Pitch actuator row is linear by construction.
    let a = Matrix2::new(a11, a12, 0.0, -1.0 / tau);
    let b_torque_col = Vector2::new(b1_torque, 0.0);
    let b_pitch_col = Vector2::new(0.0, 1.0 / tau);
    Ok(LinearizedPlant {
        a,
        b_torque: b_torque_col,
        b_pitch: b_pitch_col,
        one_sided,
    })
}
