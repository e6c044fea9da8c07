//! Reduced-order turbine plant: rigid drivetrain, first-order pitch actuator
//! with rate limiting, and a single fore-aft tower mode.
//!
//! States: rotor speed (rad/s), blade pitch (rad), tower-top deflection (m)
//! and deflection rate (m/s). Inputs: generator torque (N*m, generator side)
//! and pitch reference (rad). Integration is fixed-step classical RK4.

use crate::aero::AeroModel;
use crate::error::{Error, Result};

/// Physical and actuator parameters of the turbine.
#[derive(Debug, Clone, PartialEq)]
pub struct TurbineParams {
    /// Rotor radius (m).
    pub rotor_radius: f64,
    /// Air density (kg/m^3).
    pub air_density: f64,
    /// Drivetrain inertia referred to the rotor side (kg*m^2).
    pub inertia: f64,
    /// Gearbox ratio (generator speed / rotor speed).
    pub gear_ratio: f64,
    /// Rated rotor speed (rad/s).
    pub rated_rotor_speed: f64,
    /// Rated generator torque, generator side (N*m).
    pub rated_generator_torque: f64,
    /// Lower edge of the generator-torque blending sector (N*m).
    pub min_generator_torque: f64,
    /// Rated mechanical power (W).
    pub rated_power: f64,
    /// Tip speed ratio of maximum power capture.
    pub lambda_opt: f64,
    /// Maximum power coefficient at `lambda_opt` and zero pitch.
    pub cp_max: f64,
    /// Cut-in wind speed (m/s).
    pub v_cut_in: f64,
    /// Rated wind speed (m/s).
    pub v_rated: f64,
    /// Pitch actuator rate limit (rad/s).
    pub pitch_rate_limit: f64,
    /// Pitch actuator time constant (s).
    pub pitch_time_constant: f64,
    /// Lower pitch limit (rad).
    pub pitch_min: f64,
    /// Upper pitch limit (rad).
    pub pitch_max: f64,
    /// Modal mass of the first tower fore-aft mode (kg).
    pub tower_mass: f64,
    /// Modal stiffness of the tower mode (N/m).
    pub tower_stiffness: f64,
    /// Modal damping of the tower mode (N*s/m).
    pub tower_damping: f64,
}

impl Default for TurbineParams {
    /// A 5 MW class machine: 63 m rotor, 97:1 gearbox, rated at
    /// 1.267 rad/s rotor speed. The rated torque is chosen so that
    /// torque * gear ratio * rated speed equals rated power exactly.
    fn default() -> Self {
        Self {
            rotor_radius: 63.0,
            air_density: 1.225,
            inertia: 4.38e7,
            gear_ratio: 97.0,
            rated_rotor_speed: 1.267,
            rated_generator_torque: 5.0e6 / (97.0 * 1.267),
            min_generator_torque: 0.1 * 5.0e6 / (97.0 * 1.267),
            rated_power: 5.0e6,
            lambda_opt: 7.55,
            cp_max: 0.482,
            v_cut_in: 3.0,
            v_rated: 11.4,
            pitch_rate_limit: 8.0_f64.to_radians(),
            pitch_time_constant: 0.3,
            pitch_min: 0.0,
            pitch_max: 90.0_f64.to_radians(),
            tower_mass: 4.3e5,
            tower_stiffness: 1.74e6,
            tower_damping: 4.3e4,
        }
    }
}

impl TurbineParams {
    /// Validates positivity, ordering and the rated-power consistency
    /// `T_rated * n_g * omega_rated == P_rated` within 2 %.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rotor_radius", self.rotor_radius),
            ("air_density", self.air_density),
            ("inertia", self.inertia),
            ("gear_ratio", self.gear_ratio),
            ("rated_rotor_speed", self.rated_rotor_speed),
            ("rated_generator_torque", self.rated_generator_torque),
            ("rated_power", self.rated_power),
            ("lambda_opt", self.lambda_opt),
            ("cp_max", self.cp_max),
            ("v_cut_in", self.v_cut_in),
            ("v_rated", self.v_rated),
            ("pitch_rate_limit", self.pitch_rate_limit),
            ("pitch_time_constant", self.pitch_time_constant),
            ("tower_mass", self.tower_mass),
            ("tower_stiffness", self.tower_stiffness),
            ("tower_damping", self.tower_damping),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.min_generator_torque < 0.0
            || self.min_generator_torque >= self.rated_generator_torque
        {
            return Err(Error::Config(format!(
                "min_generator_torque must lie in [0, rated), got {}",
                self.min_generator_torque
            )));
        }
        if self.cp_max >= crate::aero::BETZ_LIMIT {
            return Err(Error::Config(format!(
                "cp_max {} must stay below the Betz limit {:.4}",
                self.cp_max,
                crate::aero::BETZ_LIMIT
            )));
        }
        if self.v_cut_in >= self.v_rated {
            return Err(Error::Config(format!(
                "v_cut_in {} must be below v_rated {}",
                self.v_cut_in, self.v_rated
            )));
        }
        if !(self.pitch_min.is_finite() && self.pitch_max.is_finite())
            || self.pitch_min >= self.pitch_max
        {
            return Err(Error::Config(format!(
                "pitch range [{}, {}] is invalid",
                self.pitch_min, self.pitch_max
            )));
        }
        let rated_product = self.rated_generator_torque * self.gear_ratio * self.rated_rotor_speed;
        let mismatch = (rated_product - self.rated_power).abs() / self.rated_power;
        if mismatch > 0.02 {
            return Err(Error::Config(format!(
                "rated torque * gear ratio * rated speed = {rated_product:.3e} W deviates {:.1}% \
                 from rated power {:.3e} W (limit 2%)",
                100.0 * mismatch,
                self.rated_power
            )));
        }
        Ok(())
    }

    /// Rotor speed floor used when evaluating aerodynamic torque, keeping the
    /// torque expression regular near standstill.
    pub fn omega_floor(&self) -> f64 {
        0.05 * self.rated_rotor_speed
    }

    /// Optimal-torque-tracking gain of the quadratic baseline law
    /// `T_g = kappa * omega_g^2`.
    pub fn kappa(&self) -> f64 {
        0.5 * self.air_density * std::f64::consts::PI * self.rotor_radius.powi(5) * self.cp_max
            / (self.lambda_opt.powi(3) * self.gear_ratio.powi(3))
    }
}

/// Plant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbineState {
    /// Rotor speed (rad/s).
    pub omega_r: f64,
    /// Blade pitch (rad).
    pub beta: f64,
    /// Tower-top fore-aft deflection (m).
    pub tower_defl: f64,
    /// Tower-top fore-aft velocity (m/s).
    pub tower_vel: f64,
}

impl TurbineState {
    pub fn is_finite(&self) -> bool {
        self.omega_r.is_finite()
            && self.beta.is_finite()
            && self.tower_defl.is_finite()
            && self.tower_vel.is_finite()
    }
}

/// Controller outputs applied to the plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    /// Generator torque command, generator side (N*m).
    pub generator_torque: f64,
    /// Pitch reference (rad).
    pub pitch_ref: f64,
}

/// Tip speed ratio `omega_r * R / v`. Errors when `v <= 0`.
pub fn tip_speed_ratio(omega_r: f64, v: f64, radius: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!(
            "wind speed must be positive, got {v}"
        )));
    }
    Ok(omega_r * radius / v)
}

/// Aerodynamic rotor torque (N*m, rotor side). The rotor speed is floored at
/// `params.omega_floor()` inside the expression so the division stays benign.
pub fn aero_torque(
    omega_r: f64,
    beta: f64,
    v: f64,
    params: &TurbineParams,
    aero: &AeroModel,
) -> Result<f64> {
    let omega = omega_r.max(params.omega_floor());
    let lambda = tip_speed_ratio(omega, v, params.rotor_radius)?;
    let cp = aero.power_coefficient(lambda, beta)?;
    let swept = std::f64::consts::PI * params.rotor_radius.powi(2);
    Ok(0.5 * params.air_density * swept * v.powi(3) * cp / omega)
}

/// Aerodynamic thrust on the rotor (N).
pub fn aero_thrust(
    omega_r: f64,
    beta: f64,
    v: f64,
    params: &TurbineParams,
    aero: &AeroModel,
) -> Result<f64> {
    let omega = omega_r.max(params.omega_floor());
    let lambda = tip_speed_ratio(omega, v, params.rotor_radius)?;
    let ct = aero.thrust_coefficient(lambda, beta)?;
    let swept = std::f64::consts::PI * params.rotor_radius.powi(2);
    Ok(0.5 * params.air_density * swept * v.powi(2) * ct)
}

/// Electrical-side power `T_g * omega_g` (W); losses are not modeled.
pub fn generator_power(generator_torque: f64, omega_g: f64) -> f64 {
    generator_torque * omega_g
}

/// State derivative at fixed wind speed and control input.
fn derivative(
    s: &TurbineState,
    u: &ControlInput,
    v: f64,
    params: &TurbineParams,
    aero: &AeroModel,
) -> Result<[f64; 4]> {
    let t_a = aero_torque(s.omega_r, s.beta, v, params, aero)?;
    let f_t = aero_thrust(s.omega_r, s.beta, v, params, aero)?;
    let d_omega = (t_a - params.gear_ratio * u.generator_torque) / params.inertia;
    let raw_rate = (u.pitch_ref - s.beta) / params.pitch_time_constant;
    let d_beta = raw_rate.clamp(-params.pitch_rate_limit, params.pitch_rate_limit);
    let d_defl = s.tower_vel;
    let d_vel = (f_t - params.tower_damping * s.tower_vel - params.tower_stiffness * s.tower_defl)
        / params.tower_mass;
    Ok([d_omega, d_beta, d_defl, d_vel])
}

/// Advances the plant one fixed RK4 step of length `dt` under constant wind
/// `v` and constant control input. The pitch rate clamp applies inside every
/// substage; pitch and rotor-speed range clamps are projected after the step.
pub fn step(
    state: &TurbineState,
    u: &ControlInput,
    v: f64,
    dt: f64,
    params: &TurbineParams,
    aero: &AeroModel,
) -> Result<TurbineState> {
    if !(dt.is_finite() && dt > 0.0 && dt <= 0.05) {
        return Err(Error::Domain(format!(
            "step size must lie in (0, 0.05] s, got {dt}"
        )));
    }
    let add = |s: &TurbineState, k: &[f64; 4], h: f64| TurbineState {
        omega_r: s.omega_r + h * k[0],
        beta: s.beta + h * k[1],
        tower_defl: s.tower_defl + h * k[2],
        tower_vel: s.tower_vel + h * k[3],
    };
    let k1 = derivative(state, u, v, params, aero)?;
    let k2 = derivative(&add(state, &k1, 0.5 * dt), u, v, params, aero)?;
    let k3 = derivative(&add(state, &k2, 0.5 * dt), u, v, params, aero)?;
    let k4 = derivative(&add(state, &k3, dt), u, v, params, aero)?;
    let mut next = TurbineState {
        omega_r: state.omega_r + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        beta: state.beta + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        tower_defl: state.tower_defl + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        tower_vel: state.tower_vel + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    };
    next.beta = next.beta.clamp(params.pitch_min, params.pitch_max);
    next.omega_r = next.omega_r.max(0.0);
    if !next.is_finite() {
        return Err(Error::NonFinite("plant state after RK4 step".into()));
    }
    Ok(next)
}
