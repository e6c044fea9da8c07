//! Rotor-effective wind speed observer.
//!
//! A disturbance observer treats the aerodynamic torque as an extended state
//! driven only by the speed innovation, then inverts the static torque map
//! `T_a(omega, beta, v)` for the wind speed by bisection and low-passes the
//! result. The estimate is clamped to a plausibility band so scheduling
//! inputs stay bounded even when the inversion is momentarily ill-posed.

use crate::aero::AeroModel;
use crate::error::{Error, Result};
use crate::turbine::{aero_torque, TurbineParams};

/// Correction gains of the disturbance observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverGains {
    /// Speed-innovation gain on the speed state (1/s).
    pub l1: f64,
    /// Speed-innovation gain on the torque state (N*m/rad).
    pub l2: f64,
}

impl ObserverGains {
    /// Places both estimation-error poles at `-pole` (rad/s) for the given
    /// drivetrain inertia.
    pub fn from_pole(pole: f64, inertia: f64) -> Result<Self> {
        if !(pole.is_finite() && pole > 0.0) {
            return Err(Error::Config(format!(
                "observer pole must be positive, got {pole}"
            )));
        }
        Ok(Self {
            l1: 2.0 * pole,
            l2: pole * pole * inertia,
        })
    }

    /// Verifies the estimation-error dynamics are stable: the error matrix
    /// `[[-l1, 1/J], [-l2, 0]]` must have negative trace and positive
    /// determinant.
    pub fn check_stable(&self, inertia: f64) -> Result<()> {
        let trace = -self.l1;
        let det = self.l2 / inertia;
        if !(trace < 0.0 && det > 0.0) {
            return Err(Error::Config(format!(
                "observer gains (l1 = {}, l2 = {}) give unstable error dynamics",
                self.l1, self.l2
            )));
        }
        Ok(())
    }
}

/// Current observer estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverState {
    /// Estimated rotor speed (rad/s).
    pub omega_hat: f64,
    /// Estimated aerodynamic torque, rotor side (N*m).
    pub torque_hat: f64,
    /// Filtered wind speed estimate (m/s).
    pub v_hat: f64,
}

/// Wind speed observer with torque-map inversion.
#[derive(Debug, Clone)]
pub struct WindObserver {
    pub state: ObserverState,
    gains: ObserverGains,
    /// Time constant of the wind-estimate low-pass (s).
    tau_v: f64,
    /// Plausibility band for the estimate (m/s).
    v_lo: f64,
    v_hi: f64,
    /// Raised when the last inversion found no sign change; the estimate is
    /// then held at its previous value.
    pub bracket_failed: bool,
}

/// Absolute tolerance of the bisection on wind speed (m/s).
const BISECT_TOL: f64 = 1e-3;
/// Iteration cap of the bisection.
const BISECT_MAX_ITER: usize = 60;

impl WindObserver {
    /// Creates an observer with its speed estimate initialized to the
    /// measured speed and the wind estimate to `v_guess` (clamped into the
    /// plausibility band `[0.5 v_cut_in, 2 v_rated]`).
    pub fn new(
        gains: ObserverGains,
        tau_v: f64,
        params: &TurbineParams,
        omega_r: f64,
        v_guess: f64,
        initial_torque: f64,
    ) -> Result<Self> {
        gains.check_stable(params.inertia)?;
        if !(tau_v.is_finite() && tau_v > 0.0) {
            return Err(Error::Config(format!(
                "wind filter time constant must be positive, got {tau_v}"
            )));
        }
        let v_lo = 0.5 * params.v_cut_in;
        let v_hi = 2.0 * params.v_rated;
        Ok(Self {
            state: ObserverState {
                omega_hat: omega_r,
                torque_hat: initial_torque,
                v_hat: v_guess.clamp(v_lo, v_hi),
            },
            gains,
            tau_v,
            v_lo,
            v_hi,
            bracket_failed: false,
        })
    }

    /// Advances the observer by `dt` using the measured generator speed, the
    /// applied generator torque, and the current pitch angle. Returns the
    /// updated estimates.
    pub fn update(
        &mut self,
        params: &TurbineParams,
        aero: &AeroModel,
        omega_g_meas: f64,
        generator_torque: f64,
        beta: f64,
        dt: f64,
    ) -> Result<ObserverState> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        let omega_meas = omega_g_meas / params.gear_ratio;
        let innovation = omega_meas - self.state.omega_hat;
        // Zero innovation leaves the torque estimate untouched: the extended
        // state is driven purely by the measurement error.
        self.state.omega_hat += dt
            * ((self.state.torque_hat - params.gear_ratio * generator_torque) / params.inertia
                + self.gains.l1 * innovation);
        self.state.torque_hat += dt * self.gains.l2 * innovation;

        let v_raw = self.invert_torque(params, aero, omega_meas, beta)?;
        let alpha = 1.0 - (-dt / self.tau_v).exp();
        self.state.v_hat += alpha * (v_raw - self.state.v_hat);
        self.state.v_hat = self.state.v_hat.clamp(self.v_lo, self.v_hi);
        if !self.state.v_hat.is_finite() {
            return Err(Error::NonFinite("wind speed estimate".into()));
        }
        Ok(self.state)
    }

    /// Solves `T_a(omega, beta, v) = torque_hat` for `v` by bisection inside
    /// the plausibility band, starting from a local bracket around the
    /// previous estimate. Returns the previous estimate (flagging the
    /// failure) when no sign change exists in the band.
    fn invert_torque(
        &mut self,
        params: &TurbineParams,
        aero: &AeroModel,
        omega: f64,
        beta: f64,
    ) -> Result<f64> {
        let target = self.state.torque_hat;
        let residual =
            |v: f64| -> Result<f64> { Ok(aero_torque(omega, beta, v, params, aero)? - target) };
        // Grow a bracket around the previous estimate first; torque is not
        // globally monotone in wind speed, and the root nearest the previous
        // estimate is the physically continuous one.
        let mut half_width = 0.5;
        let (mut lo, mut hi) = loop {
            let lo = (self.state.v_hat - half_width).max(self.v_lo);
            let hi = (self.state.v_hat + half_width).min(self.v_hi);
            let f_lo = residual(lo)?;
            let f_hi = residual(hi)?;
            if f_lo == 0.0 {
                return Ok(lo);
            }
            if f_hi == 0.0 {
                return Ok(hi);
            }
            if f_lo * f_hi < 0.0 {
                break (lo, hi);
            }
            if lo <= self.v_lo && hi >= self.v_hi {
                self.bracket_failed = true;
                return Ok(self.state.v_hat);
            }
            half_width *= 2.0;
        };
        self.bracket_failed = false;
        let mut f_lo = residual(lo)?;
        for _ in 0..BISECT_MAX_ITER {
            if hi - lo <= BISECT_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = residual(mid)?;
            if f_lo * f_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
