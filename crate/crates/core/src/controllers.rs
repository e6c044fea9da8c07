//! The two region control laws and their supporting pieces: reference
//! generation and filtering, the shared tracking integrator, gain-scheduled
//! state feedback for the torque loop (below rated) and the pitch loop
//! (above rated), and the classic quadratic torque law used as a comparison
//! baseline.
//!
//! Both laws share the structure `u = -sum_i h_i k_x_i . dx + sum_i h_i k_I_i x_I`
//! with `dx = (omega_r - omega_ref_f, beta)` and memberships scheduled on the
//! operating envelope corners. The torque law carries a structural zero on
//! the pitch component of `k_x`, so it never reacts to pitch directly.

use nalgebra::Vector2;

use crate::aero::AeroModel;
use crate::error::{Error, Result};
use crate::fuzzy::{MembershipVector, RampPair};
use crate::synthesis::{self, LqrWeights, VertexGain, VertexModel};
use crate::turbine::TurbineParams;

/// Speed setpoint from the wind estimate: tracks the optimal tip speed ratio
/// below rated and holds the rated speed above it.
pub fn compute_omega_ref(v_hat: f64, params: &TurbineParams) -> f64 {
    (params.lambda_opt / params.rotor_radius * v_hat).clamp(0.0, params.rated_rotor_speed)
}

/// Quadratic torque baseline `T_g = kappa * omega_g^2`, saturated to the
/// generator torque range.
pub fn baseline_torque_law(omega_g: f64, params: &TurbineParams) -> f64 {
    (params.kappa() * omega_g * omega_g).clamp(0.0, params.rated_generator_torque)
}

/// Shared tracking state: the filtered speed reference and the integral of
/// the speed error, used by both region laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingState {
    /// Integral of `omega_ref_f - omega_r` [rad].
    pub x_i: f64,
    /// Low-pass-filtered speed reference [rad/s].
    pub omega_ref_f: f64,
}

impl TrackingState {
    pub fn new(omega_ref: f64) -> Self {
        Self {
            x_i: 0.0,
            omega_ref_f: omega_ref,
        }
    }

    /// Advances the first-order reference filter by one step using the exact
    /// zero-order-hold discretization. Time constants below one microsecond
    /// degrade gracefully to pass-through.
    pub fn filter_reference(&mut self, omega_ref: f64, tau_f: f64, dt: f64) {
        let tau = tau_f.max(1e-6);
        let alpha = 1.0 - (-dt / tau).exp();
        self.omega_ref_f += alpha * (omega_ref - self.omega_ref_f);
    }

    /// Integrates the speed error unless frozen, clamping to the anti-windup
    /// bound.
    pub fn integrate(&mut self, error: f64, dt: f64, limit: f64, freeze: bool) {
        if !freeze {
            self.x_i = (self.x_i + error * dt).clamp(-limit, limit);
        }
    }
}

/// Gain-scheduled torque law for below-rated operation. Scheduling premise:
/// `(omega_r, v_hat)`, four vertex gains on the envelope corners in the order
/// `(omega lo/hi) x (wind lo/hi)`.
#[derive(Debug, Clone)]
pub struct PartialLoadController {
    gains: Vec<VertexGain>,
    omega_ramp: RampPair,
    wind_ramp: RampPair,
    torque_max: f64,
}

impl PartialLoadController {
    pub fn new(
        gains: Vec<VertexGain>,
        omega_ramp: RampPair,
        wind_ramp: RampPair,
        torque_max: f64,
    ) -> Result<Self> {
        if gains.len() != 4 {
            return Err(Error::Config(format!(
                "torque-law controller needs 4 vertex gains, got {}",
                gains.len()
            )));
        }
        for (i, g) in gains.iter().enumerate() {
            if !(g.k_x[0].is_finite() && g.k_i.is_finite()) {
                return Err(Error::Config(format!("non-finite gain at vertex {i}")));
            }
            if g.k_x[1] != 0.0 {
                return Err(Error::Config(format!(
                    "torque-law vertex {i} must carry a zero pitch gain, got {}",
                    g.k_x[1]
                )));
            }
        }
        if !(torque_max.is_finite() && torque_max > 0.0) {
            return Err(Error::Config(format!(
                "torque limit must be positive, got {torque_max}"
            )));
        }
        Ok(Self {
            gains,
            omega_ramp,
            wind_ramp,
            torque_max,
        })
    }

    pub fn gains(&self) -> &[VertexGain] {
        &self.gains
    }

    pub fn omega_ramp(&self) -> &RampPair {
        &self.omega_ramp
    }

    pub fn wind_ramp(&self) -> &RampPair {
        &self.wind_ramp
    }

    /// Scheduling memberships at `(omega_r, v_hat)`, clamped to the envelope.
    pub fn memberships(&self, omega_r: f64, v_hat: f64) -> Result<MembershipVector> {
        MembershipVector::from_pair_product(
            self.omega_ramp.weights(omega_r),
            self.wind_ramp.weights(v_hat),
        )
    }

    /// Pre-saturation torque command
    /// `u1 = -sum h_i (k_x_i, 0) . dx + sum h_i k_I_i x_I`.
    pub fn control_raw(
        &self,
        dx: &Vector2<f64>,
        x_i: f64,
        omega_r: f64,
        v_hat: f64,
    ) -> Result<f64> {
        let h = self.memberships(omega_r, v_hat)?;
        let mut u = 0.0;
        for (w, g) in h.as_slice().iter().zip(&self.gains) {
            u += w * (-(g.k_x[0] * dx[0]) + g.k_i * x_i);
        }
        Ok(u)
    }

    /// Torque command saturated to `[0, torque_max]`.
    pub fn control(&self, dx: &Vector2<f64>, x_i: f64, omega_r: f64, v_hat: f64) -> Result<f64> {
        Ok(self
            .control_raw(dx, x_i, omega_r, v_hat)?
            .clamp(0.0, self.torque_max))
    }

    pub fn torque_max(&self) -> f64 {
        self.torque_max
    }
}

/// Gain-scheduled collective-pitch law for above-rated operation. Scheduling
/// premise: `(omega_r, beta, v_hat)`, eight vertex gains on the envelope
/// corners in the order `(omega lo/hi) x (beta lo/hi) x (wind lo/hi)`.
#[derive(Debug, Clone)]
pub struct FullLoadController {
    gains: Vec<VertexGain>,
    omega_ramp: RampPair,
    pitch_ramp: RampPair,
    wind_ramp: RampPair,
    pitch_min: f64,
    pitch_max: f64,
}

impl FullLoadController {
    pub fn new(
        gains: Vec<VertexGain>,
        omega_ramp: RampPair,
        pitch_ramp: RampPair,
        wind_ramp: RampPair,
        pitch_min: f64,
        pitch_max: f64,
    ) -> Result<Self> {
        if gains.len() != 8 {
            return Err(Error::Config(format!(
                "pitch-law controller needs 8 vertex gains, got {}",
                gains.len()
            )));
        }
        for (i, g) in gains.iter().enumerate() {
            if !(g.k_x[0].is_finite() && g.k_x[1].is_finite() && g.k_i.is_finite()) {
                return Err(Error::Config(format!("non-finite gain at vertex {i}")));
            }
        }
        if !(pitch_min.is_finite() && pitch_max.is_finite() && pitch_min < pitch_max) {
            return Err(Error::Config(format!(
                "pitch range must be ordered, got [{pitch_min}, {pitch_max}]"
            )));
        }
        Ok(Self {
            gains,
            omega_ramp,
            pitch_ramp,
            wind_ramp,
            pitch_min,
            pitch_max,
        })
    }

    pub fn gains(&self) -> &[VertexGain] {
        &self.gains
    }

    pub fn omega_ramp(&self) -> &RampPair {
        &self.omega_ramp
    }

    pub fn pitch_ramp(&self) -> &RampPair {
        &self.pitch_ramp
    }

    pub fn wind_ramp(&self) -> &RampPair {
        &self.wind_ramp
    }

    /// Scheduling memberships at `(omega_r, beta, v_hat)`.
    pub fn memberships(&self, omega_r: f64, beta: f64, v_hat: f64) -> Result<MembershipVector> {
        let wide = MembershipVector::from_pair_product(
            self.omega_ramp.weights(omega_r),
            self.pitch_ramp.weights(beta),
        )?;
        let wv = self.wind_ramp.weights(v_hat);
        wide.product(&MembershipVector::new(vec![wv.0, wv.1])?)
    }

    /// Pre-saturation pitch command
    /// `u2 = -sum h_j k_x_j . dx + sum h_j k_I_j x_I`.
    pub fn control_raw(
        &self,
        dx: &Vector2<f64>,
        x_i: f64,
        omega_r: f64,
        beta: f64,
        v_hat: f64,
    ) -> Result<f64> {
        let h = self.memberships(omega_r, beta, v_hat)?;
        let mut u = 0.0;
        for (w, g) in h.as_slice().iter().zip(&self.gains) {
            u += w * (-(g.k_x[0] * dx[0] + g.k_x[1] * dx[1]) + g.k_i * x_i);
        }
        Ok(u)
    }

    /// Pitch reference saturated to the actuator range.
    pub fn control(
        &self,
        dx: &Vector2<f64>,
        x_i: f64,
        omega_r: f64,
        beta: f64,
        v_hat: f64,
    ) -> Result<f64> {
        Ok(self
            .control_raw(dx, x_i, omega_r, beta, v_hat)?
            .clamp(self.pitch_min, self.pitch_max))
    }

    pub fn pitch_range(&self) -> (f64, f64) {
        (self.pitch_min, self.pitch_max)
    }
}

/// Scheduling envelope and LQR weights for the default gain designs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConfig {
    /// Weights for the torque loop: `(q_omega, q_beta, q_integral)`, `r`.
    pub partial_weights: ([f64; 3], f64),
    /// Weights for the pitch loop.
    pub full_weights: ([f64; 3], f64),
    /// Half-width of the speed envelope around rated for the pitch loop,
    /// as a fraction of rated speed.
    pub full_omega_halfwidth: f64,
    /// Upper corner of the pitch scheduling envelope [rad].
    pub full_beta_max: f64,
    /// Upper corner of the wind scheduling envelope for the pitch loop [m/s].
    pub full_wind_max: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            partial_weights: ([4.0, 0.0, 0.19], 6.04e-10),
            full_weights: ([100.0, 5.0, 0.4], 40.0),
            full_omega_halfwidth: 0.1,
            full_beta_max: 0.30,
            full_wind_max: 25.0,
        }
    }
}

/// Designs the four torque-loop vertex gains on the below-rated envelope
/// corners. The design model drops the pitch coupling (the loop operates at
/// zero pitch and carries a structural zero on that channel), which makes
/// the synthesized pitch gain exactly zero.
pub fn design_partial_load(
    params: &TurbineParams,
    aero: &AeroModel,
    cfg: &DesignConfig,
) -> Result<PartialLoadController> {
    let omega_lo = params.lambda_opt * params.v_cut_in / params.rotor_radius;
    let omega_ramp = RampPair::new(omega_lo, params.rated_rotor_speed)?;
    let wind_ramp = RampPair::new(params.v_cut_in, params.v_rated)?;
    let (q, r) = cfg.partial_weights;
    let weights = LqrWeights::diagonal(q, r)?;

    let mut models = Vec::with_capacity(4);
    for &omega in &[omega_ramp.lo(), omega_ramp.hi()] {
        for &v in &[wind_ramp.lo(), wind_ramp.hi()] {
            let lin = synthesis::linearize_at(omega, 0.0, v, params, aero)?;
            let a =
                nalgebra::Matrix2::new(lin.a[(0, 0)], 0.0, 0.0, -1.0 / params.pitch_time_constant);
            models.push(VertexModel { a, b: lin.b_torque });
        }
    }
    let mut gains = synthesis::synthesize_gains(&models, &weights)?;
    for (i, g) in gains.iter_mut().enumerate() {
        if g.k_x[1].abs() > 1e-12 {
            return Err(Error::Synthesis {
                vertex: i,
                reason: format!(
                    "decoupled torque design produced a pitch gain of {}",
                    g.k_x[1]
                ),
            });
        }
        g.k_x[1] = 0.0;
    }
    PartialLoadController::new(gains, omega_ramp, wind_ramp, params.rated_generator_torque)
}

/// Designs the eight pitch-loop vertex gains on the above-rated envelope
/// corners.
pub fn design_full_load(
    params: &TurbineParams,
    aero: &AeroModel,
    cfg: &DesignConfig,
) -> Result<FullLoadController> {
    if !(cfg.full_omega_halfwidth > 0.0 && cfg.full_omega_halfwidth < 1.0) {
        return Err(Error::Config(format!(
            "speed envelope half-width must be in (0, 1), got {}",
            cfg.full_omega_halfwidth
        )));
    }
    let omega_ramp = RampPair::new(
        (1.0 - cfg.full_omega_halfwidth) * params.rated_rotor_speed,
        (1.0 + cfg.full_omega_halfwidth) * params.rated_rotor_speed,
    )?;
    let beta_hi = cfg.full_beta_max.min(params.pitch_max);
    let pitch_ramp = RampPair::new(params.pitch_min, beta_hi)?;
    let wind_ramp = RampPair::new(params.v_rated, cfg.full_wind_max)?;
    let (q, r) = cfg.full_weights;
    let weights = LqrWeights::diagonal(q, r)?;

    let mut models = Vec::with_capacity(8);
    for &omega in &[omega_ramp.lo(), omega_ramp.hi()] {
        for &beta in &[pitch_ramp.lo(), pitch_ramp.hi()] {
            for &v in &[wind_ramp.lo(), wind_ramp.hi()] {
                let lin = synthesis::linearize_at(omega, beta, v, params, aero)?;
                // A corner where the power surface has flattened (fully
                // feathered) leaves the speed state unreachable from pitch;
                // surface it as a design error instead of a cryptic Riccati
                // failure.
                if lin.a[(0, 1)].abs() < 1e-4 {
                    return Err(Error::Synthesis {
                        vertex: models.len(),
                        reason: format!(
                            "pitch authority vanished at corner (omega {omega:.3}, beta {beta:.3}, \
                             v {v:.1}); shrink the pitch or wind scheduling envelope"
                        ),
                    });
                }
                models.push(VertexModel {
                    a: lin.a,
                    b: lin.b_pitch,
                });
            }
        }
    }
    let gains = synthesis::synthesize_gains(&models, &weights)?;
    FullLoadController::new(
        gains,
        omega_ramp,
        pitch_ramp,
        wind_ramp,
        params.pitch_min,
        params.pitch_max,
    )
}

/// Designs both region controllers with the default envelope and weights.
pub fn design_default_controllers(
    params: &TurbineParams,
    aero: &AeroModel,
    cfg: &DesignConfig,
) -> Result<(PartialLoadController, FullLoadController)> {
    Ok((
        design_partial_load(params, aero, cfg)?,
        design_full_load(params, aero, cfg)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> TurbineParams {
        TurbineParams::default()
    }

    fn single_vertex_partial(k1: f64, k_i: f64) -> PartialLoadController {
        // Four identical vertices reduce to a single law for any memberships.
        let g = VertexGain {
            k_x: Vector2::new(k1, 0.0),
            k_i,
        };
        PartialLoadController::new(
            vec![g; 4],
            RampPair::new(0.4, 1.267).unwrap(),
            RampPair::new(3.0, 11.4).unwrap(),
            1.0e9,
        )
        .unwrap()
    }

    #[test]
    fn speed_reference_tracks_and_saturates() {
        let p = params();
        // lambda_opt * v / R with round numbers.
        let mut q = p.clone();
        q.lambda_opt = 7.0;
        q.rotor_radius = 63.0;
        assert_relative_eq!(compute_omega_ref(9.0, &q), 1.0);
        assert_eq!(compute_omega_ref(30.0, &q), q.rated_rotor_speed);
        assert!(compute_omega_ref(1e-9, &q) < 1e-9);
    }

    #[test]
    fn reference_filter_unity_dc_gain_and_time_constant() {
        let mut s = TrackingState::new(0.0);
        let tau = 2.0;
        let dt = 0.01;
        let mut reached_at = None;
        for k in 1..=2000 {
            s.filter_reference(1.0, tau, dt);
            if reached_at.is_none() && s.omega_ref_f >= 1.0 - (-1.0_f64).exp() {
                reached_at = Some(k as f64 * dt);
            }
        }
        // 63.2% of the step at t = tau, within one step.
        let t63 = reached_at.unwrap();
        assert!((t63 - tau).abs() <= dt + 1e-12, "t63 = {t63}");
        assert_relative_eq!(s.omega_ref_f, 1.0, max_relative = 1e-4);
    }

    #[test]
    fn reference_filter_degenerates_to_pass_through() {
        let mut s = TrackingState::new(0.0);
        s.filter_reference(5.0, 0.0, 0.01);
        assert_relative_eq!(s.omega_ref_f, 5.0, max_relative = 1e-3);
    }

    #[test]
    fn integrator_clamps_and_freezes() {
        let mut s = TrackingState::new(0.0);
        s.integrate(1.0, 0.5, 0.3, false);
        assert_relative_eq!(s.x_i, 0.3);
        s.integrate(1.0, 0.5, 0.3, true);
        assert_relative_eq!(s.x_i, 0.3);
        s.integrate(-10.0, 0.5, 0.3, false);
        assert_relative_eq!(s.x_i, -0.3);
    }

    #[test]
    fn torque_law_single_vertex_arithmetic() {
        // k_x = (2, 0), k_I = 3, dx = (0.1, 0.7), x_I = 0.2
        // -> -0.2 + 0.6 = 0.4; the pitch component is provably ignored.
        let c = single_vertex_partial(2.0, 3.0);
        let u = c.control(&Vector2::new(0.1, 0.7), 0.2, 0.8, 7.0).unwrap();
        assert_relative_eq!(u, 0.4, max_relative = 1e-12);
        let u2 = c
            .control(&Vector2::new(0.1, -123.0), 0.2, 0.8, 7.0)
            .unwrap();
        assert_eq!(u, u2);
    }

    #[test]
    fn torque_law_zero_state_zero_output() {
        let c = single_vertex_partial(2.0, 3.0);
        let u = c.control(&Vector2::zeros(), 0.0, 0.8, 7.0).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn torque_law_saturates_to_its_range() {
        let g = VertexGain {
            k_x: Vector2::new(1.0, 0.0),
            k_i: 0.0,
        };
        let c = PartialLoadController::new(
            vec![g; 4],
            RampPair::new(0.4, 1.267).unwrap(),
            RampPair::new(3.0, 11.4).unwrap(),
            10.0,
        )
        .unwrap();
        let hi = c
            .control(&Vector2::new(-100.0, 0.0), 0.0, 0.8, 7.0)
            .unwrap();
        assert_eq!(hi, 10.0);
        let lo = c.control(&Vector2::new(100.0, 0.0), 0.0, 0.8, 7.0).unwrap();
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn pitch_law_single_vertex_arithmetic_with_saturation() {
        // k_x = (1, 0.5), k_I = 2, dx = (0.2, 0.1), x_I = 0.05
        // -> -0.25 + 0.1 = -0.15, saturated to 0 on a [0, max] range.
        let g = VertexGain {
            k_x: Vector2::new(1.0, 0.5),
            k_i: 2.0,
        };
        let c = FullLoadController::new(
            vec![g; 8],
            RampPair::new(1.14, 1.39).unwrap(),
            RampPair::new(0.0, 0.44).unwrap(),
            RampPair::new(11.4, 25.0).unwrap(),
            0.0,
            1.57,
        )
        .unwrap();
        let raw = c
            .control_raw(&Vector2::new(0.2, 0.1), 0.05, 1.2, 0.1, 14.0)
            .unwrap();
        assert_relative_eq!(raw, -0.15, max_relative = 1e-12);
        let sat = c
            .control(&Vector2::new(0.2, 0.1), 0.05, 1.2, 0.1, 14.0)
            .unwrap();
        assert_eq!(sat, 0.0);
    }

    #[test]
    fn degenerate_memberships_pick_a_pure_vertex() {
        let mut gains = vec![
            VertexGain {
                k_x: Vector2::new(1.0, 1.0),
                k_i: 1.0,
            };
            8
        ];
        gains[7] = VertexGain {
            k_x: Vector2::new(-3.0, 0.25),
            k_i: 0.5,
        };
        let c = FullLoadController::new(
            gains,
            RampPair::new(1.14, 1.39).unwrap(),
            RampPair::new(0.0, 0.44).unwrap(),
            RampPair::new(11.4, 25.0).unwrap(),
            -10.0,
            10.0,
        )
        .unwrap();
        // All premises at their high corners: membership mass on vertex 7.
        let h = c.memberships(2.0, 1.0, 30.0).unwrap();
        assert_eq!(h[7], 1.0);
        let u = c
            .control(&Vector2::new(0.1, 0.2), 0.3, 2.0, 1.0, 30.0)
            .unwrap();
        assert_relative_eq!(
            u,
            -(-3.0 * 0.1 + 0.25 * 0.2) + 0.5 * 0.3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn laws_are_homogeneous_before_saturation() {
        let p = params();
        let aero = AeroModel::empirical(p.lambda_opt, p.cp_max).unwrap();
        let (cb, cc) = design_default_controllers(&p, &aero, &DesignConfig::default()).unwrap();
        let dx = Vector2::new(0.03, 0.05);
        let x_i = 0.2;
        for alpha in [0.5, 2.0, -3.0] {
            let u1 = cb.control_raw(&dx, x_i, 1.0, 8.0).unwrap();
            let u1s = cb
                .control_raw(&(alpha * dx), alpha * x_i, 1.0, 8.0)
                .unwrap();
            assert_relative_eq!(u1s, alpha * u1, max_relative = 1e-9);
            let u2 = cc.control_raw(&dx, x_i, 1.25, 0.1, 14.0).unwrap();
            let u2s = cc
                .control_raw(&(alpha * dx), alpha * x_i, 1.25, 0.1, 14.0)
                .unwrap();
            assert_relative_eq!(u2s, alpha * u2, max_relative = 1e-9);
        }
    }

    #[test]
    fn default_designs_are_stable_and_structured() {
        let p = params();
        let aero = AeroModel::empirical(p.lambda_opt, p.cp_max).unwrap();
        let (cb, cc) = design_default_controllers(&p, &aero, &DesignConfig::default()).unwrap();
        assert_eq!(cb.gains().len(), 4);
        assert_eq!(cc.gains().len(), 8);
        for g in cb.gains() {
            assert_eq!(g.k_x[1], 0.0);
            assert!(g.k_x[0].is_finite() && g.k_i.is_finite());
        }
        // Memberships at arbitrary admissible points are valid by
        // construction (constructors validate); spot-check partition sums.
        let hb = cb.memberships(0.9, 7.3).unwrap();
        assert_relative_eq!(hb.as_slice().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        let hc = cc.memberships(1.3, 0.2, 17.0).unwrap();
        assert_relative_eq!(hc.as_slice().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cheaper_control_means_smaller_gains() {
        // Doubling R shrinks the gain norm on a fixed vertex model.
        let model = VertexModel {
            a: nalgebra::Matrix2::new(-0.12, -0.45, 0.0, -1.0 / 0.3),
            b: Vector2::new(0.0, 1.0 / 0.3),
        };
        let w1 = LqrWeights::diagonal([100.0, 1.0, 0.05], 40.0).unwrap();
        let w2 = LqrWeights::diagonal([100.0, 1.0, 0.05], 80.0).unwrap();
        let g1 = synthesis::synthesize_vertex(&model, &w1, 0).unwrap();
        let g2 = synthesis::synthesize_vertex(&model, &w2, 0).unwrap();
        let n1 = (g1.k_x.norm_squared() + g1.k_i * g1.k_i).sqrt();
        let n2 = (g2.k_x.norm_squared() + g2.k_i * g2.k_i).sqrt();
        assert!(n2 < n1, "{n2} !< {n1}");
    }

    #[test]
    fn baseline_torque_is_quadratic_then_flat() {
        let p = params();
        assert_eq!(baseline_torque_law(0.0, &p), 0.0);
        let t1 = baseline_torque_law(40.0, &p);
        let t2 = baseline_torque_law(80.0, &p);
        assert_relative_eq!(t2, 4.0 * t1, max_relative = 1e-12);
        let sat = baseline_torque_law(1e4, &p);
        assert_eq!(sat, p.rated_generator_torque);
    }

    #[test]
    fn rejects_malformed_gain_sets() {
        let g = VertexGain {
            k_x: Vector2::new(1.0, 0.0),
            k_i: 1.0,
        };
        let bad_count = PartialLoadController::new(
            vec![g; 3],
            RampPair::new(0.4, 1.267).unwrap(),
            RampPair::new(3.0, 11.4).unwrap(),
            1.0,
        );
        assert!(bad_count.is_err());
        let bad_pitch = PartialLoadController::new(
            vec![
                VertexGain {
                    k_x: Vector2::new(1.0, 0.5),
                    k_i: 1.0,
                };
                4
            ],
            RampPair::new(0.4, 1.267).unwrap(),
            RampPair::new(3.0, 11.4).unwrap(),
            1.0,
        );
        assert!(bad_pitch.is_err());
    }
}
