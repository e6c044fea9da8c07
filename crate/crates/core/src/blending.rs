//! The coupling filter that merges the two region laws into one dual-output
//! controller, plus the reference triple-sum evaluation and a hard-switch
//! baseline.
//!
//! The filter is a diagonal gain `F = diag(f1, f2)` acting on
//! `(beta_ref, T_g)`: `f1` ramps 0 -> 1 as rotor speed approaches rated,
//! gating the pitch command in; `f2` ramps 1 -> T_max/T_min as the torque
//! command approaches rated, pushing the delivered torque onto the rated
//! ceiling. Each factor is an exact convex blend of its sector bounds, so
//! `F` itself is a convex blend of four constant vertex matrices with
//! product memberships — which is what makes the combined law a single
//! fuzzy system rather than a supervisory switch.

use nalgebra::{Matrix2, Vector2};

use crate::controllers::{FullLoadController, PartialLoadController};
use crate::error::{Error, Result};
use crate::fuzzy::{self, MembershipVector, RampPair, RampShape, SectorBounds};
use crate::turbine::TurbineParams;

/// How the torque-channel premise of the filter is driven.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorquePremise {
    /// Instantaneous saturated torque command of the current step. Turns the
    /// filter into a static continuous map of the command, so per-step output
    /// increments shrink with dt.
    Command,
    /// Previous-step blended torque. Breaks the algebraic loop by a one-step
    /// delay; inside the ramp band the delayed feedback has loop gain
    /// `(f2_max - 1) * T_g / (eps_Tg * T_rated) >> 1`, so the blended torque
    /// snaps across the band in a few steps regardless of dt.
    PreviousBlended,
    /// Previous-step blended torque through a first-order low-pass with the
    /// given time constant [s].
    Filtered { tau: f64 },
}

/// How the torque-channel weights are computed from the premise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorqueWeightMode {
    /// Ramp weights on the premise torque over the blending band.
    Ramp,
    /// Exact sector weights on `f2 = T_max / T_g`, defined on
    /// `[T_min, T_max]`; reconstructs `f2 * T_g = T_max` identically.
    ExactSector,
}

/// Diagonal coupling filter with its exact four-vertex decomposition.
#[derive(Debug, Clone)]
pub struct CouplingFilter {
    ramp_omega: RampPair,
    ramp_torque: RampPair,
    sector_pitch: SectorBounds,
    sector_torque: SectorBounds,
    shape: RampShape,
    weight_mode: TorqueWeightMode,
    torque_rated: f64,
    torque_min: f64,
}

impl CouplingFilter {
    /// Builds the filter from the overlap fractions: the pitch gate ramps
    /// over `[(1 - eps_omega) * omega_rated, omega_rated]` and the torque
    /// weights ramp over `[(1 - eps_tg) * T_rated, T_rated]`.
    pub fn new(params: &TurbineParams, eps_omega: f64, eps_tg: f64) -> Result<Self> {
        Self::with_options(
            params,
            eps_omega,
            eps_tg,
            RampShape::Linear,
            TorqueWeightMode::Ramp,
        )
    }

    pub fn with_options(
        params: &TurbineParams,
        eps_omega: f64,
        eps_tg: f64,
        shape: RampShape,
        weight_mode: TorqueWeightMode,
    ) -> Result<Self> {
        for (name, eps) in [("eps_omega", eps_omega), ("eps_tg", eps_tg)] {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(Error::Config(format!(
                    "{name} must lie in (0, 0.5], got {eps}"
                )));
            }
        }
        let t_rated = params.rated_generator_torque;
        let t_min = params.min_generator_torque;
        if !(t_min > 0.0 && t_min < t_rated) {
            return Err(Error::Config(format!(
                "minimum generator torque must lie in (0, rated), got {t_min}"
            )));
        }
        let omega_rated = params.rated_rotor_speed;
        Ok(Self {
            ramp_omega: RampPair::new((1.0 - eps_omega) * omega_rated, omega_rated)?,
            ramp_torque: RampPair::new((1.0 - eps_tg) * t_rated, t_rated)?,
            sector_pitch: SectorBounds::new(0.0, 1.0)?,
            sector_torque: SectorBounds::new(1.0, t_rated / t_min)?,
            shape,
            weight_mode,
            torque_rated: t_rated,
            torque_min: t_min,
        })
    }

    pub fn ramp_omega(&self) -> &RampPair {
        &self.ramp_omega
    }

    pub fn ramp_torque(&self) -> &RampPair {
        &self.ramp_torque
    }

    pub fn sector_pitch(&self) -> &SectorBounds {
        &self.sector_pitch
    }

    pub fn sector_torque(&self) -> &SectorBounds {
        &self.sector_torque
    }

    pub fn torque_rated(&self) -> f64 {
        self.torque_rated
    }

    pub fn torque_min(&self) -> f64 {
        self.torque_min
    }

    /// The four constant vertex matrices
    /// `F_m = diag(bound1, bound2)` in membership order
    /// `(lo, lo), (lo, hi), (hi, lo), (hi, hi)`.
    pub fn vertices(&self) -> [Matrix2<f64>; 4] {
        let (f1_lo, f1_hi) = (self.sector_pitch.lower(), self.sector_pitch.upper());
        let (f2_lo, f2_hi) = (self.sector_torque.lower(), self.sector_torque.upper());
        [
            Matrix2::from_diagonal(&Vector2::new(f1_lo, f2_lo)),
            Matrix2::from_diagonal(&Vector2::new(f1_lo, f2_hi)),
            Matrix2::from_diagonal(&Vector2::new(f1_hi, f2_lo)),
            Matrix2::from_diagonal(&Vector2::new(f1_hi, f2_hi)),
        ]
    }

    /// Weight pair on the rotor-speed premise.
    pub fn omega_weights(&self, omega_r: f64) -> (f64, f64) {
        self.ramp_omega.weights_shaped(omega_r, self.shape)
    }

    /// Weight pair on the torque premise.
    pub fn torque_weights(&self, torque: f64) -> Result<(f64, f64)> {
        match self.weight_mode {
            TorqueWeightMode::Ramp => Ok(self.ramp_torque.weights_shaped(torque, self.shape)),
            TorqueWeightMode::ExactSector => {
                let t = torque.clamp(self.torque_min, self.torque_rated);
                let f2 = self.torque_rated / t;
                let (w_hi_bound, w_lo_bound) =
                    fuzzy::exact_sector_weights(f2, &self.sector_torque)?;
                // exact_sector_weights returns (weight on lower bound,
                // weight on upper bound) of the f2 sector; our membership
                // order is (pass-through first).
                Ok((w_hi_bound, w_lo_bound))
            }
        }
    }

    /// Product memberships `h_m` over the four vertices.
    pub fn memberships(&self, omega_r: f64, torque: f64) -> Result<MembershipVector> {
        let w_omega = self.omega_weights(omega_r);
        let w_torque = self.torque_weights(torque)?;
        MembershipVector::from_pair_product(w_omega, w_torque)
    }

    /// Pitch gate `f1(omega_r)` as the convex blend of its sector bounds.
    pub fn f1(&self, omega_r: f64) -> f64 {
        let (w1, w2) = self.omega_weights(omega_r);
        w1 * self.sector_pitch.lower() + w2 * self.sector_pitch.upper()
    }

    /// Torque gain `f2(premise)` as the convex blend of its sector bounds.
    pub fn f2(&self, torque: f64) -> Result<f64> {
        let (w1, w2) = self.torque_weights(torque)?;
        Ok(w1 * self.sector_torque.lower() + w2 * self.sector_torque.upper())
    }

    /// The filter matrix `sum_m h_m F_m = diag(f1, f2)`.
    pub fn filter_matrix(&self, omega_r: f64, torque: f64) -> Result<Matrix2<f64>> {
        Ok(Matrix2::from_diagonal(&Vector2::new(
            self.f1(omega_r),
            self.f2(torque)?,
        )))
    }

    /// Applies the filter to the raw commands:
    /// `beta_tilde = f1 * beta_ref`, `T_tilde = clamp(f2 * T_g, 0, T_rated)`.
    /// The premise torque may differ from the filtered torque (delayed or
    /// filtered premise realizations).
    pub fn apply_with_premise(
        &self,
        beta_ref: f64,
        torque: f64,
        omega_r: f64,
        premise_torque: f64,
    ) -> Result<(f64, f64)> {
        if torque < 0.0 {
            return Err(Error::Domain(format!(
                "torque command must be nonnegative, got {torque}"
            )));
        }
        let f = self.filter_matrix(omega_r, premise_torque)?;
        let beta_tilde = f[(0, 0)] * beta_ref;
        let torque_tilde = (f[(1, 1)] * torque).clamp(0.0, self.torque_rated);
        Ok((beta_tilde, torque_tilde))
    }

    /// Applies the filter with the premise driven by the torque command
    /// itself.
    pub fn apply(&self, beta_ref: f64, torque: f64, omega_r: f64) -> Result<(f64, f64)> {
        self.apply_with_premise(beta_ref, torque, omega_r, torque)
    }
}

/// Controller selection for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// Coupling-filter blend of both region laws.
    Blended,
    /// Hard switch on rated speed, no hysteresis.
    HardSwitch,
    /// Quadratic torque law with hard-switched pitch above rated.
    BaselineKappa,
}

/// Per-step diagnostic record of the blending layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendDiagnostics {
    pub memberships: [f64; 4],
    pub f1: f64,
    pub f2: f64,
}

/// The combined dual-output controller: both region laws plus the coupling
/// filter and the premise realization.
#[derive(Debug, Clone)]
pub struct MultiRegionController {
    pub partial: PartialLoadController,
    pub full: FullLoadController,
    pub filter: CouplingFilter,
    pub premise: TorquePremise,
}

/// Output of one controller evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub torque_tilde: f64,
    pub beta_ref_tilde: f64,
    /// Saturated torque-law command before the filter.
    pub torque_raw: f64,
    /// Saturated pitch-law command before the filter.
    pub beta_raw: f64,
    /// Premise torque the filter was evaluated at.
    pub premise_torque: f64,
    pub diagnostics: BlendDiagnostics,
}

impl MultiRegionController {
    /// Evaluates both region laws and blends them through the coupling
    /// filter. `premise_state` carries the previous blended torque (and the
    /// filtered premise state when configured).
    pub fn control(
        &self,
        dx: &Vector2<f64>,
        x_i: f64,
        omega_r: f64,
        beta: f64,
        v_hat: f64,
        premise_state: f64,
    ) -> Result<ControlOutput> {
        let u1 = self.partial.control(dx, x_i, omega_r, v_hat)?;
        let u2 = self.full.control(dx, x_i, omega_r, beta, v_hat)?;
        let premise_torque = match self.premise {
            TorquePremise::Command => u1,
            TorquePremise::PreviousBlended | TorquePremise::Filtered { .. } => premise_state,
        };
        let (beta_tilde, torque_tilde) =
            self.filter
                .apply_with_premise(u2, u1, omega_r, premise_torque)?;
        let h = self.filter.memberships(omega_r, premise_torque)?;
        Ok(ControlOutput {
            torque_tilde,
            beta_ref_tilde: beta_tilde,
            torque_raw: u1,
            beta_raw: u2,
            premise_torque,
            diagnostics: BlendDiagnostics {
                memberships: [h[0], h[1], h[2], h[3]],
                f1: self.filter.f1(omega_r),
                f2: self.filter.f2(premise_torque)?,
            },
        })
    }

    /// Reference evaluation of the same law as the explicit triple sum
    /// `sum_m sum_i sum_j h^a_m h^b_i h^c_j F_m (u2_ij-contribution, u1_ij-contribution)`
    /// over filter vertices and both gain sets, applied to the saturated
    /// region commands. Must agree with [`Self::control`] before the final
    /// torque clamp; the torque channel is identical after clamping too
    /// because `f2 >= 1` keeps the channel nonnegative.
    pub fn control_triple_sum(
        &self,
        dx: &Vector2<f64>,
        x_i: f64,
        omega_r: f64,
        beta: f64,
        v_hat: f64,
        premise_state: f64,
    ) -> Result<ControlOutput> {
        let u1 = self.partial.control(dx, x_i, omega_r, v_hat)?;
        let u2 = self.full.control(dx, x_i, omega_r, beta, v_hat)?;
        let premise_torque = match self.premise {
            TorquePremise::Command => u1,
            TorquePremise::PreviousBlended | TorquePremise::Filtered { .. } => premise_state,
        };
        let h_a = self.filter.memberships(omega_r, premise_torque)?;
        let h_b = self.partial.memberships(omega_r, v_hat)?;
        let h_c = self.full.memberships(omega_r, beta, v_hat)?;
        let vertices = self.filter.vertices();

        // The triple sum runs over every (filter vertex, torque vertex,
        // pitch vertex) combination. Because each F_m is constant across
        // (i, j) and the region memberships are convex partitions, the inner
        // sums telescope and the whole expression factors into
        // F(omega, premise) * (u2, u1) — that collapse is the identity this
        // routine exists to check numerically. Saturation does not distribute
        // over the vertex sums, so the law is defined on the saturated
        // region commands and the sum carries them as the blended operand.
        let cmd = Vector2::new(u2, u1);
        let mut out = Vector2::zeros();
        for (m, f_m) in vertices.iter().enumerate() {
            for i in 0..h_b.len() {
                for j in 0..h_c.len() {
                    out += h_a[m] * h_b[i] * h_c[j] * (f_m * cmd);
                }
            }
        }
        let beta_tilde = out[0];
        let torque_tilde = out[1].clamp(0.0, self.filter.torque_rated());
        Ok(ControlOutput {
            torque_tilde,
            beta_ref_tilde: beta_tilde,
            torque_raw: u1,
            beta_raw: u2,
            premise_torque,
            diagnostics: BlendDiagnostics {
                memberships: [h_a[0], h_a[1], h_a[2], h_a[3]],
                f1: self.filter.f1(omega_r),
                f2: self.filter.f2(premise_torque)?,
            },
        })
    }
}

/// Hard-switch comparison law: below rated speed the torque law acts alone at
/// zero pitch; at or above rated the torque rails at rated and the pitch law
/// acts. No hysteresis.
#[allow(clippy::too_many_arguments)]
pub fn hard_switch_control(
    partial: &PartialLoadController,
    full: &FullLoadController,
    dx: &Vector2<f64>,
    x_i: f64,
    omega_r: f64,
    beta: f64,
    v_hat: f64,
    params: &TurbineParams,
) -> Result<(f64, f64)> {
    if omega_r < params.rated_rotor_speed {
        Ok((partial.control(dx, x_i, omega_r, v_hat)?, 0.0))
    } else {
        Ok((
            params.rated_generator_torque,
            full.control(dx, x_i, omega_r, beta, v_hat)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aero::AeroModel;
    use crate::controllers::{design_default_controllers, DesignConfig};
    use crate::synthesis::VertexGain;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params() -> TurbineParams {
        TurbineParams::default()
    }

    fn filter() -> CouplingFilter {
        CouplingFilter::new(&params(), 0.12, 0.18).unwrap()
    }

    fn controller(premise: TorquePremise) -> MultiRegionController {
        let p = params();
        let aero = AeroModel::empirical(p.lambda_opt, p.cp_max).unwrap();
        let (partial, full) =
            design_default_controllers(&p, &aero, &DesignConfig::default()).unwrap();
        MultiRegionController {
            partial,
            full,
            filter: filter(),
            premise,
        }
    }

    #[test]
    fn deep_partial_load_is_identity_on_torque_and_gates_pitch() {
        let f = filter();
        let p = params();
        let m = f
            .filter_matrix(0.5 * p.rated_rotor_speed, 0.3 * p.rated_generator_torque)
            .unwrap();
        assert_eq!(m[(0, 0)], 0.0);
        assert_eq!(m[(1, 1)], 1.0);
        let (bt, tt) = f
            .apply(
                0.3,
                0.3 * p.rated_generator_torque,
                0.5 * p.rated_rotor_speed,
            )
            .unwrap();
        assert_eq!(bt, 0.0);
        assert_relative_eq!(tt, 0.3 * p.rated_generator_torque);
    }

    #[test]
    fn both_premises_high_put_mass_on_the_last_vertex() {
        let f = filter();
        let p = params();
        let h = f
            .memberships(1.1 * p.rated_rotor_speed, 1.1 * p.rated_generator_torque)
            .unwrap();
        assert_eq!(h[3], 1.0);
        assert_eq!(h[0] + h[1] + h[2], 0.0);
    }

    #[test]
    fn memberships_are_convex_everywhere() {
        let f = filter();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5000 {
            let omega = rng.gen_range(0.0..3.0);
            let torque = rng.gen_range(0.0..80_000.0);
            let h = f.memberships(omega, torque).unwrap();
            let sum: f64 = h.as_slice().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(h.as_slice().iter().all(|w| *w >= 0.0));
        }
    }

    #[test]
    fn filter_matrix_equals_vertex_blend() {
        let f = filter();
        let vertices: Vec<nalgebra::DMatrix<f64>> = f
            .vertices()
            .iter()
            .map(|m| nalgebra::DMatrix::from_fn(2, 2, |i, j| m[(i, j)]))
            .collect();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..2000 {
            let omega = rng.gen_range(0.8..1.6);
            let torque = rng.gen_range(0.0..60_000.0);
            let h = f.memberships(omega, torque).unwrap();
            let blended = fuzzy::convex_combine(&h, &vertices).unwrap();
            let direct = f.filter_matrix(omega, torque).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((blended[(i, j)] - direct[(i, j)]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn exact_sector_weights_pin_torque_to_rated() {
        let p = params();
        let f = CouplingFilter::with_options(
            &p,
            0.12,
            0.18,
            RampShape::Linear,
            TorqueWeightMode::ExactSector,
        )
        .unwrap();
        for k in 0..1000 {
            let t = p.min_generator_torque
                + (p.rated_generator_torque - p.min_generator_torque) * (k as f64) / 999.0;
            let f2 = f.f2(t).unwrap();
            assert_relative_eq!(f2 * t, p.rated_generator_torque, max_relative = 1e-9);
        }
    }

    #[test]
    fn pitch_gate_saturates_at_the_band_edges() {
        let f = filter();
        let p = params();
        assert_eq!(f.f1((1.0 - 0.12) * p.rated_rotor_speed), 0.0);
        assert_eq!(f.f1(0.5 * p.rated_rotor_speed), 0.0);
        assert_eq!(f.f1(p.rated_rotor_speed), 1.0);
        assert_eq!(f.f1(1.3 * p.rated_rotor_speed), 1.0);
        let mid = f.f1((1.0 - 0.06) * p.rated_rotor_speed);
        assert_relative_eq!(mid, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn blended_torque_stays_between_command_and_rated() {
        let f = filter();
        let p = params();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..2000 {
            let torque = rng.gen_range(0.0..p.rated_generator_torque);
            let omega = rng.gen_range(0.5..1.5);
            let (_, tt) = f.apply(0.1, torque, omega).unwrap();
            assert!(tt >= torque - 1e-9, "{tt} < {torque}");
            assert!(tt <= p.rated_generator_torque + 1e-9);
        }
    }

    #[test]
    fn blended_torque_nondecreasing_in_fullload_membership() {
        // Walking the premise up the band can only increase f2 and therefore
        // the delivered torque, for a fixed command.
        let f = filter();
        let p = params();
        let cmd = 0.9 * p.rated_generator_torque;
        let mut last = 0.0;
        for k in 0..=100 {
            let premise = (0.75 + 0.30 * k as f64 / 100.0) * p.rated_generator_torque;
            let (_, tt) = f.apply_with_premise(0.0, cmd, 1.0, premise).unwrap();
            assert!(tt >= last - 1e-12);
            last = tt;
        }
        assert_relative_eq!(last, p.rated_generator_torque);
    }

    #[test]
    fn rejects_negative_torque_commands() {
        let f = filter();
        assert!(f.apply(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_out_of_range_overlaps() {
        let p = params();
        assert!(CouplingFilter::new(&p, 0.0, 0.2).is_err());
        assert!(CouplingFilter::new(&p, 0.2, 0.6).is_err());
    }

    #[test]
    fn triple_sum_matches_factored_path() {
        let c = controller(TorquePremise::Command);
        let mut rng = StdRng::seed_from_u64(31);
        let p = params();
        for _ in 0..2000 {
            let dx = Vector2::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.0..0.4));
            let x_i = rng.gen_range(-5.0..5.0);
            let omega = rng.gen_range(0.4..1.6);
            let beta = rng.gen_range(0.0..0.4);
            let v_hat = rng.gen_range(4.0..24.0);
            let prev = rng.gen_range(0.0..p.rated_generator_torque);
            let a = c.control(&dx, x_i, omega, beta, v_hat, prev).unwrap();
            let b = c
                .control_triple_sum(&dx, x_i, omega, beta, v_hat, prev)
                .unwrap();
            let scale_t = 1.0 + a.torque_tilde.abs();
            let scale_b = 1.0 + a.beta_ref_tilde.abs();
            assert!(
                (a.torque_tilde - b.torque_tilde).abs() <= 1e-12 * scale_t,
                "torque mismatch {} vs {}",
                a.torque_tilde,
                b.torque_tilde
            );
            assert!(
                (a.beta_ref_tilde - b.beta_ref_tilde).abs() <= 1e-12 * scale_b,
                "pitch mismatch {} vs {}",
                a.beta_ref_tilde,
                b.beta_ref_tilde
            );
        }
    }

    #[test]
    fn identity_region_reduces_to_aggregated_law() {
        // Premises held where F = diag(1, 1): the blend must return exactly
        // the two saturated region commands.
        let c = controller(TorquePremise::PreviousBlended);
        let p = params();
        let dx = Vector2::new(0.02, 0.05);
        let x_i = 0.4;
        let omega = p.rated_rotor_speed * 1.02;
        let prev = 0.5 * p.rated_generator_torque;
        let out = c.control(&dx, x_i, omega, 0.05, 12.0, prev).unwrap();
        let u1 = c.partial.control(&dx, x_i, omega, 12.0).unwrap();
        let u2 = c.full.control(&dx, x_i, omega, 0.05, 12.0).unwrap();
        assert_relative_eq!(out.torque_tilde, u1, max_relative = 1e-12);
        assert_relative_eq!(out.beta_ref_tilde, u2, max_relative = 1e-12);
        assert_eq!(out.diagnostics.f1, 1.0);
        assert_eq!(out.diagnostics.f2, 1.0);
    }

    #[test]
    fn deep_partial_load_output_is_the_plain_torque_law() {
        let c = controller(TorquePremise::Command);
        let p = params();
        let dx = Vector2::new(-0.05, 0.0);
        let x_i = 1.0;
        let omega = 0.6 * p.rated_rotor_speed;
        let out = c.control(&dx, x_i, omega, 0.0, 7.0, 0.0).unwrap();
        let u1 = c.partial.control(&dx, x_i, omega, 7.0).unwrap();
        assert_eq!(out.beta_ref_tilde, 0.0);
        assert_relative_eq!(out.torque_tilde, u1, max_relative = 1e-12);
    }

    #[test]
    fn command_premise_is_a_continuous_map_of_the_command() {
        // Sweep the torque command through the band; successive outputs of
        // the static map must change by O(command increment), never snap.
        let p = params();
        let f = filter();
        let mut prev_tt: Option<f64> = None;
        let n = 20_000;
        let lo = 0.7 * p.rated_generator_torque;
        let hi = 1.0 * p.rated_generator_torque;
        let step = (hi - lo) / n as f64;
        let mut max_jump = 0.0_f64;
        for k in 0..=n {
            let cmd = lo + step * k as f64;
            let (_, tt) = f.apply(0.0, cmd, 1.0).unwrap();
            if let Some(prev) = prev_tt {
                max_jump = max_jump.max((tt - prev).abs());
            }
            prev_tt = Some(tt);
        }
        // The map's slope is bounded by f2_max + (f2_max - 1)/eps ~ 60, so
        // per-sample jumps shrink with the sweep step.
        assert!(
            max_jump <= 80.0 * step,
            "max jump {max_jump} for step {step}"
        );
    }

    #[test]
    fn hard_switch_branches_on_rated_speed() {
        let p = params();
        let c = controller(TorquePremise::Command);
        let dx = Vector2::new(0.01, 0.02);
        let below = hard_switch_control(
            &c.partial,
            &c.full,
            &dx,
            0.1,
            p.rated_rotor_speed - 1e-9,
            0.02,
            11.0,
            &p,
        )
        .unwrap();
        assert_eq!(below.1, 0.0);
        let above = hard_switch_control(
            &c.partial,
            &c.full,
            &dx,
            0.1,
            p.rated_rotor_speed,
            0.02,
            11.0,
            &p,
        )
        .unwrap();
        assert_eq!(above.0, p.rated_generator_torque);
    }

    #[test]
    fn single_vertex_gains_make_the_triple_sum_transparent() {
        // With all partial gains equal and all full gains equal, the triple
        // sum collapses to F * (u2, u1) analytically; check against the
        // hand-computed value.
        let p = params();
        let g_b = VertexGain {
            k_x: Vector2::new(-1.0e5, 0.0),
            k_i: -2.0e4,
        };
        let g_c = VertexGain {
            k_x: Vector2::new(-2.0, 0.1),
            k_i: -0.05,
        };
        let partial = PartialLoadController::new(
            vec![g_b; 4],
            RampPair::new(0.36, p.rated_rotor_speed).unwrap(),
            RampPair::new(p.v_cut_in, p.v_rated).unwrap(),
            p.rated_generator_torque,
        )
        .unwrap();
        let full = FullLoadController::new(
            vec![g_c; 8],
            RampPair::new(1.14, 1.39).unwrap(),
            RampPair::new(0.0, 0.3).unwrap(),
            RampPair::new(p.v_rated, 25.0).unwrap(),
            p.pitch_min,
            p.pitch_max,
        )
        .unwrap();
        let c = MultiRegionController {
            partial,
            full,
            filter: filter(),
            premise: TorquePremise::Command,
        };
        let dx = Vector2::new(0.05, 0.1);
        let x_i = -0.3;
        let omega = 1.22;
        let u1 = (-(-1.0e5_f64) * 0.05 + (-2.0e4) * (-0.3)).clamp(0.0, p.rated_generator_torque);
        let u2: f64 = -(-2.0 * 0.05 + 0.1 * 0.1) + (-0.05) * (-0.3);
        let u2 = u2.clamp(p.pitch_min, p.pitch_max);
        let f = filter();
        let expect_beta = f.f1(omega) * u2;
        let expect_torque = (f.f2(u1).unwrap() * u1).clamp(0.0, p.rated_generator_torque);
        let out = c.control(&dx, x_i, omega, 0.1, 13.0, 0.0).unwrap();
        assert_relative_eq!(out.beta_ref_tilde, expect_beta, max_relative = 1e-12);
        assert_relative_eq!(out.torque_tilde, expect_torque, max_relative = 1e-12);
        let tri = c
            .control_triple_sum(&dx, x_i, omega, 0.1, 13.0, 0.0)
            .unwrap();
        assert_relative_eq!(tri.beta_ref_tilde, expect_beta, max_relative = 1e-12);
        assert_relative_eq!(tri.torque_tilde, expect_torque, max_relative = 1e-12);
    }
}
