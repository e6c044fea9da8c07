//! Closed-loop scenario runner, batch execution, and summary metrics.
//!
//! A scenario wires the wind realization, the wind observer, the reference
//! generator, the two region laws, the coupling filter, and the reduced-order
//! plant into one fixed-step loop. Each sampling instant produces one log
//! row *before* the plant advances, so every row is self-consistent: the
//! logged commands were computed from the logged states.

use nalgebra::Vector2;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::blending::{
    hard_switch_control, BlendDiagnostics, ControllerKind, CouplingFilter, MultiRegionController,
    TorquePremise,
};
use crate::config::ResolvedScenario;
use crate::controller_file;
use crate::controllers::{
    baseline_torque_law, compute_omega_ref, design_default_controllers, TrackingState,
};
use crate::error::{Error, Result};
use crate::log::{LogRow, TimeSeriesLog};
use crate::observer::{ObserverGains, WindObserver};
use crate::turbine::{self, aero_thrust, aero_torque, generator_power, ControlInput, TurbineState};

/// Debounce window for rated-speed crossing detection, in seconds.
pub const TRANSITION_DEBOUNCE: f64 = 1.0;
/// Rows with pitch pass-through below this are classified partial load.
pub const PARTIAL_F1_THRESHOLD: f64 = 0.01;
/// Rows with pitch pass-through above this are classified full load.
pub const FULL_F1_THRESHOLD: f64 = 0.99;

/// Builds the dual-output controller for a resolved scenario: gains come
/// from the referenced controller file when one is configured, otherwise
/// they are synthesized from the turbine model.
pub fn build_controller(rs: &ResolvedScenario) -> Result<MultiRegionController> {
    let (partial, full) = match &rs.controller_file {
        Some(path) => controller_file::read(path)?,
        None => design_default_controllers(&rs.params, &rs.aero, &rs.design)?,
    };
    let filter = CouplingFilter::with_options(
        &rs.params,
        rs.eps_omega,
        rs.eps_tg,
        rs.ramp_shape,
        rs.weight_mode,
    )?;
    Ok(MultiRegionController {
        partial,
        full,
        filter,
        premise: rs.premise,
    })
}

/// Runs a scenario end to end, synthesizing (or loading) the controller
/// first. Deterministic: the same scenario produces the same log bytes.
pub fn run_scenario(rs: &ResolvedScenario) -> Result<TimeSeriesLog> {
    let controller = build_controller(rs)?;
    run_scenario_with(rs, &controller)
}

/// Runs a scenario with an already-built controller (shared across runs
/// that compare controller modes on identical wind).
pub fn run_scenario_with(
    rs: &ResolvedScenario,
    controller: &MultiRegionController,
) -> Result<TimeSeriesLog> {
    let params = &rs.params;
    let aero = &rs.aero;
    let dt = rs.dt;
    let wind = rs.wind.realize(rs.duration)?;
    let n_steps = (rs.duration / dt).round() as usize;

    // Initial state: rotor speed consistent with optimal tip-speed ratio at
    // the initial wind (capped at rated), fine pitch, tower at its static
    // deflection, wind estimate consistent with the initial rotor speed.
    let v0 = wind.sample(0.0);
    let omega0 = (params.lambda_opt * v0 / params.rotor_radius)
        .clamp(params.omega_floor(), params.rated_rotor_speed);
    let beta0 = 0.0;
    let thrust0 = aero_thrust(omega0, beta0, v0, params, aero)?;
    let mut state = TurbineState {
        omega_r: omega0,
        beta: beta0,
        tower_defl: thrust0 / params.tower_stiffness,
        tower_vel: 0.0,
    };
    let v_hat0 = (omega0 * params.rotor_radius / params.lambda_opt)
        .clamp(0.5 * params.v_cut_in, 2.0 * params.v_rated);
    let torque_hat0 = aero_torque(omega0, beta0, v_hat0, params, aero)?;
    let mut observer = WindObserver::new(
        ObserverGains::from_pole(rs.observer_pole, params.inertia)?,
        rs.observer_tau_v,
        params,
        omega0,
        v_hat0,
        torque_hat0,
    )?;
    let mut tracking = TrackingState::new(compute_omega_ref(v_hat0, params));
    // Torque applied over the step leading into each instant; seeded with
    // the quadratic law at the initial speed.
    let mut prev_torque = baseline_torque_law(params.gear_ratio * omega0, params);
    // Premise memory for the previous-blended and filtered realizations.
    let mut premise_state = prev_torque;

    let mut log = TimeSeriesLog::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let t = k as f64 * dt;
        let v = wind.sample(t);

        let est = observer.update(
            params,
            aero,
            params.gear_ratio * state.omega_r,
            prev_torque,
            state.beta,
            dt,
        )?;
        let v_hat = est.v_hat;

        let omega_ref = compute_omega_ref(v_hat, params);
        tracking.filter_reference(omega_ref, rs.tau_ref, dt);
        let dx = Vector2::new(state.omega_r - tracking.omega_ref_f, state.beta);

        let (torque_cmd, beta_cmd, diagnostics, pitch_active) = match rs.kind {
            ControllerKind::Blended => {
                let out = controller.control(
                    &dx,
                    tracking.x_i,
                    state.omega_r,
                    state.beta,
                    v_hat,
                    premise_state,
                )?;
                let active = out.diagnostics.f1 >= 0.5;
                (
                    out.torque_tilde,
                    out.beta_ref_tilde,
                    out.diagnostics,
                    active,
                )
            }
            ControllerKind::HardSwitch => {
                let (tq, b) = hard_switch_control(
                    &controller.partial,
                    &controller.full,
                    &dx,
                    tracking.x_i,
                    state.omega_r,
                    state.beta,
                    v_hat,
                    params,
                )?;
                let diag = filter_diagnostics(&controller.filter, state.omega_r, tq)?;
                (tq, b, diag, state.omega_r >= params.rated_rotor_speed)
            }
            ControllerKind::BaselineKappa => {
                let tq = baseline_torque_law(params.gear_ratio * state.omega_r, params);
                let above = state.omega_r >= params.rated_rotor_speed;
                let b = if above {
                    controller
                        .full
                        .control(&dx, tracking.x_i, state.omega_r, state.beta, v_hat)?
                } else {
                    0.0
                };
                let diag = filter_diagnostics(&controller.filter, state.omega_r, tq)?;
                (tq, b, diag, above)
            }
        };

        log.rows.push(LogRow {
            t,
            v,
            v_hat,
            omega_r: state.omega_r,
            omega_ref_f: tracking.omega_ref_f,
            beta: state.beta,
            beta_ref_tilde: beta_cmd,
            t_g_tilde: torque_cmd,
            p_g: generator_power(torque_cmd, params.gear_ratio * state.omega_r)
                / params.rated_power,
            x_t: state.tower_defl,
            x_i: tracking.x_i,
            h_a: diagnostics.memberships,
            f1: diagnostics.f1,
            f2: diagnostics.f2,
        });

        if k == n_steps {
            break;
        }

        // Conditional integration: freeze the tracking integrator while the
        // active region's command is clipped by its own saturation.
        let freeze = if pitch_active {
            let raw =
                controller
                    .full
                    .control_raw(&dx, tracking.x_i, state.omega_r, state.beta, v_hat)?;
            let (lo, hi) = controller.full.pitch_range();
            raw < lo || raw > hi
        } else {
            match rs.kind {
                ControllerKind::BaselineKappa => false,
                _ => {
                    let raw =
                        controller
                            .partial
                            .control_raw(&dx, tracking.x_i, state.omega_r, v_hat)?;
                    raw < 0.0 || raw > controller.partial.torque_max()
                }
            }
        };
        tracking.integrate(
            tracking.omega_ref_f - state.omega_r,
            dt,
            rs.x_i_limit,
            freeze,
        );

        if let TorquePremise::Filtered { tau } = rs.premise {
            let alpha = 1.0 - (-dt / tau.max(1e-6)).exp();
            premise_state += alpha * (torque_cmd - premise_state);
        } else {
            premise_state = torque_cmd;
        }
        prev_torque = torque_cmd;

        let next = turbine::step(
            &state,
            &ControlInput {
                generator_torque: torque_cmd,
                pitch_ref: beta_cmd,
            },
            v,
            dt,
            params,
            aero,
        )?;
        let finite = next.omega_r.is_finite()
            && next.beta.is_finite()
            && next.tower_defl.is_finite()
            && next.tower_vel.is_finite();
        if !finite || next.omega_r > 10.0 * params.rated_rotor_speed || next.tower_defl.abs() > 50.0
        {
            return Err(Error::IntegrationDiverged { step: k, time: t });
        }
        state = next;
    }
    Ok(log)
}

/// Filter diagnostics evaluated at the applied torque; gives the comparison
/// controllers the same logged scheduling view as the blended one.
fn filter_diagnostics(
    filter: &CouplingFilter,
    omega_r: f64,
    torque: f64,
) -> Result<BlendDiagnostics> {
    let h = filter.memberships(omega_r, torque)?;
    Ok(BlendDiagnostics {
        memberships: [h[0], h[1], h[2], h[3]],
        f1: filter.f1(omega_r),
        f2: filter.f2(torque)?,
    })
}

/// Runs each scenario independently, in order. Results pair the scenario
/// name with its outcome.
pub fn run_batch_sequential(
    scenarios: &[ResolvedScenario],
) -> Vec<(String, Result<TimeSeriesLog>)> {
    scenarios
        .iter()
        .map(|rs| (rs.name.clone(), run_scenario(rs)))
        .collect()
}

/// Runs scenarios across threads. Scenarios share no mutable state, so the
/// results are identical to [`run_batch_sequential`] in value and order.
#[cfg(feature = "parallel")]
pub fn run_batch(scenarios: &[ResolvedScenario]) -> Vec<(String, Result<TimeSeriesLog>)> {
    scenarios
        .par_iter()
        .map(|rs| (rs.name.clone(), run_scenario(rs)))
        .collect()
}

/// Sequential fallback under the same name when thread support is compiled
/// out.
#[cfg(not(feature = "parallel"))]
pub fn run_batch(scenarios: &[ResolvedScenario]) -> Vec<(String, Result<TimeSeriesLog>)> {
    run_batch_sequential(scenarios)
}

/// Summary statistics of one simulation log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Largest torque-command change between consecutive rows, N*m.
    pub max_step_jump_tg: f64,
    /// Largest pitch-command change between consecutive rows, rad.
    pub max_step_jump_beta: f64,
    /// RMS power-tracking error over full-load rows, per-unit.
    pub power_rmse_fullload: f64,
    /// RMS tip-speed-ratio error over partial-load rows.
    pub lambda_rmse_partialload: f64,
    /// Standard deviation of tower-top deflection, m.
    pub tower_std: f64,
    /// Debounced rated-speed crossings.
    pub transition_count: usize,
    /// Rows with pitch pass-through below the partial threshold.
    pub partial_rows: usize,
    /// Rows with pitch pass-through above the full threshold.
    pub full_rows: usize,
    /// Rows between the two thresholds.
    pub transition_rows: usize,
}

/// Reference values the metrics are computed against.
#[derive(Debug, Clone, Copy)]
pub struct MetricsBasis {
    pub rated_rotor_speed: f64,
    pub lambda_opt: f64,
    pub rotor_radius: f64,
}

impl MetricsBasis {
    pub fn from_params(params: &crate::turbine::TurbineParams) -> Self {
        Self {
            rated_rotor_speed: params.rated_rotor_speed,
            lambda_opt: params.lambda_opt,
            rotor_radius: params.rotor_radius,
        }
    }
}

/// Computes summary metrics from a log. Fails when the log is too short to
/// support the crossing debounce window.
pub fn compute_metrics(log: &TimeSeriesLog, basis: &MetricsBasis) -> Result<Metrics> {
    let rows = &log.rows;
    if rows.len() < 2 {
        return Err(Error::Metrics(format!(
            "log has {} rows; at least two are required",
            rows.len()
        )));
    }
    let dt = rows[1].t - rows[0].t;
    let span = rows.last().unwrap().t - rows[0].t;
    if span < TRANSITION_DEBOUNCE {
        return Err(Error::Metrics(format!(
            "log spans {span:.3} s, shorter than the {TRANSITION_DEBOUNCE} s debounce window"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Metrics(format!("non-increasing time step {dt}")));
    }

    let mut max_jump_tg = 0.0_f64;
    let mut max_jump_beta = 0.0_f64;
    for pair in rows.windows(2) {
        max_jump_tg = max_jump_tg.max((pair[1].t_g_tilde - pair[0].t_g_tilde).abs());
        max_jump_beta = max_jump_beta.max((pair[1].beta_ref_tilde - pair[0].beta_ref_tilde).abs());
    }

    let mut partial_rows = 0usize;
    let mut full_rows = 0usize;
    let mut transition_rows = 0usize;
    let mut lambda_sq = 0.0;
    let mut power_sq = 0.0;
    for row in rows {
        if row.f1 < PARTIAL_F1_THRESHOLD {
            partial_rows += 1;
            let lambda = row.omega_r * basis.rotor_radius / row.v.max(1e-9);
            lambda_sq += (lambda - basis.lambda_opt).powi(2);
        } else if row.f1 > FULL_F1_THRESHOLD {
            full_rows += 1;
            power_sq += (row.p_g - 1.0).powi(2);
        } else {
            transition_rows += 1;
        }
    }
    let lambda_rmse = if partial_rows > 0 {
        (lambda_sq / partial_rows as f64).sqrt()
    } else {
        0.0
    };
    let power_rmse = if full_rows > 0 {
        (power_sq / full_rows as f64).sqrt()
    } else {
        0.0
    };

    let mean_x = rows.iter().map(|r| r.x_t).sum::<f64>() / rows.len() as f64;
    let var_x = rows.iter().map(|r| (r.x_t - mean_x).powi(2)).sum::<f64>() / rows.len() as f64;

    // Debounced crossing count: a sign change of (omega_r - rated) counts
    // only when at least the debounce window has elapsed since the last
    // counted one; chatter inside the window is absorbed without resetting
    // the reference sign, so an excursion-and-return nets zero.
    let sign_of = |omega: f64| -> i8 {
        if omega >= basis.rated_rotor_speed {
            1
        } else {
            -1
        }
    };
    let mut transition_count = 0usize;
    let mut ref_sign = sign_of(rows[0].omega_r);
    let mut last_change = f64::NEG_INFINITY;
    for row in &rows[1..] {
        let s = sign_of(row.omega_r);
        if s != ref_sign && row.t - last_change >= TRANSITION_DEBOUNCE {
            transition_count += 1;
            ref_sign = s;
            last_change = row.t;
        }
    }

    Ok(Metrics {
        max_step_jump_tg: max_jump_tg,
        max_step_jump_beta: max_jump_beta,
        power_rmse_fullload: power_rmse,
        lambda_rmse_partialload: lambda_rmse,
        tower_std: var_x.sqrt(),
        transition_count,
        partial_rows,
        full_rows,
        transition_rows,
    })
}
