//! Closed-loop behavior checks that go beyond the release gates: comparison
//! controllers, actuator and anti-windup invariants on logged trajectories,
//! and ride-through behavior on wind profiles that sweep across rated speed.

use windloop::config::{ResolvedScenario, ScenarioConfig};
use windloop::log::TimeSeriesLog;
use windloop::sim::{self, compute_metrics, MetricsBasis};
use windloop::turbine::TurbineParams;

fn resolve(toml: &str) -> ResolvedScenario {
    ScenarioConfig::from_toml_str(toml)
        .expect("scenario parses")
        .resolve()
        .expect("scenario resolves")
}

fn run(toml: &str) -> TimeSeriesLog {
    sim::run_scenario(&resolve(toml)).expect("scenario runs")
}

fn transition_toml(seed: u64, controller: &str, dt: f64) -> String {
    format!(
        "[scenario]\ncontroller = \"{controller}\"\nduration = 60.0\ndt = {dt}\n\
         [wind]\nprofile = \"turbulent\"\nmean = 11.0\nintensity = 0.08\n\
         cutoff_freq = 0.01\nseed = {seed}\n"
    )
}

const GUST_ACROSS_RATED: &str = "[scenario]\nduration = 120.0\n\
     [wind]\nprofile = \"gust\"\nbase = 11.0\namplitude = 3.0\nperiod = 30.0\n";

/// Every logged torque command must stay inside the physical command range.
fn assert_torque_in_range(log: &TimeSeriesLog, p: &TurbineParams) {
    for r in &log.rows {
        assert!(
            (0.0..=p.rated_generator_torque * (1.0 + 1e-12)).contains(&r.t_g_tilde),
            "torque command {} N*m outside [0, rated] at t = {}",
            r.t_g_tilde,
            r.t
        );
    }
}

#[test]
fn baseline_torque_law_settles_at_optimal_tip_speed() {
    let p = TurbineParams::default();
    let log = run(
        "[scenario]\ncontroller = \"baseline_kappa\"\nduration = 200.0\n\
         [wind]\nprofile = \"constant\"\nspeed = 8.0\n",
    );
    let tail: Vec<_> = log.rows.iter().filter(|r| r.t >= 150.0).collect();
    let lambda = tail
        .iter()
        .map(|r| r.omega_r * p.rotor_radius / r.v)
        .sum::<f64>()
        / tail.len() as f64;
    let rel = (lambda - p.lambda_opt).abs() / p.lambda_opt;
    assert!(
        rel <= 0.01,
        "quadratic torque law settled at tip-speed ratio {lambda:.4}, {rel:.3e} from optimum"
    );
    assert_torque_in_range(&log, &p);
}

#[test]
fn hard_switch_steps_dwarf_blended_steps() {
    let basis = MetricsBasis::from_params(&TurbineParams::default());
    let blended = compute_metrics(&run(&transition_toml(10, "blended", 0.01)), &basis).unwrap();
    let hard = compute_metrics(&run(&transition_toml(10, "hard_switch", 0.01)), &basis).unwrap();
    assert!(
        hard.max_step_jump_tg >= 10.0 * blended.max_step_jump_tg,
        "hard switch worst torque step {:.1} N*m is not at least 10x the blended {:.1} N*m",
        hard.max_step_jump_tg,
        blended.max_step_jump_tg
    );
}

#[test]
fn blended_step_jumps_shrink_linearly_with_dt() {
    let basis = MetricsBasis::from_params(&TurbineParams::default());
    let jump = |dt: f64| {
        compute_metrics(&run(&transition_toml(10, "blended", dt)), &basis)
            .unwrap()
            .max_step_jump_tg
    };
    let coarse = jump(0.02);
    let medium = jump(0.01);
    let fine = jump(0.005);
    // A continuous command trajectory leaves per-step increments O(dt); a
    // residual discontinuity would leave a floor that halving cannot shrink.
    assert!(
        medium <= 0.6 * coarse,
        "torque step did not shrink with dt: {coarse:.2} -> {medium:.2} N*m"
    );
    assert!(
        fine <= 0.6 * medium,
        "torque step did not shrink with dt: {medium:.2} -> {fine:.2} N*m"
    );
}

#[test]
fn pitch_respects_rate_limit_everywhere() {
    let p = TurbineParams::default();
    for toml in [
        GUST_ACROSS_RATED.to_string(),
        transition_toml(10, "blended", 0.01),
        "[scenario]\nduration = 60.0\n[wind]\nprofile = \"step\"\ninitial = 10.0\n\
         target = 18.0\nat = 10.0\n"
            .to_string(),
    ] {
        let log = run(&toml);
        let dt = log.dt().unwrap();
        let bound = p.pitch_rate_limit * dt * (1.0 + 1e-9) + 1e-12;
        for w in log.rows.windows(2) {
            let dbeta = (w[1].beta - w[0].beta).abs();
            assert!(
                dbeta <= bound,
                "pitch moved {dbeta:.6} rad in one step at t = {} (limit {bound:.6})",
                w[1].t
            );
        }
    }
}

#[test]
fn integral_state_stays_inside_antiwindup_bound() {
    for toml in [
        GUST_ACROSS_RATED.to_string(),
        "[scenario]\nduration = 90.0\n[wind]\nprofile = \"step\"\ninitial = 6.0\n\
         target = 20.0\nat = 20.0\n"
            .to_string(),
    ] {
        let rs = resolve(&toml);
        let log = sim::run_scenario(&rs).unwrap();
        let max_xi = log.rows.iter().map(|r| r.x_i.abs()).fold(0.0_f64, f64::max);
        assert!(
            max_xi <= rs.x_i_limit + 1e-12,
            "integral state reached {max_xi:.3} rad*s (bound {})",
            rs.x_i_limit
        );
    }
}

#[test]
fn recovered_power_coefficient_stays_below_betz() {
    let p = TurbineParams::default();
    let betz = 16.0 / 27.0;
    let swept = std::f64::consts::PI * p.rotor_radius * p.rotor_radius;
    for speed in [6.0, 8.0, 10.0, 12.0, 14.0] {
        let log = run(&format!(
            "[scenario]\nduration = 120.0\n[wind]\nprofile = \"constant\"\nspeed = {speed}\n"
        ));
        let tail: Vec<_> = log.rows.iter().filter(|r| r.t >= 90.0).collect();
        let cp = tail
            .iter()
            .map(|r| r.p_g * p.rated_power / (0.5 * p.air_density * swept * r.v.powi(3)))
            .sum::<f64>()
            / tail.len() as f64;
        assert!(
            cp > 0.0 && cp < betz,
            "recovered power coefficient {cp:.4} at {speed} m/s outside (0, {betz:.4})"
        );
    }
}

#[test]
fn wind_estimate_stays_in_plausibility_band() {
    let p = TurbineParams::default();
    let (lo, hi) = (0.5 * p.v_cut_in, 2.0 * p.v_rated);
    let log = run(
        "[scenario]\nduration = 120.0\n[wind]\nprofile = \"turbulent\"\nmean = 11.0\n\
         intensity = 0.15\nseed = 99\n",
    );
    for r in &log.rows {
        assert!(
            r.v_hat.is_finite() && (lo..=hi).contains(&r.v_hat),
            "wind estimate {} m/s left the plausibility band [{lo}, {hi}] at t = {}",
            r.v_hat,
            r.t
        );
    }
}

#[test]
fn gust_ride_through_crosses_rated_smoothly() {
    let p = TurbineParams::default();
    let basis = MetricsBasis::from_params(&p);
    let log = run(GUST_ACROSS_RATED);
    assert_torque_in_range(&log, &p);
    let m = compute_metrics(&log, &basis).unwrap();
    assert!(
        m.transition_count >= 4,
        "gust sweeping 8..14 m/s crossed rated only {} times",
        m.transition_count
    );
    assert!(
        m.max_step_jump_tg <= 0.05 * p.rated_generator_torque,
        "worst torque step {:.1} N*m exceeds 5% of rated during gust ride-through",
        m.max_step_jump_tg
    );
}
