//! Scenario configuration: a flat, strictly validated TOML schema covering
//! the plant, the aerodynamic surface, the wind input, the blending layer,
//! the controller design and the wind observer. Unknown keys are rejected
//! everywhere so typos fail loudly instead of silently running defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aero::AeroModel;
use crate::blending::{ControllerKind, TorquePremise, TorqueWeightMode};
use crate::controllers::DesignConfig;
use crate::error::{Error, Result};
use crate::fuzzy::RampShape;
use crate::turbine::TurbineParams;
use crate::wind::WindProfile;

/// Top-level scenario file.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub turbine: TurbineSection,
    pub aero: AeroSection,
    pub wind: WindSection,
    pub blending: BlendingSection,
    pub control: ControlSection,
    pub observer: ObserverSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    /// Integration step [s]; must lie in (0, 0.05].
    pub dt: f64,
    /// Scenario length [s]; must be at least 10 steps.
    pub duration: f64,
    /// Controller choice: "blended", "hard_switch" or "baseline_kappa".
    pub controller: String,
    /// Optional scenario name used for output file naming.
    pub name: String,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            dt: 0.01,
            duration: 60.0,
            controller: "blended".into(),
            name: "scenario".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TurbineSection {
    pub rotor_radius: f64,
    pub air_density: f64,
    pub inertia: f64,
    pub gear_ratio: f64,
    pub rated_rotor_speed: f64,
    pub rated_generator_torque: f64,
    pub min_generator_torque: f64,
    pub rated_power: f64,
    pub lambda_opt: f64,
    pub cp_max: f64,
    pub v_cut_in: f64,
    pub v_rated: f64,
    /// Pitch rate limit [deg/s] (degrees in the file for readability).
    pub pitch_rate_limit_deg: f64,
    pub pitch_time_constant: f64,
    pub pitch_min_deg: f64,
    pub pitch_max_deg: f64,
    pub tower_mass: f64,
    pub tower_stiffness: f64,
    pub tower_damping: f64,
}

impl Default for TurbineSection {
    fn default() -> Self {
        let p = TurbineParams::default();
        Self {
            rotor_radius: p.rotor_radius,
            air_density: p.air_density,
            inertia: p.inertia,
            gear_ratio: p.gear_ratio,
            rated_rotor_speed: p.rated_rotor_speed,
            rated_generator_torque: p.rated_generator_torque,
            min_generator_torque: p.min_generator_torque,
            rated_power: p.rated_power,
            lambda_opt: p.lambda_opt,
            cp_max: p.cp_max,
            v_cut_in: p.v_cut_in,
            v_rated: p.v_rated,
            pitch_rate_limit_deg: p.pitch_rate_limit.to_degrees(),
            pitch_time_constant: p.pitch_time_constant,
            pitch_min_deg: p.pitch_min.to_degrees(),
            pitch_max_deg: p.pitch_max.to_degrees(),
            tower_mass: p.tower_mass,
            tower_stiffness: p.tower_stiffness,
            tower_damping: p.tower_damping,
        }
    }
}

impl TurbineSection {
    pub fn to_params(&self) -> TurbineParams {
        TurbineParams {
            rotor_radius: self.rotor_radius,
            air_density: self.air_density,
            inertia: self.inertia,
            gear_ratio: self.gear_ratio,
            rated_rotor_speed: self.rated_rotor_speed,
            rated_generator_torque: self.rated_generator_torque,
            min_generator_torque: self.min_generator_torque,
            rated_power: self.rated_power,
            lambda_opt: self.lambda_opt,
            cp_max: self.cp_max,
            v_cut_in: self.v_cut_in,
            v_rated: self.v_rated,
            pitch_rate_limit: self.pitch_rate_limit_deg.to_radians(),
            pitch_time_constant: self.pitch_time_constant,
            pitch_min: self.pitch_min_deg.to_radians(),
            pitch_max: self.pitch_max_deg.to_radians(),
            tower_mass: self.tower_mass,
            tower_stiffness: self.tower_stiffness,
            tower_damping: self.tower_damping,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AeroSection {
    /// "empirical" (calibrated analytic surface) or "table" (CSV lookup).
    pub model: String,
    /// CSV path for the "table" model.
    pub table_path: Option<PathBuf>,
}

impl Default for AeroSection {
    fn default() -> Self {
        Self {
            model: "empirical".into(),
            table_path: None,
        }
    }
}

/// Wind input, flattened: `profile` selects the variant and the variant's
/// fields are plain keys. Unused keys for the selected variant must be
/// absent (single flat table keeps unknown-key rejection intact).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WindSection {
    /// "constant", "step", "ramp", "gust", "turbulent" or "trace".
    pub profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for WindSection {
    fn default() -> Self {
        Self {
            profile: "constant".into(),
            speed: None,
            initial: None,
            target: None,
            at: None,
            from: None,
            to: None,
            start: None,
            end: None,
            base: None,
            amplitude: None,
            period: None,
            mean: None,
            intensity: None,
            seed: None,
            cutoff_freq: None,
            path: None,
        }
    }
}

impl WindSection {
    /// Converts the flat section into a validated wind profile, rejecting
    /// keys that do not belong to the selected variant.
    pub fn to_profile(&self) -> Result<WindProfile> {
        let require = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                Error::Config(format!(
                    "wind profile '{}' requires key '{name}'",
                    self.profile
                ))
            })
        };
        let (used, profile): (&[&str], WindProfile) = match self.profile.as_str() {
            "constant" => (
                &["speed"],
                WindProfile::Constant {
                    speed: require("speed", self.speed)?,
                },
            ),
            "step" => (
                &["initial", "target", "at"],
                WindProfile::Step {
                    initial: require("initial", self.initial)?,
                    target: require("target", self.target)?,
                    at: require("at", self.at)?,
                },
            ),
            "ramp" => (
                &["from", "to", "start", "end"],
                WindProfile::Ramp {
                    from: require("from", self.from)?,
                    to: require("to", self.to)?,
                    start: require("start", self.start)?,
                    end: require("end", self.end)?,
                },
            ),
            "gust" => (
                &["base", "amplitude", "period"],
                WindProfile::Gust {
                    base: require("base", self.base)?,
                    amplitude: require("amplitude", self.amplitude)?,
                    period: require("period", self.period)?,
                },
            ),
            "turbulent" => (
                &["mean", "intensity", "cutoff_freq"],
                WindProfile::Turbulent {
                    mean: require("mean", self.mean)?,
                    intensity: require("intensity", self.intensity)?,
                    seed: self.seed.ok_or_else(|| {
                        Error::Config("wind profile 'turbulent' requires key 'seed'".into())
                    })?,
                    cutoff_freq: self.cutoff_freq.unwrap_or(0.1),
                },
            ),
            "trace" => (
                &["path"],
                WindProfile::Trace {
                    path: self.path.clone().ok_or_else(|| {
                        Error::Config("wind profile 'trace' requires key 'path'".into())
                    })?,
                },
            ),
            other => {
                return Err(Error::Config(format!(
                    "unknown wind profile '{other}' (expected constant, step, ramp, gust, \
                     turbulent or trace)"
                )))
            }
        };
        self.reject_unused(used)?;
        profile.validate()?;
        Ok(profile)
    }

    fn reject_unused(&self, used: &[&str]) -> Result<()> {
        let all: [(&str, bool); 15] = [
            ("speed", self.speed.is_some()),
            ("initial", self.initial.is_some()),
            ("target", self.target.is_some()),
            ("at", self.at.is_some()),
            ("from", self.from.is_some()),
            ("to", self.to.is_some()),
            ("start", self.start.is_some()),
            ("end", self.end.is_some()),
            ("base", self.base.is_some()),
            ("amplitude", self.amplitude.is_some()),
            ("period", self.period.is_some()),
            ("mean", self.mean.is_some()),
            ("intensity", self.intensity.is_some()),
            ("cutoff_freq", self.cutoff_freq.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, present) in all {
            if present && !used.contains(&name) && name != "seed" {
                return Err(Error::Config(format!(
                    "wind key '{name}' does not apply to profile '{}'",
                    self.profile
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BlendingSection {
    /// Overlap fraction of the pitch-gate ramp below rated speed.
    pub eps_omega: f64,
    /// Overlap fraction of the torque ramp below rated torque.
    pub eps_tg: f64,
    /// "linear" or "smoothstep".
    pub ramp_shape: String,
    /// "ramp" or "exact_sector".
    pub torque_weight_mode: String,
    /// "command", "previous" or "filtered".
    pub torque_premise: String,
    /// Time constant for the "filtered" premise [s].
    pub premise_tau: f64,
}

impl Default for BlendingSection {
    fn default() -> Self {
        Self {
            eps_omega: 0.12,
            eps_tg: 0.18,
            ramp_shape: "linear".into(),
            torque_weight_mode: "ramp".into(),
            torque_premise: "command".into(),
            premise_tau: 0.1,
        }
    }
}

impl BlendingSection {
    pub fn ramp_shape(&self) -> Result<RampShape> {
        match self.ramp_shape.as_str() {
            "linear" => Ok(RampShape::Linear),
            "smoothstep" => Ok(RampShape::Smoothstep),
            other => Err(Error::Config(format!(
                "unknown ramp shape '{other}' (expected linear or smoothstep)"
            ))),
        }
    }

    pub fn weight_mode(&self) -> Result<TorqueWeightMode> {
        match self.torque_weight_mode.as_str() {
            "ramp" => Ok(TorqueWeightMode::Ramp),
            "exact_sector" => Ok(TorqueWeightMode::ExactSector),
            other => Err(Error::Config(format!(
                "unknown torque weight mode '{other}' (expected ramp or exact_sector)"
            ))),
        }
    }

    pub fn premise(&self) -> Result<TorquePremise> {
        match self.torque_premise.as_str() {
            "command" => Ok(TorquePremise::Command),
            "previous" => Ok(TorquePremise::PreviousBlended),
            "filtered" => {
                if !(self.premise_tau.is_finite() && self.premise_tau > 0.0) {
                    return Err(Error::Config(format!(
                        "premise_tau must be positive, got {}",
                        self.premise_tau
                    )));
                }
                Ok(TorquePremise::Filtered {
                    tau: self.premise_tau,
                })
            }
            other => Err(Error::Config(format!(
                "unknown torque premise '{other}' (expected command, previous or filtered)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    /// Reference filter time constant [s].
    pub tau_ref: f64,
    /// Anti-windup bound on the tracking integral [rad].
    pub x_i_limit: f64,
    /// Torque-loop LQR weights.
    pub partial_q: [f64; 3],
    pub partial_r: f64,
    /// Pitch-loop LQR weights.
    pub full_q: [f64; 3],
    pub full_r: f64,
    /// Pitch-loop scheduling envelope.
    pub full_omega_halfwidth: f64,
    pub full_beta_max: f64,
    pub full_wind_max: f64,
    /// When set, gains are loaded from this controller file instead of being
    /// synthesized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controller_file: Option<PathBuf>,
}

impl Default for ControlSection {
    fn default() -> Self {
        let d = DesignConfig::default();
        Self {
            tau_ref: 2.0,
            x_i_limit: 60.0,
            partial_q: d.partial_weights.0,
            partial_r: d.partial_weights.1,
            full_q: d.full_weights.0,
            full_r: d.full_weights.1,
            full_omega_halfwidth: d.full_omega_halfwidth,
            full_beta_max: d.full_beta_max,
            full_wind_max: d.full_wind_max,
            controller_file: None,
        }
    }
}

impl ControlSection {
    pub fn design_config(&self) -> DesignConfig {
        DesignConfig {
            partial_weights: (self.partial_q, self.partial_r),
            full_weights: (self.full_q, self.full_r),
            full_omega_halfwidth: self.full_omega_halfwidth,
            full_beta_max: self.full_beta_max,
            full_wind_max: self.full_wind_max,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ObserverSection {
    /// Magnitude of the (double) estimator pole [rad/s].
    pub pole: f64,
    /// Wind-estimate low-pass time constant [s].
    pub tau_v: f64,
}

impl Default for ObserverSection {
    fn default() -> Self {
        Self {
            pole: 1.0,
            tau_v: 0.3,
        }
    }
}

impl ScenarioConfig {
    /// Parses a TOML string.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    /// Reads and parses a TOML file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Serializes back to TOML.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("serialize: {e}")))
    }

    pub fn controller_kind(&self) -> Result<ControllerKind> {
        match self.scenario.controller.as_str() {
            "blended" => Ok(ControllerKind::Blended),
            "hard_switch" => Ok(ControllerKind::HardSwitch),
            "baseline_kappa" => Ok(ControllerKind::BaselineKappa),
            other => Err(Error::Config(format!(
                "unknown controller '{other}' (expected blended, hard_switch or baseline_kappa)"
            ))),
        }
    }

    /// Full validation: every section checked, cross-field constraints
    /// enforced, derived objects constructed once.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let dt = self.scenario.dt;
        if !(dt > 0.0 && dt <= 0.05) {
            return Err(Error::Config(format!(
                "dt must lie in (0, 0.05] s, got {dt}"
            )));
        }
        if !(self.scenario.duration.is_finite() && self.scenario.duration >= 10.0 * dt) {
            return Err(Error::Config(format!(
                "duration must be at least 10 steps ({} s), got {} s",
                10.0 * dt,
                self.scenario.duration
            )));
        }
        let params = self.turbine.to_params();
        params.validate()?;
        let aero = match self.aero.model.as_str() {
            "empirical" => {
                if self.aero.table_path.is_some() {
                    return Err(Error::Config(
                        "aero key 'table_path' does not apply to the empirical model".into(),
                    ));
                }
                AeroModel::empirical(params.lambda_opt, params.cp_max)?
            }
            "table" => {
                let path = self.aero.table_path.as_ref().ok_or_else(|| {
                    Error::Config("aero model 'table' requires key 'table_path'".into())
                })?;
                AeroModel::from_table_csv(path)?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown aero model '{other}' (expected empirical or table)"
                )))
            }
        };
        let wind = self.wind.to_profile()?;
        let kind = self.controller_kind()?;
        let shape = self.blending.ramp_shape()?;
        let weight_mode = self.blending.weight_mode()?;
        let premise = self.blending.premise()?;
        if !(self.control.tau_ref.is_finite() && self.control.tau_ref >= 0.0) {
            return Err(Error::Config(format!(
                "tau_ref must be nonnegative, got {}",
                self.control.tau_ref
            )));
        }
        if !(self.control.x_i_limit.is_finite() && self.control.x_i_limit > 0.0) {
            return Err(Error::Config(format!(
                "x_i_limit must be positive, got {}",
                self.control.x_i_limit
            )));
        }
        if !(self.observer.pole.is_finite() && self.observer.pole > 0.0) {
            return Err(Error::Config(format!(
                "observer pole must be positive, got {}",
                self.observer.pole
            )));
        }
        if !(self.observer.tau_v.is_finite() && self.observer.tau_v >= 0.0) {
            return Err(Error::Config(format!(
                "observer tau_v must be nonnegative, got {}",
                self.observer.tau_v
            )));
        }
        Ok(ResolvedScenario {
            name: self.scenario.name.clone(),
            dt,
            duration: self.scenario.duration,
            params,
            aero,
            wind,
            kind,
            eps_omega: self.blending.eps_omega,
            eps_tg: self.blending.eps_tg,
            ramp_shape: shape,
            weight_mode,
            premise,
            tau_ref: self.control.tau_ref,
            x_i_limit: self.control.x_i_limit,
            design: self.control.design_config(),
            controller_file: self.control.controller_file.clone(),
            observer_pole: self.observer.pole,
            observer_tau_v: self.observer.tau_v,
        })
    }
}

/// Everything a simulation run needs, validated and constructed.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub name: String,
    pub dt: f64,
    pub duration: f64,
    pub params: TurbineParams,
    pub aero: AeroModel,
    pub wind: WindProfile,
    pub kind: ControllerKind,
    pub eps_omega: f64,
    pub eps_tg: f64,
    pub ramp_shape: RampShape,
    pub weight_mode: TorqueWeightMode,
    pub premise: TorquePremise,
    pub tau_ref: f64,
    pub x_i_limit: f64,
    pub design: DesignConfig,
    pub controller_file: Option<PathBuf>,
    pub observer_pole: f64,
    pub observer_tau_v: f64,
}
