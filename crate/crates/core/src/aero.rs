//! Rotor power and thrust coefficient surfaces.
//!
//! Two interchangeable sources are provided: a calibrated empirical
//! exponential surface and a bilinear lookup table loaded from CSV. Both
//! return the power coefficient `cp(lambda, beta)` and a consistent thrust
//! coefficient `ct(lambda, beta)`; pitch angles are radians at the interface
//! (the empirical formula and the table file use degrees internally).

use std::path::Path;

use crate::error::{Error, Result};

/// Betz limit, the theoretical maximum power coefficient of an ideal rotor.
pub const BETZ_LIMIT: f64 = 16.0 / 27.0;

/// Raw exponential cp surface with fixed shape coefficients.
///
/// The classic single-peak form
/// `cp = c1 (c2/li - c3 b - c4) exp(-c5/li) + c6 lambda`, with
/// `1/li = 1/(lambda + 0.08 b) - 0.035/(b^3 + 1)` and the pitch `b` in
/// degrees. Used here only as a shape template; amplitude and
/// tip-speed-ratio axis are rescaled at calibration time.
fn raw_cp(lambda: f64, beta_deg: f64) -> f64 {
    let denom = lambda + 0.08 * beta_deg;
    if denom <= 1e-9 {
        return 0.0;
    }
    let inv_li = 1.0 / denom - 0.035 / (beta_deg.powi(3) + 1.0);
    0.5176 * (116.0 * inv_li - 0.4 * beta_deg - 5.0) * (-21.0 * inv_li).exp() + 0.0068 * lambda
}

/// Empirical cp surface calibrated so that the peak at zero pitch sits at a
/// prescribed `(lambda_opt, cp_max)`.
#[derive(Debug, Clone)]
pub struct EmpiricalSurface {
    /// Amplitude scale applied to the raw surface.
    amplitude: f64,
    /// Maps the query tip speed ratio onto the raw surface's lambda axis.
    lambda_scale: f64,
}

impl EmpiricalSurface {
    /// Calibrates the raw surface: locates its zero-pitch peak by golden
    /// section search, then rescales both axes so the peak lands exactly on
    /// `(lambda_opt, cp_max)`.
    pub fn calibrate(lambda_opt: f64, cp_max: f64) -> Result<Self> {
        if lambda_opt <= 0.0 || cp_max <= 0.0 || cp_max >= BETZ_LIMIT {
            return Err(Error::Config(format!(
                "empirical surface needs lambda_opt > 0 and 0 < cp_max < {BETZ_LIMIT:.4}, \
                 got ({lambda_opt}, {cp_max})"
            )));
        }
        // Golden-section maximization of raw_cp(., 0) on a bracket that
        // safely contains the template's single peak.
        let (mut a, mut b) = (2.0_f64, 14.0_f64);
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        for _ in 0..200 {
            if raw_cp(c, 0.0) > raw_cp(d, 0.0) {
                b = d;
            } else {
                a = c;
            }
            c = b - phi * (b - a);
            d = a + phi * (b - a);
            if (b - a).abs() < 1e-12 {
                break;
            }
        }
        let lambda_peak = 0.5 * (a + b);
        let cp_peak = raw_cp(lambda_peak, 0.0);
        if cp_peak <= 0.0 {
            return Err(Error::Config("raw cp surface has no positive peak".into()));
        }
        Ok(Self {
            amplitude: cp_max / cp_peak,
            lambda_scale: lambda_peak / lambda_opt,
        })
    }

    fn cp(&self, lambda: f64, beta_rad: f64) -> f64 {
        let cp = self.amplitude * raw_cp(lambda * self.lambda_scale, beta_rad.to_degrees());
        cp.clamp(0.0, BETZ_LIMIT)
    }
}

/// Thrust coefficient consistent with a given power coefficient under
/// one-dimensional momentum theory: solves `4a(1-a)^2 = cp` for the axial
/// induction factor `a` on `[0, 1/3]` and returns `ct = 4a(1-a)`.
pub fn thrust_from_power_coefficient(cp: f64) -> f64 {
    let cp = cp.clamp(0.0, BETZ_LIMIT);
    if cp == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0 / 3.0);
    // g(a) = 4a(1-a)^2 is monotone increasing on [0, 1/3], from 0 to 16/27.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if 4.0 * mid * (1.0 - mid) * (1.0 - mid) < cp {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    (4.0 * a * (1.0 - a)).clamp(0.0, 2.0)
}

/// Rectangular cp/ct lookup table with bilinear interpolation.
///
/// Loaded from CSV with header `lambda, beta_deg, cp, ct`, rows forming a
/// complete row-major grid (lambda varies slowest). Queries outside the grid
/// clamp to the nearest edge.
#[derive(Debug, Clone)]
pub struct AeroTable {
    lambdas: Vec<f64>,
    betas_deg: Vec<f64>,
    cp: Vec<f64>,
    ct: Vec<f64>,
}

impl AeroTable {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let name = path.display().to_string();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::CsvParse {
            path: name.clone(),
            line: 1,
            msg: "empty file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let expected = ["lambda", "beta_deg", "cp", "ct"];
        if cols != expected {
            return Err(Error::CsvParse {
                path: name,
                line: 1,
                msg: format!("expected header {expected:?}, got {cols:?}"),
            });
        }
        let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::CsvParse {
                    path: name,
                    line: idx + 1,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let mut vals = [0.0_f64; 4];
            for (k, f) in fields.iter().enumerate() {
                vals[k] = f.parse().map_err(|_| Error::CsvParse {
                    path: name.clone(),
                    line: idx + 1,
                    msg: format!("cannot parse `{f}` in column {}", expected[k]),
                })?;
            }
            rows.push((vals[0], vals[1], vals[2], vals[3]));
        }
        Self::from_rows(rows).map_err(|e| match e {
            Error::Config(msg) => Error::CsvParse {
                path: name,
                line: 0,
                msg,
            },
            other => other,
        })
    }

    /// Builds a table from `(lambda, beta_deg, cp, ct)` tuples, validating
    /// that they form a complete rectangular grid in row-major order.
    pub fn from_rows(rows: Vec<(f64, f64, f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Config("aero table has no data rows".into()));
        }
        let mut betas: Vec<f64> = Vec::new();
        for r in &rows {
            if betas.contains(&r.1) {
                break;
            }
            betas.push(r.1);
        }
        let nb = betas.len();
        if nb == 0 || !rows.len().is_multiple_of(nb) {
            return Err(Error::Config(format!(
                "{} rows do not tile a grid with {} pitch values",
                rows.len(),
                nb
            )));
        }
        let nl = rows.len() / nb;
        let mut lambdas = Vec::with_capacity(nl);
        let mut cp = Vec::with_capacity(rows.len());
        let mut ct = Vec::with_capacity(rows.len());
        for i in 0..nl {
            let lam = rows[i * nb].0;
            lambdas.push(lam);
            for j in 0..nb {
                let r = &rows[i * nb + j];
                if r.0 != lam || r.1 != betas[j] {
                    return Err(Error::Config(format!(
                        "grid not rectangular row-major at data row {} (lambda {}, beta {})",
                        i * nb + j + 1,
                        r.0,
                        r.1
                    )));
                }
                if !(0.0..=BETZ_LIMIT).contains(&r.2) {
                    return Err(Error::Config(format!(
                        "cp {} outside [0, {BETZ_LIMIT:.4}]",
                        r.2
                    )));
                }
                if !(0.0..=2.0).contains(&r.3) {
                    return Err(Error::Config(format!("ct {} outside [0, 2]", r.3)));
                }
                cp.push(r.2);
                ct.push(r.3);
            }
        }
        if lambdas.windows(2).any(|w| w[0] >= w[1]) || betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "grid axes must be strictly increasing".into(),
            ));
        }
        if nl < 2 || nb < 2 {
            return Err(Error::Config(
                "grid needs at least 2 points per axis".into(),
            ));
        }
        Ok(Self {
            lambdas,
            betas_deg: betas,
            cp,
            ct,
        })
    }

    fn interp(&self, values: &[f64], lambda: f64, beta_deg: f64) -> f64 {
        let (i, tx) = bracket(&self.lambdas, lambda);
        let (j, ty) = bracket(&self.betas_deg, beta_deg);
        let nb = self.betas_deg.len();
        let v00 = values[i * nb + j];
        let v01 = values[i * nb + j + 1];
        let v10 = values[(i + 1) * nb + j];
        let v11 = values[(i + 1) * nb + j + 1];
        let a = v00 + tx * (v10 - v00);
        let b = v01 + tx * (v11 - v01);
        a + ty * (b - a)
    }

    fn cp(&self, lambda: f64, beta_rad: f64) -> f64 {
        self.interp(&self.cp, lambda, beta_rad.to_degrees())
            .clamp(0.0, BETZ_LIMIT)
    }

    fn ct(&self, lambda: f64, beta_rad: f64) -> f64 {
        self.interp(&self.ct, lambda, beta_rad.to_degrees())
            .clamp(0.0, 2.0)
    }
}

/// Finds the cell index and interpolation fraction for `x` on a sorted axis,
/// clamping queries outside the grid to the nearest edge.
fn bracket(axis: &[f64], x: f64) -> (usize, f64) {
    let n = axis.len();
    if x <= axis[0] {
        return (0, 0.0);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0);
    }
    let i = axis.partition_point(|&a| a <= x) - 1;
    let i = i.min(n - 2);
    let t = (x - axis[i]) / (axis[i + 1] - axis[i]);
    (i, t)
}

/// Source of the rotor coefficient surfaces.
#[derive(Debug, Clone)]
pub enum AeroModel {
    Empirical(EmpiricalSurface),
    Table(AeroTable),
}

impl AeroModel {
    /// Calibrated empirical surface peaking at `(lambda_opt, cp_max)`.
    pub fn empirical(lambda_opt: f64, cp_max: f64) -> Result<Self> {
        Ok(Self::Empirical(EmpiricalSurface::calibrate(
            lambda_opt, cp_max,
        )?))
    }

    /// Table-backed surface loaded from a CSV grid.
    pub fn from_table_csv(path: &Path) -> Result<Self> {
        Ok(Self::Table(AeroTable::from_csv(path)?))
    }

    /// Power coefficient at tip speed ratio `lambda` and pitch `beta` (rad).
    /// Always within `[0, BETZ_LIMIT]`.
    pub fn power_coefficient(&self, lambda: f64, beta_rad: f64) -> Result<f64> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "tip speed ratio must be positive and finite, got {lambda}"
            )));
        }
        Ok(match self {
            Self::Empirical(s) => s.cp(lambda, beta_rad),
            Self::Table(t) => t.cp(lambda, beta_rad),
        })
    }

    /// Thrust coefficient at `lambda` and pitch `beta` (rad), in `[0, 2]`.
    pub fn thrust_coefficient(&self, lambda: f64, beta_rad: f64) -> Result<f64> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "tip speed ratio must be positive and finite, got {lambda}"
            )));
        }
        Ok(match self {
            Self::Empirical(s) => thrust_from_power_coefficient(s.cp(lambda, beta_rad)),
            Self::Table(t) => t.ct(lambda, beta_rad),
        })
    }
}
