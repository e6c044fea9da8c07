//! Deterministic wind speed profiles.
//!
//! Every profile is realized once per scenario into a `WindSignal` that can
//! be sampled at arbitrary times. Turbulent profiles precompute a seeded
//! AR(1) series on an internal fixed grid and interpolate linearly between
//! grid points, so the sampled signal is continuous, reproducible bit for
//! bit for a given `(profile, seed)`, and independent of the simulation step
//! size.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hard floor applied to every generated wind speed (m/s).
pub const WIND_FLOOR: f64 = 0.5;

/// Internal sampling grid of the turbulent generator (s).
pub const TURBULENCE_GRID_DT: f64 = 0.05;

/// Wind profile description (scenario input).
#[derive(Debug, Clone, PartialEq)]
pub enum WindProfile {
    /// Constant speed.
    Constant { speed: f64 },
    /// Step from `initial` to `target` at time `at`.
    Step { initial: f64, target: f64, at: f64 },
    /// Linear ramp from `from` to `to` between `start` and `end`, constant
    /// outside that interval.
    Ramp {
        from: f64,
        to: f64,
        start: f64,
        end: f64,
    },
    /// Raised-cosine gust train: `base + amplitude (1 - cos(2 pi t / period)) / 2`.
    Gust {
        base: f64,
        amplitude: f64,
        period: f64,
    },
    /// Mean wind plus AR(1)-filtered Gaussian turbulence scaled to a target
    /// intensity (standard deviation / mean).
    Turbulent {
        mean: f64,
        intensity: f64,
        seed: u64,
        /// Low-pass cutoff of the AR(1) filter (Hz).
        cutoff_freq: f64,
    },
    /// Time series imported from a `t, v` CSV trace.
    Trace { path: PathBuf },
}

impl WindProfile {
    pub fn validate(&self) -> Result<()> {
        let check_speed = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                Err(Error::Config(format!(
                    "wind {name} must be positive, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            Self::Constant { speed } => check_speed("speed", *speed),
            Self::Step {
                initial,
                target,
                at,
            } => {
                check_speed("initial", *initial)?;
                check_speed("target", *target)?;
                if !(at.is_finite() && *at >= 0.0) {
                    return Err(Error::Config(format!("step time must be >= 0, got {at}")));
                }
                Ok(())
            }
            Self::Ramp {
                from,
                to,
                start,
                end,
            } => {
                check_speed("from", *from)?;
                check_speed("to", *to)?;
                if !(start.is_finite() && end.is_finite() && *start >= 0.0 && end > start) {
                    return Err(Error::Config(format!(
                        "ramp needs 0 <= start < end, got [{start}, {end}]"
                    )));
                }
                Ok(())
            }
            Self::Gust {
                base,
                amplitude,
                period,
            } => {
                check_speed("base", *base)?;
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::Config(format!(
                        "gust amplitude must be >= 0, got {amplitude}"
                    )));
                }
                if !(period.is_finite() && *period > 0.0) {
                    return Err(Error::Config(format!(
                        "gust period must be positive, got {period}"
                    )));
                }
                Ok(())
            }
            Self::Turbulent {
                mean,
                intensity,
                cutoff_freq,
                ..
            } => {
                check_speed("mean", *mean)?;
                if !(intensity.is_finite() && (0.0..=0.5).contains(intensity)) {
                    return Err(Error::Config(format!(
                        "turbulence intensity must lie in [0, 0.5], got {intensity}"
                    )));
                }
                if !(cutoff_freq.is_finite() && *cutoff_freq > 0.0) {
                    return Err(Error::Config(format!(
                        "cutoff frequency must be positive, got {cutoff_freq}"
                    )));
                }
                Ok(())
            }
            Self::Trace { .. } => Ok(()),
        }
    }

    /// Realizes the profile over `[0, duration]`.
    pub fn realize(&self, duration: f64) -> Result<WindSignal> {
        self.validate()?;
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Config(format!(
                "duration must be positive, got {duration}"
            )));
        }
        match self {
            Self::Turbulent {
                mean,
                intensity,
                seed,
                cutoff_freq,
            } => {
                let dt = TURBULENCE_GRID_DT;
                let n = (duration / dt).ceil() as usize + 2;
                let phi = (-2.0 * std::f64::consts::PI * cutoff_freq * dt).exp();
                let sigma = intensity * mean;
                let innovation = sigma * (1.0 - phi * phi).sqrt();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut gauss = GaussianSource::new();
                // Start from the stationary distribution so the sample
                // statistics hold from t = 0.
                let mut x = sigma * gauss.next(&mut rng);
                let mut samples = Vec::with_capacity(n);
                for _ in 0..n {
                    samples.push((mean + x).max(WIND_FLOOR));
                    x = phi * x + innovation * gauss.next(&mut rng);
                }
                Ok(WindSignal::Sampled {
                    dt,
                    t0: 0.0,
                    samples,
                })
            }
            Self::Trace { path } => {
                let trace = read_trace(path)?;
                Ok(WindSignal::Irregular { points: trace })
            }
            other => Ok(WindSignal::Analytic(other.clone())),
        }
    }
}

/// Box-Muller standard normal source over a uniform RNG.
struct GaussianSource {
    spare: Option<f64>,
}

impl GaussianSource {
    fn new() -> Self {
        Self { spare: None }
    }

    fn next<R: Rng>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // Draw u1 away from zero so the log stays finite.
        let u1: f64 = loop {
            let u: f64 = rng.gen();
            if u > 1e-300 {
                break u;
            }
        };
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// A realized wind signal, sampleable at any time in its domain.
#[derive(Debug, Clone)]
pub enum WindSignal {
    Analytic(WindProfile),
    /// Uniform grid samples with linear interpolation; constant beyond the
    /// last sample.
    Sampled {
        t0: f64,
        dt: f64,
        samples: Vec<f64>,
    },
    /// Irregular `(t, v)` points with linear interpolation (file traces).
    Irregular {
        points: Vec<(f64, f64)>,
    },
}

impl WindSignal {
    /// Wind speed at time `t` (s). Times before the signal start clamp to
    /// the first value, times beyond the end to the last.
    pub fn sample(&self, t: f64) -> f64 {
        match self {
            Self::Analytic(p) => match p {
                WindProfile::Constant { speed } => *speed,
                WindProfile::Step {
                    initial,
                    target,
                    at,
                } => {
                    if t < *at {
                        *initial
                    } else {
                        *target
                    }
                }
                WindProfile::Ramp {
                    from,
                    to,
                    start,
                    end,
                } => {
                    if t <= *start {
                        *from
                    } else if t >= *end {
                        *to
                    } else {
                        from + (to - from) * (t - start) / (end - start)
                    }
                }
                WindProfile::Gust {
                    base,
                    amplitude,
                    period,
                } => {
                    base + amplitude * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * t / period).cos())
                }
                WindProfile::Turbulent { .. } | WindProfile::Trace { .. } => {
                    unreachable!("realize() replaces these variants")
                }
            },
            Self::Sampled { t0, dt, samples } => {
                let pos = (t - t0) / dt;
                if pos <= 0.0 {
                    return samples[0];
                }
                let i = pos.floor() as usize;
                if i + 1 >= samples.len() {
                    return *samples.last().unwrap();
                }
                let frac = pos - i as f64;
                samples[i] + frac * (samples[i + 1] - samples[i])
            }
            Self::Irregular { points } => {
                if t <= points[0].0 {
                    return points[0].1;
                }
                let last = points.last().unwrap();
                if t >= last.0 {
                    return last.1;
                }
                let i = points.partition_point(|p| p.0 <= t) - 1;
                let (t0, v0) = points[i];
                let (t1, v1) = points[i + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Reads a `t, v` CSV trace, enforcing strictly increasing time stamps.
pub fn read_trace(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut points = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if idx == 0 && trimmed.starts_with('t') {
            let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if cols != ["t", "v"] {
                return Err(Error::CsvParse {
                    path: name,
                    line: 1,
                    msg: format!("expected header [\"t\", \"v\"], got {cols:?}"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::CsvParse {
                path: name,
                line: idx + 1,
                msg: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let t: f64 = fields[0].parse().map_err(|_| Error::CsvParse {
            path: name.clone(),
            line: idx + 1,
            msg: format!("cannot parse time `{}`", fields[0]),
        })?;
        let v: f64 = fields[1].parse().map_err(|_| Error::CsvParse {
            path: name.clone(),
            line: idx + 1,
            msg: format!("cannot parse speed `{}`", fields[1]),
        })?;
        if t <= prev_t {
            return Err(Error::CsvParse {
                path: name,
                line: idx + 1,
                msg: format!("time stamps must increase strictly ({t} after {prev_t})"),
            });
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::CsvParse {
                path: name,
                line: idx + 1,
                msg: format!("wind speed must be positive, got {v}"),
            });
        }
        prev_t = t;
        points.push((t, v));
    }
    if points.is_empty() {
        return Err(Error::CsvParse {
            path: name,
            line: 0,
            msg: "trace contains no samples".into(),
        });
    }
    Ok(points)
}

/// Writes a `t, v` CSV trace.
pub fn write_trace(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "t, v")?;
    for (t, v) in points {
        writeln!(f, "{t:.9e}, {v:.9e}")?;
    }
    Ok(())
}
