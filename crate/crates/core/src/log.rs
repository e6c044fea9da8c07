//! Fixed-schema CSV time-series log produced by every simulation run.
//!
//! The column set is part of the tool's external contract: downstream
//! metric extraction and plotting consume these files by header name.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Column names, in file order.
pub const COLUMNS: [&str; 17] = [
    "t",
    "v",
    "v_hat",
    "omega_r",
    "omega_ref_f",
    "beta",
    "beta_ref_tilde",
    "T_g_tilde",
    "P_g",
    "x_T",
    "x_I",
    "h_a1",
    "h_a2",
    "h_a3",
    "h_a4",
    "f1",
    "f2",
];

/// One sampling instant of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    /// Simulation time in seconds.
    pub t: f64,
    /// True hub wind speed in m/s.
    pub v: f64,
    /// Estimated wind speed in m/s.
    pub v_hat: f64,
    /// Rotor speed in rad/s.
    pub omega_r: f64,
    /// Filtered rotor-speed reference in rad/s.
    pub omega_ref_f: f64,
    /// Actual collective pitch angle in rad.
    pub beta: f64,
    /// Filtered pitch reference in rad.
    pub beta_ref_tilde: f64,
    /// Filtered generator-torque command in N*m.
    pub t_g_tilde: f64,
    /// Generator power in per-unit of rated power.
    pub p_g: f64,
    /// Tower-top fore-aft deflection in m.
    pub x_t: f64,
    /// Tracking integrator state.
    pub x_i: f64,
    /// Coupling-filter vertex memberships (convex, sum to one).
    pub h_a: [f64; 4],
    /// Pitch pass-through factor in [0, 1].
    pub f1: f64,
    /// Torque scaling factor in [1, f2_max].
    pub f2: f64,
}

impl LogRow {
    fn values(&self) -> [f64; 17] {
        [
            self.t,
            self.v,
            self.v_hat,
            self.omega_r,
            self.omega_ref_f,
            self.beta,
            self.beta_ref_tilde,
            self.t_g_tilde,
            self.p_g,
            self.x_t,
            self.x_i,
            self.h_a[0],
            self.h_a[1],
            self.h_a[2],
            self.h_a[3],
            self.f1,
            self.f2,
        ]
    }

    fn from_values(vals: &[f64; 17]) -> Self {
        Self {
            t: vals[0],
            v: vals[1],
            v_hat: vals[2],
            omega_r: vals[3],
            omega_ref_f: vals[4],
            beta: vals[5],
            beta_ref_tilde: vals[6],
            t_g_tilde: vals[7],
            p_g: vals[8],
            x_t: vals[9],
            x_i: vals[10],
            h_a: [vals[11], vals[12], vals[13], vals[14]],
            f1: vals[15],
            f2: vals[16],
        }
    }
}

/// In-memory simulation log: a uniformly sampled sequence of rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeriesLog {
    pub rows: Vec<LogRow>,
}

impl TimeSeriesLog {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            rows: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sampling interval inferred from the first two rows.
    pub fn dt(&self) -> Option<f64> {
        (self.rows.len() >= 2).then(|| self.rows[1].t - self.rows[0].t)
    }

    /// Renders the log as CSV text with a header line and 9-digit scientific
    /// notation for every value.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(32 + self.rows.len() * 16 * 18);
        out.push_str(&COLUMNS.join(", "));
        out.push('\n');
        for row in &self.rows {
            let vals = row.values();
            for (i, v) in vals.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{v:.9e}");
            }
            out.push('\n');
        }
        out
    }

    /// Writes the log to a CSV file.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        w.write_all(self.to_csv_string().as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Reads a log back from CSV, validating the header, numeric parsing,
    /// finiteness, and uniform time spacing.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::CsvParse {
            path: path.display().to_string(),
            line: 0,
            msg: format!("cannot open: {e}"),
        })?;
        let reader = BufReader::new(file);
        let mut rows = Vec::new();
        let mut lines = reader.lines().enumerate();

        let header = match lines.next() {
            Some((_, Ok(h))) => h,
            Some((_, Err(e))) => {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: 1,
                    msg: format!("read error: {e}"),
                })
            }
            None => {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: 1,
                    msg: "empty file; expected a header line".into(),
                })
            }
        };
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.len() != COLUMNS.len() {
            return Err(Error::CsvParse {
                path: path.display().to_string(),
                line: 1,
                msg: format!("expected {} columns, found {}", COLUMNS.len(), names.len()),
            });
        }
        for (i, (found, expected)) in names.iter().zip(COLUMNS.iter()).enumerate() {
            if found != expected {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: 1,
                    msg: format!("column {} is named {found:?}, expected {expected:?}", i + 1),
                });
            }
        }

        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::CsvParse {
                path: path.display().to_string(),
                line: line_no,
                msg: format!("read error: {e}"),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut vals = [0.0_f64; 17];
            let mut count = 0;
            for (i, field) in line.split(',').enumerate() {
                if i >= 17 {
                    count = i + 1;
                    continue;
                }
                vals[i] = field.trim().parse::<f64>().map_err(|e| Error::CsvParse {
                    path: path.display().to_string(),
                    line: line_no,
                    msg: format!("column {:?}: {e}", COLUMNS[i]),
                })?;
                count = i + 1;
            }
            if count != 17 {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: line_no,
                    msg: format!("expected 17 fields, found {count}"),
                });
            }
            if let Some(bad) = vals.iter().position(|v| !v.is_finite()) {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: line_no,
                    msg: format!("column {:?} is not finite", COLUMNS[bad]),
                });
            }
            rows.push(LogRow::from_values(&vals));
        }

        // Uniform spacing check: every interval must match the first to
        // within a relative sliver, so interpolation downstream is safe.
        if rows.len() >= 3 {
            let dt = rows[1].t - rows[0].t;
            if dt <= 0.0 {
                return Err(Error::CsvParse {
                    path: path.display().to_string(),
                    line: 3,
                    msg: format!("time must increase; first step is {dt}"),
                });
            }
            for (i, pair) in rows.windows(2).enumerate() {
                let step = pair[1].t - pair[0].t;
                if (step - dt).abs() > 1e-6 * dt.max(1.0) {
                    return Err(Error::CsvParse {
                        path: path.display().to_string(),
                        line: i + 3,
                        msg: format!("non-uniform sampling: step {step} differs from {dt}"),
                    });
                }
            }
        }

        Ok(Self { rows })
    }
}
