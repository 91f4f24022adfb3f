//! Two-axis parameter sweeps of the complex shift and deterministic CSV
//! emission.
//!
//! Grid cells are independent pure evaluations; they are computed in
//! parallel and assembled in row-major order (axis2 fastest) afterwards, so
//! the output bytes do not depend on the thread count.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use cavshift::intermode::upsilon_ab_total;
use cavshift::spin_shift::upsilon_al;
use cavshift::ModelError;

use crate::config::{AxisSpec, Mode, RunConfig};
use crate::CliError;

/// One evaluated grid cell. A pole cell keeps the run alive and is emitted
/// as empty fields with the flag set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub upsilon_al: Complex64,
    pub upsilon_ab: Complex64,
    pub pole: bool,
}

impl Cell {
    pub fn total(&self) -> Complex64 {
        self.upsilon_al + self.upsilon_ab
    }
}

/// An evaluated sweep: axis definitions, row-major samples (axis2 varies
/// fastest) and the config hash as provenance.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub cells: Vec<Cell>,
    pub config_hash: u64,
}

fn is_pole(err: &ModelError) -> bool {
    matches!(
        err,
        ModelError::Pole(_)
            | ModelError::SingularSusceptibility { .. }
            | ModelError::UndampedResonance
            | ModelError::DegenerateFrequency
    )
}

fn evaluate_cell(cfg: &RunConfig, x1: f64, x2: f64) -> Result<Cell, CliError> {
    let (base, upsilon_ab) = match cfg.mode() {
        Mode::Normalized => (cfg.spin_params_at(x1, x2)?, Complex64::new(0.0, 0.0)),
        Mode::Si => {
            let omega_l = TAU * x1;
            let omega_p = TAU * x2;
            let f_1 = cfg.raw.f_1.ok_or_else(|| {
                CliError::Config("missing required key 'f_1'".into())
            })?;
            let mut base = cfg.spin_params_at(omega_p - omega_l, TAU * f_1)?;
            base.omega_l = Some(omega_l);
            let (omega_b, gamma_b, drive) = cfg.spiral(omega_p - TAU * cfg.raw.f_b.unwrap())?;
            let ab = match upsilon_ab_total(&drive, gamma_b, base.cavity.omega, omega_b) {
                Ok(t) => t.shift.upsilon(),
                Err(e) if is_pole(&e) => {
                    return Ok(Cell {
                        upsilon_al: Complex64::new(0.0, 0.0),
                        upsilon_ab: Complex64::new(0.0, 0.0),
                        pole: true,
                    })
                }
                Err(e) => return Err(CliError::Numeric(e)),
            };
            (base, ab)
        }
    };
    match upsilon_al(&base) {
        Ok(r) => Ok(Cell { upsilon_al: r.shift.upsilon(), upsilon_ab, pole: false }),
        Err(e) if is_pole(&e) => Ok(Cell {
            upsilon_al: Complex64::new(0.0, 0.0),
            upsilon_ab: Complex64::new(0.0, 0.0),
            pole: true,
        }),
        Err(e) => Err(CliError::Numeric(e)),
    }
}

/// Evaluate the configured map: per grid point the spin shift, the
/// intermode shift (si mode; zero in normalized mode, which has no spiral
/// branch) and their sum.
///
/// Axis names are pinned per mode: (f_L, f_p) in si, (delta_pl, omega_1) in
/// normalized.
pub fn map_sweep(cfg: &RunConfig) -> Result<SweepGrid, CliError> {
    let (axis1, axis2) = cfg.axes()?;
    let expected = match cfg.mode() {
        Mode::Si => ("f_L", "f_p"),
        Mode::Normalized => ("delta_pl", "omega_1"),
    };
    if (axis1.name.as_str(), axis2.name.as_str()) != expected {
        return Err(CliError::Config(format!(
            "map axes must be ('{}', '{}') in this mode, got ('{}', '{}')",
            expected.0, expected.1, axis1.name, axis2.name
        )));
    }
    // Fail fast on missing keys before fanning out.
    cfg.spin_params_at(0.0, 0.0)?;
    if cfg.mode() == Mode::Si {
        cfg.spiral(0.0)?;
        if cfg.raw.f_1.is_none() {
            return Err(CliError::Config("missing required key 'f_1'".into()));
        }
    }

    let n1 = axis1.count;
    let n2 = axis2.count;
    let cells: Vec<Result<Cell, CliError>> = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let x1 = axis1.value(idx / n2);
            let x2 = axis2.value(idx % n2);
            evaluate_cell(cfg, x1, x2)
        })
        .collect();
    let mut out = Vec::with_capacity(n1 * n2);
    for cell in cells {
        out.push(cell?);
    }
    Ok(SweepGrid { axis1, axis2, cells: out, config_hash: cfg.hash() })
}

/// Full-precision (17 significant digits) field formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const MAP_HEADER: &str = "axis1,axis2,re_upsilon_aL,im_upsilon_aL,re_upsilon_ab,im_upsilon_ab,re_upsilon_a,im_upsilon_a,pole";

/// Write the grid as CSV: header row, one row per cell, axis2-major order,
/// LF endings, '.' decimal. Pole cells carry empty shift fields and flag 1.
pub fn write_map_csv<W: Write>(grid: &SweepGrid, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{MAP_HEADER}")?;
    let n2 = grid.axis2.count;
    for (idx, cell) in grid.cells.iter().enumerate() {
        let x1 = grid.axis1.value(idx / n2);
        let x2 = grid.axis2.value(idx % n2);
        if cell.pole {
            writeln!(w, "{},{},,,,,,,1", fmt_f64(x1), fmt_f64(x2))?;
        } else {
            let total = cell.total();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},0",
                fmt_f64(x1),
                fmt_f64(x2),
                fmt_f64(cell.upsilon_al.re),
                fmt_f64(cell.upsilon_al.im),
                fmt_f64(cell.upsilon_ab.re),
                fmt_f64(cell.upsilon_ab.im),
                fmt_f64(total.re),
                fmt_f64(total.im),
            )?;
        }
    }
    Ok(())
}
