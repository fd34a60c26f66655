use std::f64::consts::PI;

use layerstack::constants::C;
use layerstack::stacks::identities::transmittances;
use layerstack::{Frequency, LayerStack, Polarization, TransverseMode};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::sweep::{Axis, SweepSpec};

/// Which quantity is held fixed for the non-swept variable.
#[derive(Debug, Clone, Copy)]
pub struct Fixed {
    /// Vacuum wavelength, m, for angle and k sweeps.
    pub wavelength: Option<f64>,
    /// Incidence angle, degrees, for wavelength and frequency sweeps.
    pub angle: Option<f64>,
    /// Transverse wavenumber, 1/m, for wavelength and frequency sweeps.
    pub k: Option<f64>,
}

/// `k = Re n_left(ω) · (ω/c) · sin θ`.
fn k_from_angle(stack: &LayerStack, omega: f64, degrees: f64) -> Result<f64, CliError> {
    if !(0.0..90.0).contains(&degrees) {
        return Err(CliError::usage(format!(
            "incidence angle must lie in [0, 90) degrees, got {degrees}"
        )));
    }
    let n = stack
        .left
        .index(Frequency::Real(omega))
        .map_err(|e| CliError::engine(e, &format!("left ambient at omega={omega:e} rad/s")))?;
    Ok(n.re * omega / C * (degrees * PI / 180.0).sin())
}

fn point(stack: &LayerStack, sweep: &SweepSpec, fixed: &Fixed, x: f64) -> Result<(f64, f64), CliError> {
    let omega_of = |lambda: f64| 2.0 * PI * C / lambda;
    match sweep.axis {
        Axis::Wavelength | Axis::Frequency => {
            let omega = if sweep.axis == Axis::Wavelength { omega_of(x) } else { x };
            let k = match (fixed.k, fixed.angle) {
                (Some(_), Some(_)) => return Err(CliError::usage("give at most one of --k and --angle")),
                (Some(k), None) => k,
                (None, a) => k_from_angle(stack, omega, a.unwrap_or(0.0))?,
            };
            Ok((omega, k))
        }
        Axis::Angle | Axis::K => {
            let lambda = fixed
                .wavelength
                .ok_or_else(|| CliError::usage(format!("a {} sweep needs --wavelength", sweep.axis)))?;
            let omega = omega_of(lambda);
            let k = if sweep.axis == Axis::Angle {
                k_from_angle(stack, omega, x)?
            } else {
                x
            };
            Ok((omega, k))
        }
        other => Err(CliError::usage(format!("reflect cannot sweep {other}"))),
    }
}

pub fn columns(axis: Axis, pols: &[Polarization]) -> Vec<String> {
    let mut cols = vec![axis.column().to_string()];
    for q in pols {
        for c in ["re_r", "im_r", "re_t", "im_t", "R", "T"] {
            cols.push(format!("{c}_{q}"));
        }
    }
    cols
}

pub fn run(stack: &LayerStack, sweep: &SweepSpec, fixed: &Fixed, pols: &[Polarization]) -> Result<Table, CliError> {
    let xs = sweep.values();
    let rows: Vec<Result<Vec<Cell>, CliError>> = xs
        .par_iter()
        .map(|&x| {
            let (omega, k) = point(stack, sweep, fixed, x)?;
            let mut row = vec![Cell::Float(x)];
            for &q in pols {
                let mode = TransverseMode::real(q, k, omega)
                    .map_err(|e| CliError::engine(e, &format!("{} = {x:e}", sweep.axis)))?;
                let fs = stack
                    .evaluate(&mode)
                    .map_err(|e| CliError::engine(e, &mode.to_string()))?;
                let t = match transmittances(&fs, &mode) {
                    Ok((t_fwd, _)) => t_fwd,
                    Err(layerstack::Error::UndefinedTransmittance(_)) => f64::NAN,
                    Err(e) => return Err(CliError::engine(e, &mode.to_string())),
                };
                row.extend(
                    [
                        fs.r_fwd.re,
                        fs.r_fwd.im,
                        fs.t_fwd.re,
                        fs.t_fwd.im,
                        fs.r_fwd.norm_sqr(),
                        t,
                    ]
                    .map(Cell::Float),
                );
            }
            Ok(row)
        })
        .collect();
    let mut table = Table::new(columns(sweep.axis, pols));
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}
