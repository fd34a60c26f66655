use std::str::FromStr;

use layerstack::casimir::{force_closed, force_direct, two_body_force, CavityConfig, Estimate};
use rayon::prelude::*;

use crate::document::Cavity;
use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::sweep::{Axis, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    Closed,
    Both,
}

impl FromStr for Route {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "direct" => Ok(Route::Direct),
            "closed" => Ok(Route::Closed),
            "both" => Ok(Route::Both),
            other => Err(CliError::usage(format!("unknown route `{other}` (direct|closed|both)"))),
        }
    }
}

/// What stays fixed while d1 is swept in a three-body cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hold {
    /// d1 + d2 (the slab moves between fixed mirrors).
    Total,
    D2,
}

impl FromStr for Hold {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "total" => Ok(Hold::Total),
            "d2" => Ok(Hold::D2),
            other => Err(CliError::usage(format!("unknown --hold `{other}` (total|d2)"))),
        }
    }
}

/// Cells of one sweep point plus its notes.
type Row = (Vec<Cell>, Vec<String>);

/// Result of one route at one point; unconverged estimates are kept.
struct Outcome {
    estimate: Estimate,
    converged: bool,
}

fn settle(result: layerstack::Result<Estimate>, context: &str, notes: &mut Vec<String>) -> Result<Outcome, CliError> {
    match result {
        Ok(estimate) => Ok(Outcome {
            estimate,
            converged: true,
        }),
        Err(layerstack::Error::Convergence {
            estimate,
            error_estimate,
            diagnostics,
        }) => {
            notes.push(format!("{context}: not converged ({diagnostics})"));
            Ok(Outcome {
                estimate: Estimate {
                    value: estimate,
                    error: error_estimate,
                    evaluations: 0,
                },
                converged: false,
            })
        }
        Err(e) => Err(CliError::engine(e, context)),
    }
}

fn status(outcomes: &[&Outcome]) -> Cell {
    if outcomes.iter().all(|o| o.converged) {
        "ok"
    } else {
        "unconverged"
    }
    .into()
}

fn gaps(config: &CavityConfig, sweep: Option<&SweepSpec>, hold: Hold) -> Result<Vec<(f64, f64)>, CliError> {
    let Some(sweep) = sweep else {
        return Ok(vec![(config.d1, config.d2)]);
    };
    let total = config.d1 + config.d2;
    sweep
        .values()
        .into_iter()
        .map(|d1| {
            let d2 = match hold {
                Hold::Total => total - d1,
                Hold::D2 => config.d2,
            };
            if !(d1 > 0.0 && d2 > 0.0) {
                return Err(CliError::usage(format!(
                    "d1 = {d1:e} m leaves no room for the slab (d1 + d2 = {total:e} m); use --hold d2 or a smaller range"
                )));
            }
            Ok((d1, d2))
        })
        .collect()
}

/// Table plus diagnostics for unconverged points.
pub struct Run {
    pub table: Table,
    pub notes: Vec<String>,
}

pub fn run(cavity: &Cavity, sweep: Option<&SweepSpec>, route: Route, hold: Hold) -> Result<Run, CliError> {
    if let Some(s) = sweep {
        if s.axis != Axis::Separation {
            return Err(CliError::usage(format!("casimir sweeps separation, not {}", s.axis)));
        }
    }
    match cavity {
        Cavity::Three(config) => three_body(config, sweep, route, hold),
        Cavity::Two {
            mirror1,
            mirror2,
            d,
            medium,
            settings,
        } => {
            if route != Route::Direct {
                return Err(CliError::usage(
                    "a cavity without [slab] has a single route; use --route direct",
                ));
            }
            let ds = sweep.map_or(vec![*d], |s| s.values());
            let rows: Vec<Result<Row, CliError>> = ds
                .par_iter()
                .map(|&d| {
                    let mut notes = Vec::new();
                    let o = settle(
                        two_body_force(mirror1, mirror2, d, medium, settings),
                        &format!("d = {d:e} m"),
                        &mut notes,
                    )?;
                    let row = vec![
                        d.into(),
                        o.estimate.value.into(),
                        o.estimate.error.into(),
                        status(&[&o]),
                    ];
                    Ok((row, notes))
                })
                .collect();
            collect(Table::new(["d_m", "force_pa", "error_pa", "status"]), rows)
        }
    }
}

fn three_body(config: &CavityConfig, sweep: Option<&SweepSpec>, route: Route, hold: Hold) -> Result<Run, CliError> {
    let points = gaps(config, sweep, hold)?;
    let rows: Vec<Result<Row, CliError>> = points
        .par_iter()
        .map(|&(d1, d2)| {
            let c = config.with_gaps(d1, d2);
            let ctx = format!("d1 = {d1:e} m, d2 = {d2:e} m");
            let mut notes = Vec::new();
            let mut row: Vec<Cell> = vec![d1.into(), d2.into()];
            match route {
                Route::Direct | Route::Closed => {
                    let result = if route == Route::Direct {
                        force_direct(&c)
                    } else {
                        force_closed(&c)
                    };
                    let o = settle(result, &ctx, &mut notes)?;
                    row.extend([o.estimate.value.into(), o.estimate.error.into(), status(&[&o])]);
                }
                Route::Both => {
                    let a = settle(force_direct(&c), &format!("{ctx}, direct"), &mut notes)?;
                    let b = settle(force_closed(&c), &format!("{ctx}, closed"), &mut notes)?;
                    let (fa, fb) = (a.estimate.value, b.estimate.value);
                    let scale = fa.abs().max(fb.abs());
                    let rel = if scale == 0.0 { 0.0 } else { (fa - fb).abs() / scale };
                    row.extend([
                        fa.into(),
                        a.estimate.error.into(),
                        fb.into(),
                        b.estimate.error.into(),
                        rel.into(),
                        status(&[&a, &b]),
                    ]);
                }
            }
            Ok((row, notes))
        })
        .collect();
    let columns: &[&str] = match route {
        Route::Both => &[
            "d1_m",
            "d2_m",
            "force_direct_pa",
            "error_direct_pa",
            "force_closed_pa",
            "error_closed_pa",
            "relative_difference",
            "status",
        ],
        _ => &["d1_m", "d2_m", "force_pa", "error_pa", "status"],
    };
    collect(Table::new(columns.iter().copied()), rows)
}

fn collect(mut table: Table, rows: Vec<Result<Row, CliError>>) -> Result<Run, CliError> {
    let mut notes = Vec::new();
    for row in rows {
        let (row, n) = row?;
        table.push(row);
        notes.extend(n);
    }
    Ok(Run { table, notes })
}
