use layerstack::bragg::{doubling_reaches, nearest_doubling_count, reflection, BraggMethod, BraggSpec, Reflection};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub n1: f64,
    pub n2: f64,
    pub wavelength: f64,
}

fn one(params: &Params, count: usize, method: BraggMethod) -> Result<Reflection, CliError> {
    if method == BraggMethod::Double && !doubling_reaches(count) {
        return Err(CliError::Unreachable {
            message: format!(
                "N = {count} is not reachable by doubling (N = 2*2^m); nearest reachable N = {}",
                nearest_doubling_count(count)
            ),
        });
    }
    let spec =
        BraggSpec::new(params.n1, params.n2, count, params.wavelength).map_err(|e| CliError::usage(e.to_string()))?;
    reflection(&spec, method).map_err(|e| CliError::engine(e, &format!("N = {count}, method {method}")))
}

pub fn run(params: &Params, counts: &[usize], method: BraggMethod) -> Result<Table, CliError> {
    // report the first unreachable count before doing any work
    if method == BraggMethod::Double {
        if let Some(&n) = counts.iter().find(|&&n| !doubling_reaches(n)) {
            one(params, n, method)?;
        }
    }
    let rows: Vec<Result<Vec<Cell>, CliError>> = counts
        .par_iter()
        .map(|&n| {
            let r = one(params, n, method)?;
            Ok(vec![
                n.into(),
                r.value.into(),
                (r.value * r.value).into(),
                r.deficit.into(),
            ])
        })
        .collect();
    let mut table = Table::new(["N", "R", "reflectivity", "one_minus_abs_R"]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// All four methods side by side. Returns the table and the largest pairwise
/// deviation of `R` over all rows.
pub fn compare(params: &Params, counts: &[usize], tolerance: f64) -> Result<(Table, f64), CliError> {
    let rows: Vec<Result<(Vec<Cell>, f64), CliError>> = counts
        .par_iter()
        .map(|&n| {
            let mut values = Vec::new();
            let mut row: Vec<Cell> = vec![n.into()];
            for method in BraggMethod::ALL {
                if method == BraggMethod::Double && !doubling_reaches(n) {
                    row.push(Cell::Empty);
                    continue;
                }
                let r = one(params, n, method)?;
                values.push(r.value);
                row.push(r.value.into());
            }
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let dev = hi - lo;
            row.push(dev.into());
            row.push(if dev <= tolerance { "ok" } else { "fail" }.into());
            Ok((row, dev))
        })
        .collect();
    let mut cols = vec!["N".to_string()];
    cols.extend(BraggMethod::ALL.iter().map(|m| format!("R_{m}")));
    cols.push("max_deviation".into());
    cols.push("status".into());
    let mut table = Table::new(cols);
    let mut worst = 0.0f64;
    for row in rows {
        let (row, dev) = row?;
        worst = worst.max(dev);
        table.push(row);
    }
    Ok((table, worst))
}
