//! Tabulated Fresnel coefficients used as an opaque coefficient source.
//!
//! CSV schema (header required, column order free):
//!
//! ```text
//! freq_type,freq_rad_s,k_per_m,pol,re_r_fwd,im_r_fwd,re_r_bwd,im_r_bwd,re_t_fwd,im_t_fwd,re_t_bwd,im_t_bwd
//! ```
//!
//! `freq_type` is `real` or `imag`, `pol` is `p` or `s`. The backward columns
//! may be missing or left empty; the opaque stack then fills them. Each
//! `(freq_type, pol)` block must form a complete rectangular grid.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::expr::{evaluate, CoeffSource, Knots, SourceCoeffs, StackExpr};
use crate::kinematics::{Frequency, Polarization, TransverseMode};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 12] = [
    "freq_type",
    "freq_rad_s",
    "k_per_m",
    "pol",
    "re_r_fwd",
    "im_r_fwd",
    "re_r_bwd",
    "im_r_bwd",
    "re_t_fwd",
    "im_t_fwd",
    "re_t_bwd",
    "im_t_bwd",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreqKind {
    Real,
    Imaginary,
}

impl FreqKind {
    fn of(freq: Frequency) -> Self {
        match freq {
            Frequency::Real(_) => FreqKind::Real,
            Frequency::Imaginary(_) => FreqKind::Imaginary,
        }
    }

    fn label(self) -> &'static str {
        match self {
            FreqKind::Real => "real",
            FreqKind::Imaginary => "imag",
        }
    }

    fn point(self, f: f64) -> Frequency {
        match self {
            FreqKind::Real => Frequency::Real(f),
            FreqKind::Imaginary => Frequency::Imaginary(f),
        }
    }
}

fn pol_key(p: Polarization) -> u8 {
    match p {
        Polarization::P => 0,
        Polarization::S => 1,
    }
}

/// One rectangular block: coefficients on `freqs × ks` for one frequency
/// kind and polarization. `values[i * ks.len() + j]` holds
/// `[r_fwd, r_bwd, t_fwd, t_bwd]` at `(freqs[i], ks[j])`.
#[derive(Debug, Clone, PartialEq)]
struct Grid {
    kind: FreqKind,
    pol: Polarization,
    freqs: Vec<f64>,
    ks: Vec<f64>,
    values: Vec<[Complex64; 4]>,
    has_r_bwd: bool,
    has_t_bwd: bool,
}

impl Grid {
    fn cell(axis: &[f64], x: f64) -> Option<(usize, f64)> {
        let n = axis.len();
        if !(x >= axis[0] && x <= axis[n - 1]) {
            return None;
        }
        let i = (axis.partition_point(|&a| a <= x)).clamp(1, n - 1) - 1;
        Some((i, x))
    }

    fn interpolate(&self, freq: f64, k: f64) -> Result<[Complex64; 4]> {
        let out_of_range = || {
            Error::Coverage(format!(
                "{} {}-pol table covers freq [{:e}, {:e}] rad/s, k [{:e}, {:e}] 1/m; requested freq={:e}, k={:e}",
                self.kind.label(),
                self.pol,
                self.freqs[0],
                self.freqs[self.freqs.len() - 1],
                self.ks[0],
                self.ks[self.ks.len() - 1],
                freq,
                k
            ))
        };
        let (i, _) = Self::cell(&self.freqs, freq).ok_or_else(out_of_range)?;
        let (j, _) = Self::cell(&self.ks, k).ok_or_else(out_of_range)?;
        let (f0, f1) = (self.freqs[i].ln(), self.freqs[i + 1].ln());
        let u = ((freq.ln() - f0) / (f1 - f0)).clamp(0.0, 1.0);
        let v = ((k - self.ks[j]) / (self.ks[j + 1] - self.ks[j])).clamp(0.0, 1.0);
        let nk = self.ks.len();
        let at = |a: usize, b: usize| &self.values[a * nk + b];
        let (v00, v01, v10, v11) = (at(i, j), at(i, j + 1), at(i + 1, j), at(i + 1, j + 1));
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for c in 0..4 {
            out[c] = v00[c] * ((1.0 - u) * (1.0 - v))
                + v01[c] * ((1.0 - u) * v)
                + v10[c] * (u * (1.0 - v))
                + v11[c] * (u * v);
        }
        Ok(out)
    }
}

/// Sampled coefficients on `(frequency, k)` grids, bilinear in
/// `(ln frequency, k)`. Requests outside a grid are coverage errors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffTable {
    grids: Vec<Grid>,
}

type Row = (f64, f64, [Option<Complex64>; 4]);

fn finite_key(x: f64) -> u64 {
    // positive floats order like their bit patterns; fold -0.0 into 0.0
    (x + 0.0).to_bits()
}

impl CoeffTable {
    /// Evaluates a stack on a full grid for each requested polarization.
    pub fn sample(stack: &StackExpr, kind: FreqKind, freqs: &[f64], ks: &[f64], pols: &[Polarization]) -> Result<Self> {
        check_axis(freqs, "frequency", true)?;
        check_axis(ks, "k", false)?;
        let mut grids = Vec::new();
        for &pol in pols {
            let mut values = Vec::with_capacity(freqs.len() * ks.len());
            for &f in freqs {
                for &k in ks {
                    let mode = TransverseMode::new(pol, k, kind.point(f))?;
                    let fs = evaluate(stack, &mode)?;
                    values.push(fs.coefficients());
                }
            }
            grids.push(Grid {
                kind,
                pol,
                freqs: freqs.to_vec(),
                ks: ks.to_vec(),
                values,
                has_r_bwd: true,
                has_t_bwd: true,
            });
        }
        Ok(Self { grids })
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let required = |name: &str| col(name).ok_or_else(|| Error::Parse(format!("missing column `{name}`")));
        let c_type = required("freq_type")?;
        let c_freq = required("freq_rad_s")?;
        let c_k = required("k_per_m")?;
        let c_pol = required("pol")?;
        let pairs = [
            (required("re_r_fwd")?, required("im_r_fwd")?),
            (
                col("re_r_bwd").unwrap_or(usize::MAX),
                col("im_r_bwd").unwrap_or(usize::MAX),
            ),
            (required("re_t_fwd")?, required("im_t_fwd")?),
            (
                col("re_t_bwd").unwrap_or(usize::MAX),
                col("im_t_bwd").unwrap_or(usize::MAX),
            ),
        ];

        let mut blocks: BTreeMap<(FreqKind, u8), Vec<Row>> = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |what: &str| Error::Parse(format!("line {line}: {what}"));
            let field = |i: usize| rec.get(i).unwrap_or("");
            let num = |i: usize, name: &str| -> Result<f64> {
                field(i)
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("cannot parse `{name}` from `{}`", field(i))))
            };
            let kind = match field(c_type) {
                "real" => FreqKind::Real,
                "imag" => FreqKind::Imaginary,
                other => return Err(bad(&format!("freq_type must be real|imag, got `{other}`"))),
            };
            let pol = match field(c_pol) {
                "p" => Polarization::P,
                "s" => Polarization::S,
                other => return Err(bad(&format!("pol must be p|s, got `{other}`"))),
            };
            let freq = num(c_freq, "freq_rad_s")?;
            let k = num(c_k, "k_per_m")?;
            if !(freq > 0.0 && freq.is_finite()) || !(k >= 0.0 && k.is_finite()) {
                return Err(bad("need freq_rad_s > 0 and k_per_m >= 0"));
            }
            let mut vals = [None; 4];
            for (slot, &(re, im)) in vals.iter_mut().zip(pairs.iter()) {
                let (fr, fi) = (field(re), field(im));
                if fr.is_empty() && fi.is_empty() {
                    continue;
                }
                let re = fr.parse::<f64>().map_err(|_| bad(&format!("bad number `{fr}`")))?;
                let im = fi.parse::<f64>().map_err(|_| bad(&format!("bad number `{fi}`")))?;
                *slot = Some(Complex64::new(re, im));
            }
            if vals[0].is_none() || vals[2].is_none() {
                return Err(bad("forward coefficients are required"));
            }
            blocks.entry((kind, pol_key(pol))).or_default().push((freq, k, vals));
        }
        if blocks.is_empty() {
            return Err(Error::Parse("coefficient table has no rows".into()));
        }

        let mut grids = Vec::new();
        for ((kind, pk), rows) in blocks {
            let pol = if pk == 0 { Polarization::P } else { Polarization::S };
            grids.push(Self::assemble(kind, pol, rows)?);
        }
        Ok(Self { grids })
    }

    fn assemble(kind: FreqKind, pol: Polarization, rows: Vec<Row>) -> Result<Grid> {
        let mut cells: BTreeMap<(u64, u64), [Option<Complex64>; 4]> = BTreeMap::new();
        let mut freqs = BTreeMap::new();
        let mut ks = BTreeMap::new();
        for (f, k, v) in rows {
            freqs.insert(finite_key(f), f);
            ks.insert(finite_key(k), k + 0.0);
            if cells.insert((finite_key(f), finite_key(k)), v).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate {} {pol}-pol entry at freq={f:e}, k={k:e}",
                    kind.label()
                )));
            }
        }
        let freqs: Vec<f64> = freqs.into_values().collect();
        let ks: Vec<f64> = ks.into_values().collect();
        let label = format!("{} {pol}-pol block", kind.label());
        if freqs.len() < 2 || ks.len() < 2 {
            return Err(Error::Parse(format!(
                "{label} needs at least two frequencies and two k values"
            )));
        }
        if cells.len() != freqs.len() * ks.len() {
            return Err(Error::Parse(format!(
                "{label} is not a complete grid ({} entries for {} x {})",
                cells.len(),
                freqs.len(),
                ks.len()
            )));
        }
        let has_r_bwd = cells.values().all(|v| v[1].is_some());
        let has_t_bwd = cells.values().all(|v| v[3].is_some());
        let mixed = |idx: usize| {
            let any = cells.values().any(|v| v[idx].is_some());
            let all = cells.values().all(|v| v[idx].is_some());
            any && !all
        };
        if mixed(1) || mixed(3) {
            return Err(Error::Parse(format!(
                "{label} has backward coefficients on some rows only"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        // BTreeMap iteration is (freq, k) lexicographic, matching the layout
        let values = cells
            .into_values()
            .map(|v| {
                [
                    v[0].unwrap_or(zero),
                    v[1].unwrap_or(zero),
                    v[2].unwrap_or(zero),
                    v[3].unwrap_or(zero),
                ]
            })
            .collect();
        Ok(Grid {
            kind,
            pol,
            freqs,
            ks,
            values,
            has_r_bwd,
            has_t_bwd,
        })
    }

    /// Writes the table in the CSV schema with 17 significant digits. Missing
    /// backward coefficients are written as empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        wtr.write_record(CSV_COLUMNS).map_err(io)?;
        let num = |x: f64| format!("{x:.16e}");
        for g in &self.grids {
            for (i, &f) in g.freqs.iter().enumerate() {
                for (j, &k) in g.ks.iter().enumerate() {
                    let v = &g.values[i * g.ks.len() + j];
                    let mut rec = vec![g.kind.label().to_string(), num(f), num(k), g.pol.to_string()];
                    for (c, present) in [(0, true), (1, g.has_r_bwd), (2, true), (3, g.has_t_bwd)] {
                        if present {
                            rec.push(num(v[c].re));
                            rec.push(num(v[c].im));
                        } else {
                            rec.push(String::new());
                            rec.push(String::new());
                        }
                    }
                    wtr.write_record(&rec).map_err(io)?;
                }
            }
        }
        wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Drops the backward columns, as if the source had only measured
    /// forward coefficients.
    pub fn forward_only(mut self) -> Self {
        for g in &mut self.grids {
            g.has_r_bwd = false;
            g.has_t_bwd = false;
        }
        self
    }

    fn grid(&self, kind: FreqKind, pol: Polarization) -> Option<&Grid> {
        self.grids.iter().find(|g| g.kind == kind && g.pol == pol)
    }
}

fn check_axis(axis: &[f64], name: &str, positive: bool) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::Domain(format!("{name} axis needs at least two points")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("{name} axis must be strictly increasing")));
    }
    let lo_ok = if positive { axis[0] > 0.0 } else { axis[0] >= 0.0 };
    if !lo_ok || !axis[axis.len() - 1].is_finite() {
        return Err(Error::Domain(format!("{name} axis out of range")));
    }
    Ok(())
}

impl CoeffSource for CoeffTable {
    fn coefficients(&self, mode: &TransverseMode) -> Result<SourceCoeffs> {
        let kind = FreqKind::of(mode.freq);
        let grid = self
            .grid(kind, mode.pol)
            .ok_or_else(|| Error::Coverage(format!("table has no {} {}-pol block", kind.label(), mode.pol)))?;
        let v = grid.interpolate(mode.freq.magnitude(), mode.k)?;
        Ok(SourceCoeffs {
            r_fwd: v[0],
            t_fwd: v[2],
            r_bwd: grid.has_r_bwd.then_some(v[1]),
            t_bwd: grid.has_t_bwd.then_some(v[3]),
        })
    }

    fn knots(&self, kind: FreqKind) -> Knots {
        self.grids
            .iter()
            .filter(|g| g.kind == kind)
            .fold(Knots::default(), |acc, g| {
                acc.merge(Knots {
                    freqs: g.freqs.clone(),
                    ks: g.ks.clone(),
                })
            })
    }
}
