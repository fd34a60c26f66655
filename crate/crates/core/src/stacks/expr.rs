use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use super::fresnel_set::{interface_coeffs, join, FresnelSet};
use super::table::FreqKind;
use crate::kinematics::{normal_wavenumber, propagation_factor, TransverseMode};
use crate::materials::MaterialModel;
use crate::{Error, Result};

/// Coefficients produced by an opaque source. Backward values may be absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceCoeffs {
    pub r_fwd: Complex64,
    pub t_fwd: Complex64,
    pub r_bwd: Option<Complex64>,
    pub t_bwd: Option<Complex64>,
}

/// Anything that can report the Fresnel coefficients of a stack mode by
/// mode: measured tables, nonlocal models, other solvers.
pub trait CoeffSource: Send + Sync + fmt::Debug {
    fn coefficients(&self, mode: &TransverseMode) -> Result<SourceCoeffs>;

    /// Points where the coefficients may not be smooth, such as the grid
    /// lines of tabulated data. Integrators start their panels there.
    fn knots(&self, _kind: FreqKind) -> Knots {
        Knots::default()
    }
}

/// Sorted frequency and transverse-wavenumber break points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Knots {
    pub freqs: Vec<f64>,
    pub ks: Vec<f64>,
}

impl Knots {
    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty() && self.ks.is_empty()
    }

    pub fn merge(mut self, other: Knots) -> Knots {
        self.freqs.extend(other.freqs);
        self.ks.extend(other.ks);
        for v in [&mut self.freqs, &mut self.ks] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        self
    }
}

/// Closure-backed source.
pub struct FnSource<F>(pub F);

impl<F> fmt::Debug for FnSource<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnSource")
    }
}

impl<F> CoeffSource for FnSource<F>
where
    F: Fn(&TransverseMode) -> Result<SourceCoeffs> + Send + Sync,
{
    fn coefficients(&self, mode: &TransverseMode) -> Result<SourceCoeffs> {
        (self.0)(mode)
    }
}

/// A stack known only through its coefficients, bounded by declared local
/// media.
#[derive(Clone)]
pub struct OpaqueStack {
    source: Arc<dyn CoeffSource>,
    left: MaterialModel,
    right: MaterialModel,
    warned: Arc<AtomicBool>,
}

impl fmt::Debug for OpaqueStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpaqueStack")
            .field("source", &self.source)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

impl PartialEq for OpaqueStack {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source) && self.left == other.left && self.right == other.right
    }
}

impl OpaqueStack {
    pub fn new<S: CoeffSource + 'static>(source: S, left: MaterialModel, right: MaterialModel) -> Self {
        Self::from_arc(Arc::new(source), left, right)
    }

    pub fn from_arc(source: Arc<dyn CoeffSource>, left: MaterialModel, right: MaterialModel) -> Self {
        Self {
            source,
            left,
            right,
            warned: Arc::new(AtomicBool::new(false)),
        }
    }

    pub fn from_fn<F>(f: F, left: MaterialModel, right: MaterialModel) -> Self
    where
        F: Fn(&TransverseMode) -> Result<SourceCoeffs> + Send + Sync + 'static,
    {
        Self::new(FnSource(f), left, right)
    }

    pub fn left(&self) -> &MaterialModel {
        &self.left
    }

    pub fn right(&self) -> &MaterialModel {
        &self.right
    }

    pub fn knots(&self, kind: FreqKind) -> Knots {
        self.source.knots(kind)
    }

    /// Full coefficient set. A missing `t_bwd` is filled from the
    /// transmission symmetry `t_{m/j} = (μ_j β_m)/(μ_m β_j) t_{j/m}`; a missing
    /// `r_bwd` is taken equal to `r_fwd`, which assumes a mirror-symmetric
    /// stack.
    pub fn evaluate(&self, mode: &TransverseMode) -> Result<FresnelSet> {
        let src = self.source.coefficients(mode)?;
        let t_bwd = match src.t_bwd {
            Some(t) => t,
            None => {
                self.note_fill("t_bwd from transmission symmetry");
                if self.left == self.right {
                    src.t_fwd
                } else {
                    let (eps_j, mu_j) = self.left.response(mode.freq)?;
                    let (eps_m, mu_m) = self.right.response(mode.freq)?;
                    let q_j = normal_wavenumber(eps_j, mu_j, mode);
                    let q_m = normal_wavenumber(eps_m, mu_m, mode);
                    let den = mu_m * q_j;
                    if den.norm() == 0.0 {
                        return Err(Error::DegenerateMode(format!(
                            "cannot fill t_bwd at grazing incidence ({mode})"
                        )));
                    }
                    src.t_fwd * mu_j * q_m / den
                }
            }
        };
        let r_bwd = match src.r_bwd {
            Some(r) => r,
            None => {
                self.note_fill("r_bwd = r_fwd (mirror-symmetric stack assumed)");
                src.r_fwd
            }
        };
        Ok(FresnelSet {
            r_fwd: src.r_fwd,
            r_bwd,
            t_fwd: src.t_fwd,
            t_bwd,
            left: self.left.clone(),
            right: self.right.clone(),
        })
    }

    fn note_fill(&self, what: &str) {
        if !self.warned.swap(true, Ordering::Relaxed) {
            log::warn!("opaque stack {:?}: filling {what}", self.source);
        }
        log::trace!("opaque stack fill: {what}");
    }
}

/// Recursive description of a multilayer.
#[derive(Debug, Clone, PartialEq)]
pub enum StackExpr {
    /// Bare interface between two local media.
    Interface {
        left: MaterialModel,
        right: MaterialModel,
    },
    /// Homogeneous layer of finite thickness (m).
    Slab {
        material: MaterialModel,
        thickness: f64,
    },
    /// Parts chained left to right; the right medium of each part must be
    /// the left medium of the next. A slab between two parts acts as the
    /// spacer of the join.
    Sequence(Vec<StackExpr>),
    Opaque(OpaqueStack),
}

impl StackExpr {
    pub fn interface(left: MaterialModel, right: MaterialModel) -> Self {
        StackExpr::Interface { left, right }
    }

    pub fn slab(material: MaterialModel, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::Domain(format!("slab thickness must be > 0, got {thickness}")));
        }
        Ok(StackExpr::Slab { material, thickness })
    }

    /// Builds a sequence after checking that the parts chain.
    pub fn sequence(parts: Vec<StackExpr>) -> Result<Self> {
        let s = StackExpr::Sequence(parts);
        s.validate()?;
        Ok(s)
    }

    pub fn opaque(stack: OpaqueStack) -> Self {
        StackExpr::Opaque(stack)
    }

    pub fn left_medium(&self) -> Option<&MaterialModel> {
        match self {
            StackExpr::Interface { left, .. } => Some(left),
            StackExpr::Slab { material, .. } => Some(material),
            StackExpr::Sequence(parts) => parts.first().and_then(|p| p.left_medium()),
            StackExpr::Opaque(o) => Some(&o.left),
        }
    }

    pub fn right_medium(&self) -> Option<&MaterialModel> {
        match self {
            StackExpr::Interface { right, .. } => Some(right),
            StackExpr::Slab { material, .. } => Some(material),
            StackExpr::Sequence(parts) => parts.last().and_then(|p| p.right_medium()),
            StackExpr::Opaque(o) => Some(&o.right),
        }
    }

    /// True when the expression contains no opaque parts.
    pub fn is_local(&self) -> bool {
        match self {
            StackExpr::Opaque(_) => false,
            StackExpr::Sequence(parts) => parts.iter().all(|p| p.is_local()),
            _ => true,
        }
    }

    /// Break points of all opaque parts on the given frequency axis.
    pub fn knots(&self, kind: FreqKind) -> Knots {
        match self {
            StackExpr::Opaque(o) => o.knots(kind).merge(Knots::default()),
            StackExpr::Sequence(parts) => parts.iter().fold(Knots::default(), |acc, p| acc.merge(p.knots(kind))),
            _ => Knots::default(),
        }
    }

    /// Checks slab thicknesses and chaining of every nested sequence.
    pub fn validate(&self) -> Result<()> {
        match self {
            StackExpr::Slab { thickness, .. } if !(*thickness > 0.0 && thickness.is_finite()) => {
                Err(Error::Domain(format!("slab thickness must be > 0, got {thickness}")))
            }
            StackExpr::Sequence(parts) => {
                if parts.is_empty() {
                    return Err(Error::Domain("empty sequence".into()));
                }
                for p in parts {
                    p.validate()?;
                }
                for w in parts.windows(2) {
                    let (a, b) = (w[0].right_medium(), w[1].left_medium());
                    if a != b {
                        return Err(Error::MediumMismatch(format!(
                            "sequence parts do not chain: {} then {}",
                            a.map(|m| m.to_string()).unwrap_or_default(),
                            b.map(|m| m.to_string()).unwrap_or_default()
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Fresnel coefficients of a stack by the stack recursion.
///
/// Sequences are folded left to right; each non-slab part is joined to the
/// accumulated stack across the slab(s) between them (zero thickness when the
/// parts touch). Any grouping of the same layers yields the same result.
pub fn evaluate(stack: &StackExpr, mode: &TransverseMode) -> Result<FresnelSet> {
    match stack {
        StackExpr::Interface { left, right } => interface_coeffs(left, right, mode),
        StackExpr::Slab { material, thickness } => {
            let mut fs = FresnelSet::identity(material.clone());
            let (eps, mu) = material.response(mode.freq)?;
            let p = propagation_factor(normal_wavenumber(eps, mu, mode), *thickness, mode.freq);
            fs.t_fwd = p;
            fs.t_bwd = p;
            Ok(fs)
        }
        StackExpr::Opaque(o) => o.evaluate(mode),
        StackExpr::Sequence(parts) => evaluate_sequence(parts, mode),
    }
}

fn evaluate_sequence(parts: &[StackExpr], mode: &TransverseMode) -> Result<FresnelSet> {
    let mut acc: Option<FresnelSet> = None;
    let mut pending: Option<(MaterialModel, f64)> = None;
    for part in parts {
        if let StackExpr::Slab { material, thickness } = part {
            let current = pending.as_ref().map(|(m, _)| m).or(acc.as_ref().map(|a| &a.right));
            if let Some(cur) = current {
                if cur != material {
                    return Err(Error::MediumMismatch(format!(
                        "slab of {material} follows a stack ending in {cur}"
                    )));
                }
            }
            let d = pending.as_ref().map_or(0.0, |(_, d)| *d) + thickness;
            pending = Some((material.clone(), d));
            continue;
        }
        let fs = evaluate(part, mode)?;
        acc = Some(match (acc.take(), pending.take()) {
            (None, None) => fs,
            (None, Some((m, d))) => join(&FresnelSet::identity(m.clone()), &m, d, &fs, mode)?,
            (Some(a), None) => {
                let spacer = a.right.clone();
                join(&a, &spacer, 0.0, &fs, mode)?
            }
            (Some(a), Some((m, d))) => join(&a, &m, d, &fs, mode)?,
        });
    }
    match (acc, pending) {
        (Some(a), None) => Ok(a),
        (Some(a), Some((m, d))) => join(&a, &m, d, &FresnelSet::identity(m.clone()), mode),
        (None, Some((m, d))) => evaluate(
            &StackExpr::Slab {
                material: m,
                thickness: d,
            },
            mode,
        ),
        (None, None) => Err(Error::Domain("empty sequence".into())),
    }
}

/// Media and thicknesses of a local stack, left to right. The first and last
/// thicknesses are offsets of the reference planes into the outer media.
fn flatten(stack: &StackExpr, out: &mut Vec<(MaterialModel, f64)>) -> Result<()> {
    fn enter(out: &mut Vec<(MaterialModel, f64)>, m: &MaterialModel) -> Result<()> {
        match out.last() {
            None => {
                out.push((m.clone(), 0.0));
                Ok(())
            }
            Some((cur, _)) if cur == m => Ok(()),
            Some((cur, _)) => Err(Error::MediumMismatch(format!("{m} follows a part ending in {cur}"))),
        }
    }
    match stack {
        StackExpr::Interface { left, right } => {
            enter(out, left)?;
            out.push((right.clone(), 0.0));
        }
        StackExpr::Slab { material, thickness } => {
            enter(out, material)?;
            out.last_mut().expect("entered").1 += thickness;
        }
        StackExpr::Sequence(parts) => {
            if parts.is_empty() {
                return Err(Error::Domain("empty sequence".into()));
            }
            for p in parts {
                flatten(p, out)?;
            }
        }
        StackExpr::Opaque(_) => {
            return Err(Error::Unsupported(
                "layer-by-layer evaluation needs a fully local stack".into(),
            ))
        }
    }
    Ok(())
}

/// Forward coefficients of a flattened stack by the textbook successive-layer
/// recursion, folded from the last interface back to the first:
/// `r_{12/3} = (r_12 + r_{2/3} P²)/(1 - r_21 r_{2/3} P²)`,
/// `t_{12/3} = t_12 t_{2/3} P/(1 - r_21 r_{2/3} P²)`.
fn fold_forward(media: &[(MaterialModel, f64)], mode: &TransverseMode) -> Result<(Complex64, Complex64)> {
    let n = media.len() - 1;
    let last = interface_coeffs(&media[n - 1].0, &media[n].0, mode)?;
    let mut r = last.r_fwd;
    let mut t = last.t_fwd;
    for l in (0..n - 1).rev() {
        let (mat, d) = &media[l + 1];
        let iface = interface_coeffs(&media[l].0, mat, mode)?;
        let p = phase(mat, *d, mode)?;
        let p2 = p * p;
        let den = Complex64::new(1.0, 0.0) - iface.r_bwd * r * p2;
        if den.norm() == 0.0 {
            return Err(Error::Resonance {
                magnitude: 0.0,
                floor: 0.0,
            });
        }
        r = (iface.r_fwd + r * p2) / den;
        t = iface.t_fwd * t * p / den;
    }
    Ok((r, t))
}

fn phase(mat: &MaterialModel, d: f64, mode: &TransverseMode) -> Result<Complex64> {
    if d == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if mat.is_ideal_mirror() {
        return Err(Error::Unsupported("propagation through an ideal mirror".into()));
    }
    let (eps, mu) = mat.response(mode.freq)?;
    Ok(propagation_factor(normal_wavenumber(eps, mu, mode), d, mode.freq))
}

/// Fresnel coefficients of a fully local stack by the successive-layer
/// recursion, using only single-interface coefficients. Serves as an
/// independent check on [`evaluate`].
pub fn evaluate_layerwise(stack: &StackExpr, mode: &TransverseMode) -> Result<FresnelSet> {
    let mut media = Vec::new();
    flatten(stack, &mut media)?;
    let (left, d_left) = media.first().cloned().expect("non-empty");
    let (right, d_right) = media.last().cloned().expect("non-empty");
    let p_left = phase(&left, d_left, mode)?;
    if media.len() == 1 {
        // a bare slab
        let mut fs = FresnelSet::identity(left);
        fs.t_fwd = p_left;
        fs.t_bwd = p_left;
        return Ok(fs);
    }
    let p_right = phase(&right, d_right, mode)?;
    let (r_fwd, t_fwd) = fold_forward(&media, mode)?;
    let reversed: Vec<_> = media.iter().rev().cloned().collect();
    let (r_bwd, t_bwd) = fold_forward(&reversed, mode)?;
    Ok(FresnelSet {
        r_fwd: r_fwd * p_left * p_left,
        r_bwd: r_bwd * p_right * p_right,
        t_fwd: t_fwd * p_left * p_right,
        t_bwd: t_bwd * p_left * p_right,
        left,
        right,
    })
}
