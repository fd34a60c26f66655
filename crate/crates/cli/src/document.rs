//! Stack and cavity documents (TOML).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use layerstack::casimir::{CavityConfig, QuadratureSettings};
use layerstack::constants::C;
use layerstack::materials::ImaginaryTable;
use layerstack::{CoeffTable, Complex64, Frequency, LayerStack, MaterialModel, OpaqueStack, StackExpr};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

/// Source text with its path, used to turn spans into line/column.
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Ok(Source {
            path: path.to_path_buf(),
            text,
        })
    }

    fn dir(&self) -> &Path {
        self.path.parent().unwrap_or_else(|| Path::new("."))
    }

    /// 1-based line and column of a byte offset.
    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn error_at(&self, span: std::ops::Range<usize>, msg: impl std::fmt::Display) -> CliError {
        let (line, col) = self.line_col(span.start);
        CliError::Parse(format!("{}:{line}:{col}: {msg}", self.path.display()))
    }

    fn parse<'de, T: Deserialize<'de>>(&'de self) -> Result<T, CliError> {
        toml::from_str(&self.text).map_err(|e| match e.span() {
            Some(span) => self.error_at(span, e.message()),
            None => CliError::Parse(format!("{}: {}", self.path.display(), e.message())),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialRaw {
    model: String,
    n: Option<Scalar>,
    eps: Option<Scalar>,
    mu: Option<Scalar>,
    plasma: Option<f64>,
    damping: Option<f64>,
    resonance: Option<f64>,
    file: Option<String>,
}

/// Real number or `[re, im]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn value(&self) -> Complex64 {
        match *self {
            Scalar::Real(v) => Complex64::new(v, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRaw {
    material: Option<Spanned<String>>,
    thickness: Option<f64>,
    quarter_wave: Option<f64>,
    opaque: Option<Spanned<String>>,
    left: Option<Spanned<String>>,
    right: Option<Spanned<String>>,
    repeat: Option<usize>,
    layers: Option<Vec<Spanned<LayerRaw>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientRaw {
    left: Option<Spanned<String>>,
    right: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StackRaw {
    #[serde(default)]
    materials: BTreeMap<String, Spanned<toml::Value>>,
    #[serde(default)]
    ambient: AmbientRaw,
    #[serde(default)]
    layers: Vec<Spanned<LayerRaw>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartRaw {
    outer: Option<Spanned<String>>,
    #[serde(default)]
    layers: Vec<Spanned<LayerRaw>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapsRaw {
    medium: Option<Spanned<String>>,
    d1: Spanned<f64>,
    d2: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureRaw {
    rel_tol: Option<f64>,
    abs_floor: Option<f64>,
    max_subdivisions: Option<u32>,
    cutoff_efolds: Option<f64>,
    xi_floor: Option<f64>,
    max_level: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CavityRaw {
    #[serde(default)]
    materials: BTreeMap<String, Spanned<toml::Value>>,
    cavity: Spanned<GapsRaw>,
    mirror1: Spanned<PartRaw>,
    mirror2: Spanned<PartRaw>,
    slab: Option<Spanned<PartRaw>>,
    #[serde(default)]
    quadrature: QuadratureRaw,
}

struct Context<'a> {
    source: &'a Source,
    materials: BTreeMap<String, MaterialModel>,
}

impl<'a> Context<'a> {
    fn new(source: &'a Source, raw: &BTreeMap<String, Spanned<toml::Value>>) -> Result<Self, CliError> {
        let mut materials = BTreeMap::new();
        materials.insert("vacuum".to_string(), MaterialModel::Vacuum);
        for (name, value) in raw {
            let m = material(source, name, value)?;
            materials.insert(name.clone(), m);
        }
        Ok(Context { source, materials })
    }

    fn lookup(&self, name: &Spanned<String>) -> Result<MaterialModel, CliError> {
        self.materials.get(name.get_ref()).cloned().ok_or_else(|| {
            self.source
                .error_at(name.span(), format!("undeclared material `{}`", name.get_ref()))
        })
    }

    fn medium_or_vacuum(&self, name: &Option<Spanned<String>>) -> Result<MaterialModel, CliError> {
        name.as_ref().map_or(Ok(MaterialModel::Vacuum), |n| self.lookup(n))
    }

    fn push_layers(&self, stack: &mut LayerStack, layers: &[Spanned<LayerRaw>], depth: usize) -> Result<(), CliError> {
        for layer in layers {
            self.push_layer(stack, layer, depth)?;
        }
        Ok(())
    }

    fn push_layer(&self, stack: &mut LayerStack, layer: &Spanned<LayerRaw>, depth: usize) -> Result<(), CliError> {
        let raw = layer.get_ref();
        let err = |msg: &str| self.source.error_at(layer.span(), msg);
        if let Some(count) = raw.repeat {
            if raw.material.is_some() || raw.opaque.is_some() || raw.thickness.is_some() || raw.quarter_wave.is_some() {
                return Err(err("a `repeat` entry only takes `repeat` and `layers`"));
            }
            if depth > 8 {
                return Err(err("`repeat` nested too deeply"));
            }
            let inner = raw
                .layers
                .as_deref()
                .ok_or_else(|| err("`repeat` needs a `layers` list"))?;
            for _ in 0..count {
                self.push_layers(stack, inner, depth + 1)?;
            }
            return Ok(());
        }
        if raw.layers.is_some() {
            return Err(err("`layers` is only allowed together with `repeat`"));
        }
        if let Some(file) = &raw.opaque {
            if raw.material.is_some() || raw.thickness.is_some() || raw.quarter_wave.is_some() {
                return Err(err("an `opaque` entry only takes `opaque`, `left` and `right`"));
            }
            let current = current_medium(stack);
            let left = match &raw.left {
                Some(n) => self.lookup(n)?,
                None => current,
            };
            let right = match &raw.right {
                Some(n) => self.lookup(n)?,
                None => left.clone(),
            };
            let path = self.source.dir().join(file.get_ref());
            let table = CoeffTable::from_csv_path(&path).map_err(|e| self.source.error_at(file.span(), e))?;
            stack.push_opaque(OpaqueStack::new(table, left, right));
            return Ok(());
        }
        if raw.left.is_some() || raw.right.is_some() {
            return Err(err("`left`/`right` only apply to `opaque` entries"));
        }
        let name = raw
            .material
            .as_ref()
            .ok_or_else(|| err("layer needs `material`, `opaque` or `repeat`"))?;
        let material = self.lookup(name)?;
        let thickness = match (raw.thickness, raw.quarter_wave) {
            (Some(d), None) => d,
            (None, Some(lambda)) => quarter_wave(&material, lambda).map_err(|m| err(&m))?,
            _ => return Err(err("layer needs exactly one of `thickness` and `quarter_wave`")),
        };
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(err("layer thickness must be > 0"));
        }
        stack
            .push_layer(material, thickness)
            .map_err(|e| self.source.error_at(layer.span(), e))
    }
}

fn current_medium(stack: &LayerStack) -> MaterialModel {
    match stack.layers.last() {
        Some(layerstack::Layer::Local { material, .. }) => material.clone(),
        Some(layerstack::Layer::Opaque(o)) => o.right().clone(),
        None => stack.left.clone(),
    }
}

/// `λ / (4 Re n(2πc/λ))`.
fn quarter_wave(material: &MaterialModel, lambda: f64) -> Result<f64, String> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err("quarter_wave wavelength must be > 0".into());
    }
    let n = material
        .index(Frequency::Real(2.0 * PI * C / lambda))
        .map_err(|e| format!("quarter_wave: {e}"))?;
    if !(n.re > 0.0) {
        return Err(format!("quarter_wave needs Re n > 0, got {n}"));
    }
    Ok(lambda / (4.0 * n.re))
}

fn material(source: &Source, name: &str, value: &Spanned<toml::Value>) -> Result<MaterialModel, CliError> {
    let err = |msg: String| source.error_at(value.span(), format!("material `{name}`: {msg}"));
    let raw: MaterialRaw = value
        .get_ref()
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| err(e.message().to_string()))?;
    let allowed: &[&str] = match raw.model.as_str() {
        "vacuum" | "ideal" => &[],
        "constant" => &["n", "eps", "mu"],
        "drude" => &["plasma", "damping"],
        "lorentz" => &["resonance", "plasma", "damping"],
        "tabulated" => &["file"],
        other => {
            return Err(err(format!(
                "unknown model `{other}` (vacuum|constant|drude|lorentz|ideal|tabulated)"
            )))
        }
    };
    let present = [
        ("n", raw.n.is_some()),
        ("eps", raw.eps.is_some()),
        ("mu", raw.mu.is_some()),
        ("plasma", raw.plasma.is_some()),
        ("damping", raw.damping.is_some()),
        ("resonance", raw.resonance.is_some()),
        ("file", raw.file.is_some()),
    ];
    if let Some((key, _)) = present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
        return Err(err(format!("`{key}` does not apply to model `{}`", raw.model)));
    }
    let need = |v: Option<f64>, key: &str| -> Result<f64, CliError> {
        match v {
            Some(x) if x.is_finite() && x >= 0.0 => Ok(x),
            Some(x) => Err(err(format!("`{key}` must be finite and >= 0, got {x}"))),
            None => Err(err(format!("missing `{key}`"))),
        }
    };
    Ok(match raw.model.as_str() {
        "vacuum" => MaterialModel::Vacuum,
        "ideal" => MaterialModel::IdealMirror,
        "constant" => {
            let mu = raw.mu.as_ref().map_or(Complex64::new(1.0, 0.0), Scalar::value);
            let eps = match (raw.n, &raw.eps) {
                (Some(n), None) => n.value() * n.value() / mu,
                (None, Some(e)) => e.value(),
                _ => return Err(err("give exactly one of `n` and `eps`".into())),
            };
            if !(eps.is_finite() && mu.is_finite()) || (eps.norm() == 0.0 && mu.norm() == 0.0) {
                return Err(err("eps and mu must be finite and not both zero".into()));
            }
            MaterialModel::ConstantIndex { eps, mu }
        }
        "drude" => MaterialModel::drude(need(raw.plasma, "plasma")?, need(raw.damping, "damping")?),
        "lorentz" => MaterialModel::lorentz(
            need(raw.resonance, "resonance")?,
            need(raw.plasma, "plasma")?,
            need(raw.damping, "damping")?,
        ),
        _ => {
            let file = raw.file.as_ref().ok_or_else(|| err("missing `file`".into()))?;
            let table = ImaginaryTable::from_csv_path(source.dir().join(file)).map_err(|e| err(e.to_string()))?;
            MaterialModel::TabulatedImaginary(Arc::new(table))
        }
    })
}

/// A multilayer between two ambient media.
pub fn load_stack(source: &Source) -> Result<LayerStack, CliError> {
    let raw: StackRaw = source.parse()?;
    let ctx = Context::new(source, &raw.materials)?;
    let left = ctx.medium_or_vacuum(&raw.ambient.left)?;
    let right = ctx.medium_or_vacuum(&raw.ambient.right)?;
    if left.is_ideal_mirror() || right.is_ideal_mirror() {
        let span = raw.ambient.left.as_ref().map_or(0..0, |s| s.span());
        return Err(source.error_at(span, "ambient media cannot be ideal mirrors"));
    }
    let mut stack = LayerStack::new(left, right);
    ctx.push_layers(&mut stack, &raw.layers, 0)?;
    Ok(stack)
}

#[derive(Debug, Clone)]
pub enum Cavity {
    /// `mirror1 | d1 | slab | d2 | mirror2`.
    Three(CavityConfig),
    /// `mirror1 | d | mirror2`.
    Two {
        mirror1: StackExpr,
        mirror2: StackExpr,
        d: f64,
        medium: MaterialModel,
        settings: QuadratureSettings,
    },
}

impl Cavity {
    pub fn settings_mut(&mut self) -> &mut QuadratureSettings {
        match self {
            Cavity::Three(c) => &mut c.settings,
            Cavity::Two { settings, .. } => settings,
        }
    }
}

pub fn load_cavity(source: &Source) -> Result<Cavity, CliError> {
    let raw: CavityRaw = source.parse()?;
    let ctx = Context::new(source, &raw.materials)?;
    let gaps = raw.cavity.get_ref();
    let medium = ctx.medium_or_vacuum(&gaps.medium)?;
    if medium.is_ideal_mirror() {
        return Err(source.error_at(raw.cavity.span(), "the gap medium cannot be an ideal mirror"));
    }
    let outer = |part: &Spanned<PartRaw>, name: &str| -> Result<MaterialModel, CliError> {
        let o = part
            .get_ref()
            .outer
            .as_ref()
            .ok_or_else(|| source.error_at(part.span(), format!("[{name}] needs `outer`")))?;
        ctx.lookup(o)
    };
    let mut m1 = LayerStack::new(outer(&raw.mirror1, "mirror1")?, medium.clone());
    ctx.push_layers(&mut m1, &raw.mirror1.get_ref().layers, 0)?;
    let mut m2 = LayerStack::new(medium.clone(), outer(&raw.mirror2, "mirror2")?);
    ctx.push_layers(&mut m2, &raw.mirror2.get_ref().layers, 0)?;

    let q = &raw.quadrature;
    let defaults = QuadratureSettings::default();
    let settings = QuadratureSettings {
        rel_tol: q.rel_tol.unwrap_or(defaults.rel_tol),
        abs_floor: q.abs_floor.unwrap_or(defaults.abs_floor),
        max_subdivisions: q.max_subdivisions.unwrap_or(defaults.max_subdivisions),
        cutoff_efolds: q.cutoff_efolds.unwrap_or(defaults.cutoff_efolds),
        xi_floor: q.xi_floor.unwrap_or(defaults.xi_floor),
        max_level: q.max_level.unwrap_or(defaults.max_level),
    };
    settings
        .validate()
        .map_err(|e| CliError::Parse(format!("{}: [quadrature]: {e}", source.path.display())))?;

    let gap = |v: &Spanned<f64>, name: &str| -> Result<f64, CliError> {
        let d = *v.get_ref();
        if d > 0.0 && d.is_finite() {
            Ok(d)
        } else {
            Err(source.error_at(v.span(), format!("`{name}` must be > 0, got {d}")))
        }
    };
    let d1 = gap(&gaps.d1, "d1")?;
    match &raw.slab {
        Some(slab_part) => {
            if let Some(o) = &slab_part.get_ref().outer {
                return Err(source.error_at(o.span(), "[slab] is bounded by the gap medium and takes no `outer`"));
            }
            let d2 = gaps
                .d2
                .as_ref()
                .ok_or_else(|| source.error_at(raw.cavity.span(), "a cavity with a [slab] needs `d2`"))?;
            let d2 = gap(d2, "d2")?;
            let mut slab = LayerStack::new(medium.clone(), medium.clone());
            ctx.push_layers(&mut slab, &slab_part.get_ref().layers, 0)?;
            let config = CavityConfig::new(m1.to_expr(), m2.to_expr(), slab.to_expr(), d1, d2, medium, settings)
                .map_err(|e| source.error_at(raw.cavity.span(), e))?;
            Ok(Cavity::Three(config))
        }
        None => {
            if let Some(d2) = &gaps.d2 {
                return Err(source.error_at(d2.span(), "`d2` needs a [slab]; without one the gap is `d1`"));
            }
            Ok(Cavity::Two {
                mirror1: m1.to_expr(),
                mirror2: m2.to_expr(),
                d: d1,
                medium,
                settings,
            })
        }
    }
}
