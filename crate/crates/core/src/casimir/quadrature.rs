//! Adaptive tanh-sinh quadrature and the transverse-mode double integral.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::constants::{C, HBAR};
use crate::kinematics::{Frequency, Polarization};
use crate::materials::MaterialModel;
use crate::stacks::Knots;
use crate::{Error, Result};

/// Controls for the (ξ, κ) double integral.
///
/// The integrand of every Casimir quantity carries a factor `e^{-2κd}`, so
/// the domain is truncated to `κ ≤ κ_cut = cutoff_efolds / (2 d)`. Since
/// `κ ≥ n_c ξ / c ≥ ξ / c`, this also bounds `ξ ≤ c κ_cut`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Relative tolerance, measured against the integral of |integrand|.
    pub rel_tol: f64,
    /// Absolute floor on the error, Pa.
    pub abs_floor: f64,
    /// Maximum bisection depth of the panels on each axis.
    pub max_subdivisions: u32,
    /// Upper cutoff in e-folds of the `e^{-2κd}` factor.
    pub cutoff_efolds: f64,
    /// Lower ξ limit, rad/s. Zero integrates from ξ = 0 with an open rule.
    pub xi_floor: f64,
    /// Deepest tanh-sinh level per panel (step `2^-level`).
    pub max_level: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_floor: 0.0,
            max_subdivisions: 16,
            cutoff_efolds: 40.0,
            xi_floor: 0.0,
            max_level: 5,
        }
    }
}

impl QuadratureSettings {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Domain(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_floor >= 0.0) || !(self.xi_floor >= 0.0) {
            return Err(Error::Domain("abs_floor and xi_floor must be >= 0".into()));
        }
        if !(self.cutoff_efolds > 0.0 && self.cutoff_efolds.is_finite()) {
            return Err(Error::Domain("cutoff_efolds must be positive".into()));
        }
        if self.max_level < 3 {
            return Err(Error::Domain("max_level must be at least 3".into()));
        }
        Ok(())
    }

    /// κ cutoff for decay length `d`.
    pub fn kappa_cutoff(&self, d: f64) -> f64 {
        self.cutoff_efolds / (2.0 * d)
    }

    /// ξ cutoff for decay length `d`.
    pub fn xi_cutoff(&self, d: f64) -> f64 {
        C * self.kappa_cutoff(d)
    }
}

/// Value of an integral with its a posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
}

/// Integrand value with the scale its error is judged against. When a value
/// is a difference of terms, `magnitude` is the sum of their moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub magnitude: f64,
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Sample {
            value,
            magnitude: value.abs(),
        }
    }
}

const T_MAX: f64 = 3.5;
const MIN_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy, Default)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    l1: f64,
    /// Discretization error, reducible by bisection.
    error: f64,
    /// Error inherited from the integrand values.
    inherited: f64,
}

/// Tanh-sinh rule on `[a, b]`, refined level by level until successive
/// estimates agree to `rel · ∫|f|` or `max_level` is reached. `f` returns a
/// value and the error already committed in computing it.
fn tanh_sinh<F>(f: &mut F, a: f64, b: f64, rel: f64, max_level: u32) -> Result<Panel>
where
    F: FnMut(f64) -> Result<(f64, f64, f64)>,
{
    let width = b - a;
    if width <= 64.0 * f64::EPSILON * a.abs().max(b.abs()) {
        let (v, m, e) = f(0.5 * (a + b))?;
        return Ok(Panel {
            a,
            b,
            value: width * v,
            l1: width * m,
            error: 0.0,
            inherited: width * e,
        });
    }
    // value, magnitude and inherited-error sums
    let mut sums = [0.0f64; 3];
    let add = |t: f64, f: &mut F, sums: &mut [f64; 3]| -> Result<()> {
        let (w, xs) = if t == 0.0 {
            (width * PI / 4.0, [a + 0.5 * width, f64::NAN])
        } else {
            let u = FRAC_PI_2 * t.sinh();
            let s = (-2.0 * u).exp();
            let delta = width * s / (1.0 + s);
            (
                width * PI * t.cosh() * s / ((1.0 + s) * (1.0 + s)),
                [a + delta, b - delta],
            )
        };
        for x in xs {
            if !(x > a && x < b) {
                continue;
            }
            let (v, m, e) = f(x)?;
            sums[0] += w * v;
            sums[1] += w * m;
            sums[2] += w * e;
        }
        Ok(())
    };

    let mut t = 0.0;
    while t <= T_MAX {
        add(t, f, &mut sums)?;
        t += 1.0;
    }
    let mut h = 1.0;
    let mut prev = h * sums[0];
    let mut panel = Panel::default();
    for level in 1..=max_level {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            add(t, f, &mut sums)?;
            t += 2.0 * h;
        }
        let value = h * sums[0];
        let diff = (value - prev).abs();
        panel = Panel {
            a,
            b,
            value,
            l1: h * sums[1],
            error: diff,
            inherited: h * sums[2],
        };
        if level >= MIN_LEVEL && diff <= rel * panel.l1 {
            break;
        }
        prev = value;
    }
    Ok(panel)
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    value: f64,
    l1: f64,
    error: f64,
    converged: bool,
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Gauss-Kronrod rule with the usual embedded 7-point Gauss error
/// estimate. Used on the cells between knots, where `f` is smooth.
fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<(f64, f64, f64)>,
{
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let mut fv = [0.0f64; 15];
    let (mut kronrod, mut gauss, mut l1, mut inherited) = (0.0, 0.0, 0.0, 0.0);
    for (i, (&x, &w)) in GK_NODES.iter().zip(KRONROD_WEIGHTS.iter()).enumerate() {
        let points: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
        for (j, &t) in points.iter().enumerate() {
            let (v, m, e) = f(center + half * t)?;
            fv[2 * i + j] = v;
            kronrod += w * v;
            l1 += w * m;
            inherited += w * e;
            if i % 2 == 1 {
                gauss += GAUSS_WEIGHTS[i / 2] * v;
            }
        }
    }
    let mean = 0.5 * kronrod;
    let mut spread = 0.0;
    for (i, &w) in KRONROD_WEIGHTS.iter().enumerate() {
        let count = if i == 7 { 1 } else { 2 };
        for j in 0..count {
            spread += w * (fv[2 * i + j] - mean).abs();
        }
    }
    let mut error = ((kronrod - gauss) * half).abs();
    let spread = spread * half.abs();
    if spread != 0.0 && error != 0.0 {
        error = spread * (200.0 * error / spread).powf(1.5).min(1.0);
    }
    let l1 = l1 * half.abs();
    error = error.max(50.0 * f64::EPSILON * l1);
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        l1,
        error,
        inherited: inherited * half.abs(),
    })
}

/// Heap entry ordering panels by discretization error.
#[derive(Debug, PartialEq)]
struct Worst(f64, usize);

impl Eq for Worst {}

impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worst {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals {
    value: f64,
    l1: f64,
    quad: f64,
    inherited: f64,
}

impl Totals {
    fn of<'a>(panels: impl Iterator<Item = &'a Panel>) -> Self {
        panels.fold(Totals::default(), |t, p| Totals {
            value: t.value + p.value,
            l1: t.l1 + p.l1,
            quad: t.quad + p.error,
            inherited: t.inherited + p.inherited,
        })
    }

    fn error(&self) -> f64 {
        self.quad.max(0.0) + self.inherited.max(0.0)
    }
}

/// Globally adaptive quadrature: the panel with the largest discretization
/// error is bisected until the total error is below `max(rel · ∫|f|, abs)`
/// or no panel can be split further. Without `breaks` inside `(a, b)` the
/// panels use the tanh-sinh rule; with break points (sorted points where `f`
/// may have kinks) the cells between them use the Gauss-Kronrod rule.
#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &mut F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel: f64,
    abs: f64,
    depth: u32,
    max_level: u32,
) -> Result<Outcome>
where
    F: FnMut(f64) -> Result<(f64, f64, f64)>,
{
    let min_width = (b - a) * 0.5f64.powi(depth as i32);
    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(a);
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    let piecewise = edges.len() > 2;
    let rule = |f: &mut F, lo: f64, hi: f64| {
        if !piecewise {
            tanh_sinh(f, lo, hi, rel, max_level)
        } else {
            gauss_kronrod(f, lo, hi)
        }
    };

    let mut panels: Vec<Option<Panel>> = Vec::new();
    let mut heap = std::collections::BinaryHeap::new();
    let mut totals = Totals::default();
    let add = |p: Panel,
               panels: &mut Vec<Option<Panel>>,
               heap: &mut std::collections::BinaryHeap<Worst>,
               totals: &mut Totals| {
        totals.value += p.value;
        totals.l1 += p.l1;
        totals.quad += p.error;
        totals.inherited += p.inherited;
        if p.b - p.a > 1.5 * min_width && p.error > 0.0 {
            heap.push(Worst(p.error, panels.len()));
        }
        panels.push(Some(p));
    };
    for w in edges.windows(2) {
        if w[1] > w[0] {
            let p = rule(f, w[0], w[1])?;
            add(p, &mut panels, &mut heap, &mut totals);
        }
    }
    let converged = loop {
        let target = (rel * totals.l1).max(abs);
        if totals.error() <= target {
            totals = Totals::of(panels.iter().flatten());
            if totals.error() <= (rel * totals.l1).max(abs) {
                break true;
            }
            continue;
        }
        if totals.quad <= 0.25 * target {
            break false;
        }
        let Some(Worst(_, i)) = heap.pop() else {
            break false;
        };
        let p = panels[i].take().expect("panel queued once");
        totals.value -= p.value;
        totals.l1 -= p.l1;
        totals.quad -= p.error;
        totals.inherited -= p.inherited;
        let mid = 0.5 * (p.a + p.b);
        let left = rule(f, p.a, mid)?;
        let right = rule(f, mid, p.b)?;
        add(left, &mut panels, &mut heap, &mut totals);
        add(right, &mut panels, &mut heap, &mut totals);
    };
    let totals = Totals::of(panels.iter().flatten());
    Ok(Outcome {
        value: totals.value,
        l1: totals.l1,
        error: totals.error(),
        converged,
    })
}

/// One-dimensional adaptive integral of a smooth function on `[a, b]`.
pub fn integrate(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    settings.validate()?;
    let evals = Cell::new(0usize);
    let mut g = |x: f64| {
        evals.set(evals.get() + 1);
        f(x).map(|v| (v, v.abs(), 0.0))
    };
    let p = adaptive(
        &mut g,
        a,
        b,
        &[],
        settings.rel_tol,
        settings.abs_floor,
        settings.max_subdivisions,
        settings.max_level,
    )?;
    if !p.converged {
        return Err(Error::Convergence {
            estimate: p.value,
            error_estimate: p.error,
            diagnostics: format!("1-d integral on [{a:e}, {b:e}], {} evaluations", evals.get()),
        });
    }
    Ok(Estimate {
        value: p.value,
        error: p.error,
        evaluations: evals.get(),
    })
}

/// Evaluates `(ħ/2π²) ∫₀^∞ dξ ∫ dk k κ Σ_q g(ξ, κ, q)`.
///
/// `g` is evaluated at `κ = √(n_c² ξ²/c² + k²)` and the inner range ends
/// where `κ = κ_cut`. `decay_length` sets the cutoffs (see
/// [`QuadratureSettings`]). `g` must not include the `kκ` weight.
pub fn integrate_mode_sum<G, S>(
    medium: &MaterialModel,
    decay_length: f64,
    settings: &QuadratureSettings,
    integrand: G,
) -> Result<Estimate>
where
    G: Fn(f64, f64, Polarization) -> Result<S>,
    S: Into<Sample>,
{
    integrate_mode_sum_with_knots(medium, decay_length, settings, &Knots::default(), integrand)
}

/// As [`integrate_mode_sum`] for integrands that are only piecewise smooth:
/// panels start at the ξ knots and, for each ξ, at the κ of every k knot.
pub fn integrate_mode_sum_with_knots<G, S>(
    medium: &MaterialModel,
    decay_length: f64,
    settings: &QuadratureSettings,
    knots: &Knots,
    integrand: G,
) -> Result<Estimate>
where
    G: Fn(f64, f64, Polarization) -> Result<S>,
    S: Into<Sample>,
{
    settings.validate()?;
    if !(decay_length > 0.0 && decay_length.is_finite()) {
        return Err(Error::Domain(format!(
            "decay length must be positive, got {decay_length}"
        )));
    }
    let prefactor = HBAR / (2.0 * PI * PI);
    let kappa_cut = settings.kappa_cutoff(decay_length);
    let xi_hi = settings.xi_cutoff(decay_length);
    let xi_lo = settings.xi_floor;
    if xi_lo >= xi_hi {
        return Err(Error::Domain(format!(
            "xi floor {xi_lo:e} is above the cutoff {xi_hi:e}"
        )));
    }
    let inner_rel = settings.rel_tol / 8.0;
    let outer_nodes = Cell::new(0usize);
    let inner_nodes = Cell::new(0usize);
    let unconverged = Cell::new(0usize);

    let mut outer = |xi: f64| -> Result<(f64, f64, f64)> {
        outer_nodes.set(outer_nodes.get() + 1);
        let n_c = medium.index(Frequency::Imaginary(xi))?.re;
        let kappa0 = n_c * xi / C;
        if kappa0 >= kappa_cut {
            return Ok((0.0, 0.0, 0.0));
        }
        // offsets from kappa0 keep the nodes exact on thin ranges; tabulated
        // coefficients are piecewise linear in k, so with knots k itself is
        // the variable
        let in_k = !knots.ks.is_empty();
        let hi = if in_k {
            ((kappa_cut - kappa0) * (kappa_cut + kappa0)).sqrt()
        } else {
            kappa_cut - kappa0
        };
        let mut inner = |x: f64| -> Result<(f64, f64, f64)> {
            inner_nodes.set(inner_nodes.get() + 1);
            let (kappa, jacobian) = if in_k {
                let kappa = kappa0.hypot(x);
                (kappa, x * kappa)
            } else {
                let kappa = kappa0 + x;
                (kappa, kappa * kappa)
            };
            let (mut s, mut m) = (0.0, 0.0);
            for q in Polarization::BOTH {
                let g: Sample = integrand(xi, kappa, q)?.into();
                s += g.value;
                m += g.magnitude;
            }
            Ok((jacobian * s, jacobian * m, 0.0))
        };
        let p = adaptive(
            &mut inner,
            0.0,
            hi,
            &knots.ks,
            inner_rel,
            0.0,
            settings.max_subdivisions,
            settings.max_level,
        )?;
        // an unconverged slice only matters through its error, which the
        // outer integral carries
        if !p.converged {
            unconverged.set(unconverged.get() + 1);
        }
        Ok((p.value, p.l1, p.error))
    };

    let p = adaptive(
        &mut outer,
        xi_lo,
        xi_hi,
        &knots.freqs,
        settings.rel_tol,
        settings.abs_floor / prefactor,
        settings.max_subdivisions,
        settings.max_level,
    )?;
    let evaluations = 2 * inner_nodes.get();
    if !p.converged {
        return Err(Error::Convergence {
            estimate: prefactor * p.value,
            error_estimate: prefactor * p.error,
            diagnostics: format!(
                "outer xi integral on [{xi_lo:e}, {xi_hi:e}] rad/s: {} outer nodes, {} inner nodes, {} unconverged inner integrals",
                outer_nodes.get(),
                inner_nodes.get(),
                unconverged.get()
            ),
        });
    }
    Ok(Estimate {
        value: prefactor * p.value,
        error: prefactor * p.error,
        evaluations,
    })
}
