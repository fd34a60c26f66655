#![allow(dead_code)]

use std::f64::consts::PI;

use layerstack::casimir::QuadratureSettings;
use layerstack::constants::C;
use layerstack::materials::ImaginaryTable;
use layerstack::stacks::{join, CoeffTable, FreqKind};
use layerstack::{
    Complex64, FresnelSet, LayerStack, MaterialModel, OpaqueStack, Polarization, Result, StackExpr, TransverseMode,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pol(rng: &mut ChaCha8Rng) -> Polarization {
    if rng.gen_bool(0.5) {
        Polarization::P
    } else {
        Polarization::S
    }
}

/// Passive medium with positive imaginary parts of ε and μ.
pub fn lossy_medium(rng: &mut ChaCha8Rng) -> MaterialModel {
    let eps = Complex64::new(rng.gen_range(-4.0..8.0), rng.gen_range(0.01..4.0));
    let mu = Complex64::new(rng.gen_range(0.5..2.5), rng.gen_range(0.01..1.0));
    MaterialModel::ConstantIndex { eps, mu }
}

/// Weakly absorbing dielectric.
pub fn absorbing_dielectric(rng: &mut ChaCha8Rng) -> MaterialModel {
    let eps = Complex64::new(rng.gen_range(1.0..6.0), rng.gen_range(0.0..0.3));
    MaterialModel::ConstantIndex {
        eps,
        mu: Complex64::new(1.0, 0.0),
    }
}

/// Lossless medium with real ε ≥ 1 and μ in [1, 2].
pub fn transparent_medium(rng: &mut ChaCha8Rng) -> MaterialModel {
    MaterialModel::constant(rng.gen_range(1.0..6.0), rng.gen_range(1.0..2.0))
}

/// Optical angular frequency, 400 nm to 2 μm.
pub fn optical_omega(rng: &mut ChaCha8Rng) -> f64 {
    2.0 * PI * C / rng.gen_range(400e-9..2000e-9)
}

pub fn local_stack<F>(
    rng: &mut ChaCha8Rng,
    layers: usize,
    ends: (MaterialModel, MaterialModel),
    mut inner: F,
) -> LayerStack
where
    F: FnMut(&mut ChaCha8Rng) -> MaterialModel,
{
    let mut s = LayerStack::new(ends.0, ends.1);
    for _ in 0..layers {
        let m = inner(rng);
        let d = rng.gen_range(10e-9..400e-9);
        s.push_layer(m, d).unwrap();
    }
    s
}

/// Transverse wavenumber for which the wave propagates in both media.
pub fn propagating_k(rng: &mut ChaCha8Rng, omega: f64, a: &MaterialModel, b: &MaterialModel) -> f64 {
    let n = |m: &MaterialModel| m.index(layerstack::Frequency::Real(omega)).unwrap().re;
    let n_min = n(a).min(n(b));
    rng.gen_range(0.0..0.95) * n_min * omega / C
}

/// Coefficients of a stack for every binary bracketing of its local
/// layers, i.e. every way of choosing intermediate layers recursively.
pub fn all_bracketings(stack: &LayerStack, mode: &TransverseMode) -> Result<Vec<FresnelSet>> {
    let n = stack.node_count();
    let mut memo: Vec<Vec<Option<Vec<FresnelSet>>>> = vec![vec![None; n]; n];
    bracket(stack, 0, n - 1, mode, &mut memo)
}

fn bracket(
    stack: &LayerStack,
    a: usize,
    b: usize,
    mode: &TransverseMode,
    memo: &mut Vec<Vec<Option<Vec<FresnelSet>>>>,
) -> Result<Vec<FresnelSet>> {
    if let Some(v) = &memo[a][b] {
        return Ok(v.clone());
    }
    let out = if b == a + 1 {
        vec![stack.between(a, b)?.evaluate(mode)?]
    } else {
        let mut out = Vec::new();
        for k in a + 1..b {
            let (mat, d) = stack.node(k)?;
            let left = bracket(stack, a, k, mode, memo)?;
            let right = bracket(stack, k, b, mode, memo)?;
            for l in &left {
                for r in &right {
                    out.push(join(l, &mat, d, r, mode)?);
                }
            }
        }
        out
    };
    memo[a][b] = Some(out.clone());
    Ok(out)
}

/// Largest coefficient deviation, relative to max(1, |coefficient|).
pub fn deviation(a: &FresnelSet, b: &FresnelSet) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients().iter())
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
        .fold(0.0, f64::max)
}

pub fn drude_mirror(rng: &mut ChaCha8Rng, facing_right: bool) -> StackExpr {
    let m = MaterialModel::drude(rng.gen_range(2e15..2e16), rng.gen_range(1e13..2e14));
    if facing_right {
        StackExpr::interface(m, MaterialModel::Vacuum)
    } else {
        StackExpr::interface(MaterialModel::Vacuum, m)
    }
}

/// `vacuum | material (d) | vacuum`.
pub fn slab(material: MaterialModel, d: f64) -> StackExpr {
    StackExpr::sequence(vec![
        StackExpr::interface(MaterialModel::Vacuum, material.clone()),
        StackExpr::slab(material.clone(), d).unwrap(),
        StackExpr::interface(material, MaterialModel::Vacuum),
    ])
    .unwrap()
}

/// ε(iξ) samples of a Lorentz oscillator on a log grid.
pub fn lorentz_table(rng: &mut ChaCha8Rng) -> ImaginaryTable {
    let resonance = rng.gen_range(5e15..3e16);
    let plasma = rng.gen_range(0.5..2.0) * resonance;
    let model = MaterialModel::lorentz(resonance, plasma, 1e14);
    let xi: Vec<f64> = (0..400).map(|i| 10f64.powf(8.0 + 11.0 * i as f64 / 399.0)).collect();
    let eps = xi
        .iter()
        .map(|&x| layerstack::materials::eps_imag(&model, x).unwrap())
        .collect();
    ImaginaryTable::new(xi, eps).unwrap()
}

/// Imaginary-axis grid covering the quadrature domain of decay length `d`:
/// log-spaced ξ from the settings' floor and quadratically spaced k.
pub fn cavity_grid(settings: &QuadratureSettings, d: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = settings.xi_floor;
    let hi = settings.xi_cutoff(d) * (1.0 + 1e-12);
    let freqs = (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect();
    let k_hi = settings.kappa_cutoff(d) * (1.0 + 1e-12);
    let ks = (0..n).map(|i| k_hi * (i as f64 / (n - 1) as f64).powi(2)).collect();
    (freqs, ks)
}

/// Opaque stand-in for `stack` sampled on [`cavity_grid`].
pub fn tabulated(stack: &StackExpr, settings: &QuadratureSettings, d: f64, n: usize) -> StackExpr {
    let (freqs, ks) = cavity_grid(settings, d, n);
    let table = CoeffTable::sample(stack, FreqKind::Imaginary, &freqs, &ks, &Polarization::BOTH).unwrap();
    StackExpr::opaque(OpaqueStack::new(
        table,
        stack.left_medium().unwrap().clone(),
        stack.right_medium().unwrap().clone(),
    ))
}
