//! Residuals of the consistency identities obeyed by generalized Fresnel
//! coefficients. Used by the `validate` command and the test suites.

use num_complex::Complex64;

use super::{a_value, evaluate, join, layer_phase, FresnelSet, LayerStack};
use crate::kinematics::{normal_wavenumber, transmittance, BoundaryMedium, Frequency, TransverseMode};
use crate::{Error, Result};

/// `|t_fwd t_bwd - r_fwd r_bwd - 1|`, zero for a bare interface.
pub fn stokes_residual(fs: &FresnelSet) -> f64 {
    (a_value(fs) - Complex64::new(1.0, 0.0)).norm()
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Relative residual of `t_{j/m} μ_j β_m = t_{m/j} μ_m β_j`.
pub fn transmission_symmetry_residual(fs: &FresnelSet, mode: &TransverseMode) -> Result<f64> {
    let (eps_j, mu_j) = fs.left.response(mode.freq)?;
    let (eps_m, mu_m) = fs.right.response(mode.freq)?;
    let q_j = normal_wavenumber(eps_j, mu_j, mode);
    let q_m = normal_wavenumber(eps_m, mu_m, mode);
    Ok(relative(fs.t_fwd * mu_j * q_m, fs.t_bwd * mu_m * q_j))
}

/// Transmittances `(T_{j/m}, T_{m/j})` of a stack between transparent media.
pub fn transmittances(fs: &FresnelSet, mode: &TransverseMode) -> Result<(f64, f64)> {
    if let Frequency::Imaginary(_) = mode.freq {
        return Err(Error::UndefinedTransmittance(
            "transmittance needs a real frequency".into(),
        ));
    }
    let boundary = |m: &crate::MaterialModel| -> Result<BoundaryMedium> {
        let (eps, mu) = m.response(mode.freq)?;
        Ok(BoundaryMedium {
            eps,
            mu,
            beta: normal_wavenumber(eps, mu, mode),
        })
    };
    transmittance(fs.t_fwd, fs.t_bwd, &boundary(&fs.left)?, &boundary(&fs.right)?)
}

/// Coefficients of the whole stack computed with node `k` as the
/// intermediate layer: `join(stack[0..k], layer k, stack[k..])`.
pub fn via_intermediate(stack: &LayerStack, k: usize, mode: &TransverseMode) -> Result<FresnelSet> {
    let last = stack.node_count() - 1;
    if k == 0 || k >= last {
        return Err(Error::Domain(format!("node {k} is not an interior layer")));
    }
    let (mat, d) = stack.node(k)?;
    let left = stack.between(0, k)?.evaluate(mode)?;
    let right = stack.between(k, last)?.evaluate(mode)?;
    join(&left, &mat, d, &right, mode)
}

/// Relative residual of the denominator identity for interior nodes
/// `k < l` with `j`, `m` the outer media:
///
/// ```text
/// (1 - r_{l/k} r_{l/m} P_l²)(1 - r_{k/j} r_{k/m} P_k²)
///     = (1 - r_{k/j} r_{k/l} P_k²)(1 - r_{l/j} r_{l/m} P_l²)
/// ```
pub fn denominator_identity_residual(stack: &LayerStack, k: usize, l: usize, mode: &TransverseMode) -> Result<f64> {
    let last = stack.node_count() - 1;
    if !(0 < k && k < l && l < last) {
        return Err(Error::Domain(format!("need interior nodes 0 < k={k} < l={l} < {last}")));
    }
    let eval = |a: usize, b: usize| -> Result<FresnelSet> { stack.between(a, b)?.evaluate(mode) };
    let (mat_k, d_k) = stack.node(k)?;
    let (mat_l, d_l) = stack.node(l)?;
    let pk = layer_phase(&mat_k, d_k, mode)?;
    let pl = layer_phase(&mat_l, d_l, mode)?;
    let (pk2, pl2) = (pk * pk, pl * pl);
    let jk = eval(0, k)?;
    let km = eval(k, last)?;
    let kl = eval(k, l)?;
    let lm = eval(l, last)?;
    let jl = eval(0, l)?;
    let one = Complex64::new(1.0, 0.0);
    let lhs = (one - kl.r_bwd * lm.r_fwd * pl2) * (one - jk.r_bwd * km.r_fwd * pk2);
    let rhs = (one - jk.r_bwd * kl.r_fwd * pk2) * (one - jl.r_bwd * lm.r_fwd * pl2);
    Ok(relative(lhs, rhs))
}

/// `ã_{j/l} = (a_{j/k} a_{l/k} P² - r_{j/k} r_{l/k}) / (1 - r_{k/j} r_{k/l} P²)`
/// built from the parts `j/k` and `k/l` joined across spacer `k`.
pub fn a_from_parts(left: &FresnelSet, right: &FresnelSet, phase: Complex64) -> Complex64 {
    let p2 = phase * phase;
    (a_value(left) * a_value(right) * p2 - left.r_fwd * right.r_bwd)
        / (Complex64::new(1.0, 0.0) - left.r_bwd * right.r_fwd * p2)
}

/// Relative residual between `a` of the composite `j/l` and `ã_{j/l}` from
/// its parts, splitting at interior node `k`.
pub fn a_invariance_residual(stack: &LayerStack, k: usize, mode: &TransverseMode) -> Result<f64> {
    let last = stack.node_count() - 1;
    let (mat, d) = stack.node(k)?;
    let left = stack.between(0, k)?.evaluate(mode)?;
    let right = stack.between(k, last)?.evaluate(mode)?;
    let whole = evaluate(&stack.to_expr(), mode)?;
    let phase = layer_phase(&mat, d, mode)?;
    Ok(relative(a_value(&whole), a_from_parts(&left, &right, phase)))
}
