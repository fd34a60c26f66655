use std::fmt;

use num_complex::Complex64;

use crate::kinematics::{normal_wavenumber, propagation_factor, Polarization, TransverseMode};
use crate::materials::MaterialModel;
use crate::{Error, Result};

/// Default floor on the magnitude of the multiple-reflection denominator.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-300;

/// The four generalized Fresnel coefficients of a stack at one mode,
/// together with the local media bounding it.
///
/// `fwd` refers to incidence from the left medium (`r_{j/m}`, `t_{j/m}`),
/// `bwd` to incidence from the right medium (`r_{m/j}`, `t_{m/j}`). All four
/// are referenced to the stack's own boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct FresnelSet {
    pub r_fwd: Complex64,
    pub r_bwd: Complex64,
    pub t_fwd: Complex64,
    pub t_bwd: Complex64,
    pub left: MaterialModel,
    pub right: MaterialModel,
}

impl FresnelSet {
    /// No interface at all: `r = 0`, `t = 1` inside a single medium.
    pub fn identity(medium: MaterialModel) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            r_fwd: zero,
            r_bwd: zero,
            t_fwd: one,
            t_bwd: one,
            left: medium.clone(),
            right: medium,
        }
    }

    /// `t_fwd t_bwd - r_fwd r_bwd`.
    pub fn a_value(&self) -> Complex64 {
        a_value(self)
    }

    /// The same stack seen from the other side.
    pub fn reversed(&self) -> Self {
        Self {
            r_fwd: self.r_bwd,
            r_bwd: self.r_fwd,
            t_fwd: self.t_bwd,
            t_bwd: self.t_fwd,
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.r_fwd, self.r_bwd, self.t_fwd, self.t_bwd]
    }

    /// Largest absolute difference over the four coefficients.
    pub fn max_deviation(&self, other: &FresnelSet) -> f64 {
        self.coefficients()
            .iter()
            .zip(other.coefficients().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for FresnelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r_fwd={} r_bwd={} t_fwd={} t_bwd={}",
            self.r_fwd, self.r_bwd, self.t_fwd, self.t_bwd
        )
    }
}

/// `a = t_fwd t_bwd - r_fwd r_bwd`. Equals 1 for a bare interface between
/// local media.
pub fn a_value(fs: &FresnelSet) -> Complex64 {
    fs.t_fwd * fs.t_bwd - fs.r_fwd * fs.r_bwd
}

fn ideal_reflection(pol: Polarization) -> Complex64 {
    match pol {
        Polarization::P => Complex64::new(1.0, 0.0),
        Polarization::S => Complex64::new(-1.0, 0.0),
    }
}

/// Single-interface coefficients between local media `j` (left) and `k`
/// (right).
///
/// `r = (β_j - γ β_k)/(β_j + γ β_k)` with `γ^p = ε_j/ε_k`, `γ^s = μ_j/μ_k`,
/// `t_jk = √(γ/γ^s)(1 + r)` on the principal branch and
/// `t_kj = (1 - r)/√(γ/γ^s)`, which satisfies both `r_kj = -r_jk` and the
/// transmission symmetry without dividing by β. An ideal mirror on either
/// side reflects with `r^p = +1`, `r^s = -1` towards the other medium.
pub fn interface_coeffs(mat_j: &MaterialModel, mat_k: &MaterialModel, mode: &TransverseMode) -> Result<FresnelSet> {
    let zero = Complex64::new(0.0, 0.0);
    match (mat_j.is_ideal_mirror(), mat_k.is_ideal_mirror()) {
        (true, true) => return Err(Error::Unsupported("interface between two ideal mirrors".into())),
        (false, true) => {
            let r = ideal_reflection(mode.pol);
            return Ok(FresnelSet {
                r_fwd: r,
                r_bwd: -r,
                t_fwd: zero,
                t_bwd: zero,
                left: mat_j.clone(),
                right: mat_k.clone(),
            });
        }
        (true, false) => {
            let r = ideal_reflection(mode.pol);
            return Ok(FresnelSet {
                r_fwd: -r,
                r_bwd: r,
                t_fwd: zero,
                t_bwd: zero,
                left: mat_j.clone(),
                right: mat_k.clone(),
            });
        }
        (false, false) => {}
    }
    if mat_j == mat_k {
        return Ok(FresnelSet::identity(mat_j.clone()));
    }
    let (eps_j, mu_j) = mat_j.response(mode.freq)?;
    let (eps_k, mu_k) = mat_k.response(mode.freq)?;
    let q_j = normal_wavenumber(eps_j, mu_j, mode);
    let q_k = normal_wavenumber(eps_k, mu_k, mode);
    let gamma_s = mu_j / mu_k;
    let gamma = match mode.pol {
        Polarization::P => eps_j / eps_k,
        Polarization::S => gamma_s,
    };
    let num = q_j - gamma * q_k;
    let den = q_j + gamma * q_k;
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateInterface(format!(
            "beta_j + gamma beta_k = 0 between {mat_j} and {mat_k} at {mode}"
        )));
    }
    let r = num / den;
    let root = match mode.pol {
        Polarization::S => Complex64::new(1.0, 0.0),
        Polarization::P => (gamma / gamma_s).sqrt(),
    };
    let one = Complex64::new(1.0, 0.0);
    Ok(FresnelSet {
        r_fwd: r,
        r_bwd: -r,
        t_fwd: root * (one + r),
        t_bwd: (one - r) / root,
        left: mat_j.clone(),
        right: mat_k.clone(),
    })
}

/// Combines two stacks separated by a local spacer layer of thickness `d`.
///
/// With `j` the left medium of `left`, `k` the spacer and `m` the right
/// medium of `right`, and `P = e^{iβ_k d}` (`e^{-κ_k d}` at imaginary
/// frequency):
///
/// ```text
/// r_{j/m} = r_{j/k} + t_{j/k} t_{k/j} r_{k/m} P² / (1 - r_{k/j} r_{k/m} P²)
/// t_{j/m} = t_{j/k} t_{k/m} P / (1 - r_{k/j} r_{k/m} P²)
/// ```
///
/// and the same relations with `j` and `m` exchanged for the backward pair.
pub fn join(
    left: &FresnelSet,
    spacer: &MaterialModel,
    d: f64,
    right: &FresnelSet,
    mode: &TransverseMode,
) -> Result<FresnelSet> {
    join_with_floor(left, spacer, d, right, mode, DEFAULT_DENOMINATOR_FLOOR)
}

pub fn join_with_floor(
    left: &FresnelSet,
    spacer: &MaterialModel,
    d: f64,
    right: &FresnelSet,
    mode: &TransverseMode,
    floor: f64,
) -> Result<FresnelSet> {
    if &left.right != spacer || &right.left != spacer {
        return Err(Error::MediumMismatch(format!(
            "cannot join [{} | {}] and [{} | {}] across spacer {}",
            left.left, left.right, right.left, right.right, spacer
        )));
    }
    if spacer.is_ideal_mirror() {
        return Err(Error::Unsupported(
            "an ideal mirror cannot be used as a spacer layer".into(),
        ));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("spacer thickness must be >= 0, got {d}")));
    }
    let phase = if d == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        let (eps, mu) = spacer.response(mode.freq)?;
        propagation_factor(normal_wavenumber(eps, mu, mode), d, mode.freq)
    };
    let phase2 = phase * phase;
    let den = Complex64::new(1.0, 0.0) - left.r_bwd * right.r_fwd * phase2;
    let magnitude = den.norm();
    if !(magnitude >= floor) {
        return Err(Error::Resonance { magnitude, floor });
    }
    Ok(FresnelSet {
        r_fwd: left.r_fwd + left.t_fwd * left.t_bwd * right.r_fwd * phase2 / den,
        r_bwd: right.r_bwd + right.t_bwd * right.t_fwd * left.r_bwd * phase2 / den,
        t_fwd: left.t_fwd * right.t_fwd * phase / den,
        t_bwd: right.t_bwd * left.t_bwd * phase / den,
        left: left.left.clone(),
        right: right.right.clone(),
    })
}
