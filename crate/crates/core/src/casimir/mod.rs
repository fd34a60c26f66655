//! Zero-temperature Casimir force on a slab between two planar mirrors.
//!
//! Layout along z: mirror 1, gap 1 (width `d1`), slab, gap 2 (width `d2`),
//! mirror 2, all gaps filled with the cavity medium. Every object enters
//! only through its reflection and transmission coefficients at imaginary
//! frequency, so mirrors and slab can be arbitrary stacks including opaque
//! ones.
//!
//! Sign convention: a positive force pushes the slab towards mirror 2.

mod quadrature;

pub use quadrature::{
    integrate, integrate_mode_sum, integrate_mode_sum_with_knots, Estimate, QuadratureSettings, Sample,
};

use num_complex::Complex64;

use crate::constants::C;
use crate::kinematics::{Frequency, Polarization, TransverseMode};
use crate::materials::MaterialModel;
use crate::stacks::{evaluate, FreqKind, Knots, StackExpr};
use crate::{Error, Result};

/// `r + t² R e^{-2κd} / (1 - r R e^{-2κd})`: reflection of a slab seen from
/// one side when a mirror with reflection `R` sits a distance `d` behind it.
pub fn dressed_reflection(r: Complex64, t: Complex64, big_r: Complex64, d: f64, kappa: f64) -> Result<Complex64> {
    dressed_reflection_asymmetric(r, r, t * t, big_r, d, kappa)
}

/// As [`dressed_reflection`] for a slab that is not mirror symmetric:
/// `r_near` faces the observer, `r_far` faces the mirror and `tt` is the
/// product of the two transmission coefficients.
pub fn dressed_reflection_asymmetric(
    r_near: Complex64,
    r_far: Complex64,
    tt: Complex64,
    big_r: Complex64,
    d: f64,
    kappa: f64,
) -> Result<Complex64> {
    if !(kappa > 0.0 && d > 0.0) {
        return Err(Error::Domain(format!(
            "dressed reflection needs kappa > 0 and d > 0, got kappa={kappa}, d={d}"
        )));
    }
    let x = 2.0 * kappa * d;
    let value = dress(r_near, r_far, tt, big_r, x);
    if !value.is_finite() {
        let c = r_far * big_r;
        return Err(Error::Resonance {
            magnitude: ((1.0 - c) - c * (-x).exp_m1()).norm(),
            floor: 0.0,
        });
    }
    Ok(value)
}

/// `r_near + tt R e^{-x} / (1 - r_far R e^{-x})` with the denominator in
/// expm1 form; an opaque slab (`tt = 0`) gives back `r_near`.
fn dress(r_near: Complex64, r_far: Complex64, tt: Complex64, big_r: Complex64, x: f64) -> Complex64 {
    let e = (-x).exp();
    if e == 0.0 || tt == Complex64::new(0.0, 0.0) {
        return r_near;
    }
    let c = r_far * big_r;
    r_near + tt * big_r * e / ((1.0 - c) - c * (-x).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    One,
    Two,
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Region::One),
            "2" => Ok(Region::Two),
            other => Err(Error::Parse(format!("region must be 1 or 2, got {other:?}"))),
        }
    }
}

/// A slab in a planar cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub mirror1: StackExpr,
    pub mirror2: StackExpr,
    pub slab: StackExpr,
    pub d1: f64,
    pub d2: f64,
    pub medium: MaterialModel,
    pub settings: QuadratureSettings,
}

fn check_gap(name: &str, d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {d}")))
    }
}

fn check_side(what: &str, side: Option<&MaterialModel>, medium: &MaterialModel) -> Result<()> {
    match side {
        Some(m) if m == medium => Ok(()),
        Some(m) => Err(Error::MediumMismatch(format!(
            "{what} is {m}, cavity medium is {medium}"
        ))),
        None => Err(Error::Domain(format!("{what} is undefined"))),
    }
}

impl CavityConfig {
    pub fn new(
        mirror1: StackExpr,
        mirror2: StackExpr,
        slab: StackExpr,
        d1: f64,
        d2: f64,
        medium: MaterialModel,
        settings: QuadratureSettings,
    ) -> Result<Self> {
        let config = Self {
            mirror1,
            mirror2,
            slab,
            d1,
            d2,
            medium,
            settings,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_gap("d1", self.d1)?;
        check_gap("d2", self.d2)?;
        self.settings.validate()?;
        if self.medium.is_ideal_mirror() {
            return Err(Error::Unsupported("the cavity medium cannot be an ideal mirror".into()));
        }
        for s in [&self.mirror1, &self.mirror2, &self.slab] {
            s.validate()?;
        }
        check_side("right medium of mirror 1", self.mirror1.right_medium(), &self.medium)?;
        check_side("left medium of mirror 2", self.mirror2.left_medium(), &self.medium)?;
        check_side("left medium of the slab", self.slab.left_medium(), &self.medium)?;
        check_side("right medium of the slab", self.slab.right_medium(), &self.medium)?;
        Ok(())
    }

    /// Same cavity with new gap widths.
    pub fn with_gaps(&self, d1: f64, d2: f64) -> Self {
        Self { d1, d2, ..self.clone() }
    }

    /// Break points of the tabulated parts on the imaginary axis.
    pub fn knots(&self) -> Knots {
        [&self.mirror1, &self.mirror2, &self.slab]
            .iter()
            .fold(Knots::default(), |acc, s| acc.merge(s.knots(FreqKind::Imaginary)))
    }

    /// Reflection and transmission data for one transverse mode.
    pub fn mode_terms(&self, xi: f64, kappa: f64, pol: Polarization) -> Result<ModeTerms> {
        let mode = imaginary_mode(&self.medium, xi, kappa, pol)?;
        let m1 = evaluate(&self.mirror1, &mode)?;
        let m2 = evaluate(&self.mirror2, &mode)?;
        let slab = evaluate(&self.slab, &mode)?;
        Ok(ModeTerms::new(
            m1.r_bwd,
            m2.r_fwd,
            slab.r_fwd,
            slab.r_bwd,
            slab.t_fwd * slab.t_bwd,
            2.0 * kappa * self.d1,
            2.0 * kappa * self.d2,
        ))
    }
}

/// Transverse mode at imaginary frequency `ξ` whose decay constant in the
/// cavity medium is `κ`.
fn imaginary_mode(medium: &MaterialModel, xi: f64, kappa: f64, pol: Polarization) -> Result<TransverseMode> {
    let kappa0 = medium.index(Frequency::Imaginary(xi))?.re * xi / C;
    let k = ((kappa - kappa0) * (kappa + kappa0)).max(0.0).sqrt();
    TransverseMode::imaginary(pol, k, xi)
}

/// Coefficients entering the cavity integrands at one `(ξ, κ, q)`.
///
/// `big_r1` is mirror 1 seen from gap 1, `big_r2` mirror 2 seen from gap 2,
/// `r_fwd`/`r_bwd` the slab seen from gaps 1/2, `tt = t_fwd t_bwd` and
/// `e_j = e^{-x_j} = e^{-2κ d_j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerms {
    pub big_r1: Complex64,
    pub big_r2: Complex64,
    pub r_fwd: Complex64,
    pub r_bwd: Complex64,
    pub tt: Complex64,
    pub e1: f64,
    pub e2: f64,
    pub x1: f64,
    pub x2: f64,
}

impl ModeTerms {
    pub fn new(
        big_r1: Complex64,
        big_r2: Complex64,
        r_fwd: Complex64,
        r_bwd: Complex64,
        tt: Complex64,
        x1: f64,
        x2: f64,
    ) -> Self {
        Self {
            big_r1,
            big_r2,
            r_fwd,
            r_bwd,
            tt,
            e1: (-x1).exp(),
            e2: (-x2).exp(),
            x1,
            x2,
        }
    }

    /// `r_{1+}`: slab dressed by mirror 2, seen from gap 1.
    pub fn dressed1(&self) -> Complex64 {
        dress(self.r_fwd, self.r_bwd, self.tt, self.big_r2, self.x2)
    }

    /// `r_{2-}`: slab dressed by mirror 1, seen from gap 2.
    pub fn dressed2(&self) -> Complex64 {
        dress(self.r_bwd, self.r_fwd, self.tt, self.big_r1, self.x1)
    }

    /// Round-trip factor `r_{j-} r_{j+} e^{-2κ d_j}` of gap `j`.
    pub fn round_trip(&self, region: Region) -> Complex64 {
        match region {
            Region::One => self.big_r1 * self.dressed1() * self.e1,
            Region::Two => self.dressed2() * self.big_r2 * self.e2,
        }
    }

    /// `a = t_fwd t_bwd - r_fwd r_bwd` of the slab.
    pub fn a(&self) -> Complex64 {
        self.tt - self.r_fwd * self.r_bwd
    }

    /// Denominator of the closed form,
    /// `N = 1 - r_fwd R₁e₁ - r_bwd R₂e₂ - a R₁R₂e₁e₂`.
    pub fn closed_denominator(&self) -> Complex64 {
        let a1 = self.big_r1 * self.e1;
        let a2 = self.big_r2 * self.e2;
        1.0 - self.r_fwd * a1 - self.r_bwd * a2 - self.a() * a1 * a2
    }

    /// Integrand of the closed form without the `kκ` weight. The magnitude
    /// is that of the two numerator terms, which cancel between identical
    /// mirrors.
    pub fn closed_integrand(&self) -> Result<Sample> {
        let mut n = self.closed_denominator();
        if n.norm() < 1e-8 {
            // near-total reflection at small κd: the expanded form cancels
            let c1 = self.big_r1 * self.dressed1();
            let first = (1.0 - c1) - c1 * (-self.x1).exp_m1();
            n = first * (1.0 - self.r_bwd * self.big_r2 * self.e2);
        }
        if n.norm() == 0.0 || !n.is_finite() {
            return Err(Error::Resonance {
                magnitude: n.norm(),
                floor: 0.0,
            });
        }
        let n2 = self.r_bwd * self.big_r2 * self.e2;
        let n1 = self.r_fwd * self.big_r1 * self.e1;
        Ok(Sample {
            value: ((n2 - n1) / n).re,
            magnitude: (n2.norm() + n1.norm()) / n.norm(),
        })
    }

    /// Integrand of the stress in gap `j` without the `kκ` weight.
    pub fn stress_integrand(&self, region: Region) -> Result<f64> {
        let (coupling, x) = match region {
            Region::One => (self.big_r1 * self.dressed1(), self.x1),
            Region::Two => (self.dressed2() * self.big_r2, self.x2),
        };
        geometric_term(coupling, x)
    }
}

/// `ρ/(1 - ρ)` with `ρ = c e^{-x}`, using `1 - ρ = (1 - c) - c·expm1(-x)` so
/// that perfectly reflecting pairs keep full precision at small `κd`.
fn geometric_term(coupling: Complex64, x: f64) -> Result<f64> {
    let rho = coupling * (-x).exp();
    let den = (1.0 - coupling) - coupling * (-x).exp_m1();
    if rho.norm() - 1.0 > 64.0 * f64::EPSILON || den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::Resonance {
            magnitude: den.norm(),
            floor: 0.0,
        });
    }
    Ok((rho / den).re)
}

/// `T_zz` in gap `j`, Pa.
pub fn stress_zz(region: Region, config: &CavityConfig) -> Result<Estimate> {
    config.validate()?;
    let d = match region {
        Region::One => config.d1,
        Region::Two => config.d2,
    };
    integrate_mode_sum_with_knots(&config.medium, d, &config.settings, &config.knots(), |xi, kappa, q| {
        config.mode_terms(xi, kappa, q)?.stress_integrand(region)
    })
}

fn combine(a: Estimate, b: Estimate, sign: f64) -> Estimate {
    Estimate {
        value: a.value + sign * b.value,
        error: a.error + b.error,
        evaluations: a.evaluations + b.evaluations,
    }
}

/// `T_zz⁽²⁾ - T_zz⁽¹⁾`, Pa.
pub fn force_direct(config: &CavityConfig) -> Result<Estimate> {
    let t2 = stress_zz(Region::Two, config)?;
    let t1 = stress_zz(Region::One, config)?;
    Ok(combine(t2, t1, -1.0))
}

/// Force from the single closed-form integrand, Pa.
pub fn force_closed(config: &CavityConfig) -> Result<Estimate> {
    config.validate()?;
    let d = config.d1.min(config.d2);
    integrate_mode_sum_with_knots(&config.medium, d, &config.settings, &config.knots(), |xi, kappa, q| {
        config.mode_terms(xi, kappa, q)?.closed_integrand()
    })
}

/// Force between `mirror` (left) and `body` (right) across a gap `d` of
/// `medium`, Pa. Negative values attract the body towards the mirror.
pub fn two_body_force(
    mirror: &StackExpr,
    body: &StackExpr,
    d: f64,
    medium: &MaterialModel,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    check_gap("d", d)?;
    mirror.validate()?;
    body.validate()?;
    check_side("right medium of the mirror", mirror.right_medium(), medium)?;
    check_side("left medium of the body", body.left_medium(), medium)?;
    let knots = mirror.knots(FreqKind::Imaginary).merge(body.knots(FreqKind::Imaginary));
    let e = integrate_mode_sum_with_knots(medium, d, settings, &knots, |xi, kappa, q| {
        let mode = imaginary_mode(medium, xi, kappa, q)?;
        let big_r = evaluate(mirror, &mode)?.r_bwd;
        let r = evaluate(body, &mode)?.r_fwd;
        geometric_term(big_r * r, 2.0 * kappa * d)
    })?;
    Ok(Estimate { value: -e.value, ..e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ideal_casimir_pressure;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ideal_left() -> StackExpr {
        StackExpr::interface(MaterialModel::IdealMirror, MaterialModel::Vacuum)
    }

    fn ideal_right() -> StackExpr {
        StackExpr::interface(MaterialModel::Vacuum, MaterialModel::IdealMirror)
    }

    fn glass_slab(d: f64) -> StackExpr {
        let glass = MaterialModel::dielectric(1.5);
        StackExpr::sequence(vec![
            StackExpr::interface(MaterialModel::Vacuum, glass.clone()),
            StackExpr::slab(glass.clone(), d).unwrap(),
            StackExpr::interface(glass, MaterialModel::Vacuum),
        ])
        .unwrap()
    }

    #[test]
    fn dressed_reflection_limits() {
        let (r, t) = (c(0.3), c(0.7));
        assert_eq!(dressed_reflection(r, t, c(0.0), 1e-6, 1e6).unwrap(), r);
        assert_eq!(dressed_reflection(r, c(0.0), c(0.9), 1e-6, 1e6).unwrap(), r);
        assert_eq!(dressed_reflection(r, t, c(0.9), 1.0, 1e6).unwrap(), r);
        let e = (-2.0f64).exp();
        let expected = 0.3 + 0.49 * 0.9 * e / (1.0 - 0.27 * e);
        assert!((dressed_reflection(r, t, c(0.9), 1e-6, 1e6).unwrap().re - expected).abs() < 1e-15);
        assert!(dressed_reflection(r, t, c(0.9), 0.0, 1e6).is_err());
        assert!(matches!(
            dressed_reflection(c(1.0), t, c(1.0), 1e-6, 1e-300),
            Err(Error::Resonance { .. })
        ));
    }

    #[test]
    fn opaque_slab_factorizes() {
        let m = ModeTerms::new(c(0.8), c(-0.6), c(0.4), c(0.4), c(0.0), 1.2, 0.4);
        let expected = (1.0 - 0.4 * 0.8 * m.e1) * (1.0 + 0.4 * 0.6 * m.e2);
        assert!((m.closed_denominator().re - expected).abs() < 1e-15);
    }

    #[test]
    fn regional_relation_pointwise() {
        let m = ModeTerms::new(c(0.8), c(0.6), c(-0.3), c(0.2), c(0.7), 0.9, 0.1);
        let n = m.closed_denominator();
        let lhs1 = (1.0 - m.round_trip(Region::One)) * (1.0 - m.r_bwd * m.big_r2 * m.e2);
        let lhs2 = (1.0 - m.round_trip(Region::Two)) * (1.0 - m.r_fwd * m.big_r1 * m.e1);
        assert!((lhs1 - n).norm() < 1e-15);
        assert!((lhs2 - n).norm() < 1e-15);
        let direct = m.stress_integrand(Region::Two).unwrap() - m.stress_integrand(Region::One).unwrap();
        assert!((direct - m.closed_integrand().unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn ideal_two_body() {
        let d = 1e-6;
        let f = two_body_force(
            &ideal_left(),
            &ideal_right(),
            d,
            &MaterialModel::Vacuum,
            &QuadratureSettings::default(),
        )
        .unwrap();
        let expected = -ideal_casimir_pressure(d);
        assert!(
            ((f.value - expected) / expected).abs() < 1e-7,
            "{} vs {}",
            f.value,
            expected
        );
    }

    #[test]
    fn removed_mirror_gives_zero() {
        let vacuum = StackExpr::interface(MaterialModel::Vacuum, MaterialModel::Vacuum);
        let f = two_body_force(
            &vacuum,
            &ideal_right(),
            1e-6,
            &MaterialModel::Vacuum,
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn routes_agree_and_nearer_mirror_wins() {
        let config = CavityConfig::new(
            ideal_left(),
            ideal_right(),
            glass_slab(2e-7),
            1.5e-6,
            0.5e-6,
            MaterialModel::Vacuum,
            QuadratureSettings::with_tolerance(1e-9),
        )
        .unwrap();
        let direct = force_direct(&config).unwrap();
        let closed = force_closed(&config).unwrap();
        assert!(direct.value > 0.0);
        assert!(((direct.value - closed.value) / closed.value).abs() < 1e-7);
    }

    #[test]
    fn symmetric_cavity_is_null() {
        let settings = QuadratureSettings::with_tolerance(1e-9);
        let config = CavityConfig::new(
            ideal_left(),
            ideal_right(),
            glass_slab(1e-7),
            1e-6,
            1e-6,
            MaterialModel::Vacuum,
            settings,
        )
        .unwrap();
        let t1 = stress_zz(Region::One, &config).unwrap();
        let f = force_direct(&config).unwrap();
        assert!(f.value.abs() <= 10.0 * settings.rel_tol * t1.value.abs());
    }

    #[test]
    fn config_validation() {
        let glass = MaterialModel::dielectric(1.5);
        let bad = CavityConfig::new(
            ideal_left(),
            StackExpr::interface(glass.clone(), MaterialModel::IdealMirror),
            glass_slab(1e-7),
            1e-6,
            1e-6,
            MaterialModel::Vacuum,
            QuadratureSettings::default(),
        );
        assert!(matches!(bad, Err(Error::MediumMismatch(_))));
        let bad = CavityConfig::new(
            ideal_left(),
            ideal_right(),
            glass_slab(1e-7),
            0.0,
            1e-6,
            MaterialModel::Vacuum,
            QuadratureSettings::default(),
        );
        assert!(matches!(bad, Err(Error::Domain(_))));
    }
}
