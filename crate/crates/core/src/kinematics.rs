//! Per-layer wave kinematics: perpendicular wavenumbers, polarization
//! vectors, z-directed energy flux and transmittances.
//!
//! Coordinates: the parallel wavevector points along x̂ (k̂ = x̂), z is the
//! stacking direction, so `k̂ × ẑ = -ŷ`.

use std::fmt;

use num_complex::Complex64;

use crate::constants::{C, EPSILON_0};
use crate::materials::physical_sqrt;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// TM, electric field in the plane of incidence.
    P,
    /// TE, electric field perpendicular to the plane of incidence.
    S,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::P, Polarization::S];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::P => "p",
            Polarization::S => "s",
        })
    }
}

/// A frequency point: real ω or imaginary ω = iξ (both rad/s, positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Real(f64),
    Imaginary(f64),
}

impl Frequency {
    /// |ω| or ξ.
    pub fn magnitude(self) -> f64 {
        match self {
            Frequency::Real(w) | Frequency::Imaginary(w) => w,
        }
    }

    pub fn is_imaginary(self) -> bool {
        matches!(self, Frequency::Imaginary(_))
    }
}

/// Polarization, parallel wavenumber and frequency of a transverse mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    pub pol: Polarization,
    /// Parallel wavenumber, 1/m.
    pub k: f64,
    pub freq: Frequency,
}

impl TransverseMode {
    pub fn new(pol: Polarization, k: f64, freq: Frequency) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("parallel wavenumber must be >= 0, got {k}")));
        }
        if !(freq.magnitude() > 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be positive, got {}",
                freq.magnitude()
            )));
        }
        Ok(Self { pol, k, freq })
    }

    pub fn real(pol: Polarization, k: f64, omega: f64) -> Result<Self> {
        Self::new(pol, k, Frequency::Real(omega))
    }

    pub fn imaginary(pol: Polarization, k: f64, xi: f64) -> Result<Self> {
        Self::new(pol, k, Frequency::Imaginary(xi))
    }

    pub fn with_pol(self, pol: Polarization) -> Self {
        Self { pol, ..self }
    }
}

impl fmt::Display for TransverseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.freq {
            Frequency::Real(w) => write!(f, "{}-pol, k={:e} 1/m, omega={:e} rad/s", self.pol, self.k, w),
            Frequency::Imaginary(x) => {
                write!(f, "{}-pol, k={:e} 1/m, xi={:e} rad/s", self.pol, self.k, x)
            }
        }
    }
}

/// Layer wavenumber and perpendicular wavenumber at a real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerWave {
    pub k_layer: Complex64,
    pub beta: Complex64,
}

impl LayerWave {
    pub fn new(n: Complex64, omega: f64, k: f64) -> Self {
        let k_layer = n * (omega / C);
        Self {
            k_layer,
            beta: physical_sqrt(k_layer * k_layer - k * k),
        }
    }
}

/// β = √(n²ω²/c² − k²), Im β ≥ 0.
pub fn beta(n: Complex64, omega: f64, k: f64) -> Complex64 {
    let k0 = omega / C;
    physical_sqrt(n * n * (k0 * k0) - k * k)
}

/// κ = √(n²ξ²/c² + k²), the perpendicular wavenumber at ω = iξ.
pub fn kappa(n: f64, xi: f64, k: f64) -> f64 {
    (n * xi / C).hypot(k)
}

/// Perpendicular wavenumber used by the interface and join formulas: β on the
/// real axis, κ (real, stored as a complex value) on the imaginary axis.
///
/// Interface coefficients only involve ratios of these numbers, which agree
/// between β and κ because β = iκ there.
pub(crate) fn normal_wavenumber(eps: Complex64, mu: Complex64, mode: &TransverseMode) -> Complex64 {
    match mode.freq {
        Frequency::Real(omega) => {
            let k0 = omega / C;
            physical_sqrt(eps * mu * (k0 * k0) - mode.k * mode.k)
        }
        Frequency::Imaginary(xi) => {
            let k0 = xi / C;
            let em = (eps * mu).re;
            Complex64::new((em * k0 * k0 + mode.k * mode.k).sqrt(), 0.0)
        }
    }
}

/// One-way propagation factor across thickness `d`: `e^{iβd}` on the real
/// axis, `e^{-κd}` on the imaginary axis.
pub(crate) fn propagation_factor(q: Complex64, d: f64, freq: Frequency) -> Complex64 {
    if d == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    match freq {
        Frequency::Real(_) => (Complex64::i() * q * d).exp(),
        Frequency::Imaginary(_) => Complex64::new((-q.re * d).exp(), 0.0),
    }
}

/// Propagation direction along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

/// Polarization vector ê± in the (k̂, ŷ, ẑ) basis:
/// p: `(∓β k̂ + k ẑ)/k_l`, s: `k̂ × ẑ`.
///
/// The p vector is not renormalized for complex `k_l`.
pub fn polarization_vectors(mode: &TransverseMode, wave: &LayerWave, direction: Direction) -> Result<[Complex64; 3]> {
    if mode.freq.is_imaginary() {
        return Err(Error::Domain(
            "polarization vectors are defined for real frequencies".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    match mode.pol {
        Polarization::S => Ok([zero, Complex64::new(-1.0, 0.0), zero]),
        Polarization::P => {
            if wave.k_layer.norm() == 0.0 {
                return Err(Error::DegenerateMode("layer wavenumber is zero".into()));
            }
            let s = direction.sign();
            Ok([
                -s * wave.beta / wave.k_layer,
                zero,
                Complex64::new(mode.k, 0.0) / wave.k_layer,
            ])
        }
    }
}

/// Time-averaged z-component of the energy flux of an up- or down-going
/// plane wave, W/m². `η^p = ε*/μ*`, `η^s = ε/μ`; SI prefactor `ε0 c / 2`.
pub fn poynting_z(
    mode: &TransverseMode,
    eps: Complex64,
    mu: Complex64,
    amplitude: Complex64,
    z: f64,
    direction: Direction,
) -> Result<f64> {
    let omega = match mode.freq {
        Frequency::Real(w) => w,
        Frequency::Imaginary(_) => return Err(Error::Domain("energy flux is defined for real frequencies".into())),
    };
    if amplitude == Complex64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let n = physical_sqrt(eps * mu);
    let wave = LayerWave::new(n, omega, mode.k);
    if wave.k_layer.norm() == 0.0 {
        return Err(Error::DegenerateMode("layer wavenumber is zero".into()));
    }
    let eta = match mode.pol {
        Polarization::P => (eps / mu).conj(),
        Polarization::S => eps / mu,
    };
    let s = direction.sign();
    let field = amplitude * (Complex64::i() * s * wave.beta * z).exp();
    let factor = (eta.sqrt() * s * wave.beta / wave.k_layer).re;
    Ok(0.5 * EPSILON_0 * C * factor * field.norm_sqr())
}

/// Outer medium of a stack as seen by [`transmittance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMedium {
    pub eps: Complex64,
    pub mu: Complex64,
    pub beta: Complex64,
}

impl BoundaryMedium {
    fn check_transparent(&self, side: &str) -> Result<()> {
        let real = |z: Complex64| z.im.abs() <= 1e-14 * z.re.abs();
        if !(real(self.eps) && real(self.mu) && self.eps.re > 0.0 && self.mu.re > 0.0) {
            return Err(Error::UndefinedTransmittance(format!(
                "{side} medium is not transparent"
            )));
        }
        if !(real(self.beta) && self.beta.re > 0.0) {
            return Err(Error::UndefinedTransmittance(format!(
                "wave in the {side} medium is not propagating"
            )));
        }
        Ok(())
    }
}

/// Transmittances `(T_{j/m}, T_{m/j})` of a stack between transparent media.
pub fn transmittance(
    t_fwd: Complex64,
    t_bwd: Complex64,
    left: &BoundaryMedium,
    right: &BoundaryMedium,
) -> Result<(f64, f64)> {
    left.check_transparent("left")?;
    right.check_transparent("right")?;
    let ratio = (left.mu.re * right.beta.re) / (right.mu.re * left.beta.re);
    Ok((ratio * t_fwd.norm_sqr(), t_bwd.norm_sqr() / ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_normal_and_evanescent() {
        let omega = 2.0e15;
        let b = beta(c(1.0, 0.0), omega, 0.0);
        assert!((b - c(omega / C, 0.0)).norm() < 1e-9);
        let k = 2.0 * omega / C;
        let b = beta(c(1.0, 0.0), omega, k);
        let expected = c(0.0, (k * k - (omega / C).powi(2)).sqrt());
        assert!((b - expected).norm() < 1e-9 * expected.norm());
    }

    #[test]
    fn beta_hand_value() {
        let omega = 1e7 * C;
        let b = beta(c(1.5, 0.0), omega, 1e7);
        assert!((b.re - 1.118_033_988_749_895e7).abs() < 1e-3);
        assert_eq!(b.im, 0.0);
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(1.0, 3.0 * C, 4.0) - 5.0).abs() < 1e-14);
        assert!((kappa(2.0, 1.0e15, 0.0) - 2.0e15 / C).abs() < 1e-6);
        assert!((kappa(1.0, 1e-30, 7.0) - 7.0).abs() < 1e-14);
    }

    #[test]
    fn s_vector_is_perpendicular_unit() {
        let mode = TransverseMode::real(Polarization::S, 1e6, 2e15).unwrap();
        let wave = LayerWave::new(c(1.5, 0.0), 2e15, 1e6);
        let e = polarization_vectors(&mode, &wave, Direction::Up).unwrap();
        assert_eq!(e, [c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn p_vector_normal_incidence_and_dot_product() {
        let omega = 2e15;
        let mode = TransverseMode::real(Polarization::P, 0.0, omega).unwrap();
        let wave = LayerWave::new(c(1.5, 0.0), omega, 0.0);
        let up = polarization_vectors(&mode, &wave, Direction::Up).unwrap();
        let down = polarization_vectors(&mode, &wave, Direction::Down).unwrap();
        assert!((up[0] + c(1.0, 0.0)).norm() < 1e-15);
        assert!((down[0] - c(1.0, 0.0)).norm() < 1e-15);

        let k = 0.7 * 1.5 * omega / C;
        let mode = TransverseMode::real(Polarization::P, k, omega).unwrap();
        let wave = LayerWave::new(c(1.5, 0.0), omega, k);
        let e = polarization_vectors(&mode, &wave, Direction::Down).unwrap();
        let dot: Complex64 = e.iter().map(|x| x * x).sum();
        assert!((dot - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn p_vector_degenerate_layer() {
        let mode = TransverseMode::real(Polarization::P, 0.0, 1.0).unwrap();
        let wave = LayerWave {
            k_layer: c(0.0, 0.0),
            beta: c(0.0, 0.0),
        };
        assert!(matches!(
            polarization_vectors(&mode, &wave, Direction::Up),
            Err(Error::DegenerateMode(_))
        ));
    }

    #[test]
    fn flux_cases() {
        let omega = 2e15;
        let one = c(1.0, 0.0);
        let mode = TransverseMode::real(Polarization::S, 0.3 * omega / C, omega).unwrap();
        assert_eq!(
            poynting_z(&mode, one, one, c(0.0, 0.0), 0.0, Direction::Up).unwrap(),
            0.0
        );
        let a = poynting_z(&mode, c(2.25, 0.0), one, c(1.0, 0.5), 0.0, Direction::Up).unwrap();
        let b = poynting_z(&mode, c(2.25, 0.0), one, c(1.0, 0.5), 3e-6, Direction::Up).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-14 * a);
        let down = poynting_z(&mode, c(2.25, 0.0), one, c(1.0, 0.5), 0.0, Direction::Down).unwrap();
        assert!((down + a).abs() < 1e-14 * a);
        // evanescent in vacuum
        let mode = TransverseMode::real(Polarization::P, 2.0 * omega / C, omega).unwrap();
        let f = poynting_z(&mode, one, one, c(1.0, 0.0), 1e-7, Direction::Up).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn transmittance_glass_interface() {
        let one = c(1.0, 0.0);
        let omega = 2e15;
        let vac = BoundaryMedium {
            eps: one,
            mu: one,
            beta: beta(one, omega, 0.0),
        };
        let glass = BoundaryMedium {
            eps: c(2.25, 0.0),
            mu: one,
            beta: beta(c(1.5, 0.0), omega, 0.0),
        };
        let (tf, _) = transmittance(c(0.8, 0.0), c(1.2, 0.0), &vac, &glass).unwrap();
        assert!((tf - 0.96).abs() < 1e-14);
        let (tf, tb) = transmittance(one, one, &vac, &vac).unwrap();
        assert_eq!((tf, tb), (1.0, 1.0));
        let evan = BoundaryMedium {
            beta: beta(one, omega, 2.0 * omega / C),
            ..vac
        };
        assert!(matches!(
            transmittance(one, one, &vac, &evan),
            Err(Error::UndefinedTransmittance(_))
        ));
    }

    #[test]
    fn imaginary_axis_wavenumber_matches_kappa() {
        let mode = TransverseMode::imaginary(Polarization::P, 3.0e6, 1.0e15).unwrap();
        let q = normal_wavenumber(c(4.0, 0.0), c(1.0, 0.0), &mode);
        assert!((q.re - kappa(2.0, 1.0e15, 3.0e6)).abs() < 1e-6);
        assert_eq!(q.im, 0.0);
    }
}
