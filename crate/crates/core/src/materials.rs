//! Dispersion models for layer materials.
//!
//! Every model yields the relative permittivity ε and permeability μ at a
//! real angular frequency ω (complex values) or at an imaginary frequency
//! ω = iξ (real values, the domain of the Lifshitz integral).

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::kinematics::Frequency;
use crate::{Error, Result};

/// Frequency-dependent response of a homogeneous, isotropic, local medium.
#[derive(Debug, Clone)]
pub enum MaterialModel {
    Vacuum,
    /// Frequency-independent ε and μ.
    ConstantIndex {
        eps: Complex64,
        mu: Complex64,
    },
    /// Free-electron metal, `1 - ωp²/(ω² + iγω)`.
    Drude {
        plasma: f64,
        damping: f64,
    },
    /// Single Lorentz oscillator, `1 + ωp²/(ω0² - ω² - iγω)`.
    Lorentz {
        resonance: f64,
        plasma: f64,
        damping: f64,
    },
    /// Perfect reflector. Never evaluated as a finite ε; interfaces treat it
    /// as the ε → ∞ limit.
    IdealMirror,
    /// Measured or precomputed ε(iξ), imaginary axis only.
    TabulatedImaginary(Arc<ImaginaryTable>),
}

impl MaterialModel {
    pub fn constant(eps: f64, mu: f64) -> Self {
        MaterialModel::ConstantIndex {
            eps: Complex64::new(eps, 0.0),
            mu: Complex64::new(mu, 0.0),
        }
    }

    /// Non-magnetic medium with a real refractive index.
    pub fn dielectric(n: f64) -> Self {
        Self::constant(n * n, 1.0)
    }

    pub fn drude(plasma: f64, damping: f64) -> Self {
        MaterialModel::Drude { plasma, damping }
    }

    pub fn lorentz(resonance: f64, plasma: f64, damping: f64) -> Self {
        MaterialModel::Lorentz {
            resonance,
            plasma,
            damping,
        }
    }

    pub fn is_ideal_mirror(&self) -> bool {
        matches!(self, MaterialModel::IdealMirror)
    }

    /// (ε, μ) at the given frequency point. On the imaginary axis both are
    /// returned as complex numbers with zero imaginary part.
    pub fn response(&self, freq: Frequency) -> Result<(Complex64, Complex64)> {
        match freq {
            Frequency::Real(omega) => Ok((eps_real(self, omega)?, mu_real(self, omega)?)),
            Frequency::Imaginary(xi) => Ok((
                Complex64::new(eps_imag(self, xi)?, 0.0),
                Complex64::new(mu_imag(self, xi)?, 0.0),
            )),
        }
    }

    /// Refractive index at the given frequency point.
    pub fn index(&self, freq: Frequency) -> Result<Complex64> {
        let (eps, mu) = self.response(freq)?;
        refractive_index(eps, mu)
    }
}

impl PartialEq for MaterialModel {
    fn eq(&self, other: &Self) -> bool {
        use MaterialModel::*;
        match (self, other) {
            (Vacuum, Vacuum) | (IdealMirror, IdealMirror) => true,
            (ConstantIndex { eps: e1, mu: m1 }, ConstantIndex { eps: e2, mu: m2 }) => e1 == e2 && m1 == m2,
            (
                Drude {
                    plasma: p1,
                    damping: g1,
                },
                Drude {
                    plasma: p2,
                    damping: g2,
                },
            ) => p1 == p2 && g1 == g2,
            (
                Lorentz {
                    resonance: r1,
                    plasma: p1,
                    damping: g1,
                },
                Lorentz {
                    resonance: r2,
                    plasma: p2,
                    damping: g2,
                },
            ) => r1 == r2 && p1 == p2 && g1 == g2,
            (TabulatedImaginary(a), TabulatedImaginary(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl fmt::Display for MaterialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaterialModel::Vacuum => write!(f, "vacuum"),
            MaterialModel::ConstantIndex { eps, mu } => write!(f, "constant(eps={eps}, mu={mu})"),
            MaterialModel::Drude { plasma, damping } => {
                write!(f, "drude(wp={plasma:e}, gamma={damping:e})")
            }
            MaterialModel::Lorentz {
                resonance,
                plasma,
                damping,
            } => write!(f, "lorentz(w0={resonance:e}, wp={plasma:e}, gamma={damping:e})"),
            MaterialModel::IdealMirror => write!(f, "ideal mirror"),
            MaterialModel::TabulatedImaginary(t) => {
                write!(f, "tabulated eps(i xi), {} samples", t.len())
            }
        }
    }
}

/// ε(iξ) sampled on an increasing grid of imaginary frequencies.
///
/// Interpolates `ln(ε - 1)` linearly in `ln ξ` and clamps to the end values
/// outside the sampled range. Intervals touching a sample with ε = 1 fall back
/// to linear interpolation of ε itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryTable {
    xi: Vec<f64>,
    eps: Vec<f64>,
}

impl ImaginaryTable {
    pub fn new(xi: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        if xi.is_empty() || xi.len() != eps.len() {
            return Err(Error::Parse(format!(
                "tabulated permittivity needs matching non-empty columns (got {} and {})",
                xi.len(),
                eps.len()
            )));
        }
        if xi.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Parse("tabulated xi values must be positive".into()));
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("tabulated xi values must be strictly increasing".into()));
        }
        if eps.iter().any(|&e| !(e >= 1.0 && e.is_finite())) {
            return Err(Error::Parse(
                "tabulated eps(i xi) values must be finite and >= 1".into(),
            ));
        }
        Ok(Self { xi, eps })
    }

    /// Two-column CSV (ξ in rad/s, ε(iξ)); a header line is optional.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut xi = Vec::new();
        let mut eps = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
            if rec.len() < 2 {
                return Err(Error::Parse(format!("line {line}: expected two columns")));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(e)) => {
                    xi.push(x);
                    eps.push(e);
                }
                // first line may be a header
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("line {line}: cannot parse numeric values"))),
            }
        }
        Self::new(xi, eps)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let n = self.xi.len();
        if n == 1 || xi <= self.xi[0] {
            return self.eps[0];
        }
        if xi >= self.xi[n - 1] {
            return self.eps[n - 1];
        }
        let i = self.xi.partition_point(|&x| x <= xi) - 1;
        let (x0, x1) = (self.xi[i], self.xi[i + 1]);
        let (e0, e1) = (self.eps[i], self.eps[i + 1]);
        if e0 > 1.0 && e1 > 1.0 {
            let s = (xi.ln() - x0.ln()) / (x1.ln() - x0.ln());
            let l = (e0 - 1.0).ln() * (1.0 - s) + (e1 - 1.0).ln() * s;
            1.0 + l.exp()
        } else {
            let s = (xi - x0) / (x1 - x0);
            e0 * (1.0 - s) + e1 * s
        }
    }
}

fn ideal_mirror_error() -> Error {
    Error::UnsupportedEvaluation("ideal mirror has no finite permittivity".into())
}

/// ε(iξ) on the imaginary frequency axis.
pub fn eps_imag(model: &MaterialModel, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("imaginary frequency must be positive, got {xi}")));
    }
    match model {
        MaterialModel::Vacuum => Ok(1.0),
        MaterialModel::ConstantIndex { eps, .. } => {
            if eps.im != 0.0 {
                Err(Error::UnsupportedEvaluation(
                    "complex constant permittivity has no imaginary-axis continuation".into(),
                ))
            } else {
                Ok(eps.re)
            }
        }
        MaterialModel::Drude { plasma, damping } => Ok(1.0 + plasma * plasma / (xi * xi + damping * xi)),
        MaterialModel::Lorentz {
            resonance,
            plasma,
            damping,
        } => Ok(1.0 + plasma * plasma / (resonance * resonance + xi * xi + damping * xi)),
        MaterialModel::IdealMirror => Err(ideal_mirror_error()),
        MaterialModel::TabulatedImaginary(table) => Ok(table.eval(xi)),
    }
}

/// ε(ω) on the real frequency axis.
pub fn eps_real(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    let one = Complex64::new(1.0, 0.0);
    match model {
        MaterialModel::Vacuum => Ok(one),
        MaterialModel::ConstantIndex { eps, .. } => Ok(*eps),
        MaterialModel::Drude { plasma, damping } => {
            Ok(one - plasma * plasma / Complex64::new(omega * omega, damping * omega))
        }
        MaterialModel::Lorentz {
            resonance,
            plasma,
            damping,
        } => Ok(one + plasma * plasma / Complex64::new(resonance * resonance - omega * omega, -damping * omega)),
        MaterialModel::IdealMirror => Err(ideal_mirror_error()),
        MaterialModel::TabulatedImaginary(_) => Err(Error::UnsupportedEvaluation(
            "tabulated eps(i xi) has no real-axis values".into(),
        )),
    }
}

pub fn mu_imag(model: &MaterialModel, xi: f64) -> Result<f64> {
    match model {
        MaterialModel::ConstantIndex { mu, .. } => {
            if mu.im != 0.0 {
                Err(Error::UnsupportedEvaluation(
                    "complex constant permeability has no imaginary-axis continuation".into(),
                ))
            } else {
                Ok(mu.re)
            }
        }
        MaterialModel::IdealMirror => Err(ideal_mirror_error()),
        _ if !(xi > 0.0) => Err(Error::Domain(format!("imaginary frequency must be positive, got {xi}"))),
        _ => Ok(1.0),
    }
}

pub fn mu_real(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    match model {
        MaterialModel::ConstantIndex { mu, .. } => Ok(*mu),
        MaterialModel::IdealMirror => Err(ideal_mirror_error()),
        MaterialModel::TabulatedImaginary(_) => Err(Error::UnsupportedEvaluation(
            "tabulated eps(i xi) has no real-axis values".into(),
        )),
        _ if !(omega > 0.0) => Err(Error::Domain(format!("frequency must be positive, got {omega}"))),
        _ => Ok(Complex64::new(1.0, 0.0)),
    }
}

/// Square root on the decaying branch: Im ≥ 0, and Re ≥ 0 when Im = 0.
pub fn physical_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// n = √(εμ) on the branch with Im n ≥ 0.
pub fn refractive_index(eps: Complex64, mu: Complex64) -> Result<Complex64> {
    if eps == Complex64::new(0.0, 0.0) && mu == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("eps and mu are both zero".into()));
    }
    Ok(physical_sqrt(eps * mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_unity_on_both_axes() {
        assert_eq!(eps_imag(&MaterialModel::Vacuum, 3.0e15).unwrap(), 1.0);
        assert_eq!(eps_real(&MaterialModel::Vacuum, 3.0e15).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn drude_imaginary_axis_hand_value() {
        let m = MaterialModel::drude(1.0, 0.1);
        let v = eps_imag(&m, 1.0).unwrap();
        assert!((v - (1.0 + 1.0 / 1.1)).abs() < 1e-15);
        assert!((v - 1.909_090_909_090_909).abs() < 1e-14);
        // asymptote
        assert!((eps_imag(&m, 1e12).unwrap() - 1.0).abs() < 1e-20);
    }

    #[test]
    fn constant_and_lorentz_resonance() {
        let m = MaterialModel::constant(2.25, 1.0);
        assert_eq!(eps_real(&m, 1.0e15).unwrap(), c(2.25, 0.0));
        let (w0, wp, g) = (2.0e15, 1.5e15, 1.0e14);
        let l = MaterialModel::lorentz(w0, wp, g);
        let at = eps_real(&l, w0).unwrap();
        let expected = c(1.0, wp * wp / (g * w0));
        assert!((at - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn domain_and_unsupported_errors() {
        assert!(matches!(eps_imag(&MaterialModel::Vacuum, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eps_real(&MaterialModel::Vacuum, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            eps_imag(&MaterialModel::IdealMirror, 1.0),
            Err(Error::UnsupportedEvaluation(_))
        ));
        assert!(matches!(
            eps_real(&MaterialModel::IdealMirror, 1.0),
            Err(Error::UnsupportedEvaluation(_))
        ));
        let lossy = MaterialModel::ConstantIndex {
            eps: c(2.0, 0.1),
            mu: c(1.0, 0.0),
        };
        assert!(eps_imag(&lossy, 1.0).is_err());
    }

    #[test]
    fn index_branches() {
        assert_eq!(refractive_index(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        let n = refractive_index(c(2.25, 0.0), c(1.0, 0.0)).unwrap();
        assert!((n - c(1.5, 0.0)).norm() < 1e-15);
        let n = refractive_index(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((n - c(0.0, 1.0)).norm() < 1e-15);
        // negative zero imaginary part must not flip the branch
        let n = refractive_index(c(-1.0, -0.0), c(1.0, 0.0)).unwrap();
        assert!((n - c(0.0, 1.0)).norm() < 1e-15);
        assert!(refractive_index(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn tabulated_interpolation_and_clamping() {
        let t = ImaginaryTable::new(vec![1.0, 10.0, 100.0], vec![5.0, 3.0, 1.5]).unwrap();
        assert_eq!(t.eval(0.1), 5.0);
        assert_eq!(t.eval(1e3), 1.5);
        assert!((t.eval(10.0) - 3.0).abs() < 1e-14);
        // geometric midpoint of (ε-1) in log-log
        let mid = t.eval(10f64.sqrt());
        assert!((mid - (1.0 + (4.0f64 * 2.0).sqrt())).abs() < 1e-12);
        assert!(ImaginaryTable::new(vec![2.0, 1.0], vec![2.0, 2.0]).is_err());
        assert!(ImaginaryTable::new(vec![1.0, 2.0], vec![2.0, 0.5]).is_err());
    }

    #[test]
    fn tabulated_csv_with_and_without_header() {
        let with = "xi,eps\n1e14,4.0\n1e15,2.0\n";
        let without = "1e14, 4.0\n1e15, 2.0\n";
        let a = ImaginaryTable::from_csv_reader(with.as_bytes()).unwrap();
        let b = ImaginaryTable::from_csv_reader(without.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(ImaginaryTable::from_csv_reader("1,2\nx,y\n".as_bytes()).is_err());
    }
}
