//! Normal-incidence reflection of quarter-wave Bragg segments `121…121`.
//!
//! With `N` type-2 layers, the segment's reflection coefficient obeys
//! `R_N = (R_1 + R_{N-1})/(1 + R_1 R_{N-1})` from `R_0 = 0` and
//! `R_1 = 2 r_12/(1 + r_12²)`, and doubles as `R_{2M} = 2 R_M/(1 + R_M²)`.
//! Both are the addition law of `tanh`, so `R_N = tanh(N artanh R_1)`.
//!
//! Coefficients follow the s-polarization sign convention at `k = 0`, so
//! `r_12 = (n1 - n2)/(n1 + n2)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::constants::C;
use crate::kinematics::{Polarization, TransverseMode};
use crate::materials::MaterialModel;
use crate::stacks::LayerStack;
use crate::{Error, Result};

/// Quarter-wave segment: indices `n1`, `n2`, `count` type-2 layers and the
/// design vacuum wavelength (m). Layer thicknesses are `λ/(4 n_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraggSpec {
    pub n1: f64,
    pub n2: f64,
    pub count: usize,
    pub wavelength: f64,
}

impl BraggSpec {
    pub fn new(n1: f64, n2: f64, count: usize, wavelength: f64) -> Result<Self> {
        if !(n1 > 0.0 && n2 > 0.0 && n1.is_finite() && n2.is_finite()) {
            return Err(Error::Domain(format!(
                "refractive indices must be positive, got {n1}, {n2}"
            )));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::Domain(format!(
                "design wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            n1,
            n2,
            count,
            wavelength,
        })
    }

    pub fn thicknesses(&self) -> (f64, f64) {
        (self.wavelength / (4.0 * self.n1), self.wavelength / (4.0 * self.n2))
    }

    /// Normal-incidence, s-convention interface coefficient `r_12`.
    pub fn r12(&self) -> f64 {
        (self.n1 - self.n2) / (self.n1 + self.n2)
    }

    pub fn design_frequency(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }

    /// The explicit layer stack `1 | 2 1 2 … 2 | 1`.
    pub fn stack(&self) -> Result<LayerStack> {
        let m1 = MaterialModel::dielectric(self.n1);
        let m2 = MaterialModel::dielectric(self.n2);
        let (d1, d2) = self.thicknesses();
        let mut s = LayerStack::new(m1.clone(), m1.clone());
        for i in 0..self.count {
            if i > 0 {
                s.push_layer(m1.clone(), d1)?;
            }
            s.push_layer(m2.clone(), d2)?;
        }
        Ok(s)
    }
}

/// A real reflection coefficient together with its complement
/// `1 - |value|`, carried separately so that it stays resolved after
/// `|value|` rounds to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub value: f64,
    pub deficit: f64,
}

impl Reflection {
    pub const ZERO: Reflection = Reflection {
        value: 0.0,
        deficit: 1.0,
    };

    pub fn new(value: f64) -> Self {
        Self {
            value,
            deficit: 1.0 - value.abs(),
        }
    }

    /// `(R_1 + self)/(1 + R_1 self)`.
    pub fn step(self, r1: Reflection) -> Reflection {
        let value = bragg_step(r1.value, self.value);
        let same_sign = r1.value * self.value >= 0.0;
        let deficit = if same_sign {
            r1.deficit * self.deficit / (1.0 + (r1.value * self.value).abs())
        } else {
            1.0 - value.abs()
        };
        Reflection { value, deficit }
    }

    /// `2 R/(1 + R²)`.
    pub fn double(self) -> Reflection {
        Reflection {
            value: bragg_double(self.value),
            deficit: self.deficit * self.deficit / (1.0 + self.value * self.value),
        }
    }

    pub fn magnitude(self) -> f64 {
        self.value.abs()
    }
}

/// `R_1 = r_121 = 2 r_12/(1 + r_12²)`.
pub fn r121_normal(r12: f64) -> Result<f64> {
    if !(r12.abs() < 1.0) {
        return Err(Error::Domain(format!("|r12| must be < 1, got {r12}")));
    }
    Ok(2.0 * r12 / (1.0 + r12 * r12))
}

/// One step of the segment recursion, `(R_1 + R_{N-1})/(1 + R_1 R_{N-1})`.
///
/// Requires `|r1| < 1` and `|prev| ≤ 1`.
pub fn bragg_step(r1: f64, prev: f64) -> f64 {
    (r1 + prev) / (1.0 + r1 * prev)
}

/// Doubling step, `R_{2M} = 2 R_M/(1 + R_M²)`. Requires `|half| ≤ 1`.
pub fn bragg_double(half: f64) -> f64 {
    2.0 * half / (1.0 + half * half)
}

/// Closed form `tanh(N artanh R_1)`.
pub fn bragg_closed(count: usize, r1: f64) -> Result<f64> {
    Ok(bragg_closed_reflection(count, r1)?.value)
}

/// Closed form with an accurately computed complement.
pub fn bragg_closed_reflection(count: usize, r1: f64) -> Result<Reflection> {
    if !(r1.abs() < 1.0) {
        return Err(Error::Domain(format!("|R1| must be < 1, got {r1}")));
    }
    if count == 0 || r1 == 0.0 {
        return Ok(Reflection::ZERO);
    }
    let a = r1.abs();
    // artanh(a) written with 1 - a so it survives a close to 1
    let x = count as f64 * 0.5 * ((1.0 + a) / (1.0 - a)).ln();
    let e = (-2.0 * x).exp();
    Ok(Reflection {
        value: r1.signum() * x.tanh(),
        deficit: 2.0 * e / (1.0 + e),
    })
}

/// Reflection coefficient of the explicit quarter-wave stack at normal
/// incidence and the design wavelength, from the general stack engine.
pub fn bragg_direct(spec: &BraggSpec) -> Result<f64> {
    Ok(bragg_direct_reflection(spec)?.value)
}

/// As [`bragg_direct`]; the complement comes from the transmitted power,
/// `1 - |r| = |t|²/(1 + |r|)` for the lossless stack.
pub fn bragg_direct_reflection(spec: &BraggSpec) -> Result<Reflection> {
    let mode = TransverseMode::real(Polarization::S, 0.0, spec.design_frequency())?;
    let fs = spec.stack()?.evaluate(&mode)?;
    let value = fs.r_fwd.re;
    Ok(Reflection {
        value,
        deficit: fs.t_fwd.norm_sqr() / (1.0 + fs.r_fwd.norm()),
    })
}

/// The four ways of computing `R_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraggMethod {
    Step,
    Double,
    Closed,
    Direct,
}

impl BraggMethod {
    pub const ALL: [BraggMethod; 4] = [
        BraggMethod::Step,
        BraggMethod::Double,
        BraggMethod::Closed,
        BraggMethod::Direct,
    ];
}

impl fmt::Display for BraggMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BraggMethod::Step => "step",
            BraggMethod::Double => "double",
            BraggMethod::Closed => "closed",
            BraggMethod::Direct => "direct",
        })
    }
}

impl FromStr for BraggMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(BraggMethod::Step),
            "double" => Ok(BraggMethod::Double),
            "closed" => Ok(BraggMethod::Closed),
            "direct" => Ok(BraggMethod::Direct),
            other => Err(Error::Parse(format!("unknown Bragg method `{other}`"))),
        }
    }
}

/// Whether the doubling recursion reaches `count` from `R_2`, i.e.
/// `count = 2·2^m`.
pub fn doubling_reaches(count: usize) -> bool {
    count >= 2 && count.is_power_of_two()
}

/// Closest count reachable by doubling (ties go to the smaller one).
pub fn nearest_doubling_count(count: usize) -> usize {
    if count <= 2 {
        return 2;
    }
    let hi = count.next_power_of_two();
    let lo = hi / 2;
    if count - lo <= hi - count {
        lo
    } else {
        hi
    }
}

/// `R_1, …, R_max` by the step recursion.
pub fn step_series(r1: f64, max: usize) -> Vec<Reflection> {
    let seed = Reflection::new(r1);
    let mut out = Vec::with_capacity(max);
    let mut cur = Reflection::ZERO;
    for _ in 0..max {
        cur = cur.step(seed);
        out.push(cur);
    }
    out
}

/// `R_N` of a segment by the chosen method.
pub fn reflection(spec: &BraggSpec, method: BraggMethod) -> Result<Reflection> {
    let r1 = r121_normal(spec.r12())?;
    let n = spec.count;
    match method {
        BraggMethod::Step => Ok(if n == 0 {
            Reflection::ZERO
        } else {
            step_series(r1, n)[n - 1]
        }),
        BraggMethod::Double => {
            if !doubling_reaches(n) {
                return Err(Error::Domain(format!(
                    "doubling from R_2 reaches only N = 2*2^m; N = {n} is unreachable (nearest {})",
                    nearest_doubling_count(n)
                )));
            }
            let seed = Reflection::new(r1);
            let mut cur = Reflection::ZERO.step(seed).step(seed);
            let mut m = 2;
            while m < n {
                cur = cur.double();
                m *= 2;
            }
            Ok(cur)
        }
        BraggMethod::Closed => bragg_closed_reflection(n, r1),
        BraggMethod::Direct => bragg_direct_reflection(spec),
    }
}
