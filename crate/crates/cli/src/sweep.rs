use std::fmt;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Vacuum wavelength, m.
    Wavelength,
    /// Angular frequency, rad/s.
    Frequency,
    /// Incidence angle in the left ambient, degrees.
    Angle,
    /// Transverse wavenumber, 1/m.
    K,
    /// Gap width, m.
    Separation,
    /// Bragg layer count.
    Count,
}

impl Axis {
    /// Column name of the axis in output tables.
    pub fn column(self) -> &'static str {
        match self {
            Axis::Wavelength => "wavelength_m",
            Axis::Frequency => "omega_rad_s",
            Axis::Angle => "angle_deg",
            Axis::K => "k_per_m",
            Axis::Separation => "d1_m",
            Axis::Count => "N",
        }
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "wavelength" | "lambda" => Ok(Axis::Wavelength),
            "frequency" | "omega" => Ok(Axis::Frequency),
            "angle" => Ok(Axis::Angle),
            "k" => Ok(Axis::K),
            "separation" | "d" => Ok(Axis::Separation),
            "N" | "n" | "count" => Ok(Axis::Count),
            other => Err(CliError::usage(format!("unknown sweep axis `{other}`"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Wavelength => "wavelength",
            Axis::Frequency => "frequency",
            Axis::Angle => "angle",
            Axis::K => "k",
            Axis::Separation => "separation",
            Axis::Count => "N",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `AXIS:MIN:MAX:POINTS[:lin|log]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Integer values for count axes: rounded, deduplicated, ascending.
    pub fn counts(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.values().iter().map(|v| v.round() as usize).collect();
        out.dedup();
        out
    }
}

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |msg: &str| CliError::usage(format!("sweep `{s}`: {msg} (expected AXIS:MIN:MAX:POINTS[:lin|log])"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("wrong number of fields"));
        }
        let axis: Axis = parts[0].parse()?;
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{p}` is not a number")))
        };
        let min = num(parts[1])?;
        let max = num(parts[2])?;
        let points: usize = parts[3].trim().parse().map_err(|_| bad("POINTS must be an integer"))?;
        let spacing = match parts.get(4).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(bad(&format!("unknown spacing `{other}`"))),
        };
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(bad("need MIN < MAX"));
        }
        if points < 2 {
            return Err(bad("need at least 2 points"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(bad("log spacing needs MIN > 0"));
        }
        if axis == Axis::Count && min < 0.0 {
            return Err(bad("layer counts are non-negative"));
        }
        Ok(SweepSpec {
            axis,
            min,
            max,
            points,
            spacing,
        })
    }
}
