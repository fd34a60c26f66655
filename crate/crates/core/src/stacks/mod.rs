//! Stack representation and the generalized Fresnel coefficient engine.

mod expr;
mod fresnel_set;
pub mod identities;
mod layered;
pub mod table;

use num_complex::Complex64;

pub use expr::{evaluate, evaluate_layerwise, CoeffSource, FnSource, Knots, OpaqueStack, SourceCoeffs, StackExpr};
pub use fresnel_set::{a_value, interface_coeffs, join, join_with_floor, FresnelSet, DEFAULT_DENOMINATOR_FLOOR};
pub use layered::{Layer, LayerStack};
pub use table::{CoeffTable, FreqKind};

use crate::kinematics::{normal_wavenumber, propagation_factor, TransverseMode};
use crate::materials::MaterialModel;
use crate::Result;

/// One-way propagation factor of a local layer: `e^{iβd}`, or `e^{-κd}` on
/// the imaginary axis.
pub fn layer_phase(material: &MaterialModel, d: f64, mode: &TransverseMode) -> Result<Complex64> {
    if d == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (eps, mu) = material.response(mode.freq)?;
    Ok(propagation_factor(normal_wavenumber(eps, mu, mode), d, mode.freq))
}
