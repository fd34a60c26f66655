//! Generalized Fresnel coefficients of planar multilayers.
//!
//! A multilayer is described as a composition of *stacks*: single interfaces,
//! homogeneous slabs, sequences of other stacks, or opaque stacks known only
//! through their four reflection/transmission coefficients. Stacks separated
//! by a local spacer layer are combined with a two-stack recursion, so the
//! coefficients of a structure can be assembled from any grouping of its
//! parts, including parts that are measured or computed elsewhere.
//!
//! On top of the stack engine the crate provides
//! - quarter-wave Bragg mirror reflection algorithms ([`bragg`]),
//! - the zero-temperature Casimir force on a slab inside a planar cavity,
//!   evaluated on the imaginary frequency axis ([`casimir`]).
//!
//! All quantities are SI: rad/s, metres, pascals.

pub mod bragg;
pub mod casimir;
pub mod constants;
mod error;
pub mod kinematics;
pub mod materials;
pub mod stacks;

pub use error::{Error, Result};
pub use kinematics::{Frequency, Polarization, TransverseMode};
pub use materials::MaterialModel;
pub use num_complex::Complex64;
pub use stacks::{
    evaluate, evaluate_layerwise, CoeffSource, CoeffTable, FresnelSet, Layer, LayerStack, OpaqueStack, StackExpr,
};
