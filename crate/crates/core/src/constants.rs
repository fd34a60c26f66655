//! Physical constants (CODATA 2018, exact where defined).

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permeability, N/A^2.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 1.0 / (MU_0 * C * C);

/// Casimir pressure between two perfect mirrors a distance `d` apart in
/// vacuum, `pi^2 hbar c / (240 d^4)` (magnitude, Pa).
pub fn ideal_casimir_pressure(d: f64) -> f64 {
    std::f64::consts::PI.powi(2) * HBAR * C / (240.0 * d.powi(4))
}
