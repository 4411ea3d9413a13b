use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in the units of the coefficient formulas.
pub const SPEED_OF_LIGHT: f64 = 2.9979e4;
/// Radiation constant in the same units.
pub const RADIATION_CONSTANT: f64 = 137.199;

/// Opacity and heat capacity rows of the hohlraum materials: `(name, sigma, c_v)`.
pub const HOHLRAUM_MATERIALS: [(&str, f64, f64); 4] = [
    ("gold", 1e3, 1e5),
    ("helium", 1e-3, 1e-2),
    ("ch", 1e2, 1e3),
    ("hydrogen", 1.0, 1.0),
];

/// Pseudo-scattering cross section and source of one linearized
/// thermal-radiation step: returns `(sigma_ps, q_ps)`.
pub fn pseudo_scattering(sigma: f64, cv: f64, t: f64, dt: f64) -> Result<(f64, f64)> {
    for (name, v) in [("sigma", sigma), ("Cv", cv), ("T", t), ("dt", dt)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::usage(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let (a, c) = (RADIATION_CONSTANT, SPEED_OF_LIGHT);
    let coupling = 16.0 * PI * a * c * t.powi(3);
    let denom = cv / dt + sigma * coupling;
    let sigma_ps = sigma * sigma * coupling / denom;
    let sigma_a = sigma - sigma_ps;
    let q_ps = sigma_a * a * c * t.powi(4)
        - sigma * sigma * 16.0 * PI * a * a * c * c * t.powi(7) / denom;
    Ok((sigma_ps, q_ps))
}
