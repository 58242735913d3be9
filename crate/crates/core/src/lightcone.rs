//! Cartesian and light-cone event coordinates (units with c = 1).
//!
//! The light-cone pair is `xi_plus = (z + t)/√2`, `xi_minus = (z − t)/√2`.
//! A right-moving light-speed profile is a function of `xi_minus` alone.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maps `(z, t)` onto `(xi_plus, xi_minus)`.
pub fn to_light_cone(z: f64, t: f64) -> Result<(f64, f64)> {
    if !z.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("non-finite event coordinate (z={z}, t={t})")));
    }
    Ok(((z + t) * FRAC_1_SQRT_2, (z - t) * FRAC_1_SQRT_2))
}

/// Inverse of [`to_light_cone`]: returns `(z, t)`.
pub fn from_light_cone(xi_plus: f64, xi_minus: f64) -> Result<(f64, f64)> {
    if !xi_plus.is_finite() || !xi_minus.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite light-cone coordinate (xi+={xi_plus}, xi-={xi_minus})"
        )));
    }
    Ok(((xi_plus + xi_minus) * FRAC_1_SQRT_2, (xi_plus - xi_minus) * FRAC_1_SQRT_2))
}

/// An event carried in both frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightConePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
    xi_plus: f64,
    xi_minus: f64,
}

impl LightConePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("non-finite transverse coordinate (x={x}, y={y})")));
        }
        let (xi_plus, xi_minus) = to_light_cone(z, t)?;
        Ok(Self {
            x,
            y,
            z,
            t,
            xi_plus,
            xi_minus,
        })
    }

    pub fn from_light_cone(x: f64, y: f64, xi_plus: f64, xi_minus: f64) -> Result<Self> {
        let (z, t) = from_light_cone(xi_plus, xi_minus)?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("non-finite transverse coordinate (x={x}, y={y})")));
        }
        Ok(Self {
            x,
            y,
            z,
            t,
            xi_plus,
            xi_minus,
        })
    }

    pub fn xi_plus(&self) -> f64 {
        self.xi_plus
    }

    pub fn xi_minus(&self) -> f64 {
        self.xi_minus
    }

    /// Squared transverse radius `x² + y²`.
    pub fn rho_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Rejects NaN/Inf components; complex values never carry them silently.
pub fn finite(value: Complex64, what: &str) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{what} evaluated to a non-finite value ({value})")))
    }
}
