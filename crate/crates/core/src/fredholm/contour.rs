//! Circles in the right half-plane for trapezoid-rule contour integrals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Positively oriented circle with `m` equispaced trapezoid nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub center: f64,
    pub radius: f64,
    pub m: usize,
}

impl ContourSpec {
    pub fn new(center: f64, radius: f64, m: usize) -> Result<Self> {
        let c = ContourSpec { center, radius, m };
        c.validate()?;
        Ok(c)
    }

    /// Circle through the real points `left < right`.
    pub fn through(left: f64, right: f64, m: usize) -> Result<Self> {
        Self::new(0.5 * (left + right), 0.5 * (right - left), m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite() && self.center.is_finite()) {
            return Err(Error::Contour(format!("radius must be positive, got {}", self.radius)));
        }
        if self.center - self.radius <= 0.0 {
            return Err(Error::Contour(format!(
                "circle (center {}, radius {}) leaves the right half-plane",
                self.center, self.radius
            )));
        }
        if !self.m.is_power_of_two() || self.m < 8 {
            return Err(Error::Contour(format!("node count must be a power of two >= 8, got {}", self.m)));
        }
        Ok(())
    }

    pub fn left(&self) -> f64 {
        self.center - self.radius
    }

    pub fn right(&self) -> f64 {
        self.center + self.radius
    }

    /// Whether the real point `x` lies strictly inside.
    pub fn encloses_point(&self, x: f64) -> bool {
        (x - self.center).abs() < self.radius
    }

    /// Distance from the real point `x` to the circle.
    pub fn distance(&self, x: f64) -> f64 {
        ((x - self.center).abs() - self.radius).abs()
    }

    /// Whether `inner` lies strictly inside `self` (for circles on the real axis).
    pub fn strictly_encloses(&self, inner: &ContourSpec) -> bool {
        self.left() < inner.left() && self.right() > inner.right()
    }

    pub fn with_m(&self, m: usize) -> Self {
        ContourSpec { m, ..*self }
    }

    /// Nodes `z_k` and weights `dz / (2 pi i)` of the trapezoid rule.
    pub fn nodes(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (0..self.m)
            .map(|k| {
                let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.m as f64);
                (self.center + self.radius * e, self.radius * e / self.m as f64)
            })
            .unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ContourSpec::new(1.0, 0.5, 64).is_ok());
        assert!(ContourSpec::new(1.0, 1.0, 64).is_err());
        assert!(ContourSpec::new(1.0, 0.5, 100).is_err());
        let c = ContourSpec::through(0.2, 1.8, 64).unwrap();
        assert!((c.center - 1.0).abs() < 1e-15 && (c.radius - 0.8).abs() < 1e-15);
        assert!(c.strictly_encloses(&ContourSpec::new(1.0, 0.5, 64).unwrap()));
    }

    #[test]
    fn trapezoid_integrates_cauchy_kernel() {
        let c = ContourSpec::new(1.0, 0.5, 64).unwrap();
        let (z, w) = c.nodes();
        let inside: Complex64 = z.iter().zip(&w).map(|(z, w)| w / (z - 1.2)).sum();
        let outside: Complex64 = z.iter().zip(&w).map(|(z, w)| w / (z - 2.0)).sum();
        assert!((inside - 1.0).norm() < 1e-14);
        assert!(outside.norm() < 1e-14);
    }
}
