//! Conformal factor `e^{2 phi}` on a round sphere, with `phi` a low-degree
//! real spherical-harmonic expansion squashed smoothly into `[-ln 2 / 2, ln 2 / 2]`
//! so the factor stays inside `(0.5, 2)`.

use alloc::vec::Vec;

use crate::math::{exp, ln, tanh, Vec3};

/// Number of supported basis functions: degrees 1 and 2.
pub const BASIS_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor {
    radius: f64,
    coefficients: Vec<f64>,
}

fn phi_cap() -> f64 {
    0.5 * ln(2.0)
}

/// Basis values and their gradients at a unit vector `u`:
/// `x, y, z, xy, yz, zx, x^2 - y^2, 3z^2 - 1`.
fn basis(u: &Vec3) -> ([f64; BASIS_LEN], [Vec3; BASIS_LEN]) {
    let (x, y, z) = (u.x, u.y, u.z);
    let values = [x, y, z, x * y, y * z, z * x, x * x - y * y, 3.0 * z * z - 1.0];
    let grads = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(y, x, 0.0),
        Vec3::new(0.0, z, y),
        Vec3::new(z, 0.0, x),
        Vec3::new(2.0 * x, -2.0 * y, 0.0),
        Vec3::new(0.0, 0.0, 6.0 * z),
    ];
    (values, grads)
}

impl ConformalFactor {
    pub fn new(radius: f64, coefficients: Vec<f64>) -> Self {
        Self {
            radius,
            coefficients,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn raw(&self, x: &Vec3) -> (f64, Vec3) {
        let u = x / self.radius;
        let (values, grads) = basis(&u);
        let mut phi = 0.0;
        let mut grad = Vec3::zeros();
        for (i, c) in self.coefficients.iter().enumerate().take(BASIS_LEN) {
            phi += c * values[i];
            grad += grads[i] * (*c / self.radius);
        }
        (phi, grad)
    }

    /// `phi(x)` after the smooth clamp.
    pub fn phi(&self, x: &Vec3) -> f64 {
        let cap = phi_cap();
        cap * tanh(self.raw(x).0 / cap)
    }

    /// Ambient gradient of the clamped `phi` (not yet projected to the sphere).
    pub fn grad(&self, x: &Vec3) -> Vec3 {
        let cap = phi_cap();
        let (raw, g) = self.raw(x);
        let t = tanh(raw / cap);
        g * (1.0 - t * t)
    }

    /// `e^{2 phi(x)}`.
    pub fn factor(&self, x: &Vec3) -> f64 {
        exp(2.0 * self.phi(x))
    }
}
