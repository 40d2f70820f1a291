//! Scalar helpers over `libm` and a few small vector utilities.

use nalgebra::{DMatrix, DVector, Vector3};

pub type Vec3 = Vector3<f64>;

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Euclidean length of an ambient/chart vector.
#[inline]
pub fn norm(v: &Vec3) -> f64 {
    sqrt(v.dot(v))
}

/// Unit vector orthogonal to `n` (not necessarily unit), picked from the
/// coordinate axis least aligned with `n`. Deterministic.
pub fn orthogonal_unit(n: &Vec3) -> Vec3 {
    let a = [n.x.abs(), n.y.abs(), n.z.abs()];
    let axis = if a[0] <= a[1] && a[0] <= a[2] {
        Vec3::x()
    } else if a[1] <= a[2] {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let t = axis.cross(n);
    t / norm(&t)
}

/// Solve the square system `a x = b` by LU with partial pivoting.
pub fn solve_dense(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.lu().solve(b)
}

/// Trapezoid rule over a full period; spectrally accurate for smooth
/// periodic integrands.
pub fn periodic_integral(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Perimeter of the ellipse with semi-axes `a`, `b`.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    periodic_integral(512, |t| hypot(a * sin(t), b * cos(t)))
}
