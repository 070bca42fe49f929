//! Float helpers backed by `libm` so results do not depend on the platform's
//! `std` math library.

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
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
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Raises a distance to `-alpha`, with the common `alpha = 4` case done by
/// multiplication.
#[inline]
pub fn path_loss(d: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let d2 = d * d;
        1.0 / (d2 * d2)
    } else {
        powf(d, -alpha)
    }
}
