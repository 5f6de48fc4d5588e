//! Special functions and quadrature used across the crate.

mod gegenbauer;
mod lambert;
mod quadrature;

pub use gegenbauer::{gegenbauer_coeff, gegenbauer_coeffs};
pub use lambert::lambert_w0;
pub use quadrature::{integrate, integrate_with_error, QuadratureSpec};
