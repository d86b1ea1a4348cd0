//! Quadrature and dense linear algebra primitives.

mod eigen;
mod matrix;
mod quadrature;

pub use eigen::{eig_general, eig_hermitian, HERMITIAN_TOL};
pub use matrix::{determinant, mat_inverse, mat_mul, ComplexMatrix};
pub use quadrature::{integrate, integrate_oscillatory, integrate_real, GaussLegendre, QuadratureSpec};

/// x ln x with the continuous extension 0 at x = 0.
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
