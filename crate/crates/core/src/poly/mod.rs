//! Polynomial arithmetic over a generic coefficient field.

mod bivariate;
pub mod resultant;
pub mod roots;
mod univariate;

pub use bivariate::BivariatePolynomial;
pub use univariate::UnivariatePolynomial;
