//! Computational toolkit for polynomial foliations of the complex projective
//! plane: normal forms and singularities, holonomy of the line at infinity,
//! fixed-point continuation under deformations, and growth and derived
//! series of finitely generated groups of truncated germs.

pub mod deformation;
pub mod foliation;
pub mod holonomy;
pub mod jets;
pub mod ode;
pub mod poly;
pub mod scalar;

use num_complex::Complex;
use num_rational::BigRational;

/// Exact rational number.
pub type Rational = BigRational;
/// Exact Gaussian rational, the coefficient type of every exact object.
pub type QComplex = Complex<BigRational>;
/// Double-precision complex number.
pub type C64 = Complex<f64>;

pub type ExactPolynomial = poly::BivariatePolynomial<QComplex>;
pub type Foliation = foliation::FoliationNormalForm<QComplex>;
