//! Standard instances: linear saddles and random normal forms.

use rand::Rng;

use super::normal_form::FoliationNormalForm;
use crate::poly::BivariatePolynomial;
use crate::scalar::qc;
use crate::QComplex;

type Poly = BivariatePolynomial<QComplex>;

/// `x dy - lambda y dx`, i.e. `P = x`, `Q = lambda y`, `g = 0`, `n = 1`.
pub fn linear_saddle(lambda: QComplex) -> FoliationNormalForm<QComplex> {
    FoliationNormalForm::validate(
        Poly::monomial(1, 0, qc(1, 0)),
        Poly::monomial(0, 1, lambda),
        Poly::zero(),
        1,
    )
    .expect("linear saddle with lambda != 1 is a valid degree-1 form")
}

fn random_poly<R: Rng>(rng: &mut R, degrees: std::ops::RangeInclusive<u32>, range: i64) -> Poly {
    let mut terms = Vec::new();
    for d in degrees {
        for i in 0..=d {
            let re = rng.gen_range(-range..=range);
            let im = rng.gen_range(-range..=range);
            terms.push(((i, d - i), qc(re, im)));
        }
    }
    Poly::from_terms(terms)
}

/// Random valid form of degree `n` with small Gaussian-integer coefficients.
/// With `invariant_infinity` the form has `g = 0`, so `L_inf` is a leaf;
/// otherwise `g` is a random non-zero homogeneous polynomial of degree `n`.
pub fn random_form<R: Rng>(rng: &mut R, n: u32, invariant_infinity: bool) -> FoliationNormalForm<QComplex> {
    loop {
        let p = random_poly(rng, 0..=n, 3);
        let q = random_poly(rng, 0..=n, 3);
        let g = if invariant_infinity {
            Poly::zero()
        } else {
            random_poly(rng, n..=n, 3)
        };
        if !invariant_infinity && g.is_zero() {
            continue;
        }
        if let Ok(form) = FoliationNormalForm::validate(p, q, g, n) {
            return form;
        }
    }
}
