use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use super::UnivariatePolynomial;
use crate::scalar::{Field, Real};

/// Sparse polynomial in two variables `x`, `y`.
///
/// Terms are keyed by the exponent pair `(i, j)` of `x^i y^j`; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BivariatePolynomial<C> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Field> Default for BivariatePolynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Field> BivariatePolynomial<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, C::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, C::one())
    }

    /// Builds a polynomial from `((i, j), c)` terms; repeated exponents are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), C)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: (u32, u32), c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_in_x(&self) -> Option<u32> {
        self.terms.keys().map(|(i, _)| *i).max()
    }

    pub fn degree_in_y(&self) -> Option<u32> {
        self.terms.keys().map(|(_, j)| *j).max()
    }

    /// True when every term has total degree exactly `d` (vacuously true for zero).
    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|(i, j)| i + j == d)
    }

    /// The part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| i + j == d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| (*e, a.clone() * c.clone())))
    }

    /// Multiplies by `x^a y^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|((i, j), c)| ((i + a, j + b), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &C, y: &C) -> C {
        // powers are cached per exponent so repeated terms stay cheap
        let dx = self.degree_in_x().unwrap_or(0) as usize;
        let dy = self.degree_in_y().unwrap_or(0) as usize;
        let xp = powers(x, dx);
        let yp = powers(y, dy);
        self.terms.iter().fold(C::zero(), |acc, ((i, j), c)| {
            acc + c.clone() * xp[*i as usize].clone() * yp[*j as usize].clone()
        })
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), c)| ((i - 1, *j), c.clone() * C::from_i64(*i as i64))),
        )
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), c)| ((*i, j - 1), c.clone() * C::from_i64(*j as i64))),
        )
    }

    /// Restriction to the affine line `s -> (x0 + s a, y0 + s b)`.
    pub fn restrict_to_line(&self, x0: &C, y0: &C, a: &C, b: &C) -> UnivariatePolynomial<C> {
        let dx = self.degree_in_x().unwrap_or(0) as usize;
        let dy = self.degree_in_y().unwrap_or(0) as usize;
        let lx = UnivariatePolynomial::new(vec![x0.clone(), a.clone()]);
        let ly = UnivariatePolynomial::new(vec![y0.clone(), b.clone()]);
        let xp = poly_powers(&lx, dx);
        let yp = poly_powers(&ly, dy);
        let mut out = UnivariatePolynomial::zero();
        for ((i, j), c) in &self.terms {
            let t = (&xp[*i as usize] * &yp[*j as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    /// Coefficients as a polynomial in `y` over `C[x]`: entry `j` is the
    /// coefficient of `y^j`.
    pub fn coefficients_in_y(&self) -> Vec<UnivariatePolynomial<C>> {
        let dy = match self.degree_in_y() {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut cols: Vec<Vec<C>> = vec![Vec::new(); dy + 1];
        for ((i, j), c) in &self.terms {
            let col = &mut cols[*j as usize];
            if col.len() <= *i as usize {
                col.resize(*i as usize + 1, C::zero());
            }
            col[*i as usize] = c.clone();
        }
        cols.into_iter().map(UnivariatePolynomial::new).collect()
    }

    /// Substitution `x <-> y`.
    pub fn swap_variables(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|((i, j), c)| ((*j, *i), c.clone())).collect(),
        }
    }

    /// Largest `m` such that `x^m` divides the polynomial (`None` for zero).
    pub fn x_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|(i, _)| *i).min()
    }

    /// Divides by `x^m`; the caller guarantees divisibility.
    pub fn divide_by_x_power(&self, m: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|((i, j), c)| {
                    debug_assert!(*i >= m);
                    ((i - m, *j), c.clone())
                })
                .collect(),
        }
    }

    /// Restriction to `x = 0` as a polynomial in `y`.
    pub fn at_x_zero(&self) -> UnivariatePolynomial<C> {
        let dy = self.degree_in_y().unwrap_or(0) as usize;
        let mut v = vec![C::zero(); dy + 1];
        for ((i, j), c) in &self.terms {
            if *i == 0 {
                v[*j as usize] = c.clone();
            }
        }
        UnivariatePolynomial::new(v)
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> BivariatePolynomial<D> {
        BivariatePolynomial::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    pub fn to_numeric<F: Real>(&self) -> BivariatePolynomial<Complex<F>> {
        self.map(|c| c.to_complex::<F>())
    }
}

fn powers<C: Field>(x: &C, n: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(C::one());
    for k in 0..n {
        out.push(out[k].clone() * x.clone());
    }
    out
}

fn poly_powers<C: Field>(p: &UnivariatePolynomial<C>, n: usize) -> Vec<UnivariatePolynomial<C>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(UnivariatePolynomial::constant(C::one()));
    for k in 0..n {
        let next = &out[k] * p;
        out.push(next);
    }
    out
}

impl<C: Field> Add<&BivariatePolynomial<C>> for &BivariatePolynomial<C> {
    type Output = BivariatePolynomial<C>;

    fn add(self, rhs: &BivariatePolynomial<C>) -> BivariatePolynomial<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<C: Field> Sub<&BivariatePolynomial<C>> for &BivariatePolynomial<C> {
    type Output = BivariatePolynomial<C>;

    fn sub(self, rhs: &BivariatePolynomial<C>) -> BivariatePolynomial<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<C: Field> Mul<&BivariatePolynomial<C>> for &BivariatePolynomial<C> {
    type Output = BivariatePolynomial<C>;

    fn mul(self, rhs: &BivariatePolynomial<C>) -> BivariatePolynomial<C> {
        let mut out = BivariatePolynomial::zero();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &rhs.terms {
                out.add_term((i + k, j + l), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<C: Field> Neg for &BivariatePolynomial<C> {
    type Output = BivariatePolynomial<C>;

    fn neg(self) -> BivariatePolynomial<C> {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qc;
    use crate::QComplex;

    type P = BivariatePolynomial<QComplex>;

    #[test]
    fn zero_polynomial_has_no_degree() {
        assert_eq!(P::zero().degree(), None);
        assert!(P::monomial(2, 1, qc(0, 0)).is_zero());
        let p = P::from_terms([((1, 0), qc(1, 0)), ((1, 0), qc(-1, 0))]);
        assert!(p.is_zero());
    }

    #[test]
    fn arithmetic_and_degree() {
        let x = P::x();
        let y = P::y();
        let p = &(&x * &x) + &(&y * &qc_poly(3));
        assert_eq!(p.degree(), Some(2));
        assert!(!p.is_homogeneous_of_degree(2));
        let sq = &p * &p;
        assert_eq!(sq.degree(), Some(4));
        assert_eq!(sq.coeff(2, 1), qc(6, 0));
        assert!((&p - &p).is_zero());
    }

    fn qc_poly(c: i64) -> P {
        P::constant(qc(c, 0))
    }

    #[test]
    fn derivatives_and_line_restriction() {
        // p = x^2 y + 2 i y
        let p = P::from_terms([((2, 1), qc(1, 0)), ((0, 1), qc(0, 2))]);
        assert_eq!(p.partial_x(), P::monomial(1, 1, qc(2, 0)));
        assert_eq!(
            p.partial_y(),
            P::from_terms([((2, 0), qc(1, 0)), ((0, 0), qc(0, 2))])
        );
        // line (s, 1 + s): s^2 (1 + s) + 2i (1 + s)
        let r = p.restrict_to_line(&qc(0, 0), &qc(1, 0), &qc(1, 0), &qc(1, 0));
        assert_eq!(r.coeffs(), &[qc(0, 2), qc(0, 2), qc(1, 0), qc(1, 0)]);
        let s = qc(3, -1);
        assert_eq!(r.eval(&s), p.eval(&s, &(s.clone() + qc(1, 0))));
    }

    #[test]
    fn coefficient_columns_in_y() {
        let p = P::from_terms([((2, 1), qc(1, 0)), ((0, 1), qc(5, 0)), ((1, 0), qc(7, 0))]);
        let cols = p.coefficients_in_y();
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].coeffs(), &[qc(0, 0), qc(7, 0)]);
        assert_eq!(cols[1].coeffs(), &[qc(5, 0), qc(0, 0), qc(1, 0)]);
    }
}
