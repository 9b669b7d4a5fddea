use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::{Field, Real};

/// Dense univariate polynomial, coefficients in increasing degree.
///
/// Trailing zeros are never stored, so the zero polynomial has no
/// coefficients and `degree()` returns `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePolynomial<C> {
    coeffs: Vec<C>,
}

impl<C: Field> UnivariatePolynomial<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * s^k`.
    pub fn monomial(k: usize, c: C) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn eval(&self, s: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * s.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * C::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => {
                let inv = C::one() / lc.clone();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lc.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: pairs `(factor, multiplicity)` with
    /// pairwise coprime monic square-free factors whose product (with
    /// multiplicities) is the monic part of `self`. Requires characteristic zero.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a_i = b.gcd(&d);
            if a_i.degree().unwrap_or(0) > 0 {
                out.push((a_i.clone(), i));
            }
            b = b.div_rem(&a_i).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a_i).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Monic radical: product of the distinct linear factors.
    pub fn squarefree_part(&self) -> Self {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return f;
        }
        let g = f.gcd(&f.derivative());
        f.div_rem(&g).0
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> UnivariatePolynomial<D> {
        UnivariatePolynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_numeric<F: Real>(&self) -> UnivariatePolynomial<Complex<F>> {
        self.map(|c| c.to_complex::<F>())
    }
}

impl<C: Field> Add<&UnivariatePolynomial<C>> for &UnivariatePolynomial<C> {
    type Output = UnivariatePolynomial<C>;

    fn add(self, rhs: &UnivariatePolynomial<C>) -> UnivariatePolynomial<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<C: Field> Sub<&UnivariatePolynomial<C>> for &UnivariatePolynomial<C> {
    type Output = UnivariatePolynomial<C>;

    fn sub(self, rhs: &UnivariatePolynomial<C>) -> UnivariatePolynomial<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<C: Field> Mul<&UnivariatePolynomial<C>> for &UnivariatePolynomial<C> {
    type Output = UnivariatePolynomial<C>;

    fn mul(self, rhs: &UnivariatePolynomial<C>) -> UnivariatePolynomial<C> {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePolynomial::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UnivariatePolynomial::new(out)
    }
}

impl<C: Field> Neg for &UnivariatePolynomial<C> {
    type Output = UnivariatePolynomial<C>;

    fn neg(self) -> UnivariatePolynomial<C> {
        UnivariatePolynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qc;
    use crate::QComplex;

    fn p(cs: &[i64]) -> UnivariatePolynomial<QComplex> {
        UnivariatePolynomial::new(cs.iter().map(|&c| qc(c, 0)).collect())
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
        assert!(p(&[]).is_zero());
    }

    #[test]
    fn division_identity() {
        let a = p(&[-1, 0, 0, 1]);
        let b = p(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (s-1)(s+2) and (s-1)(s-3)
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[-3, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn squarefree_decomposition_multiplicities() {
        // (s-1)^2 (s+2)^3 s
        let f = &(&(&p(&[-1, 1]) * &p(&[-1, 1])) * &(&(&p(&[2, 1]) * &p(&[2, 1])) * &p(&[2, 1])))
            * &p(&[0, 1]);
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (p(&[0, 1]), 1));
        assert_eq!(dec[1], (p(&[-1, 1]), 2));
        assert_eq!(dec[2], (p(&[2, 1]), 3));
        assert_eq!(f.squarefree_part().degree(), Some(3));
    }
}
