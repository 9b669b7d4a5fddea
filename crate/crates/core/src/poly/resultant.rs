//! Exact resultants over a field.

use super::{BivariatePolynomial, UnivariatePolynomial};
use crate::scalar::Field;

/// Determinant by Gaussian elimination over a field.
pub fn determinant<C: Field>(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    let mut det = C::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return C::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..n {
                let v = m[col][c].clone() * factor.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
    }
    det
}

/// Sylvester resultant of two univariate polynomials with their actual degrees.
///
/// A zero input gives zero; two constants give one.
pub fn resultant<C: Field>(a: &UnivariatePolynomial<C>, b: &UnivariatePolynomial<C>) -> C {
    let (m, n) = match (a.degree(), b.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return C::zero(),
    };
    let size = m + n;
    if size == 0 {
        return C::one();
    }
    let mut rows = Vec::with_capacity(size);
    for k in 0..n {
        let mut row = vec![C::zero(); size];
        for (i, c) in a.coeffs().iter().rev().enumerate() {
            row[k + i] = c.clone();
        }
        rows.push(row);
    }
    for k in 0..m {
        let mut row = vec![C::zero(); size];
        for (i, c) in b.coeffs().iter().rev().enumerate() {
            row[k + i] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

/// `Res_y(a, b)` as a polynomial in `x`, by evaluation at integer abscissae
/// (skipping those where either leading coefficient in `y` vanishes)
/// followed by exact Lagrange interpolation.
pub fn resultant_in_y<C: Field>(
    a: &BivariatePolynomial<C>,
    b: &BivariatePolynomial<C>,
) -> UnivariatePolynomial<C> {
    if a.is_zero() || b.is_zero() {
        return UnivariatePolynomial::zero();
    }
    let ca = a.coefficients_in_y();
    let cb = b.coefficients_in_y();
    let (la, lb) = (ca.last().unwrap().clone(), cb.last().unwrap().clone());
    let bound = (a.degree().unwrap() * b.degree().unwrap()) as usize + 1;

    let mut xs = Vec::with_capacity(bound);
    let mut vals = Vec::with_capacity(bound);
    let mut k: i64 = 0;
    while xs.len() < bound {
        let x = C::from_i64(k);
        k += 1;
        if la.eval(&x).is_zero() || lb.eval(&x).is_zero() {
            continue;
        }
        let sa = UnivariatePolynomial::new(ca.iter().map(|c| c.eval(&x)).collect());
        let sb = UnivariatePolynomial::new(cb.iter().map(|c| c.eval(&x)).collect());
        vals.push(resultant(&sa, &sb));
        xs.push(x);
    }
    interpolate(&xs, &vals)
}

/// `Res_x(a, b)` as a polynomial in `y`.
pub fn resultant_in_x<C: Field>(
    a: &BivariatePolynomial<C>,
    b: &BivariatePolynomial<C>,
) -> UnivariatePolynomial<C> {
    resultant_in_y(&a.swap_variables(), &b.swap_variables())
}

/// Newton-form interpolation through `(xs[i], ys[i])`.
pub fn interpolate<C: Field>(xs: &[C], ys: &[C]) -> UnivariatePolynomial<C> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    let mut out = UnivariatePolynomial::zero();
    for i in (0..n).rev() {
        let lin = UnivariatePolynomial::new(vec![-xs[i].clone(), C::one()]);
        out = &(&out * &lin) + &UnivariatePolynomial::constant(dd[i].clone());
    }
    out
}

/// Exact coprimality test for bivariate polynomials: no common factor of
/// positive degree. Both resultants must be non-zero, which detects common
/// factors involving `y` and those in `x` alone respectively.
pub fn coprime<C: Field>(a: &BivariatePolynomial<C>, b: &BivariatePolynomial<C>) -> bool {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return false,
        (true, false) => return b.degree() == Some(0),
        (false, true) => return a.degree() == Some(0),
        _ => {}
    }
    !resultant_in_y(a, b).is_zero() && !resultant_in_x(a, b).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qc;
    use crate::QComplex;

    type P = BivariatePolynomial<QComplex>;
    type U = UnivariatePolynomial<QComplex>;

    fn u(cs: &[i64]) -> U {
        U::new(cs.iter().map(|&c| qc(c, 0)).collect())
    }

    #[test]
    fn univariate_resultant_matches_root_product() {
        // Res(s^2 - 1, s - 2) = (1-2)(-1-2) = 3 up to the sign convention
        // Res(a, b) = lc(a)^n prod b(roots of a)
        let r = resultant(&u(&[-1, 0, 1]), &u(&[-2, 1]));
        assert_eq!(r, qc(3, 0));
        assert_eq!(resultant(&u(&[-1, 1]), &u(&[1, -2, 1])), qc(0, 0));
        assert_eq!(resultant(&u(&[5]), &u(&[7])), qc(1, 0));
        assert_eq!(resultant(&u(&[5]), &u(&[0, 0, 1])), qc(25, 0));
    }

    #[test]
    fn interpolation_reproduces_polynomial() {
        let p = u(&[3, -1, 0, 2]);
        let xs: Vec<_> = (0..4).map(|k| qc(k, 0)).collect();
        let ys: Vec<_> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }

    #[test]
    fn bivariate_resultant_eliminates_y() {
        // a = y - x, b = y^2 - 1  ->  Res_y = x^2 - 1 (up to sign)
        let a = P::from_terms([((0, 1), qc(1, 0)), ((1, 0), qc(-1, 0))]);
        let b = P::from_terms([((0, 2), qc(1, 0)), ((0, 0), qc(-1, 0))]);
        let r = resultant_in_y(&a, &b);
        assert_eq!(r.degree(), Some(2));
        assert!(r.eval(&qc(1, 0)) == qc(0, 0) && r.eval(&qc(-1, 0)) == qc(0, 0));
    }

    #[test]
    fn coprimality() {
        let x = P::x();
        let y = P::y();
        assert!(!coprime(&(&x * &x), &(&x * &y)));
        assert!(coprime(&x, &y));
        assert!(coprime(&P::constant(qc(1, 0)), &P::zero()));
        assert!(!coprime(&x, &P::zero()));
        // common factor (x + y)
        let f = &x + &y;
        assert!(!coprime(&(&f * &x), &(&f * &(&y + &P::constant(qc(1, 0))))));
    }
}
