//! Simultaneous root finding for univariate complex polynomials.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::UnivariatePolynomial;
use crate::scalar::{cabs, Real};

/// Horner evaluation returning `(p(z), p'(z))`.
pub fn eval_with_derivative<F: Real>(
    coeffs: &[Complex<F>],
    z: Complex<F>,
) -> (Complex<F>, Complex<F>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + *c;
    }
    (p, dp)
}

/// All roots of a polynomial with (numerically) simple roots, by the
/// Aberth-Ehrlich iteration followed by Newton polishing.
///
/// Returns the roots sorted lexicographically by (re, im). A polynomial of
/// degree 0 or the zero polynomial has no roots.
pub fn polynomial_roots<F: Real>(p: &UnivariatePolynomial<Complex<F>>) -> Vec<Complex<F>> {
    let deg = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let lc = *p.leading().unwrap();
    let monic: Vec<Complex<F>> = p.coeffs().iter().map(|c| *c / lc).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }

    // Cauchy bound on root moduli
    let bound = F::one()
        + monic[..deg]
            .iter()
            .map(|c| cabs(*c))
            .fold(F::zero(), F::max);
    let radius = bound * F::lit(0.5);
    let offset = F::lit(0.4);
    let two_pi = F::TAU();
    let mut z: Vec<Complex<F>> = (0..deg)
        .map(|k| {
            let theta = two_pi * F::from_usize(k).unwrap() / F::from_usize(deg).unwrap() + offset;
            Complex::from_polar(radius, theta)
        })
        .collect();

    let eps = F::epsilon() * F::lit(16.0);
    for _ in 0..500 {
        let mut max_step = F::zero();
        for i in 0..deg {
            let (pv, dpv) = eval_with_derivative(&monic, z[i]);
            if pv.is_zero() {
                continue;
            }
            let ratio = pv / dpv;
            let mut sum = Complex::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    sum = sum + Complex::<F>::one() / (z[i] - *zj);
                }
            }
            let step = ratio / (Complex::<F>::one() - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] = z[i] - step;
                let rel = cabs(step) / (F::one() + cabs(z[i]));
                if rel > max_step {
                    max_step = rel;
                }
            }
        }
        if max_step < eps {
            break;
        }
    }

    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv) = eval_with_derivative(&monic, *zi);
            if dpv.is_zero() {
                break;
            }
            let step = pv / dpv;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *zi = *zi - step;
        }
    }
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn from_roots(roots: &[C]) -> UnivariatePolynomial<C> {
        let mut p = UnivariatePolynomial::constant(C::new(1.0, 0.0));
        for r in roots {
            p = &p * &UnivariatePolynomial::new(vec![-*r, C::new(1.0, 0.0)]);
        }
        p
    }

    #[test]
    fn recovers_known_roots() {
        let roots = [C::new(1.0, 2.0), C::new(-0.5, 0.0), C::new(3.0, -1.0), C::new(0.0, 0.25)];
        let found = polynomial_roots(&from_roots(&roots));
        assert_eq!(found.len(), 4);
        for r in roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-12, "root {r} missed by {best}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(polynomial_roots(&UnivariatePolynomial::<C>::zero()).is_empty());
        assert!(polynomial_roots(&UnivariatePolynomial::constant(C::new(2.0, 0.0))).is_empty());
        let lin = UnivariatePolynomial::new(vec![C::new(-2.0, 0.0), C::new(4.0, 0.0)]);
        assert_eq!(polynomial_roots(&lin), vec![C::new(0.5, 0.0)]);
    }

    #[test]
    fn works_in_single_precision() {
        let p = UnivariatePolynomial::new(vec![
            Complex::new(-1.0f32, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ]);
        let r = polynomial_roots(&p);
        assert!((r[0] + Complex::new(1.0, 0.0)).norm() < 1e-5);
        assert!((r[1] - Complex::new(1.0, 0.0)).norm() < 1e-5);
    }
}
