use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::poly::BivariatePolynomial;
use crate::scalar::{Field, Real};

/// Coordinate charts of the projective plane used by the toolkit.
///
/// * `Affine`: `(x, y)`.
/// * `InfinityX`: `(u, v) = (1/x, y/x)`, covering `L_inf` minus `[0:1:0]`.
/// * `InfinityY`: `(u, v) = (1/y, x/y)`, covering `L_inf` minus `[1:0:0]`.
///
/// In both infinity charts `L_inf = {u = 0}`. The `InfinityX` transition is
/// an involution on its overlap with the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    Affine,
    InfinityX,
    InfinityY,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Affine => "affine",
            Chart::InfinityX => "infinity_x",
            Chart::InfinityY => "infinity_y",
        })
    }
}

impl Chart {
    /// Affine coordinates to this chart.
    pub fn from_affine<F: Real>(self, p: [Complex<F>; 2]) -> [Complex<F>; 2] {
        let one = Complex::new(F::one(), F::zero());
        match self {
            Chart::Affine => p,
            Chart::InfinityX => [one / p[0], p[1] / p[0]],
            Chart::InfinityY => [one / p[1], p[0] / p[1]],
        }
    }

    /// Chart coordinates back to affine.
    pub fn to_affine<F: Real>(self, p: [Complex<F>; 2]) -> [Complex<F>; 2] {
        let one = Complex::new(F::one(), F::zero());
        match self {
            Chart::Affine => p,
            Chart::InfinityX => [one / p[0], p[1] / p[0]],
            Chart::InfinityY => [p[1] / p[0], one / p[0]],
        }
    }
}

/// Polynomial vector field `du d/du + dv d/dv` in a chart, after removing
/// the common factor `u^removed_u_power`.
///
/// The polynomials use the first variable for `u` and the second for `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartField<C> {
    pub chart: Chart,
    pub du: BivariatePolynomial<C>,
    pub dv: BivariatePolynomial<C>,
    pub removed_u_power: u32,
}

impl<C: Field> ChartField<C> {
    /// Field of `(P + x g) d/dx + (Q + y g) d/dy` in `(u, v) = (1/x, y/x)`.
    ///
    /// With `A~(u, v) = sum p_ij u^(n+1-i-j) v^j + g(1, v)` the pushed-forward
    /// field times `u^n` is
    /// `du = -u A~`, `dv = sum u^(n+1-i-j) (q_ij v^j - p_ij v^(j+1))`;
    /// the `g` contributions to `dv` cancel.
    pub(crate) fn at_infinity(
        p: &BivariatePolynomial<C>,
        q: &BivariatePolynomial<C>,
        g: &BivariatePolynomial<C>,
        n: u32,
    ) -> Self {
        let mut a_tilde = BivariatePolynomial::zero();
        for ((i, j), c) in p.terms() {
            a_tilde = &a_tilde + &BivariatePolynomial::monomial(n + 1 - i - j, *j, c.clone());
        }
        for ((_, j), c) in g.terms() {
            a_tilde = &a_tilde + &BivariatePolynomial::monomial(0, *j, c.clone());
        }
        let du = -&a_tilde.shift(1, 0);
        let mut dv = BivariatePolynomial::zero();
        for ((i, j), c) in q.terms() {
            dv = &dv + &BivariatePolynomial::monomial(n + 1 - i - j, *j, c.clone());
        }
        for ((i, j), c) in p.terms() {
            dv = &dv - &BivariatePolynomial::monomial(n + 1 - i - j, j + 1, c.clone());
        }
        let m = match (du.x_valuation(), dv.x_valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0,
        };
        ChartField {
            chart: Chart::InfinityX,
            du: du.divide_by_x_power(m),
            dv: dv.divide_by_x_power(m),
            removed_u_power: m,
        }
    }

    /// `u | du`, i.e. `{u = 0}` is invariant.
    pub fn u_divides_du(&self) -> bool {
        self.du.x_valuation().map_or(true, |v| v >= 1)
    }

    pub fn to_numeric<F: Real>(&self) -> ChartField<Complex<F>> {
        ChartField {
            chart: self.chart,
            du: self.du.to_numeric(),
            dv: self.dv.to_numeric(),
            removed_u_power: self.removed_u_power,
        }
    }
}

impl<F: Real> ChartField<Complex<F>> {
    pub fn eval(&self, u: Complex<F>, v: Complex<F>) -> [Complex<F>; 2] {
        [self.du.eval(&u, &v), self.dv.eval(&u, &v)]
    }
}
