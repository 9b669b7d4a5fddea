use thiserror::Error;

use crate::poly::resultant::coprime;
use crate::poly::{BivariatePolynomial, UnivariatePolynomial};
use crate::scalar::Field;

use super::chart::{Chart, ChartField};

/// Which of the four normal-form conditions failed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    /// `P + x g` and `Q + y g` share a non-constant factor.
    #[error("common factor: P + x g and Q + y g are not coprime")]
    CommonFactor,
    /// `g` is neither zero nor homogeneous of degree `n`.
    #[error("non-homogeneous g: g is neither zero nor homogeneous of degree {n}")]
    NonHomogeneousG { n: u32 },
    /// `max(deg P, deg Q) > n`.
    #[error("degree bound: max(deg P, deg Q) = {found} exceeds n = {n}")]
    DegreeBoundViolated { found: u32, n: u32 },
    /// `g = 0` but `max(deg P, deg Q) != n`, or the degree-`n`
    /// part of `(P, Q)` is a multiple of the radial field so the foliation
    /// actually has degree below `n`.
    #[error("degree mismatch: {reason}")]
    DegreeMismatch { reason: String },
}

/// Error raised by [`FoliationNormalForm::tangency_polynomial`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("the line is invariant by the foliation (tangency polynomial vanishes identically)")]
pub struct InvariantLine;

/// A projective line given in one of the charts by a point and a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<C> {
    pub chart: Chart,
    pub point: [C; 2],
    pub direction: [C; 2],
}

impl<C: Field> Line<C> {
    /// Affine line `s -> point + s * direction`.
    pub fn affine(point: [C; 2], direction: [C; 2]) -> Self {
        Self {
            chart: Chart::Affine,
            point,
            direction,
        }
    }

    /// The line at infinity, parametrized by `v` in the `(u, v) = (1/x, y/x)` chart.
    pub fn at_infinity() -> Self {
        Self {
            chart: Chart::InfinityX,
            point: [C::zero(), C::zero()],
            direction: [C::zero(), C::one()],
        }
    }
}

/// A degree-`n` foliation written as
/// `(P + x g) dy - (Q + y g) dx = 0`, validated against the normal-form
/// conditions. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationNormalForm<C> {
    p: BivariatePolynomial<C>,
    q: BivariatePolynomial<C>,
    g: BivariatePolynomial<C>,
    n: u32,
}

impl<C: Field> FoliationNormalForm<C> {
    /// Checks conditions (2), (3), the degree part of (4), the exact
    /// coprimality (1), and finally that the top part of `(P, Q)` is not radial.
    pub fn validate(
        p: BivariatePolynomial<C>,
        q: BivariatePolynomial<C>,
        g: BivariatePolynomial<C>,
        n: u32,
    ) -> Result<Self, ValidationError> {
        if !g.is_zero() && !g.is_homogeneous_of_degree(n) {
            return Err(ValidationError::NonHomogeneousG { n });
        }
        let max_pq = p.degree().max(q.degree());
        if let Some(d) = max_pq {
            if d > n {
                return Err(ValidationError::DegreeBoundViolated { found: d, n });
            }
        }
        if g.is_zero() && max_pq != Some(n) {
            return Err(ValidationError::DegreeMismatch {
                reason: match max_pq {
                    Some(d) => format!("g = 0 and max(deg P, deg Q) = {d} != n = {n}"),
                    None => "P, Q and g all vanish".to_string(),
                },
            });
        }
        let form = Self { p, q, g, n };
        let (a, b) = form.affine_field();
        if !coprime(&a, &b) {
            return Err(ValidationError::CommonFactor);
        }
        if form.g.is_zero() {
            // top part (P_n, Q_n) = h (x, y)  <=>  y P_n - x Q_n = 0
            let pn = form.p.homogeneous_part(n);
            let qn = form.q.homogeneous_part(n);
            let radial = &pn.shift(0, 1) - &qn.shift(1, 0);
            if radial.is_zero() {
                return Err(ValidationError::DegreeMismatch {
                    reason: format!(
                        "degree-{n} part of (P, Q) is radial, the foliation has degree below {n}"
                    ),
                });
            }
        }
        Ok(form)
    }

    pub fn p(&self) -> &BivariatePolynomial<C> {
        &self.p
    }

    pub fn q(&self) -> &BivariatePolynomial<C> {
        &self.q
    }

    pub fn g(&self) -> &BivariatePolynomial<C> {
        &self.g
    }

    /// The declared degree `n`; equal to the tangency count with a generic line.
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Components `(P + x g, Q + y g)` of the affine vector field
    /// `(P + x g) d/dx + (Q + y g) d/dy` tangent to the foliation.
    pub fn affine_field(&self) -> (BivariatePolynomial<C>, BivariatePolynomial<C>) {
        (&self.p + &self.g.shift(1, 0), &self.q + &self.g.shift(0, 1))
    }

    /// The same foliation with the coordinates `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q.swap_variables(),
            q: self.p.swap_variables(),
            g: self.g.swap_variables(),
            n: self.n,
        }
    }

    /// Polynomial in the line parameter whose roots are the tangency points
    /// of the foliation with `line`.
    pub fn tangency_polynomial(&self, line: &Line<C>) -> Result<UnivariatePolynomial<C>, InvariantLine> {
        let (a, b) = match line.chart {
            Chart::Affine => self.affine_field(),
            chart => {
                let f = self.chart_field(chart);
                (f.du, f.dv)
            }
        };
        let [x0, y0] = &line.point;
        let [dx, dy] = &line.direction;
        let ta = a.restrict_to_line(x0, y0, dx, dy);
        let tb = b.restrict_to_line(x0, y0, dx, dy);
        let t = &ta.scale(dy) - &tb.scale(dx);
        if t.is_zero() {
            Err(InvariantLine)
        } else {
            Ok(t)
        }
    }

    /// Vector field generating the foliation in the given chart, with the
    /// largest common power of the chart's `u` coordinate removed.
    pub fn chart_field(&self, chart: Chart) -> ChartField<C> {
        match chart {
            Chart::Affine => {
                let (a, b) = self.affine_field();
                ChartField {
                    chart,
                    du: a,
                    dv: b,
                    removed_u_power: 0,
                }
            }
            Chart::InfinityX => ChartField::at_infinity(&self.p, &self.q, &self.g, self.n),
            Chart::InfinityY => {
                let s = self.swapped();
                let mut f = ChartField::at_infinity(&s.p, &s.q, &s.g, s.n);
                f.chart = Chart::InfinityY;
                f
            }
        }
    }

    /// Chart field near `L_inf = {u = 0}` in `(u, v) = (1/x, y/x)`.
    pub fn infinity_chart(&self) -> ChartField<C> {
        self.chart_field(Chart::InfinityX)
    }

    /// Whether `L_inf` is a leaf: `u` divides the `du` component of the
    /// reduced chart field.
    pub fn is_line_at_infinity_invariant(&self) -> bool {
        self.infinity_chart().u_divides_du()
    }

    pub fn map<D: Field>(&self, f: impl Fn(&C) -> D) -> FoliationNormalForm<D> {
        FoliationNormalForm {
            p: self.p.map(&f),
            q: self.q.map(&f),
            g: self.g.map(&f),
            n: self.n,
        }
    }
}
