use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use super::chart::{Chart, ChartField};
use super::normal_form::FoliationNormalForm;
use crate::poly::roots::polynomial_roots;
use crate::poly::BivariatePolynomial;
use crate::scalar::{cabs, Field, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SingularityError {
    #[error("the line at infinity is not invariant, its singularities are not isolated leaves")]
    LineNotInvariant,
}

/// A singular point of the foliation in one chart.
///
/// `eigenvalues[0]` is the reference eigenvalue and
/// `lambda = eigenvalues[1] / eigenvalues[0]`. On `L_inf` the reference is
/// the eigenvalue tangent to `L_inf`, so `lambda` is the characteristic
/// number relevant for the holonomy of `L_inf`. In the affine chart the
/// reference is the eigenvalue of smaller modulus (ties broken by argument).
#[derive(Debug, Clone, PartialEq)]
pub struct Singularity<F: Real> {
    pub chart: Chart,
    pub location: [Complex<F>; 2],
    pub eigenvalues: [Complex<F>; 2],
    pub lambda: Complex<F>,
    pub lambda_inv: Complex<F>,
    pub residual: F,
    /// Root multiplicity on `L_inf` (exact); 1 for affine singularities.
    pub multiplicity: usize,
}

/// Box `|Re(z_k - c_k)|, |Im(z_k - c_k)| <= half_width` in `C^2` with the
/// multistart Newton parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRegion<F> {
    pub center: [Complex<F>; 2],
    pub half_width: F,
    /// Seeds are `density^2` Halton points in the box.
    pub density: usize,
    /// Newton convergence tolerance.
    pub tol: F,
    pub max_iterations: usize,
}

impl<F: Real> SearchRegion<F> {
    pub fn centered(half_width: F) -> Self {
        Self {
            center: [Complex::zero(), Complex::zero()],
            half_width,
            density: 32,
            tol: F::lit(1e-12),
            max_iterations: 60,
        }
    }

    fn contains(&self, p: &[Complex<F>; 2]) -> bool {
        let hw = self.half_width * (F::one() + F::lit(1e-9));
        p.iter().zip(&self.center).all(|(z, c)| {
            let d = *z - *c;
            d.re.abs() <= hw && d.im.abs() <= hw
        })
    }

    fn seeds(&self) -> Vec<[Complex<F>; 2]> {
        let count = self.density * self.density;
        (0..count)
            .map(|k| {
                let h = |base| F::lit(2.0 * radical_inverse(k + 1, base) - 1.0) * self.half_width;
                [
                    self.center[0] + Complex::new(h(2), h(3)),
                    self.center[1] + Complex::new(h(5), h(7)),
                ]
            })
            .collect()
    }
}

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Result of the multistart search with per-seed diagnostics.
#[derive(Debug, Clone)]
pub struct AffineSearch<F: Real> {
    pub singularities: Vec<Singularity<F>>,
    pub seeds: usize,
    /// Seeds whose Newton iteration did not converge (non-fatal).
    pub not_converged: usize,
    /// Seeds that converged to a zero outside the region.
    pub outside: usize,
}

/// Eigenvalues of `[[a, b], [c, d]]`.
pub fn eigenvalues_2x2<F: Real>(m: [[Complex<F>; 2]; 2]) -> [Complex<F>; 2] {
    let two = F::lit(2.0);
    let half_tr = (m[0][0] + m[1][1]) / two;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (half_tr * half_tr - det).sqrt();
    [half_tr - disc, half_tr + disc]
}

fn order_by_modulus<F: Real>(e: [Complex<F>; 2]) -> [Complex<F>; 2] {
    let (a, b) = (cabs(e[0]), cabs(e[1]));
    let scale = F::one().max(a.max(b));
    let tie = (a - b).abs() <= F::lit(1e-12) * scale;
    let swap = if tie { e[0].arg() > e[1].arg() } else { a > b };
    if swap {
        [e[1], e[0]]
    } else {
        e
    }
}

fn ratio<F: Real>(num: Complex<F>, den: Complex<F>) -> Complex<F> {
    if den.is_zero() {
        Complex::new(F::infinity(), F::zero())
    } else {
        num / den
    }
}

struct NumericField<F: Real> {
    a: BivariatePolynomial<Complex<F>>,
    b: BivariatePolynomial<Complex<F>>,
    ax: BivariatePolynomial<Complex<F>>,
    ay: BivariatePolynomial<Complex<F>>,
    bx: BivariatePolynomial<Complex<F>>,
    by: BivariatePolynomial<Complex<F>>,
}

impl<F: Real> NumericField<F> {
    fn new<C: Field>(a: &BivariatePolynomial<C>, b: &BivariatePolynomial<C>) -> Self {
        let a = a.to_numeric::<F>();
        let b = b.to_numeric::<F>();
        Self {
            ax: a.partial_x(),
            ay: a.partial_y(),
            bx: b.partial_x(),
            by: b.partial_y(),
            a,
            b,
        }
    }

    fn value(&self, p: &[Complex<F>; 2]) -> [Complex<F>; 2] {
        [self.a.eval(&p[0], &p[1]), self.b.eval(&p[0], &p[1])]
    }

    fn jacobian(&self, p: &[Complex<F>; 2]) -> [[Complex<F>; 2]; 2] {
        [
            [self.ax.eval(&p[0], &p[1]), self.ay.eval(&p[0], &p[1])],
            [self.bx.eval(&p[0], &p[1]), self.by.eval(&p[0], &p[1])],
        ]
    }

    fn residual(&self, p: &[Complex<F>; 2]) -> F {
        let v = self.value(p);
        cabs(v[0]).max(cabs(v[1]))
    }

    /// Newton iteration; `None` if it fails to converge.
    fn newton(&self, start: [Complex<F>; 2], tol: F, max_iter: usize) -> Option<[Complex<F>; 2]> {
        let mut p = start;
        for _ in 0..max_iter {
            let f = self.value(&p);
            let j = self.jacobian(&p);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.is_zero() || !det.re.is_finite() || !det.im.is_finite() {
                return None;
            }
            let dx = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
            let dy = (f[1] * j[0][0] - f[0] * j[1][0]) / det;
            p = [p[0] - dx, p[1] - dy];
            if !(p[0].re.is_finite() && p[0].im.is_finite() && p[1].re.is_finite() && p[1].im.is_finite()) {
                return None;
            }
            let step = cabs(dx).max(cabs(dy));
            let size = F::one() + cabs(p[0]).max(cabs(p[1]));
            if step <= tol * size {
                return Some(p);
            }
        }
        None
    }
}

fn lex_cmp<F: Real>(a: &[Complex<F>; 2], b: &[Complex<F>; 2]) -> std::cmp::Ordering {
    let ka = [a[0].re, a[0].im, a[1].re, a[1].im];
    let kb = [b[0].re, b[0].im, b[1].re, b[1].im];
    for (x, y) in ka.iter().zip(&kb) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

impl<C: Field> FoliationNormalForm<C> {
    /// Zeros of `(P + x g, Q + y g)` inside `region`, found by multistart
    /// Newton from a deterministic Halton seed set, deduplicated and sorted
    /// lexicographically by location.
    pub fn affine_singularities<F: Real>(&self, region: &SearchRegion<F>) -> AffineSearch<F> {
        let (a, b) = self.affine_field();
        let field = NumericField::<F>::new(&a, &b);
        let seeds = region.seeds();
        let results: Vec<Option<[Complex<F>; 2]>> = seeds
            .par_iter()
            .map(|s| field.newton(*s, region.tol, region.max_iterations))
            .collect();

        let mut not_converged = 0;
        let mut outside = 0;
        let mut found: Vec<[Complex<F>; 2]> = Vec::new();
        for r in results {
            match r {
                None => not_converged += 1,
                Some(p) if !region.contains(&p) => outside += 1,
                Some(p) => found.push(p),
            }
        }
        found.sort_by(lex_cmp);
        let dedup_tol = F::lit(1e-7);
        let mut unique: Vec<[Complex<F>; 2]> = Vec::new();
        for p in found {
            let dup = unique.iter().any(|q| {
                let d = cabs(p[0] - q[0]).max(cabs(p[1] - q[1]));
                d <= dedup_tol * (F::one() + cabs(q[0]).max(cabs(q[1])))
            });
            if !dup {
                unique.push(p);
            }
        }
        let singularities = unique
            .into_iter()
            .map(|p| {
                let eig = order_by_modulus(eigenvalues_2x2(field.jacobian(&p)));
                let lambda = ratio(eig[1], eig[0]);
                Singularity {
                    chart: Chart::Affine,
                    location: p,
                    eigenvalues: eig,
                    lambda,
                    lambda_inv: ratio(eig[0], eig[1]),
                    residual: field.residual(&p),
                    multiplicity: 1,
                }
            })
            .collect();
        AffineSearch {
            singularities,
            seeds: seeds.len(),
            not_converged,
            outside,
        }
    }

    /// Singular points on `L_inf`, from the exact restriction of the chart
    /// field to `{u = 0}`. Multiple roots are reported with their exact
    /// multiplicity. When the `(1/x, y/x)` chart misses some of them the
    /// point `[0:1:0]` is taken from the `(1/y, x/y)` chart.
    pub fn singularities_at_infinity<F: Real>(&self) -> Result<Vec<Singularity<F>>, SingularityError> {
        if !self.is_line_at_infinity_invariant() {
            return Err(SingularityError::LineNotInvariant);
        }
        let fx = self.chart_field(Chart::InfinityX);
        let mut out = roots_on_line(&fx, false);
        let covered: usize = out.iter().map(|s| s.multiplicity).sum();
        if covered < self.degree() as usize + 1 {
            let fy = self.chart_field(Chart::InfinityY);
            out.extend(roots_on_line(&fy, true));
        }
        Ok(out)
    }
}

/// Roots of `dv(0, v)` for an invariant `{u = 0}`; with `only_origin` just
/// the root `v = 0`.
fn roots_on_line<C: Field, F: Real>(field: &ChartField<C>, only_origin: bool) -> Vec<Singularity<F>> {
    let restricted = field.dv.at_x_zero();
    // du = u * du1, transverse eigenvalue du1(0, v)
    let du1 = field.du.divide_by_x_power(1);
    let num = field.to_numeric::<F>();
    let du1_num = du1.to_numeric::<F>();
    let dv_v = num.dv.partial_y();
    let zero = Complex::<F>::zero();

    let mut out = Vec::new();
    for (factor, mult) in restricted.squarefree_decomposition() {
        let roots: Vec<Complex<F>> = if only_origin {
            if factor.coeff(0).is_zero() {
                vec![zero]
            } else {
                continue;
            }
        } else {
            polynomial_roots(&factor.to_numeric::<F>())
        };
        for v in roots {
            let transverse = du1_num.eval(&zero, &v);
            let tangent = if mult > 1 { zero } else { dv_v.eval(&zero, &v) };
            let [a, b] = num.eval(zero, v);
            out.push(Singularity {
                chart: field.chart,
                location: [zero, v],
                eigenvalues: [tangent, transverse],
                lambda: ratio(transverse, tangent),
                lambda_inv: ratio(tangent, transverse),
                residual: cabs(a).max(cabs(b)),
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|a, b| lex_cmp(&a.location, &b.location));
    out
}
