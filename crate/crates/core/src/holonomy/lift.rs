use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use super::germ::{Germ, GermError, PolyGerm, PseudoGroup};
use super::loops::{canonical_loop, canonical_radii, choose_base_point, LoopError, LoopPath};
use crate::foliation::{Chart, ChartField, FoliationNormalForm, SingularityError};
use crate::ode::{dopri5, Dopri5Options, OdeError};
use crate::poly::BivariatePolynomial;
use crate::scalar::{cabs, Field, Real};

type Poly<F> = BivariatePolynomial<Complex<F>>;

/// Chart field `du d/du + dv d/dv` with `L_inf = {u = 0}` invariant, ready
/// for lifting paths of `v` to leaves `u = u(v)`.
#[derive(Debug, Clone)]
pub struct LiftField<F> {
    du: Poly<F>,
    dv: Poly<F>,
    du_u: Poly<F>,
    dv_u: Poly<F>,
}

impl<F: Real> LiftField<F> {
    pub fn new(field: &ChartField<Complex<F>>) -> Self {
        Self {
            du_u: field.du.partial_x(),
            dv_u: field.dv.partial_x(),
            du: field.du.clone(),
            dv: field.dv.clone(),
        }
    }

    pub fn from_form<C: Field>(form: &FoliationNormalForm<C>) -> Self {
        Self::new(&form.chart_field(Chart::InfinityX).to_numeric())
    }

    /// `(du/dv, d/du (du/dv))` at `(u, v)`, or `None` when `dv` vanishes.
    fn slope(&self, u: Complex<F>, v: Complex<F>, floor: F) -> Option<(Complex<F>, Complex<F>)> {
        let a = self.du.eval(&u, &v);
        let b = self.dv.eval(&u, &v);
        if cabs(b) <= floor {
            return None;
        }
        let au = self.du_u.eval(&u, &v);
        let bu = self.dv_u.eval(&u, &v);
        Some((a / b, (au * b - a * bu) / (b * b)))
    }

    pub fn dv_at(&self, u: Complex<F>, v: Complex<F>) -> Complex<F> {
        self.dv.eval(&u, &v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftOptions<F> {
    /// Local error tolerance of the integrator.
    pub tol: F,
    /// Lifts with `|u|` beyond this radius have left the tubular neighbourhood.
    pub domain_radius: F,
    /// `|dv|` below this counts as hitting a singular point.
    pub singular_floor: F,
}

impl<F: Real> LiftOptions<F> {
    pub fn new(tol: F, domain_radius: F) -> Self {
        Self {
            tol,
            domain_radius,
            singular_floor: F::lit(1e-10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("lift left the tubular neighbourhood (|u| > {radius}) at s = {s}")]
    LeftDomain { s: f64, radius: f64 },
    #[error("lift came too close to a singular point at s = {s}")]
    NearSingularity { s: f64 },
}

impl From<LiftError> for GermError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::LeftDomain { radius, .. } => GermError::LeftDomain {
                modulus: f64::INFINITY,
                radius,
            },
            LiftError::NearSingularity { s } => GermError::NearSingularity { s },
        }
    }
}

/// Endpoint of a lift and its derivative with respect to the start point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifted<F> {
    pub endpoint: Complex<F>,
    pub derivative: Complex<F>,
    pub steps: usize,
}

enum Stop {
    Domain,
    Singular,
}

/// Lift `path` to the leaf through `(z0, path.base())`: integrate
/// `du/ds = (du/dv)(u, v(s)) v'(s)` together with its variational equation.
/// The transversal at the base is the `u`-axis, so the endpoint is read off
/// directly.
pub fn lift_path<F: Real>(
    field: &LiftField<F>,
    path: &LoopPath<F>,
    z0: Complex<F>,
    opts: &LiftOptions<F>,
) -> Result<Lifted<F>, LiftError> {
    let ode = Dopri5Options {
        rtol: opts.tol,
        atol: opts.tol * F::lit(1e-6),
        initial_step: F::lit(0.02),
        min_step: F::lit(1e-13),
        max_steps: 100_000,
    };
    let mut y = [z0, Complex::new(F::one(), F::zero())];
    let mut steps = 0;
    let n = path.pieces.len();
    for (k, piece) in path.pieces.iter().enumerate() {
        if piece.length() == F::zero() {
            continue;
        }
        let rhs = |s: F, y: &[Complex<F>; 2]| {
            let u = y[0];
            if cabs(u) > opts.domain_radius || !u.re.is_finite() || !u.im.is_finite() {
                return Err(Stop::Domain);
            }
            let v = piece.point(s);
            let dv = piece.velocity(s);
            let (slope, dslope) = field.slope(u, v, opts.singular_floor).ok_or(Stop::Singular)?;
            Ok([slope * dv, dslope * dv * y[1]])
        };
        let global = |s: f64| (k as f64 + s) / n as f64;
        match dopri5(rhs, F::zero(), F::one(), y, &ode) {
            Ok((out, stats)) => {
                y = out;
                steps += stats.accepted;
            }
            Err(OdeError::Rhs { s, error: Stop::Domain }) => {
                return Err(LiftError::LeftDomain {
                    s: global(s),
                    radius: opts.domain_radius.to_f64_lossy(),
                })
            }
            Err(OdeError::Rhs { s, .. }) | Err(OdeError::StepUnderflow { s }) | Err(OdeError::TooManySteps { s }) => {
                return Err(LiftError::NearSingularity { s: global(s) })
            }
        }
    }
    if cabs(y[0]) > opts.domain_radius {
        return Err(LiftError::LeftDomain {
            s: 1.0,
            radius: opts.domain_radius.to_f64_lossy(),
        });
    }
    Ok(Lifted {
        endpoint: y[0],
        derivative: y[1],
        steps,
    })
}

/// Disk `{(u, q) : |u| <= radius}` transverse to `L_inf` at `v = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseDisk<F> {
    pub base: Complex<F>,
    pub radius: F,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiskError {
    #[error("base point within {distance} of a singular point (margin {margin})")]
    TooCloseToSingularity { distance: f64, margin: f64 },
    #[error("foliation tangent to the disk near u = {at}")]
    NotTransverse { at: String },
}

impl<F: Real> TransverseDisk<F> {
    pub fn new(base: Complex<F>, radius: F) -> Self {
        Self { base, radius }
    }

    /// Checks the margin to `singular` and transversality (`dv != 0`) on
    /// 64 points of the disk.
    pub fn validate(&self, field: &LiftField<F>, singular: &[Complex<F>], margin: F) -> Result<(), DiskError> {
        for &p in singular {
            let d = cabs(p - self.base);
            if d < margin {
                return Err(DiskError::TooCloseToSingularity {
                    distance: d.to_f64_lossy(),
                    margin: margin.to_f64_lossy(),
                });
            }
        }
        let scale = cabs(field.dv_at(Complex::new(F::zero(), F::zero()), self.base));
        for ring in 0..4 {
            let r = self.radius * F::lit((ring + 1) as f64 / 4.0);
            for k in 0..16 {
                let u = Complex::from_polar(r, F::TAU() * F::lit(k as f64 / 16.0));
                let dv = cabs(field.dv_at(u, self.base));
                if dv <= F::lit(1e-8) * scale.max(F::one()) || scale == F::zero() {
                    return Err(DiskError::NotTransverse { at: format!("{u}") });
                }
            }
        }
        Ok(())
    }
}

/// Holonomy of a loop on a transverse disk, evaluated by path lifting.
#[derive(Debug, Clone)]
pub struct HolonomyMap<F: Real> {
    pub path: LoopPath<F>,
    reversed: LoopPath<F>,
    field: Arc<LiftField<F>>,
    pub opts: LiftOptions<F>,
    /// Derivative at the origin of the disk (the point on `L_inf`).
    pub multiplier: Complex<F>,
    pub radius: F,
}

impl<F: Real> HolonomyMap<F> {
    pub fn new(field: Arc<LiftField<F>>, path: LoopPath<F>, opts: LiftOptions<F>, radius: F) -> Result<Self, LiftError> {
        let at_zero = lift_path(&field, &path, Complex::new(F::zero(), F::zero()), &opts)?;
        Ok(Self {
            reversed: path.reversed(),
            path,
            field,
            opts,
            multiplier: at_zero.derivative,
            radius,
        })
    }

    pub fn lift(&self, z: Complex<F>) -> Result<Lifted<F>, LiftError> {
        lift_path(&self.field, &self.path, z, &self.opts)
    }

    /// Taylor coefficients `a_1..=a_order` at the origin from the Cauchy
    /// integral over `|z| = rho` with `samples` points, each with an error
    /// bar from repeating the estimate at `rho / 2`.
    pub fn taylor(&self, order: usize, rho: F, samples: usize) -> Result<Vec<(Complex<F>, F)>, LiftError> {
        let a = self.cauchy(order, rho, samples)?;
        let b = self.cauchy(order, rho / F::lit(2.0), samples)?;
        Ok(a.into_iter().zip(b).map(|(x, y)| (x, cabs(x - y))).collect())
    }

    fn cauchy(&self, order: usize, rho: F, samples: usize) -> Result<Vec<Complex<F>>, LiftError> {
        let values: Vec<Complex<F>> = (0..samples)
            .map(|k| {
                let z = Complex::from_polar(rho, F::TAU() * F::lit(k as f64 / samples as f64));
                self.lift(z).map(|l| l.endpoint)
            })
            .collect::<Result<_, _>>()?;
        let m = F::from_usize(samples).unwrap();
        Ok((1..=order)
            .map(|n| {
                let mut acc = Complex::new(F::zero(), F::zero());
                for (k, v) in values.iter().enumerate() {
                    let th = F::TAU() * F::lit((n * k) as f64 / samples as f64);
                    acc = acc + *v * Complex::from_polar(F::one(), -th);
                }
                acc / (m * rho.powi(n as i32))
            })
            .collect())
    }

    /// Polynomial surrogate `sum_{k=1..order} a_k z^k` from the Cauchy
    /// coefficients at radius `rho`, for fast repeated evaluation.
    pub fn surrogate(&self, order: usize, rho: F, samples: usize) -> Result<PolyGerm<F>, LiftError> {
        let mut coeffs = vec![Complex::new(F::zero(), F::zero())];
        coeffs.extend(self.cauchy(order, rho, samples)?);
        Ok(PolyGerm::new(coeffs, self.radius))
    }
}

impl<F: Real> Germ<F> for HolonomyMap<F> {
    fn eval_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        if cabs(z) > self.radius {
            return Err(GermError::LeftDomain {
                modulus: cabs(z).to_f64_lossy(),
                radius: self.radius.to_f64_lossy(),
            });
        }
        let l = self.lift(z)?;
        Ok((l.endpoint, l.derivative))
    }

    fn eval_inv_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        if cabs(z) > self.radius {
            return Err(GermError::LeftDomain {
                modulus: cabs(z).to_f64_lossy(),
                radius: self.radius.to_f64_lossy(),
            });
        }
        let l = lift_path(&self.field, &self.reversed, z, &self.opts)?;
        Ok((l.endpoint, l.derivative))
    }

    fn radius(&self) -> F {
        self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolonomyError {
    #[error(transparent)]
    Singularities(#[from] SingularityError),
    #[error("singular point {index} on the line at infinity is a multiple root")]
    MultipleRoot { index: usize },
    #[error("no singular point of the (1/x, y/x) chart to encircle")]
    NoSingularities,
    #[error("{given} loop radii given for {points} singular points")]
    LoopCount { given: usize, points: usize },
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error("lifting canonical loop {index}: {error}")]
    Lift { index: usize, error: LiftError },
}

/// Holonomy pseudo-group of `L_inf` with its canonical generators.
#[derive(Debug, Clone)]
pub struct HolonomyGroup<F: Real> {
    pub group: PseudoGroup<F>,
    pub maps: Vec<Arc<HolonomyMap<F>>>,
    pub disk: TransverseDisk<F>,
    /// Singular points of `L_inf` in the `v` coordinate, generator order.
    pub points: Vec<Complex<F>>,
    /// Characteristic numbers with respect to `L_inf`.
    pub lambdas: Vec<Complex<F>>,
    pub radii: Vec<F>,
    /// Generator order in which the loops compose to one loop around all
    /// finite singular points.
    pub ccw_order: Vec<usize>,
    pub field: Arc<LiftField<F>>,
}

/// Options for [`holonomy_generators`].
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyOptions<F> {
    pub lift: LiftOptions<F>,
    /// Disk radius; also the common domain radius of the pseudo-group.
    pub disk_radius: F,
    /// Base point; chosen automatically when `None`.
    pub base: Option<Complex<F>>,
    /// Circle radius used when there is a single finite singular point.
    pub default_loop_radius: F,
    /// Relative clearance of connectors from other circles.
    pub connector_margin: F,
    /// Circle radii per singular point, replacing the canonical radii.
    pub loop_radii: Option<Vec<F>>,
}

impl<F: Real> HolonomyOptions<F> {
    pub fn new(tol: F, disk_radius: F) -> Self {
        Self {
            lift: LiftOptions::new(tol, F::lit(1e3) * disk_radius),
            disk_radius,
            base: None,
            default_loop_radius: F::one(),
            connector_margin: F::zero(),
            loop_radii: None,
        }
    }
}

/// One generator per canonical loop around the singular points of `L_inf`
/// in the `(1/x, y/x)` chart; a point at `[0:1:0]` corresponds to `v = inf`
/// and its loop is the inverse of the product of the others.
pub fn holonomy_generators<C: Field, F: Real>(
    form: &FoliationNormalForm<C>,
    opts: &HolonomyOptions<F>,
) -> Result<HolonomyGroup<F>, HolonomyError> {
    let sing = form.singularities_at_infinity::<F>()?;
    let finite: Vec<_> = sing.iter().filter(|s| s.chart == Chart::InfinityX).collect();
    if let Some(i) = sing.iter().position(|s| s.multiplicity > 1) {
        return Err(HolonomyError::MultipleRoot { index: i });
    }
    if finite.is_empty() {
        return Err(HolonomyError::NoSingularities);
    }
    let points: Vec<Complex<F>> = finite.iter().map(|s| s.location[1]).collect();
    let lambdas: Vec<Complex<F>> = finite.iter().map(|s| s.lambda).collect();
    let field = Arc::new(LiftField::from_form(form));
    let radii = match &opts.loop_radii {
        Some(r) if r.len() == points.len() => r.clone(),
        Some(r) => {
            return Err(HolonomyError::LoopCount {
                given: r.len(),
                points: points.len(),
            })
        }
        None => canonical_radii(&points, opts.default_loop_radius),
    };
    let q = match opts.base {
        Some(q) => q,
        None if points.len() == 1 => points[0] + Complex::new(F::lit(2.0) * radii[0], F::zero()),
        None => choose_base_point(&points, &radii)?,
    };
    let disk = TransverseDisk::new(q, opts.disk_radius);
    let min_r = radii.iter().copied().fold(F::infinity(), F::min);
    disk.validate(&field, &points, min_r)?;
    let mut maps = Vec::with_capacity(points.len());
    for j in 0..points.len() {
        let path = canonical_loop(q, &points, &radii, j, opts.connector_margin)?;
        let map = HolonomyMap::new(field.clone(), path, opts.lift, opts.disk_radius)
            .map_err(|error| HolonomyError::Lift { index: j, error })?;
        maps.push(Arc::new(map));
    }
    let group = PseudoGroup::new(
        maps.iter().map(|m| m.clone() as Arc<dyn Germ<F>>).collect(),
        opts.disk_radius,
        "holonomy of L_inf",
    );
    Ok(HolonomyGroup {
        group,
        ccw_order: super::loops::counterclockwise_order(q, &points),
        maps,
        disk,
        points,
        lambdas,
        radii,
        field,
    })
}
