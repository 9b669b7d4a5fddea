//! One-parameter deformations `g_{1,t}(z) = g_1(z) + t z^{D+1}` of a
//! pseudo-group and continuation of hyperbolic fixed points in `t`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::holonomy::io::PseudoGroupDocument;
use crate::holonomy::{
    invert_by_newton, newton_fixed_point, orbit_density_probe, Coverage, Germ, GermError, Letter, ProbeOptions,
    PseudoGroup, Word,
};
use crate::scalar::{cabs, Real};

/// A family `t -> G_t` of pseudo-groups on a common disk.
///
/// `eval` returns `(g_{j,t}(z), d/dz, d/dt)`; `eval_inv` the same triple for
/// the inverse germ. Families other than [`DeformationFamily`] can be plugged
/// in here.
pub trait GeneratorFamily<F: Real>: Send + Sync {
    fn rank(&self) -> usize;
    fn delta(&self) -> F;
    fn eval(&self, j: usize, t: Complex<F>, z: Complex<F>) -> Result<[Complex<F>; 3], GermError>;
    fn eval_inv(&self, j: usize, t: Complex<F>, z: Complex<F>) -> Result<[Complex<F>; 3], GermError>;
    /// The pseudo-group at parameter `t`.
    fn at(&self, t: Complex<F>) -> PseudoGroup<F>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error("exponent D must be at least 1")]
    ZeroExponent,
    #[error("deformed generator {index} does not exist (rank {rank})")]
    NoSuchGenerator { index: usize, rank: usize },
    #[error("parameter radius must be positive")]
    BadRadius,
    #[error("generator {index} has vanishing linear coefficient")]
    SingularGenerator { index: usize },
}

/// `g` perturbed by `t z^{D+1}`.
#[derive(Debug, Clone)]
pub struct Deformed<F: Real> {
    pub base: Arc<dyn Germ<F>>,
    pub exponent: u32,
    pub t: Complex<F>,
}

impl<F: Real> Deformed<F> {
    pub fn new(base: Arc<dyn Germ<F>>, exponent: u32, t: Complex<F>) -> Self {
        Self { base, exponent, t }
    }

    fn is_base(&self) -> bool {
        self.t == Complex::new(F::zero(), F::zero())
    }

    /// `(g_t(z), g_t'(z), z^{D+1})`.
    fn eval_full(&self, z: Complex<F>) -> Result<[Complex<F>; 3], GermError> {
        let (v, d) = self.base.eval_d(z)?;
        let zd = z.powu(self.exponent);
        let zd1 = zd * z;
        if self.is_base() {
            return Ok([v, d, zd1]);
        }
        let k = F::lit((self.exponent + 1) as f64);
        Ok([v + self.t * zd1, d + self.t * zd * k, zd1])
    }
}

impl<F: Real> Germ<F> for Deformed<F> {
    fn eval_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        let [v, d, _] = self.eval_full(z)?;
        Ok((v, d))
    }

    fn eval_inv_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        let start = self.base.eval_inv(z)?;
        if self.is_base() {
            return self.base.eval_inv_d(z);
        }
        let out = invert_by_newton(|y| self.eval_d(y), z, start)?;
        let m = cabs(out.0);
        if m > self.base.radius() {
            return Err(GermError::LeftDomain {
                modulus: m.to_f64_lossy(),
                radius: self.base.radius().to_f64_lossy(),
            });
        }
        Ok(out)
    }

    fn radius(&self) -> F {
        self.base.radius()
    }
}

/// `g_{1,t}(z) = g_1(z) + t z^{D+1}`, other generators fixed, `|t| < eps`.
#[derive(Debug, Clone)]
pub struct DeformationFamily<F: Real> {
    pub base: PseudoGroup<F>,
    /// Zero-based index of the deformed generator.
    pub generator: usize,
    pub exponent: u32,
    pub eps: F,
}

/// Constants of the uniform bounds: every generator is defined on
/// `|z| <= radius` for all `|t| < eps`, and every linear coefficient has
/// modulus in `[c, 1/c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformBounds {
    pub radius: f64,
    pub c: f64,
}

impl<F: Real> DeformationFamily<F> {
    pub fn new(base: PseudoGroup<F>, generator: usize, exponent: u32, eps: F) -> Result<Self, DeformationError> {
        if exponent == 0 {
            return Err(DeformationError::ZeroExponent);
        }
        if generator >= base.rank() {
            return Err(DeformationError::NoSuchGenerator {
                index: generator,
                rank: base.rank(),
            });
        }
        if !(eps > F::zero()) {
            return Err(DeformationError::BadRadius);
        }
        let fam = Self {
            base,
            generator,
            exponent,
            eps,
        };
        fam.uniform_bounds()?;
        Ok(fam)
    }

    /// The perturbation has order `D + 1 >= 2`, so linear coefficients do
    /// not depend on `t`.
    pub fn uniform_bounds(&self) -> Result<UniformBounds, DeformationError> {
        let zero = Complex::new(F::zero(), F::zero());
        let mut c = f64::INFINITY;
        let mut radius = f64::INFINITY;
        for (index, g) in self.base.generators.iter().enumerate() {
            let lin = g.derivative(zero).map(cabs).unwrap_or(F::zero()).to_f64_lossy();
            if !(lin > 0.0 && lin.is_finite()) {
                return Err(DeformationError::SingularGenerator { index });
            }
            c = c.min(lin).min(1.0 / lin);
            radius = radius.min(g.radius().to_f64_lossy());
        }
        Ok(UniformBounds {
            radius: radius.min(self.base.delta.to_f64_lossy()),
            c,
        })
    }
}

impl<F: Real> GeneratorFamily<F> for DeformationFamily<F> {
    fn rank(&self) -> usize {
        self.base.rank()
    }

    fn delta(&self) -> F {
        self.base.delta
    }

    fn eval(&self, j: usize, t: Complex<F>, z: Complex<F>) -> Result<[Complex<F>; 3], GermError> {
        let g = &self.base.generators[j];
        if j != self.generator {
            let (v, d) = g.eval_d(z)?;
            return Ok([v, d, Complex::new(F::zero(), F::zero())]);
        }
        deform_generator(g.clone(), self.exponent, t).eval_full(z)
    }

    fn eval_inv(&self, j: usize, t: Complex<F>, z: Complex<F>) -> Result<[Complex<F>; 3], GermError> {
        let g = &self.base.generators[j];
        if j != self.generator {
            let (v, d) = g.eval_inv_d(z)?;
            return Ok([v, d, Complex::new(F::zero(), F::zero())]);
        }
        let h = deform_generator(g.clone(), self.exponent, t);
        let (y, dy) = h.eval_inv_d(z)?;
        // g_t(y(t)) = z gives y_t = -(d_t g_t)(y) / g_t'(y)
        let [_, _, pt] = h.eval_full(y)?;
        Ok([y, dy, -(pt * dy)])
    }

    fn at(&self, t: Complex<F>) -> PseudoGroup<F> {
        if t == Complex::new(F::zero(), F::zero()) {
            return self.base.clone();
        }
        let mut gens = self.base.generators.clone();
        gens[self.generator] = Arc::new(deform_generator(gens[self.generator].clone(), self.exponent, t));
        PseudoGroup::new(gens, self.base.delta, format!("{} at t = {}", self.base.label, t))
    }
}

/// `z -> g_1(z) + t z^{D+1}`.
pub fn deform_generator<F: Real>(g1: Arc<dyn Germ<F>>, exponent: u32, t: Complex<F>) -> Deformed<F> {
    Deformed::new(g1, exponent, t)
}

/// `(f_t(z), f_t'(z), d/dt f_t(z))` for the word `w`, letters applied right
/// to left. The `t`-derivative accumulates as `h_z * prev + h_t` per letter.
pub fn evaluate_word_dt<F: Real, G: GeneratorFamily<F> + ?Sized>(
    family: &G,
    w: &Word,
    t: Complex<F>,
    z: Complex<F>,
) -> Result<[Complex<F>; 3], GermError> {
    let delta = family.delta();
    let check = |v: Complex<F>| {
        let m = cabs(v);
        if m > delta || !m.is_finite() {
            Err(GermError::LeftDomain {
                modulus: m.to_f64_lossy(),
                radius: delta.to_f64_lossy(),
            })
        } else {
            Ok(())
        }
    };
    check(z)?;
    let mut v = z;
    let mut dz = Complex::new(F::one(), F::zero());
    let mut dt = Complex::new(F::zero(), F::zero());
    for &Letter { generator, inverse } in w.letters.iter().rev() {
        let [nv, hz, ht] = if inverse {
            family.eval_inv(generator, t, v)?
        } else {
            family.eval(generator, t, v)?
        };
        check(nv)?;
        v = nv;
        dz = dz * hz;
        dt = hz * dt + ht;
    }
    Ok([v, dz, dt])
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error("degenerate fixed point: |f'(p) - 1| = {gap}")]
    DegenerateFixedPoint { gap: f64 },
    #[error(transparent)]
    Germ(#[from] GermError),
}

/// `dp/dt = (d_t f_t)(p) / (1 - f_t'(p))` from implicit differentiation of
/// `f_t(p(t)) = p(t)`.
pub fn continuation_rhs<F: Real, G: GeneratorFamily<F> + ?Sized>(
    family: &G,
    w: &Word,
    t: Complex<F>,
    p: Complex<F>,
    degeneracy_tol: F,
) -> Result<Complex<F>, ContinuationError> {
    let [_, fz, ft] = evaluate_word_dt(family, w, t, p)?;
    let den = Complex::new(F::one(), F::zero()) - fz;
    if cabs(den) < degeneracy_tol {
        return Err(ContinuationError::DegenerateFixedPoint {
            gap: cabs(den).to_f64_lossy(),
        });
    }
    Ok(ft / den)
}

/// The alternative reading `dp/dt = p^{D+1} f'(p) / (f'(p) - 1) * g_{1,t}'(p)`.
/// Kept for comparison only; it disagrees with the finite-difference oracle.
pub fn alternative_rhs<F: Real>(family: &DeformationFamily<F>, w: &Word, t: Complex<F>, p: Complex<F>) -> Result<Complex<F>, GermError> {
    let [_, fz, _] = evaluate_word_dt(family, w, t, p)?;
    let [_, g1z, _] = family.eval(family.generator, t, p)?;
    let one = Complex::new(F::one(), F::zero());
    Ok(p.powu(family.exponent + 1) * fz / (fz - one) * g1z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions<F> {
    /// Number of predictor-corrector steps from `0` to `t_end`.
    pub steps: usize,
    pub newton_tol: F,
    pub residual_tol: F,
    pub tau: F,
    pub degeneracy_tol: F,
    pub max_newton: usize,
}

impl<F: Real> TrackOptions<F> {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            newton_tol: F::lit(1e-14),
            residual_tol: F::lit(1e-10),
            tau: F::lit(1e-3),
            degeneracy_tol: F::lit(1e-8),
            max_newton: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Breakdown {
    Degenerate,
    LeftDomain,
    LostHyperbolicity,
    CorrectorFailed,
}

impl fmt::Display for Breakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Breakdown::Degenerate => "degenerate",
            Breakdown::LeftDomain => "left_domain",
            Breakdown::LostHyperbolicity => "lost_hyperbolicity",
            Breakdown::CorrectorFailed => "corrector_failed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample<F> {
    pub t: Complex<F>,
    pub p: Complex<F>,
    pub multiplier: Complex<F>,
    pub residual: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedFixedPoint<F> {
    pub word: Word,
    pub samples: Vec<TrackSample<F>>,
    pub max_residual: F,
    /// Parameter at which tracking stopped, with the reason.
    pub breakdown: Option<(Complex<F>, Breakdown)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("initial point is not a verified hyperbolic fixed point of {word} (residual {residual:e})")]
    Unverified { word: String, residual: f64 },
}

fn classify(e: &ContinuationError) -> Breakdown {
    match e {
        ContinuationError::DegenerateFixedPoint { .. } => Breakdown::Degenerate,
        ContinuationError::Germ(_) => Breakdown::LeftDomain,
    }
}

/// Follow the fixed point `p0` of `w` along the segment `[0, t_end]`:
/// a classical RK4 predictor on [`continuation_rhs`] and a Newton corrector
/// on `f_t(p) = p` at each node. Breakdowns end the path and are reported.
pub fn track_fixed_point<F: Real, G: GeneratorFamily<F> + ?Sized>(
    family: &G,
    w: &Word,
    p0: Complex<F>,
    t_end: Complex<F>,
    opts: &TrackOptions<F>,
) -> Result<TrackedFixedPoint<F>, TrackError> {
    let zero = Complex::new(F::zero(), F::zero());
    let unverified = |residual: f64| TrackError::Unverified {
        word: w.to_string(),
        residual,
    };
    let base = family.at(zero);
    let start_residual = || base.evaluate_word(w, p0).map(|v| cabs(v - p0).to_f64_lossy()).unwrap_or(f64::INFINITY);
    let (p, m, residual) = newton_fixed_point(&base, w, p0, opts.newton_tol, opts.residual_tol, opts.max_newton)
        .ok_or_else(|| unverified(start_residual()))?;
    if cabs(p - p0) > F::lit(1e-6) * (F::one() + cabs(p0)) || !((cabs(m) - F::one()).abs() > opts.tau) {
        return Err(unverified(start_residual()));
    }
    let mut out = TrackedFixedPoint {
        word: w.clone(),
        samples: vec![TrackSample {
            t: zero,
            p,
            multiplier: m,
            residual,
        }],
        max_residual: residual,
        breakdown: None,
    };
    let steps = opts.steps.max(1);
    let dt = t_end / F::lit(steps as f64);
    let half = F::lit(0.5);
    let rhs = |t: Complex<F>, p: Complex<F>| continuation_rhs(family, w, t, p, opts.degeneracy_tol);
    let mut p = p;
    for k in 0..steps {
        let t = dt * F::lit(k as f64);
        let t1 = dt * F::lit((k + 1) as f64);
        let stage = (|| {
            let k1 = rhs(t, p)?;
            let k2 = rhs(t + dt * half, p + dt * k1 * half)?;
            let k3 = rhs(t + dt * half, p + dt * k2 * half)?;
            let k4 = rhs(t1, p + dt * k3)?;
            Ok::<_, ContinuationError>(p + dt * (k1 + k2 * F::lit(2.0) + k3 * F::lit(2.0) + k4) / F::lit(6.0))
        })();
        let predicted = match stage {
            Ok(v) => v,
            Err(e) => {
                out.breakdown = Some((t, classify(&e)));
                break;
            }
        };
        let group = family.at(t1);
        let Some((pc, m, residual)) =
            newton_fixed_point(&group, w, predicted, opts.newton_tol, opts.residual_tol, opts.max_newton)
        else {
            let reason = match group.evaluate_word(w, predicted) {
                Err(_) => Breakdown::LeftDomain,
                Ok(_) => Breakdown::CorrectorFailed,
            };
            out.breakdown = Some((t1, reason));
            break;
        };
        p = pc;
        out.samples.push(TrackSample {
            t: t1,
            p,
            multiplier: m,
            residual,
        });
        out.max_residual = out.max_residual.max(residual);
        if !((cabs(m) - F::one()).abs() > opts.tau) {
            out.breakdown = Some((t1, Breakdown::LostHyperbolicity));
            break;
        }
    }
    Ok(out)
}

pub const TRACK_CSV_HEADER: &str = "t_re,t_im,p_re,p_im,mult_re,mult_im,abs_mult,residual,flag";

/// One row per sample; the flag column is `ok`, or the breakdown reason on
/// the last row when tracking stopped early.
pub fn track_csv(track: &TrackedFixedPoint<f64>) -> String {
    let mut s = String::from(TRACK_CSV_HEADER);
    s.push('\n');
    let last = track.samples.len().saturating_sub(1);
    for (i, r) in track.samples.iter().enumerate() {
        let flag = match (i == last, track.breakdown) {
            (true, Some((_, b))) => b.to_string(),
            _ => "ok".to_string(),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.t.re,
            r.t.im,
            r.p.re,
            r.p.im,
            r.multiplier.re,
            r.multiplier.im,
            r.multiplier.norm(),
            r.residual,
            flag
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceRow<F> {
    pub t: Complex<F>,
    pub coverage: Coverage<F>,
}

/// [`orbit_density_probe`] on `G_t` for each sample, same seed throughout.
pub fn density_persistence_probe<F: Real>(
    family: &DeformationFamily<F>,
    t_samples: &[Complex<F>],
    probe: &ProbeOptions<F>,
) -> Vec<PersistenceRow<F>> {
    t_samples
        .par_iter()
        .map(|&t| PersistenceRow {
            t,
            coverage: orbit_density_probe(&family.at(t), probe),
        })
        .collect()
}

/// `{"generator": 1, "D": 1, "eps": 0.05}`; `generator` counts from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformSpec {
    pub generator: usize,
    #[serde(rename = "D")]
    pub exponent: u32,
    pub eps: f64,
}

/// A fixed point to follow: `word` with `p0` at `t = 0`, along `[0, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSpec {
    pub word: String,
    pub p0: [f64; 2],
    pub t_end: [f64; 2],
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    20
}

/// Parameters at which to rerun the coverage probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceSpec {
    pub t: Vec<[f64; 2]>,
    pub radius: f64,
    pub epsilon: f64,
}

/// A pseudo-group document extended by `"deform"`, with optional tracking
/// and persistence requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDocument {
    #[serde(flatten)]
    pub group: PseudoGroupDocument,
    pub deform: DeformSpec,
    #[serde(default)]
    pub tracks: Vec<TrackSpec>,
    #[serde(default)]
    pub persistence: Option<PersistenceSpec>,
}

impl FamilyDocument {
    pub fn to_family(&self) -> Result<DeformationFamily<f64>, String> {
        let group = self.group.to_group()?;
        if self.deform.generator == 0 {
            return Err("deform.generator counts from 1".into());
        }
        DeformationFamily::new(group, self.deform.generator - 1, self.deform.exponent, self.deform.eps)
            .map_err(|e| e.to_string())
    }
}
