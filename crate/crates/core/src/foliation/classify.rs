use num_complex::Complex;
use serde::Serialize;

use super::normal_form::FoliationNormalForm;
use super::singularity::{SearchRegion, Singularity, SingularityError};
use crate::scalar::{cabs, match_positive_rational, Field, RationalMatch, Real};

/// Tolerances for [`classify_singularity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// An eigenvalue below this modulus counts as zero.
    pub eigen_tol: f64,
    /// `|Im lambda|` below this (relative to `max(1, |lambda|)`) counts as real.
    pub real_tol: f64,
    /// Distance accepted between `lambda` and a positive rational.
    pub rational_tol: f64,
    /// Largest denominator tried by the rational reconstruction.
    pub max_denom: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        let rational_tol = 1e-10;
        Self {
            eigen_tol: 1e-10,
            real_tol: 1e-10,
            rational_tol,
            max_denom: default_max_denom(rational_tol),
        }
    }
}

/// Denominator bound for a given matching tolerance.
///
/// Every real number has convergents `p/q` with `|x - p/q| < 1/q^2`, so a
/// bound `Q` with `1/Q^2` near the tolerance would match everything. Using
/// `Q = (100 tol)^(-1/2)` keeps accidental matches of irrationals at about one
/// percent, capped at `10^6`.
pub fn default_max_denom(tol: f64) -> u64 {
    ((100.0 * tol).powf(-0.5).floor() as u64).clamp(1, 1_000_000)
}

/// Flags of a singularity. When the Jacobian is degenerate only
/// `non_degenerate = false` is meaningful and the other flags are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityClass {
    pub non_degenerate: bool,
    /// `lambda` in `C \ R`.
    pub hyperbolic: Option<bool>,
    /// `lambda` not in `Q+`.
    pub reduced: Option<bool>,
    /// `lambda` in `(C \ R) u R-`.
    pub saddle_type: Option<bool>,
    /// The positive rational `lambda` was matched to, if any.
    pub rational: Option<(u64, u64)>,
    pub note: Option<String>,
}

impl SingularityClass {
    fn degenerate() -> Self {
        Self {
            non_degenerate: false,
            hyperbolic: None,
            reduced: None,
            saddle_type: None,
            rational: None,
            note: Some("degenerate Jacobian: an eigenvalue vanishes, other flags undefined".into()),
        }
    }
}

/// Classify by the characteristic number `lambda`. The tests are symmetric
/// under `lambda -> 1/lambda`.
pub fn classify_singularity<F: Real>(s: &Singularity<F>, opts: &ClassifyOptions) -> SingularityClass {
    let e0 = cabs(s.eigenvalues[0]).to_f64_lossy();
    let e1 = cabs(s.eigenvalues[1]).to_f64_lossy();
    if e0 < opts.eigen_tol || e1 < opts.eigen_tol {
        return SingularityClass::degenerate();
    }
    let lambda = Complex::new(s.lambda.re.to_f64_lossy(), s.lambda.im.to_f64_lossy());
    classify_lambda(lambda, opts)
}

/// Flags for a characteristic number of a non-degenerate singularity.
pub fn classify_lambda(lambda: Complex<f64>, opts: &ClassifyOptions) -> SingularityClass {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.norm() < opts.eigen_tol {
        return SingularityClass::degenerate();
    }
    let is_real = lambda.im.abs() <= opts.real_tol * lambda.norm().max(1.0);
    let hyperbolic = !is_real;
    let negative = is_real && lambda.re < 0.0;
    let matched: Option<RationalMatch> = if is_real && lambda.re > 0.0 {
        match_positive_rational(lambda.re, opts.rational_tol * lambda.re.max(1.0), opts.max_denom)
            .or_else(|| {
                let inv = 1.0 / lambda.re;
                match_positive_rational(inv, opts.rational_tol * inv.max(1.0), opts.max_denom)
                    .map(|m| RationalMatch { numer: m.denom, denom: m.numer })
            })
    } else {
        None
    };
    let note = match (&matched, is_real && lambda.re > 0.0) {
        (Some(m), _) => Some(format!(
            "lambda within {:e} of {}/{} (denominator bound {}), treated as positive rational",
            opts.rational_tol, m.numer, m.denom, opts.max_denom
        )),
        (None, true) => Some(format!(
            "lambda positive real with no rational match up to denominator {}",
            opts.max_denom
        )),
        _ => None,
    };
    SingularityClass {
        non_degenerate: true,
        hyperbolic: Some(hyperbolic),
        reduced: Some(matched.is_none()),
        saddle_type: Some(hyperbolic || negative),
        rational: matched.map(|m| (m.numer, m.denom)),
        note,
    }
}

/// Membership in the classes S(n), T(n), X(n), H(n). The affine part of
/// every verdict only covers singularities found in the scanned region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMembership {
    pub degree: u32,
    pub s: bool,
    pub t: bool,
    pub x: bool,
    pub h: bool,
    pub affine_count: usize,
    pub infinity_count: usize,
    /// Some singularity on `L_inf` is a multiple root.
    pub multiple_root: bool,
    /// Newton seeds that did not converge.
    pub unconverged_seeds: usize,
    pub scope: String,
}

/// Singularities and classes collected by [`class_membership`].
#[derive(Debug, Clone)]
pub struct FoliationAnalysis<F: Real> {
    pub affine: Vec<(Singularity<F>, SingularityClass)>,
    pub infinity: Vec<(Singularity<F>, SingularityClass)>,
    pub membership: ClassMembership,
}

pub fn class_membership<C: Field, F: Real>(
    form: &FoliationNormalForm<C>,
    region: &SearchRegion<F>,
    opts: &ClassifyOptions,
) -> FoliationAnalysis<F> {
    let search = form.affine_singularities(region);
    let affine: Vec<_> = search
        .singularities
        .into_iter()
        .map(|s| {
            let c = classify_singularity(&s, opts);
            (s, c)
        })
        .collect();
    let x = form.is_line_at_infinity_invariant();
    let infinity: Vec<_> = match form.singularities_at_infinity::<F>() {
        Ok(v) => v
            .into_iter()
            .map(|s| {
                let c = classify_singularity(&s, opts);
                (s, c)
            })
            .collect(),
        Err(SingularityError::LineNotInvariant) => Vec::new(),
    };

    let nondeg = |v: &[(Singularity<F>, SingularityClass)]| v.iter().all(|(_, c)| c.non_degenerate);
    let reduced = |v: &[(Singularity<F>, SingularityClass)]| v.iter().all(|(_, c)| c.reduced == Some(true));
    // on L_inf the transverse direction is part of the foliation at infinity,
    // so S and T also take those singularities into account when invariant
    let s = nondeg(&affine) && nondeg(&infinity);
    let t = s && reduced(&affine) && reduced(&infinity);
    let h = t && x && infinity.iter().all(|(_, c)| c.hyperbolic == Some(true));
    let multiple_root = infinity.iter().any(|(s, _)| s.multiplicity > 1);
    let mut scope = format!(
        "affine singularities relative to the box of half-width {} around ({}, {})",
        region.half_width, region.center[0], region.center[1]
    );
    if form.degree() < 2 {
        scope.push_str("; degree below 2, outside the usual n >= 2 regime");
    }
    FoliationAnalysis {
        membership: ClassMembership {
            degree: form.degree(),
            s,
            t,
            x,
            h,
            affine_count: affine.len(),
            infinity_count: infinity.len(),
            multiple_root,
            unconverged_seeds: search.not_converged,
            scope,
        },
        affine,
        infinity,
    }
}
