use num_complex::Complex;
use rayon::prelude::*;

use super::germ::{PseudoGroup, Word};
use crate::scalar::{cabs, Real};

/// A fixed point `p` of a word with its multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRecord<F> {
    pub word: Word,
    pub location: Complex<F>,
    pub multiplier: Complex<F>,
    /// `||f'(p)| - 1| > tau`.
    pub hyperbolic: bool,
    /// `|f(p) - p|` on a fresh evaluation.
    pub residual: F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions<F> {
    pub max_len: usize,
    /// Only the first `max_generators` generators are used.
    pub max_generators: usize,
    /// Seeds lie in the annulus `inner <= |z| <= outer`; fixed points are
    /// kept anywhere in `|z| <= outer`.
    pub inner: F,
    pub outer: F,
    pub radial_seeds: usize,
    pub angular_seeds: usize,
    /// Newton step tolerance.
    pub tol: F,
    /// Bound on `|f(p) - p|` for accepted fixed points.
    pub residual_tol: F,
    pub tau: F,
    pub max_iterations: usize,
}

impl<F: Real> FixedPointOptions<F> {
    pub fn new(inner: F, outer: F) -> Self {
        Self {
            max_len: 8,
            max_generators: 4,
            inner,
            outer,
            radial_seeds: 3,
            angular_seeds: 8,
            tol: F::lit(1e-12),
            residual_tol: F::lit(1e-10),
            tau: F::lit(1e-3),
            max_iterations: 50,
        }
    }

    fn seeds(&self) -> Vec<Complex<F>> {
        let mut out = Vec::with_capacity(self.radial_seeds * self.angular_seeds);
        for i in 0..self.radial_seeds {
            let t = if self.radial_seeds == 1 {
                F::lit(0.5)
            } else {
                F::lit(i as f64 / (self.radial_seeds - 1) as f64)
            };
            let r = self.inner + (self.outer - self.inner) * t;
            for k in 0..self.angular_seeds {
                // stagger rings so seeds do not line up radially
                let th = F::TAU() * F::lit((k as f64 + 0.5 * i as f64) / self.angular_seeds as f64);
                out.push(Complex::from_polar(r, th));
            }
        }
        out
    }
}

/// Per-seed outcomes of the search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FixedPointDiagnostics {
    pub words: usize,
    pub newton_runs: usize,
    pub not_converged: usize,
    pub left_domain: usize,
    pub not_hyperbolic: usize,
    pub outside: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSearch<F> {
    pub records: Vec<FixedPointRecord<F>>,
    pub diagnostics: FixedPointDiagnostics,
}

enum Outcome<F> {
    Found(Complex<F>, Complex<F>, F),
    NotConverged,
    LeftDomain,
}

/// Newton iteration for `w(z) = z` from `z0`.
pub fn newton_fixed_point<F: Real>(
    group: &PseudoGroup<F>,
    w: &Word,
    z0: Complex<F>,
    tol: F,
    residual_tol: F,
    max_iterations: usize,
) -> Option<(Complex<F>, Complex<F>, F)> {
    match newton(group, w, z0, tol, residual_tol, max_iterations) {
        Outcome::Found(p, m, r) => Some((p, m, r)),
        _ => None,
    }
}

fn newton<F: Real>(
    group: &PseudoGroup<F>,
    w: &Word,
    z0: Complex<F>,
    tol: F,
    residual_tol: F,
    max_iterations: usize,
) -> Outcome<F> {
    let one = Complex::new(F::one(), F::zero());
    let mut z = z0;
    for _ in 0..max_iterations {
        let (fz, dz) = match group.evaluate_word_d(w, z) {
            Ok(v) => v,
            Err(_) => return Outcome::LeftDomain,
        };
        let den = dz - one;
        if cabs(den) == F::zero() {
            return Outcome::NotConverged;
        }
        let step = (fz - z) / den;
        z = z - step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Outcome::NotConverged;
        }
        if cabs(step) <= tol * (F::one() + cabs(z)) {
            return match group.evaluate_word_d(w, z) {
                Ok((fz, dz)) => {
                    let residual = cabs(fz - z);
                    // stagnation above the bound is not a fixed point
                    if residual <= residual_tol {
                        Outcome::Found(z, dz, residual)
                    } else {
                        Outcome::NotConverged
                    }
                }
                Err(_) => Outcome::LeftDomain,
            };
        }
    }
    Outcome::NotConverged
}

/// Hyperbolic fixed points of reduced words up to `max_len`, found by
/// Newton from annulus seeds, deduplicated per word and sorted by word then
/// location. Deterministic regardless of thread count.
pub fn find_hyperbolic_fixed_points<F: Real>(group: &PseudoGroup<F>, opts: &FixedPointOptions<F>) -> FixedPointSearch<F> {
    let gens = group.rank().min(opts.max_generators);
    let words = Word::enumerate_reduced(gens, opts.max_len);
    let seeds = opts.seeds();
    let per_word: Vec<(Vec<FixedPointRecord<F>>, FixedPointDiagnostics)> = words
        .par_iter()
        .map(|w| {
            let mut diag = FixedPointDiagnostics::default();
            let mut found: Vec<FixedPointRecord<F>> = Vec::new();
            for &s in &seeds {
                diag.newton_runs += 1;
                match newton(group, w, s, opts.tol, opts.residual_tol, opts.max_iterations) {
                    Outcome::NotConverged => diag.not_converged += 1,
                    Outcome::LeftDomain => diag.left_domain += 1,
                    Outcome::Found(p, m, residual) => {
                        if cabs(p) > opts.outer {
                            diag.outside += 1;
                            continue;
                        }
                        let hyperbolic = (cabs(m) - F::one()).abs() > opts.tau;
                        if !hyperbolic {
                            diag.not_hyperbolic += 1;
                            continue;
                        }
                        let dedup = F::lit(1e-7) * (F::one() + cabs(p));
                        if found.iter().any(|r| cabs(r.location - p) <= dedup) {
                            diag.duplicates += 1;
                            continue;
                        }
                        found.push(FixedPointRecord {
                            word: w.clone(),
                            location: p,
                            multiplier: m,
                            hyperbolic,
                            residual,
                        });
                    }
                }
            }
            found.sort_by(|a, b| {
                (a.location.re, a.location.im)
                    .partial_cmp(&(b.location.re, b.location.im))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            (found, diag)
        })
        .collect();
    let mut diagnostics = FixedPointDiagnostics {
        words: words.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for (r, d) in per_word {
        records.extend(r);
        diagnostics.newton_runs += d.newton_runs;
        diagnostics.not_converged += d.not_converged;
        diagnostics.left_domain += d.left_domain;
        diagnostics.not_hyperbolic += d.not_hyperbolic;
        diagnostics.outside += d.outside;
        diagnostics.duplicates += d.duplicates;
    }
    FixedPointSearch { records, diagnostics }
}
