use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cabs, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GermError {
    #[error("left the domain: |z| = {modulus} exceeds {radius}")]
    LeftDomain { modulus: f64, radius: f64 },
    #[error("path lifting came too close to a singular point at s = {s}")]
    NearSingularity { s: f64 },
    #[error("inverse evaluation did not converge")]
    InverseDidNotConverge,
}

/// A holomorphic germ fixing (or near) the origin, evaluable with its
/// derivative on a disk, together with its inverse.
pub trait Germ<F: Real>: Send + Sync + fmt::Debug {
    /// `(g(z), g'(z))`.
    fn eval_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError>;
    /// `(g^-1(z), (g^-1)'(z))`.
    fn eval_inv_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError>;

    fn eval(&self, z: Complex<F>) -> Result<Complex<F>, GermError> {
        self.eval_d(z).map(|r| r.0)
    }

    fn eval_inv(&self, z: Complex<F>) -> Result<Complex<F>, GermError> {
        self.eval_inv_d(z).map(|r| r.0)
    }

    fn derivative(&self, z: Complex<F>) -> Result<Complex<F>, GermError> {
        self.eval_d(z).map(|r| r.1)
    }

    /// Radius of the disk on which evaluation is allowed.
    fn radius(&self) -> F;
}

/// Solve `g(y) = z` by Newton's method starting at `y0`.
pub fn invert_by_newton<F: Real>(
    g: impl Fn(Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError>,
    z: Complex<F>,
    y0: Complex<F>,
) -> Result<(Complex<F>, Complex<F>), GermError> {
    let mut y = y0;
    let tol = F::epsilon() * F::lit(16.0);
    for _ in 0..100 {
        let (gy, dy) = g(y)?;
        if dy == Complex::new(F::zero(), F::zero()) {
            break;
        }
        let step = (gy - z) / dy;
        y = y - step;
        if cabs(step) <= tol * (F::one() + cabs(y)) {
            let (_, dy) = g(y)?;
            return Ok((y, Complex::new(F::one(), F::zero()) / dy));
        }
    }
    Err(GermError::InverseDidNotConverge)
}

/// `z -> sum_k coeffs[k] z^k` on `|z| <= radius`. The constant term is
/// `coeffs[0]` and is normally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGerm<F> {
    pub coeffs: Vec<Complex<F>>,
    pub radius: F,
}

impl<F: Real> PolyGerm<F> {
    pub fn new(coeffs: Vec<Complex<F>>, radius: F) -> Self {
        Self { coeffs, radius }
    }

    /// `z -> lambda z`.
    pub fn linear(lambda: Complex<F>, radius: F) -> Self {
        Self::new(vec![Complex::new(F::zero(), F::zero()), lambda], radius)
    }

    /// `z -> lambda z + a z^2`.
    pub fn quadratic(lambda: Complex<F>, a: Complex<F>, radius: F) -> Self {
        Self::new(vec![Complex::new(F::zero(), F::zero()), lambda, a], radius)
    }

    fn check(&self, z: Complex<F>) -> Result<(), GermError> {
        let m = cabs(z);
        if m > self.radius || !m.is_finite() {
            Err(GermError::LeftDomain {
                modulus: m.to_f64_lossy(),
                radius: self.radius.to_f64_lossy(),
            })
        } else {
            Ok(())
        }
    }

    fn horner(&self, z: Complex<F>) -> (Complex<F>, Complex<F>) {
        let zero = Complex::new(F::zero(), F::zero());
        let mut v = zero;
        let mut d = zero;
        for c in self.coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + *c;
        }
        (v, d)
    }
}

impl<F: Real> Germ<F> for PolyGerm<F> {
    fn eval_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        self.check(z)?;
        Ok(self.horner(z))
    }

    fn eval_inv_d(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        let lin = self.coeffs.get(1).copied().unwrap_or(Complex::new(F::one(), F::zero()));
        let c0 = self.coeffs.first().copied().unwrap_or(Complex::new(F::zero(), F::zero()));
        let y = invert_by_newton(|y| self.eval_d(y), z, (z - c0) / lin)?;
        self.check(y.0)?;
        Ok(y)
    }

    fn radius(&self) -> F {
        self.radius
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Exponent `+1` or `-1`.
    pub fn exponent(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.inverse { b'A' } else { b'a' };
        if self.generator < 26 {
            write!(f, "{}", (base + self.generator as u8) as char)
        } else {
            write!(f, "[{}{}]", self.generator, if self.inverse { "'" } else { "" })
        }
    }
}

/// Word `l_1 l_2 ... l_n` in the generators, written left to right and
/// evaluated right to left: `w(z) = l_1(l_2(...l_n(z)))`. Lower case `a`
/// stands for generator 0, upper case `A` for its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn generator(g: usize) -> Self {
        Self::new(vec![Letter::new(g, false)])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inv())
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self::new(out)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.letters.iter().rev().map(|l| l.inv()).collect())
    }

    /// Concatenation `self other`, i.e. `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(letters)
    }

    pub fn power(&self, k: usize) -> Self {
        let mut out = Self::empty();
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    /// Commutator `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Self, v: &Self) -> Self {
        u.compose(v).compose(&u.inverse()).compose(&v.inverse())
    }

    pub fn uses_generator(&self, g: usize) -> bool {
        self.letters.iter().any(|l| l.generator == g)
    }

    /// All reduced words of length `1..=max_len` over `generators` letters,
    /// ordered by length then lexicographically (`a < A < b < B ...`).
    pub fn enumerate_reduced(generators: usize, max_len: usize) -> Vec<Word> {
        let alphabet: Vec<Letter> = (0..generators)
            .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
            .collect();
        let mut out = Vec::new();
        let mut frontier = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &alphabet {
                    if w.letters.last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word::new(letters));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad word {0:?}: use letters a-z for generators and A-Z for inverses")]
pub struct ParseWordError(pub String);

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" || s.is_empty() {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| match c {
                'a'..='z' => Ok(Letter::new(c as usize - 'a' as usize, false)),
                'A'..='Z' => Ok(Letter::new(c as usize - 'A' as usize, true)),
                _ => Err(ParseWordError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word::new)
    }
}

/// Failure while evaluating a word: `applied` letters (counted from the
/// right) succeeded before `error`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("word evaluation failed after {applied} letters: {error}")]
pub struct WordError {
    pub applied: usize,
    pub error: GermError,
}

/// Generators `g_1, ..., g_r` with a common domain disk of radius `delta`.
#[derive(Debug, Clone)]
pub struct PseudoGroup<F: Real> {
    pub generators: Vec<Arc<dyn Germ<F>>>,
    pub delta: F,
    pub label: String,
}

impl<F: Real> PseudoGroup<F> {
    pub fn new(generators: Vec<Arc<dyn Germ<F>>>, delta: F, label: impl Into<String>) -> Self {
        Self {
            generators,
            delta,
            label: label.into(),
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn apply_letter_d(&self, l: Letter, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), GermError> {
        let g = &self.generators[l.generator];
        let out = if l.inverse { g.eval_inv_d(z)? } else { g.eval_d(z)? };
        let m = cabs(out.0);
        if m > self.delta || !m.is_finite() {
            return Err(GermError::LeftDomain {
                modulus: m.to_f64_lossy(),
                radius: self.delta.to_f64_lossy(),
            });
        }
        Ok(out)
    }

    /// `(w(z), w'(z))` by the chain rule.
    pub fn evaluate_word_d(&self, w: &Word, z: Complex<F>) -> Result<(Complex<F>, Complex<F>), WordError> {
        let mut v = z;
        let mut d = Complex::new(F::one(), F::zero());
        if cabs(z) > self.delta {
            return Err(WordError {
                applied: 0,
                error: GermError::LeftDomain {
                    modulus: cabs(z).to_f64_lossy(),
                    radius: self.delta.to_f64_lossy(),
                },
            });
        }
        for (applied, &l) in w.letters.iter().rev().enumerate() {
            let (nv, nd) = self.apply_letter_d(l, v).map_err(|error| WordError { applied, error })?;
            v = nv;
            d = d * nd;
        }
        Ok((v, d))
    }

    pub fn evaluate_word(&self, w: &Word, z: Complex<F>) -> Result<Complex<F>, WordError> {
        self.evaluate_word_d(w, z).map(|r| r.0)
    }

    /// Multiplier `w'(p)` by Richardson-extrapolated central differences
    /// with steps `h, h/2, h/4`, `h = 10^-3 delta`. Returns the estimate and
    /// the difference between the last two extrapolants as error bar.
    pub fn word_multiplier(&self, w: &Word, p: Complex<F>) -> Result<(Complex<F>, F), WordError> {
        let h0 = self.delta * F::lit(1e-3);
        let mut d = Vec::with_capacity(3);
        for k in 0..3 {
            let h = h0 / F::lit((1u32 << k) as f64);
            let hp = Complex::new(h, F::zero());
            let fp = self.evaluate_word(w, p + hp)?;
            let fm = self.evaluate_word(w, p - hp)?;
            d.push((fp - fm) / (hp * F::lit(2.0)));
        }
        let three = F::lit(3.0);
        let r1 = (d[1] * F::lit(4.0) - d[0]) / three;
        let r2 = (d[2] * F::lit(4.0) - d[1]) / three;
        let r = (r2 * F::lit(16.0) - r1) / F::lit(15.0);
        Ok((r, cabs(r - r2).max(cabs(r2 - r1) / F::lit(15.0))))
    }
}
