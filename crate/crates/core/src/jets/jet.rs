use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::format_rational;
use crate::QComplex;

/// Multi-index of a monomial, one exponent per variable.
pub type MultiIndex = Vec<u32>;

/// Truncated polynomial in `n` variables without constant term.
pub type Series = BTreeMap<MultiIndex, QComplex>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jets of shape ({0}, {1}) and ({2}, {3}) cannot be combined")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("dimension and order must be at least 1")]
    EmptyShape,
}

/// A map `(C^n, 0) -> (C^n, 0)` truncated at total degree `k`, with exact
/// coefficients. Zero coefficients are never stored, so equality of jets is
/// equality of the tables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    n: usize,
    k: usize,
    coeffs: Vec<Series>,
}

fn degree(m: &[u32]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

fn add_term(s: &mut Series, m: MultiIndex, c: QComplex) {
    if c.is_zero() {
        return;
    }
    match s.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

fn mul_truncated(a: &Series, b: &Series, k: usize) -> Series {
    let mut out = Series::new();
    for (ma, ca) in a {
        let da = degree(ma);
        for (mb, cb) in b {
            if da + degree(mb) > k {
                continue;
            }
            let m: MultiIndex = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            add_term(&mut out, m, ca * cb);
        }
    }
    out
}

fn unit(n: usize, j: usize) -> MultiIndex {
    let mut m = vec![0; n];
    m[j] = 1;
    m
}

/// Truncated powers `g_j^e` for `e = 0..=k`, with `g_j^0 = 1` stored under
/// the zero multi-index.
#[derive(Debug, Clone)]
pub struct Powers {
    n: usize,
    table: Vec<Vec<Series>>,
}

impl Powers {
    pub fn new(g: &Jet) -> Self {
        let mut table = Vec::with_capacity(g.n);
        for j in 0..g.n {
            let mut row = Vec::with_capacity(g.k + 1);
            let mut one = Series::new();
            one.insert(vec![0; g.n], QComplex::one());
            row.push(one);
            for e in 1..=g.k {
                let next = mul_truncated(&row[e - 1], &g.coeffs[j], g.k);
                row.push(next);
            }
            table.push(row);
        }
        Self { n: g.n, table }
    }

    fn monomial(&self, m: &[u32], k: usize) -> Series {
        let mut acc: Option<Series> = None;
        for (j, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = &self.table[j][e as usize];
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => mul_truncated(&a, p, k),
            });
        }
        acc.unwrap_or_else(|| {
            let mut one = Series::new();
            one.insert(vec![0; self.n], QComplex::one());
            one
        })
    }
}

impl Jet {
    /// Builds a jet from `(output, multi-index, coefficient)` terms; repeated
    /// terms are summed.
    pub fn from_terms(
        n: usize,
        k: usize,
        terms: impl IntoIterator<Item = (usize, MultiIndex, QComplex)>,
    ) -> Result<Self, JetError> {
        if n == 0 || k == 0 {
            return Err(JetError::EmptyShape);
        }
        let mut coeffs = vec![Series::new(); n];
        for (out, m, c) in terms {
            if out >= n || m.len() != n {
                return Err(JetError::InvalidTerm(format!("output {out}, multi-index {m:?}")));
            }
            let d = degree(&m);
            if d == 0 || d > k {
                return Err(JetError::InvalidTerm(format!("degree {d} outside 1..={k}")));
            }
            add_term(&mut coeffs[out], m, c);
        }
        Ok(Self { n, k, coeffs })
    }

    pub fn zero(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            coeffs: vec![Series::new(); n],
        }
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self::linear(
            &(0..n)
                .map(|i| (0..n).map(|j| if i == j { QComplex::one() } else { QComplex::zero() }).collect())
                .collect::<Vec<_>>(),
            k,
        )
    }

    /// `z -> A z`.
    pub fn linear(a: &[Vec<QComplex>], k: usize) -> Self {
        let n = a.len();
        let mut j = Self::zero(n, k);
        for (i, row) in a.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                add_term(&mut j.coeffs[i], unit(n, c), v.clone());
            }
        }
        j
    }

    /// One-variable jet `sum_d coeffs[d-1] z^d`.
    pub fn univariate(coeffs: &[QComplex], k: usize) -> Self {
        let mut j = Self::zero(1, k);
        for (d, c) in coeffs.iter().enumerate().take(k) {
            add_term(&mut j.coeffs[0], vec![d as u32 + 1], c.clone());
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn coefficient(&self, out: usize, m: &[u32]) -> QComplex {
        self.coeffs[out].get(m).cloned().unwrap_or_else(QComplex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|s| s.is_empty())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.k)
    }

    fn check(&self, other: &Jet) -> Result<(), JetError> {
        if self.n != other.n || self.k != other.k {
            Err(JetError::DimensionMismatch(self.n, self.k, other.n, other.k))
        } else {
            Ok(())
        }
    }

    /// Degree-one coefficients as a matrix, row `i` for output `i`.
    pub fn linear_part(&self) -> Vec<Vec<QComplex>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.coefficient(i, &unit(self.n, j))).collect())
            .collect()
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        self.linear_part() == Self::identity(self.n, self.k).linear_part()
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (m, c) in o {
                add_term(s, m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (m, c) in o {
                add_term(s, m.clone(), -c.clone());
            }
        }
        Ok(out)
    }

    /// `h - id`.
    pub fn tilde(&self) -> Jet {
        self.sub(&Self::identity(self.n, self.k)).expect("same shape")
    }

    /// `self ∘ g` truncated at order `k`.
    pub fn compose(&self, g: &Jet) -> Result<Jet, JetError> {
        self.check(g)?;
        Ok(self.compose_with(&Powers::new(g)))
    }

    /// `self ∘ g` given the powers of `g`.
    pub fn compose_with(&self, powers: &Powers) -> Jet {
        let mut out = Self::zero(self.n, self.k);
        let mut cache: BTreeMap<&MultiIndex, Series> = BTreeMap::new();
        for (i, s) in self.coeffs.iter().enumerate() {
            for (m, c) in s {
                let mono = cache.entry(m).or_insert_with(|| powers.monomial(m, self.k));
                for (mm, cc) in mono.iter() {
                    add_term(&mut out.coeffs[i], mm.clone(), c * cc);
                }
            }
        }
        out
    }

    /// Evaluate with `f64` coefficients.
    pub fn eval(&self, z: &[Complex<f64>]) -> Vec<Complex<f64>> {
        self.coeffs
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(m, c)| {
                        let mut v = Complex::new(
                            c.re.to_f64().unwrap_or(f64::NAN),
                            c.im.to_f64().unwrap_or(f64::NAN),
                        );
                        for (zj, &e) in z.iter().zip(m) {
                            v *= zj.powu(e);
                        }
                        v
                    })
                    .sum()
            })
            .collect()
    }

    /// Lowest total degree with a non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().flat_map(|s| s.keys().map(|m| degree(m))).min()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(n={}, k={}; {})", self.n, self.k, self)
    }
}

fn format_qc(c: &QComplex) -> String {
    if c.im.is_zero() {
        format_rational(&c.re)
    } else if c.re.is_zero() {
        format!("{}i", format_rational(&c.im))
    } else {
        format!("({}+{}i)", format_rational(&c.re), format_rational(&c.im))
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            if s.is_empty() {
                f.write_str("0")?;
            }
            for (t, (m, c)) in s.iter().enumerate() {
                if t > 0 {
                    f.write_str(" + ")?;
                }
                f.write_str(&format_qc(c))?;
                for (j, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => write!(f, "*z{}", j + 1)?,
                        _ => write!(f, "*z{}^{}", j + 1, e)?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exact inverse of a square matrix by Gauss-Jordan elimination.
pub fn invert_matrix(a: &[Vec<QComplex>]) -> Option<Vec<Vec<QComplex>>> {
    let n = a.len();
    let mut m: Vec<Vec<QComplex>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { QComplex::one() } else { QComplex::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = QComplex::one() / &m[col][col];
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..2 * n {
                    let sub = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn matrix_product(a: &[Vec<QComplex>], b: &[Vec<QComplex>]) -> Vec<Vec<QComplex>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(QComplex::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

/// A jet with invertible linear part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InvertibleJet(Jet);

impl InvertibleJet {
    pub fn new(jet: Jet) -> Result<Self, JetError> {
        if invert_matrix(&jet.linear_part()).is_none() {
            return Err(JetError::SingularLinearPart);
        }
        Ok(Self(jet))
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self(Jet::identity(n, k))
    }

    pub fn jet(&self) -> &Jet {
        &self.0
    }

    pub fn into_jet(self) -> Jet {
        self.0
    }

    pub fn compose(&self, g: &InvertibleJet) -> Result<InvertibleJet, JetError> {
        Ok(Self(self.0.compose(&g.0)?))
    }

    /// Formal inverse to order `k`: starting from `A^{-1} z`, each step
    /// `g <- g - A^{-1} (f∘g - id)` gains at least one order.
    pub fn inverse(&self) -> InvertibleJet {
        let f = &self.0;
        let (n, k) = (f.n, f.k);
        let ainv = invert_matrix(&f.linear_part()).expect("checked on construction");
        let ainv_jet = Jet::linear(&ainv, k);
        let id = Jet::identity(n, k);
        let mut g = ainv_jet.clone();
        for _ in 1..k {
            let err = f.compose(&g).and_then(|fg| fg.sub(&id)).expect("same shape");
            if err.is_zero() {
                break;
            }
            g = g.sub(&ainv_jet.compose(&err).expect("same shape")).expect("same shape");
        }
        Self(g)
    }

    /// `f ∘ g ∘ f^-1 ∘ g^-1`.
    pub fn commutator(&self, g: &InvertibleJet) -> Result<InvertibleJet, JetError> {
        self.compose(g)?.compose(&self.inverse())?.compose(&g.inverse())
    }
}

impl Deref for InvertibleJet {
    type Target = Jet;

    fn deref(&self) -> &Jet {
        &self.0
    }
}

impl fmt::Display for InvertibleJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qc, qc_frac};

    #[test]
    fn composition_example() {
        let f = Jet::univariate(&[qc(1, 0), qc(1, 0)], 3);
        let g = Jet::univariate(&[qc(1, 0), qc(0, 0), qc(1, 0)], 3);
        let want = Jet::univariate(&[qc(1, 0), qc(1, 0), qc(1, 0)], 3);
        assert_eq!(f.compose(&g).unwrap(), want);
    }

    #[test]
    fn inverse_example() {
        let f = InvertibleJet::new(Jet::univariate(&[qc(1, 0), qc(1, 0)], 3)).unwrap();
        assert_eq!(*f.inverse().jet(), Jet::univariate(&[qc(1, 0), qc(-1, 0), qc(2, 0)], 3));
        let l = InvertibleJet::new(Jet::univariate(&[qc_frac(2, 3, 1, 5)], 4)).unwrap();
        let inv = l.inverse();
        assert_eq!(inv.coefficient(0, &[1]), QComplex::one() / qc_frac(2, 3, 1, 5));
        assert!(InvertibleJet::new(Jet::univariate(&[qc(0, 0), qc(1, 0)], 3)).is_err());
    }

    #[test]
    fn matrix_inverse() {
        let a = vec![vec![qc(1, 1), qc(2, 0)], vec![qc(0, 1), qc(3, -1)]];
        let inv = invert_matrix(&a).unwrap();
        let id = matrix_product(&a, &inv);
        assert_eq!(id, Jet::identity(2, 1).linear_part());
        assert!(invert_matrix(&[vec![qc(1, 0), qc(2, 0)], vec![qc(2, 0), qc(4, 0)]]).is_none());
    }
}
