use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::group::GeneratorSet;
use super::jet::{InvertibleJet, Jet, JetError, MultiIndex};
use crate::foliation::io::RationalText;
use crate::scalar::{format_rational, parse_rational};
use crate::QComplex;

#[derive(Debug, Error)]
pub enum JetDocumentError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("bad rational {value:?} in generator {label}")]
    BadRational { label: String, value: String },
    #[error("generator {label}: {error}")]
    Jet { label: String, error: JetError },
}

impl From<serde_json::Error> for JetDocumentError {
    fn from(e: serde_json::Error) -> Self {
        JetDocumentError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// One coefficient: output coordinate `out` (from 0), exponents `multi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffDoc {
    pub out: usize,
    pub multi: Vec<u32>,
    pub re: RationalText,
    #[serde(default = "zero_text")]
    pub im: RationalText,
}

fn zero_text() -> RationalText {
    RationalText::Text("0".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub label: String,
    pub coeffs: Vec<CoeffDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetDocument {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<GeneratorDoc>,
}

impl JetDocument {
    pub fn from_json(text: &str) -> Result<Self, JetDocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_generator_set(&self) -> Result<GeneratorSet, JetDocumentError> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let parse = |t: &RationalText| {
                parse_rational(&t.as_text()).map_err(|_| JetDocumentError::BadRational {
                    label: g.label.clone(),
                    value: t.as_text(),
                })
            };
            let mut terms: Vec<(usize, MultiIndex, QComplex)> = Vec::with_capacity(g.coeffs.len());
            for c in &g.coeffs {
                terms.push((c.out, c.multi.clone(), QComplex::new(parse(&c.re)?, parse(&c.im)?)));
            }
            let wrap = |error| JetDocumentError::Jet {
                label: g.label.clone(),
                error,
            };
            let jet = Jet::from_terms(self.n, self.k, terms).map_err(wrap)?;
            gens.push(InvertibleJet::new(jet).map_err(wrap)?);
        }
        let labels = self.generators.iter().map(|g| g.label.clone()).collect();
        GeneratorSet::new(gens, labels).map_err(|error| JetDocumentError::Jet {
            label: String::new(),
            error,
        })
    }

    pub fn from_generator_set(set: &GeneratorSet) -> Self {
        let (n, k) = set.shape().unwrap_or((1, 1));
        let generators = set
            .generators
            .iter()
            .zip(&set.labels)
            .map(|(g, label)| GeneratorDoc {
                label: label.clone(),
                coeffs: g
                    .coefficients()
                    .iter()
                    .enumerate()
                    .flat_map(|(out, s)| {
                        s.iter().map(move |(m, c)| CoeffDoc {
                            out,
                            multi: m.clone(),
                            re: RationalText::Text(format_rational(&c.re)),
                            im: RationalText::Text(format_rational(&c.im)),
                        })
                    })
                    .collect(),
            })
            .collect();
        Self { n, k, generators }
    }
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> num_rational::BigRational {
    num_rational::BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=4).into())
}

fn monomials(n: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(j: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>, k: usize) {
        if j == cur.len() {
            let d: usize = cur.iter().map(|&e| e as usize).sum();
            if d >= 2 && d <= k {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[j] = e as u32;
            rec(j + 1, left - e, cur, out, k);
        }
        cur[j] = 0;
    }
    rec(0, k, &mut cur, &mut out, k);
    out
}

/// Random jet with small Gaussian-rational coefficients, about half of the
/// nonlinear monomials present. The linear part is the identity when
/// `tangent` is set and otherwise a random invertible matrix.
pub fn random_jet<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, tangent: bool) -> InvertibleJet {
    loop {
        let mut terms = Vec::new();
        for out in 0..n {
            for j in 0..n {
                let mut m = vec![0; n];
                m[j] = 1;
                let c = if tangent {
                    crate::scalar::qc((out == j) as i64, 0)
                } else {
                    QComplex::new(small_rational(rng), small_rational(rng))
                };
                terms.push((out, m, c));
            }
            for m in monomials(n, k) {
                if rng.gen_bool(0.5) {
                    terms.push((out, m, QComplex::new(small_rational(rng), small_rational(rng))));
                }
            }
        }
        let jet = Jet::from_terms(n, k, terms).expect("valid shape");
        if let Ok(j) = InvertibleJet::new(jet) {
            return j;
        }
    }
}

/// `z -> lambda_i z` in dimension one, one generator per entry.
pub fn commuting_linear(lambdas: &[QComplex], k: usize) -> GeneratorSet {
    let gens = lambdas
        .iter()
        .map(|l| InvertibleJet::new(Jet::univariate(std::slice::from_ref(l), k)).expect("non-zero multiplier"))
        .collect();
    GeneratorSet::new(gens, Vec::new()).expect("same shape")
}
