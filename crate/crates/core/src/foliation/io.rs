//! JSON input documents and CSV singularity reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::classify::SingularityClass;
use super::normal_form::{FoliationNormalForm, ValidationError};
use super::singularity::Singularity;
use crate::poly::BivariatePolynomial;
use crate::scalar::{format_rational, parse_rational, Real};
use crate::QComplex;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("bad rational {value:?} in {field}")]
    BadRational { field: String, value: String },
    #[error("duplicate term x^{i} y^{j} in {field}")]
    DuplicateTerm { field: String, i: u32, j: u32 },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// A rational written either as a JSON string (`"3/4"`, `"-0.25"`) or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Number(serde_json::Number),
}

impl RationalText {
    pub fn as_text(&self) -> String {
        match self {
            RationalText::Text(s) => s.clone(),
            RationalText::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub i: u32,
    pub j: u32,
    pub re: RationalText,
    #[serde(default = "zero_text")]
    pub im: RationalText,
}

fn zero_text() -> RationalText {
    RationalText::Text("0".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationDocument {
    pub n: u32,
    #[serde(rename = "P", default)]
    pub p: Vec<TermDoc>,
    #[serde(rename = "Q", default)]
    pub q: Vec<TermDoc>,
    #[serde(default)]
    pub g: Vec<TermDoc>,
}

pub fn parse_terms(field: &str, terms: &[TermDoc]) -> Result<BivariatePolynomial<QComplex>, DocumentError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if !seen.insert((t.i, t.j)) {
            return Err(DocumentError::DuplicateTerm {
                field: field.into(),
                i: t.i,
                j: t.j,
            });
        }
        let parse = |r: &RationalText| {
            let s = r.as_text();
            parse_rational(&s).map_err(|_| DocumentError::BadRational {
                field: field.into(),
                value: s,
            })
        };
        out.push(((t.i, t.j), QComplex::new(parse(&t.re)?, parse(&t.im)?)));
    }
    Ok(BivariatePolynomial::from_terms(out))
}

pub fn terms_to_doc(p: &BivariatePolynomial<QComplex>) -> Vec<TermDoc> {
    p.terms()
        .map(|(&(i, j), c)| TermDoc {
            i,
            j,
            re: RationalText::Text(format_rational(&c.re)),
            im: RationalText::Text(format_rational(&c.im)),
        })
        .collect()
}

impl FoliationDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_form(&self) -> Result<FoliationNormalForm<QComplex>, DocumentError> {
        let p = parse_terms("P", &self.p)?;
        let q = parse_terms("Q", &self.q)?;
        let g = parse_terms("g", &self.g)?;
        Ok(FoliationNormalForm::validate(p, q, g, self.n)?)
    }

    pub fn from_form(form: &FoliationNormalForm<QComplex>) -> Self {
        Self {
            n: form.degree(),
            p: terms_to_doc(form.p()),
            q: terms_to_doc(form.q()),
            g: terms_to_doc(form.g()),
        }
    }
}

pub const SINGULARITY_CSV_HEADER: &str =
    "chart,loc_re1,loc_im1,loc_re2,loc_im2,eig1_re,eig1_im,eig2_re,eig2_im,lambda_re,lambda_im,nondeg,hyp,red,saddle,residual";

fn flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "NA",
    }
}

/// CSV rows (header included) for classified singularities. Floats use the
/// shortest representation that round-trips.
pub fn singularity_csv<F: Real>(rows: &[(Singularity<F>, SingularityClass)]) -> String {
    let mut out = String::from(SINGULARITY_CSV_HEADER);
    out.push('\n');
    for (s, c) in rows {
        let _ = write!(out, "{}", s.chart);
        for z in s.location.iter().chain(&s.eigenvalues).chain(std::iter::once(&s.lambda)) {
            let _ = write!(out, ",{},{}", z.re, z.im);
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{}",
            if c.non_degenerate { "1" } else { "0" },
            flag(c.hyperbolic),
            flag(c.reduced),
            flag(c.saddle_type),
            s.residual
        );
    }
    out
}
