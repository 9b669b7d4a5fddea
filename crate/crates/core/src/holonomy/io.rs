//! JSON documents for pseudo-groups and loop specifications, and the CSV
//! reports of fixed-point atlases and coverage probes.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::density::Coverage;
use super::fixed::FixedPointRecord;
use super::germ::{Germ, PolyGerm, PseudoGroup};

/// Polynomial generator `sum_k coeffs[k] z^k`, coefficients as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    #[serde(default)]
    pub label: String,
    pub coeffs: Vec<[f64; 2]>,
}

/// `{"delta": r, "generators": [...]}`: polynomial germs on the disk of
/// radius `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoGroupDocument {
    pub delta: f64,
    pub generators: Vec<GeneratorDoc>,
}

impl PseudoGroupDocument {
    pub fn to_group(&self) -> Result<PseudoGroup<f64>, String> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(format!("delta must be positive, got {}", self.delta));
        }
        if self.generators.is_empty() {
            return Err("no generators".into());
        }
        let mut gens: Vec<Arc<dyn Germ<f64>>> = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            let coeffs: Vec<Complex<f64>> = g.coeffs.iter().map(|c| Complex::new(c[0], c[1])).collect();
            if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(format!("generator {} has a non-finite coefficient", i + 1));
            }
            if coeffs.get(1).map_or(true, |c| c.norm() == 0.0) {
                return Err(format!("generator {} has no linear term", i + 1));
            }
            gens.push(Arc::new(PolyGerm::new(coeffs, self.delta)));
        }
        let label = self
            .generators
            .iter()
            .map(|g| g.label.as_str())
            .collect::<Vec<_>>()
            .join(",");
        Ok(PseudoGroup::new(gens, self.delta, label))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDoc {
    pub center: [f64; 2],
    pub radius: f64,
}

/// `{"q": [re, im], "r": num, "loops": [{"center": [re, im], "radius": num}]}`.
/// `q` is the base point, `r` the transverse disk radius; each loop sets the
/// circle radius used around the singular point nearest its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    #[serde(default)]
    pub q: Option<[f64; 2]>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub loops: Vec<LoopDoc>,
}

pub const ATLAS_CSV_HEADER: &str = "word,letters,loc_re,loc_im,mult_re,mult_im,abs_mult,hyperbolic,residual";

pub fn atlas_csv(records: &[FixedPointRecord<f64>]) -> String {
    let mut s = String::from(ATLAS_CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.word,
            r.word.len(),
            r.location.re,
            r.location.im,
            r.multiplier.re,
            r.multiplier.im,
            r.multiplier.norm(),
            u8::from(r.hyperbolic),
            r.residual
        ));
    }
    s
}

pub const COVERAGE_CSV_HEADER: &str = "budget,epsilon,coverage";

pub fn coverage_csv(rows: &[Coverage<f64>]) -> String {
    let mut s = String::from(COVERAGE_CSV_HEADER);
    s.push('\n');
    for c in rows {
        s.push_str(&format!("{},{},{}\n", c.budget, c.epsilon, c.coverage));
    }
    s
}
