use std::collections::HashSet;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::jet::{InvertibleJet, JetError, Powers};
use crate::holonomy::Word;

/// Generators with their inverses, all of the same shape `(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub generators: Vec<InvertibleJet>,
    pub inverses: Vec<InvertibleJet>,
    pub labels: Vec<String>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<InvertibleJet>, labels: Vec<String>) -> Result<Self, JetError> {
        if let Some(first) = generators.first() {
            for g in &generators {
                if g.dim() != first.dim() || g.order() != first.order() {
                    return Err(JetError::DimensionMismatch(first.dim(), first.order(), g.dim(), g.order()));
                }
            }
        }
        let inverses = generators.iter().map(InvertibleJet::inverse).collect();
        let labels = if labels.len() == generators.len() {
            labels
        } else {
            (0..generators.len()).map(|i| format!("g{}", i + 1)).collect()
        };
        Ok(Self {
            generators,
            inverses,
            labels,
        })
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.generators.first().map(|g| (g.dim(), g.order()))
    }

    /// The symmetric list `g_1, g_1^-1, g_2, g_2^-1, ...`.
    pub fn symmetric(&self) -> Vec<InvertibleJet> {
        self.generators
            .iter()
            .zip(&self.inverses)
            .flat_map(|(g, i)| [g.clone(), i.clone()])
            .collect()
    }

    /// `#S` of the symmetric generating system.
    pub fn symmetric_size(&self) -> usize {
        2 * self.generators.len()
    }

    /// The element of a word, letters applied right to left.
    pub fn evaluate(&self, w: &Word) -> Result<InvertibleJet, JetError> {
        let (n, k) = self.shape().unwrap_or((1, 1));
        let mut acc = InvertibleJet::identity(n, k);
        for l in &w.letters {
            let g = if l.inverse {
                &self.inverses[l.generator]
            } else {
                &self.generators[l.generator]
            };
            acc = acc.compose(g)?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesLevel {
    pub level: usize,
    /// Distinct non-identity generators found for this level.
    pub generators: usize,
    /// Every commutator of the previous level is the identity jet.
    pub trivial: bool,
    /// More than `cap` generators appeared; the level was not completed.
    pub cap_exceeded: bool,
}

/// Derived series modulo order-`k` jets: level `i + 1` is generated by the
/// commutators `[a, b]` of level-`i` generators and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedSeriesReport {
    pub order: usize,
    pub cap: usize,
    pub levels: Vec<SeriesLevel>,
    /// First trivial level, if one was reached.
    pub terminated_at: Option<usize>,
}

impl DerivedSeriesReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("derived series modulo order-{} jets, cap {} generators per level\n", self.order, self.cap);
        for l in &self.levels {
            let status = if l.cap_exceeded {
                "inconclusive (cap exceeded)"
            } else if l.trivial {
                "trivial"
            } else {
                "non-trivial"
            };
            s.push_str(&format!("level {}: {} generators, {}\n", l.level, l.generators, status));
        }
        match self.terminated_at {
            Some(i) => s.push_str(&format!("solvable modulo order {}: trivial at level {}\n", self.order, i)),
            None => s.push_str("no trivial level reached\n"),
        }
        s
    }
}

pub const DEFAULT_SERIES_CAP: usize = 64;

pub fn derived_series(set: &GeneratorSet, max_depth: usize, cap: usize) -> Result<DerivedSeriesReport, JetError> {
    let order = set.shape().map(|s| s.1).unwrap_or(0);
    let mut gens: Vec<InvertibleJet> = set.generators.iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut report = DerivedSeriesReport {
        order,
        cap,
        levels: vec![SeriesLevel {
            level: 0,
            generators: gens.len(),
            trivial: gens.is_empty(),
            cap_exceeded: false,
        }],
        terminated_at: None,
    };
    if gens.is_empty() {
        report.terminated_at = Some(0);
        return Ok(report);
    }
    for level in 1..=max_depth {
        let pool: Vec<InvertibleJet> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
        let pairs: Vec<(usize, usize)> = (0..pool.len())
            .flat_map(|a| (a + 1..pool.len()).map(move |b| (a, b)))
            .collect();
        let comms: Vec<InvertibleJet> = pairs
            .par_iter()
            .map(|&(a, b)| pool[a].commutator(&pool[b]))
            .collect::<Result<_, _>>()?;
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut cap_exceeded = false;
        for c in comms {
            if c.is_identity() || !seen.insert(c.clone()) {
                continue;
            }
            if next.len() == cap {
                cap_exceeded = true;
                break;
            }
            next.push(c);
        }
        let trivial = next.is_empty();
        report.levels.push(SeriesLevel {
            level,
            generators: next.len(),
            trivial,
            cap_exceeded,
        });
        if trivial {
            report.terminated_at = Some(level);
            break;
        }
        if cap_exceeded {
            break;
        }
        gens = next;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub gamma: usize,
    pub new_elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// Candidate products formed, including duplicates.
    pub products: usize,
    pub duplicates: usize,
    pub symmetric_size: usize,
    pub order: usize,
}

impl GrowthTable {
    pub fn gammas(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.gamma).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,gamma,new_elements\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.n, r.gamma, r.new_elements));
        }
        s
    }

    /// `gamma` non-decreasing and `gamma(n) <= sum_{i <= n} (#S)^i`.
    pub fn satisfies_ball_bound(&self) -> bool {
        let s = BigUint::from(self.symmetric_size);
        let mut bound = BigUint::zero();
        let mut pow = BigUint::one();
        let mut last = 0;
        for r in &self.rows {
            bound += &pow;
            pow *= &s;
            if r.gamma < last || BigUint::from(r.gamma) > bound {
                return false;
            }
            last = r.gamma;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("growth budget of {budget} elements exceeded at radius {radius}")]
pub struct BudgetExceeded {
    pub budget: usize,
    pub radius: usize,
    /// Rows for the radii that were completed.
    pub partial: GrowthTable,
}

/// Upper bound on the number of elements of the ball of radius `n_max`.
pub fn ball_size_bound(symmetric_size: usize, n_max: usize) -> BigUint {
    let s = BigUint::from(symmetric_size);
    (0..=n_max).fold(BigUint::zero(), |acc, i| acc + s.pow(i as u32))
}

/// `gamma(n) = |B(n)|` by breadth-first search over words, with exact
/// deduplication of jets. Frontier products are formed in parallel and
/// merged in frontier order, so the table does not depend on scheduling.
pub fn growth_function(set: &GeneratorSet, n_max: usize, budget: usize) -> Result<GrowthTable, Box<BudgetExceeded>> {
    let (n, k) = set.shape().unwrap_or((1, 1));
    let sym = set.symmetric();
    let powers: Vec<Powers> = sym.iter().map(|g| Powers::new(g.jet())).collect();
    let id = InvertibleJet::identity(n, k);
    let mut seen: HashSet<InvertibleJet> = HashSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    let mut table = GrowthTable {
        rows: vec![GrowthRow {
            n: 0,
            gamma: 1,
            new_elements: 1,
        }],
        products: 0,
        duplicates: 0,
        symmetric_size: sym.len(),
        order: k,
    };
    for radius in 1..=n_max {
        // B(r) = B(r-1) ∪ B(r-1)·S; composing on the right reuses the
        // cached powers of the generators
        let candidates: Vec<InvertibleJet> = frontier
            .par_iter()
            .flat_map_iter(|h| {
                powers
                    .iter()
                    .map(move |p| InvertibleJet::new(h.jet().compose_with(p)).expect("product of invertible jets"))
            })
            .collect();
        table.products += candidates.len();
        let mut next = Vec::new();
        for c in candidates {
            if seen.contains(&c) {
                table.duplicates += 1;
                continue;
            }
            if seen.len() >= budget {
                return Err(Box::new(BudgetExceeded {
                    budget,
                    radius,
                    partial: table,
                }));
            }
            seen.insert(c.clone());
            next.push(c);
        }
        table.rows.push(GrowthRow {
            n: radius,
            gamma: seen.len(),
            new_elements: next.len(),
        });
        frontier = next;
    }
    Ok(table)
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `sum_{l=0}^{m} 2^l C(m, l) C(n, l)`, the growth of a free abelian group
/// of rank `m` with its standard generators.
pub fn free_abelian_growth_formula(m: u64, n: u64) -> BigUint {
    (0..=m.min(n)).fold(BigUint::zero(), |acc, l| {
        acc + (BigUint::one() << l as usize) * binomial(m, l) * binomial(n, l)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual.
    pub residual: f64,
}

fn fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthClass {
    Polynomial { degree: f64 },
    Exponential { rate: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthVerdict {
    pub class: GrowthClass,
    /// `log gamma` against `log n`.
    pub power_fit: LineFit,
    /// `log gamma` against `n`.
    pub exponential_fit: LineFit,
    pub margin: f64,
    pub min_rate: f64,
    /// Radii used for the fits.
    pub window: (usize, usize),
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyGrowthOptions {
    /// A fit wins when its residual is below `margin` times the other's.
    pub margin: f64,
    /// Minimum slope of `log gamma` against `n` for an exponential verdict.
    pub min_rate: f64,
    /// The fits use the last `window` fraction of the rows with `n >= 1`.
    pub window: f64,
}

impl Default for ClassifyGrowthOptions {
    fn default() -> Self {
        Self {
            margin: 0.5,
            min_rate: 0.1,
            window: 0.5,
        }
    }
}

/// Compares least-squares fits of `log gamma` against `log n` and against
/// `n` on the tail of the table. Returns `None` for fewer than 6 rows.
pub fn classify_growth(table: &GrowthTable, opts: &ClassifyGrowthOptions) -> Option<GrowthVerdict> {
    if table.rows.len() < 6 {
        return None;
    }
    let usable: Vec<&GrowthRow> = table.rows.iter().filter(|r| r.n >= 1).collect();
    let take = ((usable.len() as f64 * opts.window).ceil() as usize).clamp(3, usable.len());
    let tail = &usable[usable.len() - take..];
    let ns: Vec<f64> = tail.iter().map(|r| r.n as f64).collect();
    let logn: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let logg: Vec<f64> = tail.iter().map(|r| (r.gamma as f64).ln()).collect();
    let power_fit = fit(&logn, &logg);
    let exponential_fit = fit(&ns, &logg);
    let window = (tail[0].n, tail[tail.len() - 1].n);
    let bounded = tail.iter().all(|r| r.gamma == tail[0].gamma);
    let (class, note) = if bounded {
        (
            GrowthClass::Polynomial { degree: 0.0 },
            format!("bounded: the ball stops growing at {} elements", tail[0].gamma),
        )
    } else if exponential_fit.residual < opts.margin * power_fit.residual && exponential_fit.slope > opts.min_rate {
        (GrowthClass::Exponential { rate: exponential_fit.slope }, String::new())
    } else if power_fit.residual < opts.margin * exponential_fit.residual {
        (GrowthClass::Polynomial { degree: power_fit.slope }, String::new())
    } else {
        (GrowthClass::Inconclusive, String::new())
    };
    let note = if note.is_empty() {
        format!("modulo order-{} jets", table.order)
    } else {
        format!("{note}; modulo order-{} jets", table.order)
    };
    Some(GrowthVerdict {
        class,
        power_fit,
        exponential_fit,
        margin: opts.margin,
        min_rate: opts.min_rate,
        window,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("generators must be tangent to the identity")]
    NotTangentToIdentity,
    #[error("all generators vanish to order k at z_m for m = {m}")]
    AllGeneratorsVanish { m: u64 },
    #[error("truncation error |z_m|^(k+1) = {bound:e} is not small against M_m = {scale:e} for m = {m}")]
    TruncationDominates { m: u64, bound: f64, scale: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Value of `h -> lim h~(z_m) / M_m` at one `m`, as a vector in `R^{2n}`
/// (real and imaginary parts interleaved).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSample {
    pub m: u64,
    pub scale: f64,
    pub values: Vec<Vec<f64>>,
    /// `|f(h1 h2) - f(h1) - f(h2)|` per requested pair.
    pub additivity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitHomomorphismEstimate {
    pub z0: Vec<Complex<f64>>,
    pub words: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub samples: Vec<LimitSample>,
}

impl LimitHomomorphismEstimate {
    /// Values at the largest `m`.
    pub fn estimate(&self) -> &[Vec<f64>] {
        &self.samples.last().expect("at least one sample").values
    }

    /// Largest change between the last two samples.
    pub fn convergence(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let (a, b) = (&self.samples[n - 2].values, &self.samples[n - 1].values);
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }
}

fn flatten(v: &[Complex<f64>]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn norm(v: &[Complex<f64>]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Estimates `f(h) = lim h~(z_m) / M_m` along `z_m = z0 / m`, with
/// `M_m = max_i |h_i~(z_m)|` over the generators `h_i` and their inverses.
/// `pairs` index into `words`; for each pair the residual of
/// `f(h1 h2) = f(h1) + f(h2)` is reported, with the product word evaluated
/// as written.
pub fn limit_homomorphism(
    set: &GeneratorSet,
    z0: &[Complex<f64>],
    ms: &[u64],
    words: &[Word],
    pairs: &[(usize, usize)],
) -> Result<LimitHomomorphismEstimate, LimitError> {
    if !set.generators.iter().all(|g| g.is_tangent_to_identity()) {
        return Err(LimitError::NotTangentToIdentity);
    }
    let k = set.shape().map(|s| s.1).unwrap_or(1);
    let gens: Vec<_> = set.symmetric().iter().map(|g| g.tilde()).collect();
    let elems: Vec<_> = words
        .iter()
        .map(|w| set.evaluate(w).map(|j| j.tilde()))
        .collect::<Result<_, _>>()?;
    let products: Vec<_> = pairs
        .iter()
        .map(|&(a, b)| set.evaluate(&words[a].compose(&words[b])).map(|j| j.tilde()))
        .collect::<Result<_, _>>()?;
    let mut samples = Vec::with_capacity(ms.len());
    for &m in ms {
        let z: Vec<Complex<f64>> = z0.iter().map(|c| c / m as f64).collect();
        let scale = gens.iter().map(|g| norm(&g.eval(&z))).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return Err(LimitError::AllGeneratorsVanish { m });
        }
        let bound = norm(&z).powi(k as i32 + 1);
        if bound > 1e-3 * scale {
            return Err(LimitError::TruncationDominates { m, bound, scale });
        }
        let value = |j: &super::jet::Jet| -> Vec<Complex<f64>> { j.eval(&z).iter().map(|c| c / scale).collect() };
        let vals: Vec<Vec<Complex<f64>>> = elems.iter().map(value).collect();
        let additivity = pairs
            .iter()
            .zip(&products)
            .map(|(&(a, b), p)| {
                let fp = value(p);
                let r: Vec<Complex<f64>> = fp.iter().zip(&vals[a]).zip(&vals[b]).map(|((x, y), w)| x - y - w).collect();
                norm(&r)
            })
            .collect();
        samples.push(LimitSample {
            m,
            scale,
            values: vals.iter().map(|v| flatten(v)).collect(),
            additivity,
        });
    }
    Ok(LimitHomomorphismEstimate {
        z0: z0.to_vec(),
        words: words.iter().map(Word::to_string).collect(),
        pairs: pairs.to_vec(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(free_abelian_growth_formula(1, 3), BigUint::from(7u32));
        assert_eq!(free_abelian_growth_formula(2, 2), BigUint::from(13u32));
        assert_eq!(free_abelian_growth_formula(5, 0), BigUint::one());
        assert_eq!(free_abelian_growth_formula(0, 5), BigUint::one());
        for n in 0..10u64 {
            assert_eq!(free_abelian_growth_formula(2, n), BigUint::from(2 * n * n + 2 * n + 1));
        }
    }
}
