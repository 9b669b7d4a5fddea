use std::path::PathBuf;

use holofol::foliation::io::{singularity_csv, FoliationDocument};
use holofol::foliation::{class_membership, ClassMembership, ClassifyOptions, Line, SearchRegion, Singularity, SingularityClass};
use holofol::scalar::qc_frac;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::report::Outputs;
use crate::{header, read_input, AnalyzeArgs, CliError};

/// Largest accepted Newton residual of a reported singularity.
const RESIDUAL_LIMIT: f64 = 1e-6;

#[derive(Serialize)]
struct SingularityRow {
    chart: String,
    location: [[f64; 2]; 2],
    eigenvalues: [[f64; 2]; 2],
    lambda: [f64; 2],
    lambda_inv: [f64; 2],
    residual: f64,
    multiplicity: usize,
    class: SingularityClass,
}

fn row(s: &Singularity<f64>, c: &SingularityClass) -> SingularityRow {
    let p = |z: num_complex::Complex<f64>| [z.re, z.im];
    SingularityRow {
        chart: s.chart.to_string(),
        location: [p(s.location[0]), p(s.location[1])],
        eigenvalues: [p(s.eigenvalues[0]), p(s.eigenvalues[1])],
        lambda: p(s.lambda),
        lambda_inv: p(s.lambda_inv),
        residual: s.residual,
        multiplicity: s.multiplicity,
        class: c.clone(),
    }
}

#[derive(Serialize)]
struct TangencyLine {
    point: [String; 2],
    direction: [String; 2],
    /// `None` when the line is invariant.
    degree: Option<usize>,
}

#[derive(Serialize)]
struct Analysis<'a> {
    membership: &'a ClassMembership,
    tangency: &'a [TangencyLine],
    tangency_consistent: bool,
    affine: Vec<SingularityRow>,
    infinity: Vec<SingularityRow>,
}

pub fn run(args: &AnalyzeArgs) -> Result<Vec<PathBuf>, CliError> {
    let c = &args.common;
    let text = read_input(&c.input)?;
    let doc = FoliationDocument::from_json(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let form = doc.to_form().map_err(|e| CliError::Input(e.to_string()))?;
    let tol = c.tol.unwrap_or(1e-12);
    let mut region = SearchRegion::<f64>::centered(args.half_width);
    region.density = args.density;
    region.tol = tol;
    let classify = ClassifyOptions::default();
    let analysis = class_membership(&form, &region, &classify);

    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut lines = Vec::with_capacity(args.lines);
    for _ in 0..args.lines {
        let mut q = || qc_frac(rng.gen_range(-60..=60), 7, rng.gen_range(-60..=60), 11);
        let point = [q(), q()];
        let direction = [q(), q()];
        let degree = form
            .tangency_polynomial(&Line::affine(point.clone(), direction.clone()))
            .ok()
            .map(|p| p.degree().unwrap_or(0));
        let show = |z: &holofol::QComplex| format!("{}+{}i", z.re, z.im);
        lines.push(TangencyLine {
            point: [show(&point[0]), show(&point[1])],
            direction: [show(&direction[0]), show(&direction[1])],
            degree,
        });
    }
    let n = form.degree() as usize;
    let tangency_consistent = lines.iter().all(|l| l.degree == Some(n));

    let settings = vec![
        ("newton_tol", format!("{tol:?}")),
        ("half_width", args.half_width.to_string()),
        ("density", args.density.to_string()),
        ("eigen_tol", format!("{:?}", classify.eigen_tol)),
        ("rational_tol", format!("{:?}", classify.rational_tol)),
        ("max_denom", classify.max_denom.to_string()),
        ("residual_limit", format!("{RESIDUAL_LIMIT:?}")),
    ];
    let mut out = Outputs::new(&c.out, header("analyze", &[&text], args, c.seed, settings))?;

    let mut rows = analysis.affine.clone();
    rows.extend(analysis.infinity.iter().cloned());
    out.text("singularities.csv", &singularity_csv(&rows))?;

    let m = &analysis.membership;
    let yn = |b: bool| if b { "yes" } else { "no" };
    let mut rep = String::new();
    rep.push_str(&format!("degree: {}\n", m.degree));
    rep.push_str(&format!("affine singularities: {}\n", m.affine_count));
    rep.push_str(&format!("singularities on L_inf: {}\n", m.infinity_count));
    rep.push_str(&format!("multiple root on L_inf: {}\n", yn(m.multiple_root)));
    rep.push_str(&format!("unconverged seeds: {}\n", m.unconverged_seeds));
    rep.push_str(&format!("S(n): {}\n", yn(m.s)));
    rep.push_str(&format!("T(n): {}\n", yn(m.t)));
    rep.push_str(&format!("X(n): {}\n", yn(m.x)));
    rep.push_str(&format!("H(n): {}\n", yn(m.h)));
    rep.push_str(&format!("scope: {}\n", m.scope));
    for (i, l) in lines.iter().enumerate() {
        let d = l.degree.map_or("invariant".to_string(), |d| d.to_string());
        rep.push_str(&format!("tangency line {}: degree {}\n", i + 1, d));
    }
    rep.push_str(&format!("tangency degree equals n on all lines: {}\n", yn(tangency_consistent)));
    out.text("report.txt", &rep)?;

    out.json(
        "analysis.json",
        &Analysis {
            membership: m,
            tangency: &lines,
            tangency_consistent,
            affine: analysis.affine.iter().map(|(s, c)| row(s, c)).collect(),
            infinity: analysis.infinity.iter().map(|(s, c)| row(s, c)).collect(),
        },
    )?;

    let worst = rows.iter().map(|(s, _)| s.residual).fold(0.0, f64::max);
    if worst > RESIDUAL_LIMIT {
        return Err(CliError::Solver(format!(
            "largest singularity residual {worst:e} exceeds {RESIDUAL_LIMIT:e}"
        )));
    }
    Ok(out.written)
}
