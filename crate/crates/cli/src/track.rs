use std::path::PathBuf;

use holofol::deformation::{
    density_persistence_probe, track_csv, track_fixed_point, DeformationFamily, FamilyDocument, GeneratorFamily,
    TrackError, TrackOptions, TrackedFixedPoint,
};
use holofol::holonomy::{newton_fixed_point, ProbeOptions, Word, DEFAULT_BUDGET};
use num_complex::Complex;
use rayon::prelude::*;

use crate::report::Outputs;
use crate::svg::Plot;
use crate::{header, read_input, CliError, TrackArgs};

fn c(p: [f64; 2]) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

/// Largest distance between the tracked samples and Newton solves of
/// `f_t(p) = p` at the same `t`, each seeded with the previous oracle
/// solution rather than the tracked value.
fn oracle_gap(family: &DeformationFamily<f64>, track: &TrackedFixedPoint<f64>, opts: &TrackOptions<f64>) -> Option<f64> {
    let mut seed = track.samples.first()?.p;
    let mut gap: f64 = 0.0;
    for s in &track.samples {
        let g = family.at(s.t);
        let (p, _, _) = newton_fixed_point(&g, &track.word, seed, opts.newton_tol, opts.residual_tol, opts.max_newton)?;
        gap = gap.max((p - s.p).norm());
        seed = p;
    }
    Some(gap)
}

pub fn run(args: &TrackArgs) -> Result<Vec<PathBuf>, CliError> {
    let cm = &args.common;
    let text = read_input(&cm.input)?;
    let doc: FamilyDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let family = doc.to_family().map_err(CliError::Input)?;
    let words: Vec<Word> = doc
        .tracks
        .iter()
        .map(|t| t.word.parse::<Word>().map_err(|e| CliError::Input(format!("word {:?}: {e}", t.word))))
        .collect::<Result<_, _>>()?;
    for (w, t) in words.iter().zip(&doc.tracks) {
        if let Some(l) = w.letters.iter().find(|l| l.generator >= family.rank()) {
            return Err(CliError::Input(format!(
                "word {} uses generator {} of {}",
                t.word,
                l.generator + 1,
                family.rank()
            )));
        }
    }
    let residual_tol = cm.tol.unwrap_or(1e-10);
    let option_for = |steps: usize| {
        let mut o = TrackOptions::new(steps);
        o.residual_tol = residual_tol;
        o
    };

    let results: Vec<Result<(TrackedFixedPoint<f64>, Option<f64>), TrackError>> = doc
        .tracks
        .par_iter()
        .zip(&words)
        .map(|(spec, w)| {
            let opts = option_for(spec.steps);
            let tr = track_fixed_point(&family, w, c(spec.p0), c(spec.t_end), &opts)?;
            let gap = oracle_gap(&family, &tr, &opts);
            Ok((tr, gap))
        })
        .collect();
    let mut tracks = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => tracks.push(v),
            Err(e) => return Err(CliError::Unverified(format!("track {}: {e}", i + 1))),
        }
    }

    let budget = cm.budget.unwrap_or(DEFAULT_BUDGET);
    let persistence = doc.persistence.as_ref().map(|p| {
        let ts: Vec<Complex<f64>> = p.t.iter().map(|&t| c(t)).collect();
        let probe = ProbeOptions::new(p.radius, p.epsilon, budget, cm.seed);
        density_persistence_probe(&family, &ts, &probe)
    });

    let bounds = family.uniform_bounds().map_err(|e| CliError::Input(e.to_string()))?;
    let proto = option_for(0);
    let settings = vec![
        ("residual_tol", format!("{residual_tol:?}")),
        ("newton_tol", format!("{:?}", proto.newton_tol)),
        ("tau", proto.tau.to_string()),
        ("degeneracy_tol", format!("{:?}", proto.degeneracy_tol)),
        ("deformed_generator", (family.generator + 1).to_string()),
        ("exponent", family.exponent.to_string()),
        ("eps", family.eps.to_string()),
        ("uniform_radius", bounds.radius.to_string()),
        ("linear_coefficient_bound", bounds.c.to_string()),
        ("budget", budget.to_string()),
    ];
    let mut out = Outputs::new(&cm.out, header("track", &[&text], args, cm.seed, settings))?;

    let mut summary = String::from(
        "track,word,samples,max_residual,max_oracle_gap,final_p_re,final_p_im,final_abs_mult,breakdown_t_re,breakdown_t_im,breakdown\n",
    );
    for (i, (tr, gap)) in tracks.iter().enumerate() {
        out.text(&format!("track_{}.csv", i + 1), &track_csv(tr))?;
        let last = tr.samples.last().expect("tracks start with a verified sample");
        let (bt, reason) = match tr.breakdown {
            Some((t, b)) => (format!("{},{}", t.re, t.im), b.to_string()),
            None => (",".to_string(), "none".to_string()),
        };
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            i + 1,
            tr.word,
            tr.samples.len(),
            tr.max_residual,
            gap.map_or("NA".to_string(), |g| g.to_string()),
            last.p.re,
            last.p.im,
            last.multiplier.norm(),
            bt,
            reason
        ));
    }
    out.text("summary.csv", &summary)?;

    if let (Some(rows), Some(spec)) = (&persistence, &doc.persistence) {
        let mut s = String::from("t_re,t_im,radius,budget,epsilon,coverage\n");
        for r in rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t.re, r.t.im, spec.radius, r.coverage.budget, r.coverage.epsilon, r.coverage.coverage
            ));
        }
        out.text("persistence.csv", &s)?;
    }

    if cm.svg && !tracks.is_empty() {
        let all: Vec<Complex<f64>> = tracks.iter().flat_map(|(t, _)| t.samples.iter().map(|s| s.p)).collect();
        let r = all.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-12) * 1.1;
        let mut p = Plot::disk("fixed-point paths", r);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
        for (i, (tr, _)) in tracks.iter().enumerate() {
            let pts: Vec<(f64, f64)> = tr.samples.iter().map(|s| (s.p.re, s.p.im)).collect();
            p.polyline(&pts, colors[i % colors.len()]);
        }
        out.svg("tracks.svg", &p.render("Re p", "Im p"))?;
    }
    Ok(out.written)
}
