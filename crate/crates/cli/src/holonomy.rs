use std::path::PathBuf;
use std::sync::Arc;

use holofol::foliation::io::FoliationDocument;
use holofol::foliation::Chart;
use holofol::holonomy::io::{atlas_csv, coverage_csv, LoopSpec};
use holofol::holonomy::{
    canonical_radii, find_hyperbolic_fixed_points, holonomy_generators, orbit_density_probe, FixedPointOptions, Germ,
    HolonomyError, HolonomyOptions, Letter, ProbeOptions, PseudoGroup, DEFAULT_BUDGET,
};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::Outputs;
use crate::svg::Plot;
use crate::{header, read_input, CliError, HolonomyArgs};

const CAUCHY_SAMPLES: usize = 64;
const ORBIT_POINTS: usize = 4000;

fn c(p: [f64; 2]) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

fn holonomy_error(e: HolonomyError) -> CliError {
    match e {
        HolonomyError::Singularities(_)
        | HolonomyError::MultipleRoot { .. }
        | HolonomyError::NoSingularities
        | HolonomyError::LoopCount { .. } => CliError::Input(e.to_string()),
        HolonomyError::Loop(_) | HolonomyError::Disk(_) | HolonomyError::Lift { .. } => CliError::Solver(e.to_string()),
    }
}

/// Pseudo-orbit of `start` under random letters, skipping letters that
/// leave the domain.
fn orbit(group: &PseudoGroup<f64>, start: Complex<f64>, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = start;
    let mut pts = vec![(z.re, z.im)];
    for _ in 0..ORBIT_POINTS {
        let l = Letter::new(rng.gen_range(0..group.rank()), rng.gen_bool(0.5));
        if let Ok((next, _)) = group.apply_letter_d(l, z) {
            z = next;
            pts.push((z.re, z.im));
        }
    }
    pts
}

pub fn run(args: &HolonomyArgs) -> Result<Vec<PathBuf>, CliError> {
    let cm = &args.common;
    let text = read_input(&cm.input)?;
    let form = FoliationDocument::from_json(&text)
        .and_then(|d| d.to_form())
        .map_err(|e| CliError::Input(e.to_string()))?;
    let loops_text = match &args.loops {
        Some(p) => read_input(p)?,
        None => String::new(),
    };
    let spec: LoopSpec = if loops_text.is_empty() {
        LoopSpec {
            q: None,
            r: None,
            loops: Vec::new(),
        }
    } else {
        serde_json::from_str(&loops_text)
            .map_err(|e| CliError::Input(format!("loop spec at line {}, column {}: {e}", e.line(), e.column())))?
    };

    let tol = cm.tol.unwrap_or(1e-10);
    let disk_radius = spec.r.unwrap_or(args.disk_radius);
    if !(disk_radius > 0.0 && disk_radius.is_finite()) {
        return Err(CliError::Input(format!("disk radius must be positive, got {disk_radius}")));
    }
    let mut opts = HolonomyOptions::new(tol, disk_radius);
    opts.base = spec.q.map(c);
    if !spec.loops.is_empty() {
        // each loop sets the radius around the nearest singular point
        let sing = form
            .singularities_at_infinity::<f64>()
            .map_err(|e| CliError::Input(e.to_string()))?;
        let points: Vec<Complex<f64>> = sing
            .iter()
            .filter(|s| s.chart == Chart::InfinityX)
            .map(|s| s.location[1])
            .collect();
        let mut radii = canonical_radii(&points, opts.default_loop_radius);
        for l in &spec.loops {
            if !(l.radius > 0.0) {
                return Err(CliError::Input(format!("loop radius must be positive, got {}", l.radius)));
            }
            let nearest = points
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - c(l.center)).norm().total_cmp(&(b.1 - c(l.center)).norm()))
                .map(|(i, _)| i);
            if let Some(i) = nearest {
                radii[i] = l.radius;
            }
        }
        opts.loop_radii = Some(radii);
    }
    let hol = holonomy_generators(&form, &opts).map_err(holonomy_error)?;

    let rho = 0.5 * disk_radius;
    let surrogates = hol
        .maps
        .par_iter()
        .map(|m| m.surrogate(args.surrogate_order, rho, CAUCHY_SAMPLES))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Solver(format!("surrogate: {e}")))?;
    let sgroup = PseudoGroup::new(
        surrogates.into_iter().map(|g| Arc::new(g) as Arc<dyn Germ<f64>>).collect(),
        disk_radius,
        "taylor surrogates",
    );

    let budget = cm.budget.unwrap_or(DEFAULT_BUDGET);
    let mut fp = FixedPointOptions::new(0.1 * disk_radius, 0.9 * disk_radius);
    fp.max_len = args.max_len;
    let atlas = find_hyperbolic_fixed_points(&sgroup, &fp);
    let probe_radius = 0.5 * disk_radius;
    let epsilon = probe_radius / 20.0;
    let coverage: Vec<_> = [0, budget / 100, budget / 10, budget]
        .par_iter()
        .map(|&b| orbit_density_probe(&sgroup, &ProbeOptions::new(probe_radius, epsilon, b, cm.seed)))
        .collect();

    let settings = vec![
        ("lift_tol", format!("{tol:?}")),
        ("disk_radius", disk_radius.to_string()),
        ("base_point", format!("{}", hol.disk.base)),
        ("surrogate_order", args.surrogate_order.to_string()),
        ("surrogate_rho", rho.to_string()),
        ("max_len", args.max_len.to_string()),
        ("fixed_point_tol", format!("{:?}", fp.tol)),
        ("fixed_point_residual_tol", format!("{:?}", fp.residual_tol)),
        ("tau", fp.tau.to_string()),
        ("budget", budget.to_string()),
        ("probe_radius", probe_radius.to_string()),
        ("epsilon", epsilon.to_string()),
    ];
    let mut out = Outputs::new(&cm.out, header("holonomy", &[&text, &loops_text], args, cm.seed, settings))?;

    let mut gen = String::from(
        "generator,v_re,v_im,loop_radius,lambda_re,lambda_im,mult_re,mult_im,expected_re,expected_im,rel_err\n",
    );
    for (j, m) in hol.maps.iter().enumerate() {
        let expected = (Complex::new(0.0, std::f64::consts::TAU) * hol.lambdas[j]).exp();
        let rel = (m.multiplier - expected).norm() / expected.norm();
        gen.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            j + 1,
            hol.points[j].re,
            hol.points[j].im,
            hol.radii[j],
            hol.lambdas[j].re,
            hol.lambdas[j].im,
            m.multiplier.re,
            m.multiplier.im,
            expected.re,
            expected.im,
            rel
        ));
    }
    out.text("generators.csv", &gen)?;
    out.text("atlas.csv", &atlas_csv(&atlas.records))?;
    let d = atlas.diagnostics;
    out.text(
        "atlas_diagnostics.txt",
        &format!(
            "words: {}\nnewton runs: {}\nnot converged: {}\nleft domain: {}\nnot hyperbolic: {}\noutside: {}\nduplicates: {}\nrecords: {}\n",
            d.words,
            d.newton_runs,
            d.not_converged,
            d.left_domain,
            d.not_hyperbolic,
            d.outside,
            d.duplicates,
            atlas.records.len()
        ),
    )?;
    out.text("coverage.csv", &coverage_csv(&coverage))?;

    if cm.svg {
        let mut p = Plot::disk("pseudo-orbit", disk_radius);
        p.points(&orbit(&sgroup, Complex::new(0.25 * disk_radius, 0.0), cm.seed), 1.0, "#1f77b4");
        out.svg("orbit.svg", &p.render("Re z", "Im z"))?;
        let mut p = Plot::disk("hyperbolic fixed points", disk_radius);
        let pts: Vec<(f64, f64)> = atlas.records.iter().map(|r| (r.location.re, r.location.im)).collect();
        p.points(&pts, 2.0, "#d62728");
        out.svg("atlas.svg", &p.render("Re p", "Im p"))?;
        let pts: Vec<(f64, f64)> = coverage.iter().map(|r| (r.budget as f64, r.coverage)).collect();
        let mut p = Plot::new("coverage vs budget", (0.0, budget.max(1) as f64), (0.0, 1.0));
        p.polyline(&pts, "#2ca02c");
        out.svg("coverage.svg", &p.render("budget", "coverage"))?;
    }
    Ok(out.written)
}
