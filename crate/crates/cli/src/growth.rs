use std::path::PathBuf;

use holofol::holonomy::Word;
use holofol::jets::io::JetDocument;
use holofol::jets::{
    classify_growth, derived_series, growth_function, limit_homomorphism, ClassifyGrowthOptions, GrowthClass,
    GrowthTable, LimitHomomorphismEstimate,
};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::report::Outputs;
use crate::svg::Plot;
use crate::{header, read_input, CliError, GrowthArgs};

const DEFAULT_BUDGET: usize = 1_000_000;
const LIMIT_MS: [u64; 3] = [10, 100, 1000];
const LIMIT_PAIRS: usize = 20;

#[derive(Serialize)]
struct LimitReport<'a> {
    estimate: Option<&'a LimitHomomorphismEstimate>,
    final_values: Option<&'a [Vec<f64>]>,
    convergence: Option<f64>,
    error: Option<String>,
}

fn verdict_text(table: &GrowthTable, opts: &ClassifyGrowthOptions) -> String {
    let mut s = format!("all statements hold modulo order-{} jets\n", table.order);
    match classify_growth(table, opts) {
        None => s.push_str("verdict: inconclusive (fewer than 6 rows)\n"),
        Some(v) => {
            let class = match v.class {
                GrowthClass::Polynomial { degree } => format!("polynomial(degree {degree})"),
                GrowthClass::Exponential { rate } => format!("exponential(rate {rate})"),
                GrowthClass::Inconclusive => "inconclusive".to_string(),
            };
            s.push_str(&format!("verdict: {class}\n"));
            s.push_str(&format!(
                "power fit: slope {} intercept {} residual {}\n",
                v.power_fit.slope, v.power_fit.intercept, v.power_fit.residual
            ));
            s.push_str(&format!(
                "exponential fit: slope {} intercept {} residual {}\n",
                v.exponential_fit.slope, v.exponential_fit.intercept, v.exponential_fit.residual
            ));
            s.push_str(&format!("margin: {}\nmin_rate: {}\n", v.margin, v.min_rate));
            s.push_str(&format!("window: n = {}..={}\n", v.window.0, v.window.1));
            if !v.note.is_empty() {
                s.push_str(&format!("note: {}\n", v.note));
            }
        }
    }
    s.push_str(&format!(
        "products: {}\nduplicates: {}\nsymmetric generators: {}\nball bound holds: {}\n",
        table.products,
        table.duplicates,
        table.symmetric_size,
        table.satisfies_ball_bound()
    ));
    s
}

fn growth_svg(table: &GrowthTable) -> String {
    let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.n as f64, (r.gamma as f64).ln())).collect();
    let ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max).max(1.0);
    let mut p = Plot::new("growth function", (0.0, table.rows.len().saturating_sub(1).max(1) as f64), (0.0, ymax));
    p.polyline(&pts, "#1f77b4");
    p.render("n", "log gamma(n)")
}

pub fn run(args: &GrowthArgs) -> Result<Vec<PathBuf>, CliError> {
    let cm = &args.common;
    let text = read_input(&cm.input)?;
    let set = JetDocument::from_json(&text)
        .and_then(|d| d.to_generator_set())
        .map_err(|e| CliError::Input(e.to_string()))?;
    let budget = cm.budget.unwrap_or(DEFAULT_BUDGET);
    let classify = ClassifyGrowthOptions::default();
    let (n, k) = set.shape().unwrap_or((1, 1));
    let settings = vec![
        ("n", n.to_string()),
        ("k", k.to_string()),
        ("n_max", args.n_max.to_string()),
        ("budget", budget.to_string()),
        ("depth", args.depth.to_string()),
        ("cap", args.cap.to_string()),
        ("classify_margin", classify.margin.to_string()),
        ("classify_min_rate", classify.min_rate.to_string()),
        ("classify_window", classify.window.to_string()),
    ];
    let mut out = Outputs::new(&cm.out, header("growth", &[&text], args, cm.seed, settings))?;

    let table = match growth_function(&set, args.n_max, budget) {
        Ok(t) => t,
        Err(e) => {
            out.text("growth.csv", &e.partial.to_csv())?;
            out.text("verdict.txt", &verdict_text(&e.partial, &classify))?;
            return Err(CliError::Budget(format!("{e}; partial table up to radius {} written", e.radius - 1)));
        }
    };
    out.text("growth.csv", &table.to_csv())?;
    out.text("verdict.txt", &verdict_text(&table, &classify))?;

    let series = derived_series(&set, args.depth, args.cap).map_err(|e| CliError::Input(e.to_string()))?;
    out.text("derived_series.txt", &series.to_text())?;

    if set.generators.iter().all(|g| g.is_tangent_to_identity()) {
        let mut rng = ChaCha8Rng::seed_from_u64(cm.seed);
        let z0: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let words = Word::enumerate_reduced(set.generators.len(), 2);
        let pairs: Vec<(usize, usize)> = (0..LIMIT_PAIRS)
            .map(|_| (rng.gen_range(0..words.len()), rng.gen_range(0..words.len())))
            .collect();
        let result = limit_homomorphism(&set, &z0, &LIMIT_MS, &words, &pairs);
        let report = match &result {
            Ok(est) => LimitReport {
                estimate: Some(est),
                final_values: Some(est.estimate()),
                convergence: Some(est.convergence()),
                error: None,
            },
            Err(e) => LimitReport {
                estimate: None,
                final_values: None,
                convergence: None,
                error: Some(e.to_string()),
            },
        };
        out.json("limit.json", &report)?;
        if let Ok(est) = &result {
            let comps = 2 * n;
            let mut s = String::from("word,m,scale");
            for i in 0..comps {
                s.push_str(&format!(",f{}", i + 1));
            }
            s.push('\n');
            for sample in &est.samples {
                for (w, v) in est.words.iter().zip(&sample.values) {
                    s.push_str(&format!("{w},{},{}", sample.m, sample.scale));
                    for x in v {
                        s.push_str(&format!(",{x}"));
                    }
                    s.push('\n');
                }
            }
            out.text("limit.csv", &s)?;
            let mut a = String::from("m,pair,first,second,residual\n");
            for sample in &est.samples {
                for (i, (&(p, q), r)) in est.pairs.iter().zip(&sample.additivity).enumerate() {
                    a.push_str(&format!("{},{},{},{},{}\n", sample.m, i + 1, est.words[p], est.words[q], r));
                }
            }
            out.text("additivity.csv", &a)?;
        }
    }

    if cm.svg {
        out.svg("growth.svg", &growth_svg(&table))?;
    }
    Ok(out.written)
}
