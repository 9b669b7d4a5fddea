use std::f64::consts::TAU;
use std::sync::Arc;

use holofol::foliation::samples::{linear_saddle, random_form};
use holofol::foliation::FoliationNormalForm;
use holofol::holonomy::{
    canonical_loop, find_hyperbolic_fixed_points, holonomy_generators, lift_path, orbit_density_probe,
    FixedPointOptions, Germ, HolonomyGroup, HolonomyOptions, LiftField, LiftOptions, LoopPath, PolyGerm,
    ProbeOptions, PseudoGroup, Word,
};
use holofol::scalar::qc_frac;
use holofol::{QComplex, C64};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn expected_multiplier(lambda: C64) -> C64 {
    (c(0.0, TAU) * lambda).exp()
}

/// `P = x`, `Q = c y` has `lambda = 1 / (1 - c)` at `[1:0:0]`.
fn linear_model(lambda: C64) -> FoliationNormalForm<QComplex> {
    let cc = c(1.0, 0.0) - c(1.0, 0.0) / lambda;
    // exact for the chosen test values (halves)
    let q = |x: f64| ((x * 2.0).round() as i64, 2);
    let (re, im) = (q(cc.re), q(cc.im));
    linear_saddle(qc_frac(re.0, re.1, im.0, im.1))
}

fn test_points(radius: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            Complex::from_polar(radius * (0.3 + 0.7 * t), TAU * 0.618 * k as f64)
        })
        .collect()
}

#[test]
fn linear_saddle_holonomy_matches_closed_form() {
    for lambda in [c(0.0, 2.0), c(-1.0, 1.0), c(-2.0, 0.0)] {
        let form = linear_model(lambda);
        let opts = HolonomyOptions::new(TOL, 0.1);
        let hol = holonomy_generators::<_, f64>(&form, &opts).unwrap();
        assert_eq!(hol.maps.len(), 1);
        assert!((hol.lambdas[0] - lambda).norm() < 1e-12);
        let m = hol.maps[0].multiplier;
        let want = expected_multiplier(lambda);
        assert!((m - want).norm() <= 1e-4 * want.norm(), "lambda {lambda}: {m} vs {want}");
        // the chart field is linear in u, so the holonomy is exactly linear
        let z = c(0.01, 0.005);
        let hz = hol.maps[0].eval(z).unwrap();
        assert!((hz - want * z).norm() <= 1e-6 * (want * z).norm());
        // multiplier via word_multiplier on the pseudo-group
        let (wm, err) = hol.group.word_multiplier(&Word::generator(0), c(0.0, 0.0)).unwrap();
        assert!((wm - want).norm() <= 1e-6 * want.norm() + err);
    }
}

#[test]
fn trivial_loop_and_reverse() {
    let form = linear_model(c(-1.0, 1.0));
    let field = LiftField::<f64>::from_form(&form);
    let opts = LiftOptions::new(TOL, 10.0);
    let q = c(2.0, 0.0);
    let z0 = c(0.02, -0.01);
    let triv = lift_path(&field, &LoopPath::trivial(q), z0, &opts).unwrap();
    assert_eq!(triv.endpoint, z0);
    let alpha = canonical_loop(q, &[c(0.0, 0.0)], &[1.0], 0, 0.0).unwrap();
    let there_and_back = alpha.then(&alpha.reversed());
    let out = lift_path(&field, &there_and_back, z0, &opts).unwrap();
    assert!((out.endpoint - z0).norm() <= 2.0 * TOL * z0.norm().max(1e-3) * 10.0);
}

fn generic_x2() -> FoliationNormalForm<QComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    loop {
        let f = random_form(&mut rng, 2, true);
        let sing = match f.singularities_at_infinity::<f64>() {
            Ok(s) => s,
            Err(_) => continue,
        };
        let finite = sing.iter().filter(|s| s.chart == holofol::foliation::Chart::InfinityX).count();
        if sing.len() == 3 && finite == 3 && sing.iter().all(|s| s.multiplicity == 1) {
            return f;
        }
    }
}

fn generic_group() -> HolonomyGroup<f64> {
    holonomy_generators(&generic_x2(), &HolonomyOptions::new(TOL, 0.05)).unwrap()
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1e-2)
}

#[test]
fn generic_instance_has_three_generators_with_expected_multipliers() {
    let hol = generic_group();
    assert_eq!(hol.maps.len(), 3);
    for (map, lambda) in hol.maps.iter().zip(&hol.lambdas) {
        let want = expected_multiplier(*lambda);
        // exact only to first order: the local model is not linear, but the
        // derivative at the leaf is
        assert!((map.multiplier - want).norm() <= 1e-6 * want.norm().max(1.0));
    }
}

#[test]
fn homotopy_concatenation_inverse() {
    let hol = generic_group();
    let field = hol.field.clone();
    let opts = LiftOptions::new(TOL, 1e3);
    let q = hol.disk.base;
    let pts = test_points(0.02, 20);
    let bound = 10.0 * TOL;
    for j in 0..3 {
        // same winding around p_j with a smaller circle
        let mut small = hol.radii.clone();
        small[j] *= 0.6;
        let other = canonical_loop(q, &hol.points, &small, j, 0.0).unwrap();
        let h = &hol.maps[j];
        for &z in &pts {
            let a = h.eval(z).unwrap();
            let b = lift_path(&field, &other, z, &opts).unwrap().endpoint;
            assert!(close(b, a, bound), "homotopy j={j} z={z}: {a} vs {b}");
            // h^{-1} is only defined where h lands inside the disk
            if a.norm() < hol.disk.radius {
                let back = h.eval_inv(a).unwrap();
                assert!(close(back, z, bound), "inverse j={j}");
            }
        }
    }
    // alpha_0 then alpha_1 equals h_1 ∘ h_0
    let cat = hol.maps[0].path.then(&hol.maps[1].path);
    for &z in &pts {
        let direct = lift_path(&field, &cat, z, &opts).unwrap().endpoint;
        let composed = hol.maps[1].eval(hol.maps[0].eval(z).unwrap()).unwrap();
        assert!(close(direct, composed, bound));
        let w: Word = "ba".parse().unwrap();
        assert!(close(hol.group.evaluate_word(&w, z).unwrap(), composed, 1e-15));
    }
}

#[test]
fn product_of_canonical_loops_is_trivial() {
    // [0:1:0] is regular, so the loop around all finite points bounds a disk
    let hol = generic_group();
    let order = &hol.ccw_order;
    let mut letters = Vec::new();
    for &j in order.iter().rev() {
        letters.push(holofol::holonomy::Letter::new(j, false));
    }
    let w = Word::new(letters);
    for z in test_points(0.01, 10) {
        let out = hol.group.evaluate_word(&w, z).unwrap();
        assert!(close(out, z, 1e-7), "{z} -> {out}");
    }
}

#[test]
fn multipliers_do_not_depend_on_disk_radius() {
    let f = generic_x2();
    let a = holonomy_generators::<_, f64>(&f, &HolonomyOptions::new(TOL, 0.05)).unwrap();
    let b = holonomy_generators::<_, f64>(&f, &HolonomyOptions::new(TOL, 0.025)).unwrap();
    for (x, y) in a.maps.iter().zip(&b.maps) {
        assert!(close(x.multiplier, y.multiplier, 1e-9));
    }
    let taylor = a.maps[0].taylor(3, 0.01, 32).unwrap();
    assert!(close(taylor[0].0, a.maps[0].multiplier, 1e-6));
    assert!(taylor.iter().all(|(_, err)| err.is_finite()));
}

fn linear_group(lambdas: &[C64], delta: f64) -> PseudoGroup<f64> {
    let gens: Vec<Arc<dyn Germ<f64>>> = lambdas
        .iter()
        .map(|&l| Arc::new(PolyGerm::linear(l, delta)) as Arc<dyn Germ<f64>>)
        .collect();
    PseudoGroup::new(gens, delta, "linear")
}

#[test]
fn words_on_linear_generators() {
    let (l, m) = (c(0.5, 0.3), c(1.1, -0.4));
    let g = linear_group(&[l, m], 10.0);
    let z = c(0.2, 0.1);
    assert_eq!(g.evaluate_word(&Word::empty(), z).unwrap(), z);
    let aa: Word = "aA".parse().unwrap();
    assert!((g.evaluate_word(&aa, z).unwrap() - z).norm() < 1e-15);
    let w: Word = "abbA".parse().unwrap();
    assert!((g.evaluate_word(&w, z).unwrap() - m * m * z).norm() < 1e-14);
    let (mult, err) = g.word_multiplier(&Word::commutator(&"a".parse().unwrap(), &"b".parse().unwrap()), z).unwrap();
    assert!((mult - 1.0).norm() < 1e-9 + err);
    // chain rule: multiplier of w w at a fixed point is the square
    let q = PseudoGroup::new(
        vec![Arc::new(PolyGerm::quadratic(l, c(1.0, 0.5), 1.0)) as Arc<dyn Germ<f64>>],
        1.0,
        "quadratic",
    );
    let p = (c(1.0, 0.0) - l) / c(1.0, 0.5); // l p + a p^2 = p
    let (m1, e1) = q.word_multiplier(&Word::generator(0), p).unwrap();
    let (m2, e2) = q.word_multiplier(&Word::generator(0).power(2), p).unwrap();
    assert!((m2 - m1 * m1).norm() <= 1e-8 + e1 + e2);
}

#[test]
fn fixed_points_of_single_hyperbolic_generator() {
    let g = linear_group(&[c(0.6, 0.2)], 1.0);
    let opts = FixedPointOptions {
        max_len: 1,
        ..FixedPointOptions::new(0.1, 0.5)
    };
    let found = find_hyperbolic_fixed_points(&g, &opts);
    // "a" and "A" both fix the origin
    assert_eq!(found.records.len(), 2);
    for r in &found.records {
        assert!(r.location.norm() < 1e-12 && r.hyperbolic);
    }
}

fn nonsolvable_pair(delta: f64) -> PseudoGroup<f64> {
    let f = PolyGerm::quadratic(expected_multiplier(c(0.2763, 0.03)), c(1.0, 0.0), delta);
    let g = PolyGerm::new(
        vec![c(0.0, 0.0), expected_multiplier(c(0.4142, 0.02)), c(0.0, 0.0), c(0.5, 0.5)],
        delta,
    );
    PseudoGroup::new(vec![Arc::new(f), Arc::new(g)], delta, "pair")
}

#[test]
fn fixed_points_grow_with_word_length() {
    let g = nonsolvable_pair(0.3);
    let mut counts = Vec::new();
    for len in 1..=4 {
        let opts = FixedPointOptions {
            max_len: len,
            ..FixedPointOptions::new(0.02, 0.2)
        };
        let found = find_hyperbolic_fixed_points(&g, &opts);
        for r in &found.records {
            let fresh = g.evaluate_word(&r.word, r.location).unwrap();
            assert!((fresh - r.location).norm() <= opts.residual_tol);
        }
        let distinct = found
            .records
            .iter()
            .filter(|r| r.location.norm() > 1e-6)
            .count();
        counts.push((found.records.len(), distinct));
    }
    assert!(counts.windows(2).all(|w| w[1].0 > w[0].0), "{counts:?}");
    assert!(counts[3].1 >= 4, "{counts:?}");
}

#[test]
fn density_probe_properties() {
    let g = nonsolvable_pair(0.3);
    let mut last = 0.0;
    for budget in [0, 100, 1000, 10_000] {
        let opts = ProbeOptions::new(0.1, 0.01, budget, 42);
        let cov = orbit_density_probe(&g, &opts);
        assert!(cov.coverage >= last);
        last = cov.coverage;
        assert_eq!(cov, orbit_density_probe(&g, &opts));
        if budget == 0 {
            // each start covers the mesh points within epsilon
            assert!(cov.visited > 0 && cov.visited <= 4 * 5);
        }
    }
    // a single contraction only draws a discrete spiral
    let spiral = linear_group(&[expected_multiplier(c(0.1234, 0.2))], 0.3);
    let cov = orbit_density_probe(&spiral, &ProbeOptions::new(0.1, 0.01, 10_000, 1));
    assert!(cov.coverage < 0.2, "{}", cov.coverage);
}

#[test]
fn reference_pair_reaches_coverage_target() {
    let (g, opts) = holofol::holonomy::reference_pair();
    let cov = orbit_density_probe(&g, &opts);
    assert!(cov.coverage > 0.9, "{}", cov.coverage);
    let small = orbit_density_probe(&g, &ProbeOptions { budget: 1000, ..opts.clone() });
    assert!(small.coverage <= cov.coverage);
}
