use holofol::foliation::io::{singularity_csv, FoliationDocument};
use holofol::foliation::samples::{linear_saddle, random_form};
use holofol::foliation::{
    class_membership, classify_lambda, Chart, ClassifyOptions, FoliationNormalForm, Line, SearchRegion,
    ValidationError,
};
use holofol::poly::resultant::resultant_in_y;
use holofol::poly::roots::polynomial_roots;
use holofol::poly::BivariatePolynomial;
use holofol::scalar::{qc, qc_frac};
use holofol::{QComplex, C64};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Poly = BivariatePolynomial<QComplex>;

fn poly(terms: &[((u32, u32), i64)]) -> Poly {
    Poly::from_terms(terms.iter().map(|&(e, c)| (e, qc(c, 0))))
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

#[test]
fn validation_examples() {
    let lin = linear_saddle(qc(0, 2));
    assert_eq!(lin.degree(), 1);

    let f = FoliationNormalForm::validate(
        poly(&[((0, 1), 1)]),
        poly(&[((1, 0), 1)]),
        poly(&[((2, 0), 1), ((0, 2), 1)]),
        2,
    );
    assert!(f.is_ok());

    let f = FoliationNormalForm::validate(poly(&[((2, 0), 1)]), poly(&[((1, 1), 1)]), Poly::zero(), 2);
    assert_eq!(f.unwrap_err(), ValidationError::CommonFactor);

    let f = FoliationNormalForm::validate(poly(&[((1, 0), 1)]), Poly::zero(), poly(&[((1, 0), 1), ((0, 0), 1)]), 1);
    assert_eq!(f.unwrap_err(), ValidationError::NonHomogeneousG { n: 1 });

    let f = FoliationNormalForm::validate(poly(&[((3, 0), 1)]), poly(&[((0, 0), 1)]), Poly::zero(), 2);
    assert_eq!(f.unwrap_err(), ValidationError::DegreeBoundViolated { found: 3, n: 2 });

    let f = FoliationNormalForm::validate(poly(&[((1, 0), 1)]), poly(&[((0, 0), 1)]), Poly::zero(), 2);
    assert!(matches!(f.unwrap_err(), ValidationError::DegreeMismatch { .. }));

    // x d/dx + y d/dy: the radial pencil has degree 0, not 1
    let f = FoliationNormalForm::validate(poly(&[((1, 0), 1)]), poly(&[((0, 1), 1)]), Poly::zero(), 1);
    assert!(matches!(f.unwrap_err(), ValidationError::DegreeMismatch { .. }));
}

#[test]
fn tangency_with_line_through_saddle() {
    let lambda = qc(0, 2);
    let f = linear_saddle(lambda.clone());
    // y = x + 1 parametrized by x
    let line = Line::affine([qc(0, 0), qc(1, 0)], [qc(1, 0), qc(1, 0)]);
    let t = f.tangency_polynomial(&line).unwrap();
    assert_eq!(t.degree(), Some(1));
    let root = -t.coeff(0) / t.coeff(1);
    let expected = lambda.clone() / (qc(1, 0) - lambda);
    assert_eq!(root, expected);

    let eigenline = Line::affine([qc(0, 0), qc(0, 0)], [qc(1, 0), qc(0, 0)]);
    assert!(f.tangency_polynomial(&eigenline).is_err());
}

fn random_line<R: Rng>(rng: &mut R) -> Line<QComplex> {
    let mut r = || qc_frac(rng.gen_range(-50..=50), 7, rng.gen_range(-50..=50), 11);
    Line::affine([r(), r()], [r(), r()])
}

#[test]
fn degree_equals_generic_tangency_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        for invariant in [true, false] {
            let f = random_form(&mut rng, n, invariant);
            for _ in 0..5 {
                let t = f.tangency_polynomial(&random_line(&mut rng)).unwrap();
                assert_eq!(t.degree(), Some(n as usize));
            }
        }
    }
    let f = FoliationNormalForm::validate(
        poly(&[((0, 1), 1)]),
        poly(&[((1, 0), 1)]),
        poly(&[((2, 0), 1), ((0, 2), 1)]),
        2,
    )
    .unwrap();
    for _ in 0..5 {
        assert_eq!(f.tangency_polynomial(&random_line(&mut rng)).unwrap().degree(), Some(2));
    }
}

#[test]
fn infinity_chart_examples() {
    // radial pencil written with g = 1, n = 0
    let radial = FoliationNormalForm::validate(Poly::zero(), Poly::zero(), poly(&[((0, 0), 1)]), 0).unwrap();
    let field = radial.infinity_chart();
    assert!(!field.u_divides_du());
    assert!(!radial.is_line_at_infinity_invariant());

    // g != 0 always makes the u-free part of du non-zero
    let f = FoliationNormalForm::validate(
        poly(&[((0, 1), 1)]),
        poly(&[((1, 0), 1)]),
        poly(&[((2, 0), 1), ((0, 2), 1)]),
        2,
    )
    .unwrap();
    assert!(!f.is_line_at_infinity_invariant());

    // dy = 0: horizontal lines all pass through [1:0:0], L_inf is one of them
    let horizontal = FoliationNormalForm::validate(poly(&[((0, 0), 1)]), Poly::zero(), Poly::zero(), 0).unwrap();
    assert!(horizontal.is_line_at_infinity_invariant());
}

#[test]
fn invariance_agrees_with_tangency_on_infinity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..=3 {
        for invariant in [true, false] {
            if n == 0 && invariant {
                continue;
            }
            let f = random_form(&mut rng, n, invariant);
            let flagged = f.tangency_polynomial(&Line::at_infinity()).is_err();
            assert_eq!(flagged, f.is_line_at_infinity_invariant());
            assert_eq!(flagged, invariant);
        }
    }
}

fn cross(a: [C64; 2], b: [C64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).norm() / (a[0].norm().hypot(a[1].norm()) * b[0].norm().hypot(b[1].norm()))
}

#[test]
fn chart_direction_fields_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, inv) in [(1, true), (2, true), (2, false), (3, false), (4, true)] {
        let f = random_form(&mut rng, n, inv);
        let (a, b) = f.affine_field();
        let (a, b) = (a.to_numeric::<f64>(), b.to_numeric::<f64>());
        for chart in [Chart::InfinityX, Chart::InfinityY] {
            let cf = f.chart_field(chart).to_numeric::<f64>();
            for _ in 0..100 {
                let x = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let y = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let (fa, fb) = (a.eval(&x, &y), b.eval(&x, &y));
                // pushforward by (1/w, z/w) with (w, z) = (x, y) or (y, x)
                let (w, z, fw, fz) = match chart {
                    Chart::InfinityX => (x, y, fa, fb),
                    _ => (y, x, fb, fa),
                };
                let push = [-fw / (w * w), (fz * w - z * fw) / (w * w)];
                let [u, v] = chart.from_affine([x, y]);
                let back = chart.to_affine([u, v]);
                assert!(close(back[0], x, 1e-12) && close(back[1], y, 1e-12));
                let field = cf.eval(u, v);
                assert!(cross(push, field) < 1e-9, "chart {chart} n={n}");
            }
        }
    }
}

#[test]
fn linear_saddle_singularity() {
    let f = linear_saddle(qc(0, 2));
    let search = f.affine_singularities(&SearchRegion::<f64>::centered(4.0));
    assert_eq!(search.singularities.len(), 1);
    let s = &search.singularities[0];
    assert!(s.location[0].norm() < 1e-12 && s.location[1].norm() < 1e-12);
    assert!(close(s.eigenvalues[0], Complex::new(1.0, 0.0), 1e-12));
    assert!(close(s.eigenvalues[1], Complex::new(0.0, 2.0), 1e-12));
    assert!(close(s.lambda, Complex::new(0.0, 2.0), 1e-12));
    assert!(close(s.lambda_inv, Complex::new(0.0, -0.5), 1e-12));
}

#[test]
fn product_form_singularities() {
    // (x^2 - 1) d/dx + y d/dy
    let f = FoliationNormalForm::validate(poly(&[((2, 0), 1), ((0, 0), -1)]), poly(&[((0, 1), 1)]), Poly::zero(), 2)
        .unwrap();
    let found = f.affine_singularities(&SearchRegion::<f64>::centered(3.0)).singularities;
    assert_eq!(found.len(), 2);
    assert!(close(found[0].location[0], Complex::new(-1.0, 0.0), 1e-12));
    assert!(close(found[1].location[0], Complex::new(1.0, 0.0), 1e-12));
    for s in &found {
        assert!(s.location[1].norm() < 1e-12);
        assert!(s.residual <= 1e-10);
    }
}

#[test]
fn affine_count_matches_resultant_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 1..=3 {
        for invariant in [true, false] {
            let f = random_form(&mut rng, n, invariant);
            let (a, b) = f.affine_field();
            let res = resultant_in_y(&a, &b).squarefree_part();
            let xs = polynomial_roots(&res.to_numeric::<f64>());
            let res_x = resultant_in_y(&a.swap_variables(), &b.swap_variables()).squarefree_part();
            let ys = polynomial_roots(&res_x.to_numeric::<f64>());
            let bound = xs
                .iter()
                .chain(&ys)
                .map(|z| z.re.abs().max(z.im.abs()))
                .fold(1.0f64, f64::max);
            let mut region = SearchRegion::<f64>::centered(bound * 1.2 + 0.5);
            region.density = 64;
            let found = f.affine_singularities(&region).singularities;
            assert_eq!(found.len(), xs.len(), "n={n} invariant={invariant}");
            for s in &found {
                assert!(s.residual <= 1e-10);
                assert!(xs.iter().any(|x| (x - s.location[0]).norm() < 1e-6));
            }
        }
    }
}

#[test]
fn generic_x2_has_three_points_at_infinity() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut generic = 0;
    while generic < 5 {
        let f = random_form(&mut rng, 2, true);
        let sing = f.singularities_at_infinity::<f64>().unwrap();
        assert_eq!(sing.iter().map(|s| s.multiplicity).sum::<usize>(), 3);
        // small integer coefficients occasionally produce a double root
        let restricted = f.infinity_chart().dv.at_x_zero();
        if restricted.squarefree_part().degree() != Some(3) {
            continue;
        }
        generic += 1;
        assert_eq!(sing.len(), 3);
        for s in &sing {
            assert_eq!(s.multiplicity, 1);
            assert!(s.residual <= 1e-10);
            assert_eq!(s.location[0], Complex::new(0.0, 0.0));
        }
    }
}

#[test]
fn constructed_double_root_is_flagged() {
    // restriction to L_inf: Q_2(1, v) - v P_2(1, v) = -v (v - 1)^2
    let f = FoliationNormalForm::validate(
        poly(&[((0, 2), 1), ((1, 1), -2), ((0, 0), 1)]),
        poly(&[((1, 1), -1), ((1, 0), 1)]),
        Poly::zero(),
        2,
    )
    .unwrap();
    let sing = f.singularities_at_infinity::<f64>().unwrap();
    let total: usize = sing.iter().map(|s| s.multiplicity).sum();
    assert_eq!(total, 3);
    let double: Vec<_> = sing.iter().filter(|s| s.multiplicity == 2).collect();
    assert_eq!(double.len(), 1);
    assert!(close(double[0].location[1], Complex::new(1.0, 0.0), 1e-12));
    let analysis = class_membership(&f, &SearchRegion::<f64>::centered(4.0), &ClassifyOptions::default());
    assert!(analysis.membership.multiple_root);
    assert!(!analysis.membership.s);
}

#[test]
fn linear_model_characteristic_number_at_infinity() {
    // P = x, Q = c y: chart field (-u, (c - 1) v), so lambda = 1 / (1 - c)
    for (c, lambda) in [
        (qc_frac(1, 1, 1, 2), Complex::new(0.0, 2.0)),
        (qc_frac(3, 2, 1, 2), Complex::new(-1.0, 1.0)),
        (qc_frac(3, 2, 0, 1), Complex::new(-2.0, 0.0)),
    ] {
        let f = linear_saddle(c);
        let sing = f.singularities_at_infinity::<f64>().unwrap();
        assert_eq!(sing.len(), 2);
        let at_x = sing.iter().find(|s| s.chart == Chart::InfinityX).unwrap();
        assert!(close(at_x.lambda, lambda, 1e-12));
        assert!(sing.iter().any(|s| s.chart == Chart::InfinityY));
    }
}

#[test]
fn singularities_require_invariant_line() {
    let radial = FoliationNormalForm::validate(Poly::zero(), Poly::zero(), poly(&[((0, 0), 1)]), 0).unwrap();
    assert!(radial.singularities_at_infinity::<f64>().is_err());
}

#[test]
fn classification_examples() {
    let o = ClassifyOptions::default();
    let c = classify_lambda(Complex::new(0.0, 2.0), &o);
    assert_eq!((c.hyperbolic, c.reduced, c.saddle_type), (Some(true), Some(true), Some(true)));
    let c = classify_lambda(Complex::new(-1.0, 0.0), &o);
    assert_eq!((c.hyperbolic, c.saddle_type), (Some(false), Some(true)));
    let c = classify_lambda(Complex::new(2.0, 0.0), &o);
    assert_eq!(c.reduced, Some(false));
    assert_eq!(c.rational, Some((2, 1)));
    let c = classify_lambda(Complex::new(2f64.sqrt(), 0.0), &o);
    assert_eq!(c.reduced, Some(true));
    let c = classify_lambda(Complex::new(1.0 / 3.0, 0.0), &o);
    assert_eq!(c.rational, Some((1, 3)));
    assert_eq!(c.saddle_type, Some(false));
}

#[test]
fn membership_flags() {
    let o = ClassifyOptions::default();
    let region = SearchRegion::<f64>::centered(4.0);
    // lambda = 2i at the origin; at infinity 1/(1 - 2i) and its partner, both non-real
    let a = class_membership(&linear_saddle(qc(0, 2)), &region, &o).membership;
    assert!(a.s && a.t && a.x && a.h);
    assert_eq!((a.affine_count, a.infinity_count), (1, 2));

    let a = class_membership(&linear_saddle(qc(2, 0)), &region, &o).membership;
    assert!(!a.t && !a.h);

    let radial = FoliationNormalForm::validate(Poly::zero(), Poly::zero(), poly(&[((0, 0), 1)]), 0).unwrap();
    let a = class_membership(&radial, &region, &o).membership;
    assert!(!a.x && !a.h);
}

#[test]
fn document_round_trip_and_csv() {
    let text = r#"{"n":1,"P":[{"i":1,"j":0,"re":"1","im":"0"}],"Q":[{"i":0,"j":1,"re":"0","im":"2"}],"g":[]}"#;
    let doc = FoliationDocument::from_json(text).unwrap();
    let form = doc.to_form().unwrap();
    assert_eq!(form, linear_saddle(qc(0, 2)));
    assert_eq!(FoliationDocument::from_form(&form).to_form().unwrap(), form);

    let err = FoliationDocument::from_json("{\"n\": 1,\n \"P\": [").unwrap_err();
    assert!(err.to_string().contains("line 2"));

    let analysis = class_membership(&form, &SearchRegion::<f64>::centered(2.0), &ClassifyOptions::default());
    let csv = singularity_csv(&analysis.affine);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[1].starts_with("affine,"));
    assert!(lines[1].contains(",1,1,1,1,"));
}

