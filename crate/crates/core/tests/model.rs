mod common;

use common::rng;
use plaplace::model::{validate, TabulatedF};
use plaplace::{BoundaryConditions, Coefficient, ExtReal, Nonlinearity, PExponent, Problem};
use proptest::prelude::*;
use rand::Rng;

fn families() -> Vec<Nonlinearity> {
    let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x * x * x + 0.5 * x).collect();
    let table = serde_json::from_value(serde_json::json!({ "x": xs, "y": ys })).unwrap();
    vec![
        Nonlinearity::power(1.0, 3.0),
        Nonlinearity::power_sum(&[(2.0, 0.7), (0.3, 2.2), (1.5, 1.0)]),
        Nonlinearity::sinh(0.8, 1.3),
        Nonlinearity::Tabulated(TabulatedF {
            table,
            f0: Some(ExtReal::Finite(0.5)),
            finf: Some(ExtReal::Infinity),
        }),
        Nonlinearity::custom(
            "atan",
            |s: f64| s.atan() + s,
            Some(ExtReal::Finite(2.0)),
            Some(ExtReal::Finite(1.0)),
        ),
    ]
}

#[test]
fn limits_agree_with_extreme_ratios() {
    let mut r = rng(3);
    for _ in 0..30 {
        let p = PExponent::new(r.gen_range(1.3..4.0)).unwrap();
        let pm1 = p.p() - 1.0;
        // one term exactly at p - 1 so at least one limit is finite; the other
        // exponent is far enough away that its share at 1e∓8 is below 1e-5
        let above = pm1 < 1.0 || r.gen_bool(0.5);
        let other = if above {
            pm1 + r.gen_range(0.75..2.0)
        } else {
            r.gen_range(0.05..pm1 - 0.75)
        };
        let f = Nonlinearity::power_sum(&[(r.gen_range(0.5..3.0), pm1), (r.gen_range(0.5..3.0), other)]);
        let (f0, finf) = f.limits(&p).unwrap();
        for (limit, s) in [(f0, 1e-8), (finf, 1e8)] {
            if let ExtReal::Finite(v) = limit {
                let direct = f.ratio(s, p.p());
                assert!(
                    (direct - v).abs() <= 1e-4 * v.max(1e-300),
                    "{f:?} at {s}: {direct} vs {v}"
                );
            }
        }
    }
    let p2 = PExponent::new(2.0).unwrap();
    let f = Nonlinearity::sinh(1.5, 2.0);
    let (f0, _) = f.limits(&p2).unwrap();
    assert!((f.ratio(1e-8, 2.0) - f0.value()).abs() < 1e-4 * f0.value());
}

#[test]
fn sinh_limits_follow_growth_at_the_origin() {
    // A sinh(Bs) / s^(p-1) behaves like AB s^(2-p) near 0
    let f = Nonlinearity::sinh(1.0, 1.0);
    let p3 = PExponent::new(3.0).unwrap();
    assert_eq!(f.limits(&p3).unwrap(), (ExtReal::Infinity, ExtReal::Infinity));
    assert!(f.ratio(1e-6, 3.0) > 1e5);
    let p15 = PExponent::new(1.5).unwrap();
    assert_eq!(f.limits(&p15).unwrap(), (ExtReal::Finite(0.0), ExtReal::Infinity));
    assert!(f.ratio(1e-6, 1.5) < 1e-2);
}

#[test]
fn antiderivative_differentiates_to_f() {
    let mut r = rng(5);
    for f in families() {
        for _ in 0..50 {
            let y: f64 = r.gen_range(-3.5..3.5);
            let h = 1e-5 * y.abs().max(0.1);
            let fd = (f.antiderivative(y + h) - f.antiderivative(y - h)) / (2.0 * h);
            let exact = f.eval(y);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3),
                "{f:?} at {y}: {fd} vs {exact}"
            );
        }
    }
}

#[test]
fn documented_evaluations() {
    let cube = Nonlinearity::power(1.0, 3.0);
    assert_eq!(cube.antiderivative(2.0), 4.0);
    assert_eq!(Nonlinearity::power(5.0, 1.0).eval(-3.0), -15.0);
    let sinh = Nonlinearity::sinh(1.0, 1.0);
    assert!((sinh.antiderivative(1.0) - (1f64.cosh() - 1.0)).abs() < 1e-14);
    let p2 = PExponent::new(2.0).unwrap();
    assert_eq!(cube.limits(&p2).unwrap(), (ExtReal::Finite(0.0), ExtReal::Infinity));
    assert_eq!(
        Nonlinearity::power(5.0, 1.0).limits(&p2).unwrap(),
        (ExtReal::Finite(5.0), ExtReal::Finite(5.0))
    );
}

#[test]
fn validation_reports_witnesses() {
    let f = Nonlinearity::power(1.0, 3.0);
    let ok = Problem::new(2.0, Coefficient::Constant(0.0), Coefficient::Constant(1.0), f.clone()).unwrap();
    assert!(validate(&ok, &BoundaryConditions::dirichlet(&ok.p)).passed());

    let bad_w = Problem::new(
        2.0,
        Coefficient::Constant(0.0),
        Coefficient::Polynomial(vec![-0.5, 1.0]),
        f,
    )
    .unwrap();
    let report = validate(&bad_w, &BoundaryConditions::dirichlet(&bad_w.p));
    let c1 = report.find("C1: w > 0").unwrap();
    assert!(!c1.passed);
    assert_eq!(c1.witness, Some(0.0));

    let report = validate(&ok, &BoundaryConditions::new(0.0, 0.0));
    assert!(!report.find("beta").unwrap().passed);
    assert!(report.into_result().is_err());
}

#[test]
fn negative_q_is_allowed() {
    let prob = Problem::new(
        2.5,
        Coefficient::Polynomial(vec![-3.0, 1.0]),
        Coefficient::Constant(1.0),
        Nonlinearity::power(1.0, 2.0),
    )
    .unwrap();
    assert!(validate(&prob, &BoundaryConditions::dirichlet(&prob.p)).passed());
}

#[test]
fn tabulated_without_limits_is_a_config_error() {
    let f: Nonlinearity =
        serde_json::from_str(r#"{"tabulated": {"table": {"x": [0, 1, 2], "y": [0, 1, 4]}}}"#).unwrap();
    let p = PExponent::new(2.0).unwrap();
    assert!(matches!(f.limits(&p), Err(plaplace::Error::Config(_))));
}

proptest! {
    #[test]
    fn every_family_is_odd_with_even_nonnegative_antiderivative(s in -4.0f64..4.0, k in 0usize..5) {
        let f = &families()[k];
        prop_assert_eq!(f.eval(-s), -f.eval(s));
        prop_assert!(s <= 0.0 || f.eval(s) > 0.0);
        prop_assert_eq!(f.antiderivative(-s), f.antiderivative(s));
        prop_assert!(f.antiderivative(s) >= 0.0);
    }
}
