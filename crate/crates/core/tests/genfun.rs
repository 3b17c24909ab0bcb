mod common;

use common::{inverse_sine_integral, pi_p_quadrature, rng};
use plaplace::genfun::{pi_p, sgn_pow, sp, sp_prime, PExponent};
use rand::Rng;

#[test]
#[allow(clippy::excessive_precision)]
fn quadrature_oracle_is_sound() {
    // reference values in 30-digit arithmetic
    let refs = [
        (1.3, 7.28857535932087811829600460839),
        (1.5, 4.83679830462458093491754202038),
        (3.0, 2.41839915231229046745877101019),
        (5.0, 2.13791866423119022685036874501),
    ];
    for (p, v) in refs {
        let q = pi_p_quadrature(p);
        assert!((q - v).abs() < 1e-12 * v, "p = {p}: {q}");
    }
    assert!((pi_p_quadrature(2.0) - std::f64::consts::PI).abs() < 1e-13);
}

#[test]
fn half_period_matches_quadrature() {
    for p in [1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5] {
        let closed = pi_p(p).unwrap();
        let quad = pi_p_quadrature(p);
        assert!((closed - quad).abs() <= 1e-10 * quad, "p = {p}: {closed} vs {quad}");
    }
}

#[test]
fn inverse_integral_recovers_argument() {
    // on [0, π_p/2], x = ∫_0^{S_p(x)} (1 - t^p)^(-1/p) dt
    for p in [1.5, 2.0, 3.0, 5.0] {
        let e = PExponent::new(p).unwrap();
        for i in 1..=20 {
            let x = 0.5 * e.pi_p() * i as f64 / 21.0;
            let back = inverse_sine_integral(p, e.sp(x));
            assert!((back - x).abs() < 1e-9, "p = {p}, x = {x}: {back}");
        }
    }
}

#[test]
fn pythagorean_identity_everywhere() {
    for p in [1.3, 1.5, 2.0, 3.0, 5.0, 8.0] {
        let e = PExponent::new(p).unwrap();
        for i in 0..1000 {
            let x = -3.0 * e.pi_p() + 6.0 * e.pi_p() * i as f64 / 999.0;
            let v = e.sine(x);
            let id = v.s.abs().powf(p) + v.c.abs().powf(p);
            assert!((id - 1.0).abs() < 1e-10, "p = {p}, x = {x}: {id}");
        }
    }
}

#[test]
fn differential_equation_residual() {
    // d/dx (S')^(p-1) + (p-1) S^(p-1) = 0 by central differences
    let mut r = rng(11);
    for p in [1.5, 2.0, 3.0, 5.0] {
        let e = PExponent::new(p).unwrap();
        let h = 1e-5;
        for _ in 0..100 {
            let x = r.gen_range(h..2.0 * e.pi_p() - h);
            let d = (sgn_pow(e.sp_prime(x + h), p - 1.0) - sgn_pow(e.sp_prime(x - h), p - 1.0)) / (2.0 * h);
            let res = d + (p - 1.0) * sgn_pow(e.sp(x), p - 1.0);
            assert!(res.abs() < 1e-6, "p = {p}, x = {x}: {res}");
        }
    }
}

#[test]
fn derivative_matches_difference_quotient() {
    for p in [1.5, 3.0] {
        let e = PExponent::new(p).unwrap();
        let h = 1e-6;
        for i in 1..200 {
            let x = 2.0 * e.pi_p() * i as f64 / 200.0;
            let fd = (e.sp(x + h) - e.sp(x - h)) / (2.0 * h);
            assert!((fd - e.sp_prime(x)).abs() < 1e-6, "p = {p}, x = {x}");
        }
    }
}

#[test]
fn sine_special_case() {
    for i in 0..=1000 {
        let x = 10.0 * i as f64 / 1000.0;
        assert!((sp(2.0, x).unwrap() - x.sin()).abs() < 1e-10);
        assert!((sp_prime(2.0, x).unwrap() - x.cos()).abs() < 1e-10);
    }
}

#[test]
fn free_functions_validate_exponent() {
    assert!(sp(1.0, 0.3).is_err());
    assert!(sp_prime(0.5, 0.3).is_err());
    assert!(pi_p(f64::NAN).is_err());
    assert!(pi_p(-2.0).is_err());
}

#[test]
fn documented_values() {
    assert!((pi_p(3.0).unwrap() - 4.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt())).abs() < 1e-14);
    assert_eq!(sgn_pow(-2.0, 3.0), -8.0);
    assert_eq!(sgn_pow(0.0, 0.5), 0.0);
    assert_eq!(sgn_pow(4.0, 0.5), 2.0);
    let e = PExponent::new(3.0).unwrap();
    assert!((e.sp(0.5 * e.pi_p()) - 1.0).abs() < 1e-12);
    assert!(e.sp_prime(0.5 * e.pi_p()).abs() < 1e-10);
    assert!((1.0 / e.p() + 1.0 / e.p_conj() - 1.0).abs() < 1e-14);
}

#[test]
fn shared_exponent_across_threads() {
    let e = PExponent::new(2.7).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|k| {
            let e = e.clone();
            std::thread::spawn(move || e.sp(0.3 * k as f64))
        })
        .collect();
    for (k, h) in handles.into_iter().enumerate() {
        assert_eq!(h.join().unwrap(), e.sp(0.3 * k as f64));
    }
}
