//! Independent oracles and random problem generators shared by the
//! integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use plaplace::{BoundaryConditions, Coefficient, Nonlinearity, Problem};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule for `∫_a^b g`.
pub fn composite<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(t, wt) in &rule {
            sum += wt * g(mid + 0.5 * h * t);
        }
    }
    0.5 * h * sum
}

/// `∫_0^u (1 - t^p)^(-1/p) dt` for `0 ≤ u ≤ 1`, split at `u/2`, with
/// polynomial grading towards both ends so the endpoint algebraic behaviour
/// becomes smooth.
pub fn inverse_sine_integral(p: f64, u: f64) -> f64 {
    let g = |t: f64| (1.0 - t.powf(p)).powf(-1.0 / p);
    let m = 0.5 * u;
    // t = m s^k near 0
    let k = 6.0;
    let left = composite(|s| g(m * s.powf(k)) * m * k * s.powf(k - 1.0), 0.0, 1.0, 40);
    // t = u - (u - m) s^j near u; 1 - t^p formed without cancellation. At
    // u = 1 the choice of j turns (1 - t)^(-1/p) dt into a multiple of s ds.
    let j = if u == 1.0 { 2.0 * p / (p - 1.0) } else { 2.0 };
    let right = composite(
        |s| {
            let d = (u - m) * s.powf(j);
            let ln_t = u.ln() + (-d / u).ln_1p();
            let one_minus = -(p * ln_t).exp_m1();
            one_minus.powf(-1.0 / p) * (u - m) * j * s.powf(j - 1.0)
        },
        0.0,
        1.0,
        40,
    );
    left + right
}

/// `π_p = 2 ∫_0^1 (1 - t^p)^(-1/p) dt` by quadrature.
pub fn pi_p_quadrature(p: f64) -> f64 {
    2.0 * inverse_sine_integral(p, 1.0)
}

/// Peak of the positive solution of `-y'' = y³`, `y(0) = y(1) = 0`. The
/// first integral `y'²/2 + y⁴/4 = Y⁴/4` and symmetry give
/// `Y = 2√2 ∫_0^1 dt / √(1 - t⁴)`. With `t = 1 - s²` the integrand becomes
/// `2 / √((1 + t)(1 + t²))`, which is smooth.
pub fn cubic_ground_state_peak() -> f64 {
    let integral = composite(
        |s| {
            let t = 1.0 - s * s;
            2.0 / ((1.0 + t) * (1.0 + t * t)).sqrt()
        },
        0.0,
        1.0,
        10,
    );
    2.0 * 2f64.sqrt() * integral
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random problem: `p ∈ [1.3, 4]`, quadratic `q`, positive trigonometric `w`,
/// two-term sign-power sum `f`.
pub fn random_problem(rng: &mut StdRng) -> Problem {
    let p = rng.gen_range(1.3..4.0);
    let q = Coefficient::Polynomial(vec![
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    ]);
    let a = rng.gen_range(1.0..3.0);
    let w = Coefficient::Trig {
        a,
        b: rng.gen_range(-0.4..0.4) * a,
        c: rng.gen_range(-0.4..0.4) * a,
        omega: rng.gen_range(0.5..6.0),
    };
    let f = Nonlinearity::power_sum(&[
        (rng.gen_range(0.5..3.0), rng.gen_range(0.5..1.0) * (p - 1.0)),
        (rng.gen_range(0.5..3.0), rng.gen_range(1.0..2.5) * (p - 1.0)),
    ]);
    Problem::new(p, q, w, f).unwrap()
}

/// Random separated boundary angles in the admissible ranges.
pub fn random_bc(rng: &mut StdRng, problem: &Problem) -> BoundaryConditions {
    let pi_p = problem.p.pi_p();
    BoundaryConditions::new(rng.gen_range(0.0..0.95) * pi_p, rng.gen_range(0.05..1.0) * pi_p)
}

/// Constant-coefficient variant of [`random_problem`].
pub fn random_autonomous_problem(rng: &mut StdRng) -> Problem {
    let base = random_problem(rng);
    let q = Coefficient::Constant(rng.gen_range(-2.0..2.0));
    let w = Coefficient::Constant(rng.gen_range(0.5..3.0));
    Problem::with_exponent(base.p.clone(), q, w, base.f.clone())
}

pub fn simple(p: f64, q: f64, w: f64, f: Nonlinearity) -> Problem {
    Problem::new(p, Coefficient::Constant(q), Coefficient::Constant(w), f).unwrap()
}

/// `max |a - b| / max |b|` over paired samples.
pub fn rel_max_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let den = b.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    num / den.max(1e-300)
}
