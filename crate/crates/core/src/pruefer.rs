//! Generalized Prüfer angle `θ` and radius `r` with `y = r S_p(θ)`,
//! `y' = r S_p'(θ)`.
//!
//! For the nonlinear equation the pair `(θ, ln r)` obeys
//!
//! ```text
//! θ'    = |S_p'(θ)|^p + (w g(y) - q) |S_p(θ)|^p
//! ln r' = S_p'(θ) S_p(θ)^(p-1) (1 + q - w g(y)),      g(y) = f(y) / y^(p-1)
//! ```
//!
//! and for the linear problem `g ≡ λ`, so the angle decouples. Wherever
//! `θ ∈ π_p ℤ` the angle moves with unit speed, so each multiple of `π_p` is
//! crossed exactly once and only upwards.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::PExponent;
use crate::model::{BoundaryConditions, Problem};
use crate::ode::{self, OdeSystem, Options, RhsFailure, Solution};

/// `|y|` below which `f(y)/y^(p-1)` is replaced by its limit `f₀`.
const Y_EPS: f64 = 1e-100;
/// `ln(1e-300)`
const LN_R_MIN: f64 = -690.775_527_898_213_7;
/// A crossing of `kπ_p` this close (in angle) to the terminal angle is
/// attributed to the boundary point `x = 1`, not the interior.
pub const ENDPOINT_ANGLE_TOL: f64 = 1e-7;
const LOCAL_TOL_FLOOR: f64 = 1e-14;
/// Large amplitudes oscillate fast; `ρ = 1e6` for a cubic needs about 2e6 steps.
const MAX_STEPS: usize = 5_000_000;

/// Per-step tolerance for a requested global angle tolerance. The right side
/// `1 + (c - 1)|S_p(θ)|^p` is only Hölder smooth in `θ` at the zeros of `S_p`
/// (`p < 2`) or of `S_p'` (`p > 2`), where the embedded error estimate is
/// optimistic.
fn local_tol(p: f64, tol: f64) -> f64 {
    let factor = if p < 2.0 { 1e-4 } else { 1e-3 };
    (tol * factor).max(LOCAL_TOL_FLOOR)
}

struct NonlinearAngle<'a> {
    problem: &'a Problem,
    pm1: f64,
    f0: Option<f64>,
}

impl OdeSystem<2> for NonlinearAngle<'_> {
    fn rhs(&self, x: f64, s: &[f64; 2], ds: &mut [f64; 2]) -> Result<(), RhsFailure> {
        let [theta, log_r] = *s;
        if log_r < LN_R_MIN {
            return Err(RhsFailure::RadiusCollapse);
        }
        let sv = self.problem.p.sine(theta);
        let q = self.problem.q.value(x);
        let w = self.problem.w.value(x);
        let r = log_r.exp();
        let y = r * sv.s;
        // S^(p-1) = sgn(S) |S|^p / |S|
        let s_pm1 = if sv.s == 0.0 { 0.0 } else { sv.s_pow / sv.s };
        let g = if y.abs() > Y_EPS {
            Some(self.problem.f.ratio(y, self.pm1 + 1.0))
        } else {
            self.f0
        };
        match g {
            Some(g) => {
                ds[0] = sv.c_pow + (w * g - q) * sv.s_pow;
                ds[1] = sv.c * s_pm1 * (1.0 + q - w * g);
            }
            None => {
                let rp = (self.pm1 * log_r).exp();
                let wf = w * self.problem.f.eval(y) / rp;
                ds[0] = sv.c_pow + wf * sv.s - q * sv.s_pow;
                ds[1] = sv.c * ((1.0 + q) * s_pm1 - wf);
            }
        }
        if ds[0].is_finite() && ds[1].is_finite() {
            Ok(())
        } else {
            Err(RhsFailure::Other(format!(
                "non-finite Pruefer derivative at theta = {theta}"
            )))
        }
    }
}

struct LinearAngle<'a> {
    problem: &'a Problem,
    lambda: f64,
}

impl OdeSystem<1> for LinearAngle<'_> {
    fn rhs(&self, x: f64, s: &[f64; 1], ds: &mut [f64; 1]) -> Result<(), RhsFailure> {
        let sv = self.problem.p.sine(s[0]);
        let coef = self.lambda * self.problem.w.value(x) - self.problem.q.value(x);
        ds[0] = sv.c_pow + coef * sv.s_pow;
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Track {
    Nonlinear(Solution<2>),
    Linear(Solution<1>),
}

/// An interior zero of `y`: the angle passes `k π_p` at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub k: u64,
    pub x: f64,
}

/// Prüfer angle (and radius) along `[0, 1]`.
#[derive(Debug, Clone)]
pub struct AnglePath {
    p: PExponent,
    track: Track,
    alpha: f64,
    terminal: f64,
    zero_count: usize,
    crossings: Vec<Crossing>,
}

impl AnglePath {
    fn new(p: PExponent, track: Track, alpha: f64) -> Self {
        let terminal = match &track {
            Track::Nonlinear(s) => s.terminal()[0],
            Track::Linear(s) => s.terminal()[0],
        };
        let zero_count = count_interior_multiples(terminal, p.pi_p());
        let mut path = Self {
            p,
            track,
            alpha,
            terminal,
            zero_count,
            crossings: Vec::new(),
        };
        if path.is_dense() {
            path.crossings = path.locate_crossings();
        }
        path
    }

    fn is_dense(&self) -> bool {
        match &self.track {
            Track::Nonlinear(s) => !s.segments.is_empty(),
            Track::Linear(s) => !s.segments.is_empty(),
        }
    }

    pub fn exponent(&self) -> &PExponent {
        &self.p
    }

    /// `θ(1)`, the lifted terminal angle.
    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    /// `θ(0) = α`
    pub fn initial(&self) -> f64 {
        self.alpha
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    /// Interior crossings of multiples of `π_p`, in increasing `x`. Empty when
    /// the path was computed without dense output.
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn grid(&self) -> &[f64] {
        match &self.track {
            Track::Nonlinear(s) => &s.xs,
            Track::Linear(s) => &s.xs,
        }
    }

    /// Angle at the integration nodes.
    pub fn theta_nodes(&self) -> Vec<f64> {
        match &self.track {
            Track::Nonlinear(s) => s.ys.iter().map(|v| v[0]).collect(),
            Track::Linear(s) => s.ys.iter().map(|v| v[0]).collect(),
        }
    }

    /// Radius at the integration nodes (identically 1 for the linear problem).
    pub fn r_nodes(&self) -> Vec<f64> {
        match &self.track {
            Track::Nonlinear(s) => s.ys.iter().map(|v| v[1].exp()).collect(),
            Track::Linear(s) => vec![1.0; s.xs.len()],
        }
    }

    pub fn theta(&self, x: f64) -> f64 {
        match &self.track {
            Track::Nonlinear(s) => s.eval(x)[0],
            Track::Linear(s) => s.eval(x)[0],
        }
    }

    pub fn r(&self, x: f64) -> f64 {
        match &self.track {
            Track::Nonlinear(s) => s.eval(x)[1].exp(),
            Track::Linear(_) => 1.0,
        }
    }

    /// `(y, y') = (r S_p(θ), r S_p'(θ))`
    pub fn reconstruct(&self, x: f64) -> (f64, f64) {
        let (theta, r) = match &self.track {
            Track::Nonlinear(s) => {
                let [t, lr] = s.eval(x);
                (t, lr.exp())
            }
            Track::Linear(s) => (s.eval(x)[0], 1.0),
        };
        let sv = self.p.sine(theta);
        (r * sv.s, r * sv.c)
    }

    fn locate_crossings(&self) -> Vec<Crossing> {
        let pi_p = self.p.pi_p();
        let xs = self.grid().to_vec();
        let thetas = self.theta_nodes();
        let mut out = Vec::with_capacity(self.zero_count);
        let mut i = 0;
        for k in 1..=self.zero_count as u64 {
            let level = k as f64 * pi_p;
            while i + 1 < thetas.len() && thetas[i + 1] < level {
                i += 1;
            }
            if i + 1 >= thetas.len() {
                break;
            }
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.theta(mid) < level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(Crossing { k, x: 0.5 * (lo + hi) });
        }
        out
    }
}

fn count_interior_multiples(terminal: f64, pi_p: f64) -> usize {
    let top = terminal - ENDPOINT_ANGLE_TOL;
    if top <= pi_p {
        return 0;
    }
    // number of k >= 1 with k π_p < top
    let k = (top / pi_p).ceil() as usize;
    k.saturating_sub(1)
}

/// Number of interior zeros recorded on `path`.
pub fn zero_count(path: &AnglePath) -> usize {
    path.zero_count()
}

fn options(p: f64, tol: f64, dense: bool) -> Result<Options> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let local = local_tol(p, tol);
    Ok(Options {
        rtol: local,
        atol: local,
        dense,
        max_steps: MAX_STEPS,
        ..Options::default()
    })
}

pub(crate) fn nonlinear_path(
    problem: &Problem,
    bc: &BoundaryConditions,
    rho: f64,
    tol: f64,
    dense: bool,
) -> Result<AnglePath> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("amplitude rho must be positive, got {rho}")));
    }
    bc.check(&problem.p)?;
    let opts = options(problem.p.p(), tol, dense)?;
    let f0 = problem
        .limits()
        .ok()
        .map(|(f0, _)| f0)
        .filter(|v| v.is_finite())
        .map(|v| v.value());
    let mut sys = NonlinearAngle {
        problem,
        pm1: problem.p.p() - 1.0,
        f0,
    };
    let sol = ode::integrate(&mut sys, 0.0, [bc.alpha, rho.ln()], 1.0, &opts)?;
    Ok(AnglePath::new(problem.p.clone(), Track::Nonlinear(sol), bc.alpha))
}

pub(crate) fn linear_path(
    problem: &Problem,
    bc: &BoundaryConditions,
    lambda: f64,
    tol: f64,
    dense: bool,
) -> Result<AnglePath> {
    if !lambda.is_finite() {
        return Err(Error::Domain("lambda must be finite".into()));
    }
    bc.check(&problem.p)?;
    let opts = options(problem.p.p(), tol, dense)?;
    let mut sys = LinearAngle { problem, lambda };
    let sol = ode::integrate(&mut sys, 0.0, [bc.alpha], 1.0, &opts)?;
    Ok(AnglePath::new(problem.p.clone(), Track::Linear(sol), bc.alpha))
}

/// Prüfer path of the nonlinear equation with `y(0) = ρS_p(α)`, `y'(0) = ρS_p'(α)`.
pub fn angle_nonlinear(problem: &Problem, bc: &BoundaryConditions, rho: f64, tol: f64) -> Result<AnglePath> {
    nonlinear_path(problem, bc, rho, tol, true)
}

/// Prüfer angle of the linear problem at parameter `λ`, starting from `α`.
pub fn angle_linear(problem: &Problem, bc: &BoundaryConditions, lambda: f64, tol: f64) -> Result<AnglePath> {
    linear_path(problem, bc, lambda, tol, true)
}
