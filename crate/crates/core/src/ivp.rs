//! Initial value problems for the equation written as the first-order system
//!
//! ```text
//! y' = z^(p*-1)
//! z' = (p-1) q(x) y^(p-1) - (p-1) w(x) f(y)
//! ```
//!
//! with `y(0) = η₁`, `z(0) = η₂^(p-1)`, and the generalized energy
//! `E = |y'|^p/p - q|y|^p/p + wF(y)` evaluated along a trajectory.

use crate::error::{Error, Result};
use crate::genfun::{sgn_pow, PExponent};
use crate::model::Problem;
use crate::ode::{self, OdeSystem, Options, RhsFailure, Solution};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Relative size of `|z|` below which the step is capped when `p > 2`.
const Z_EPS: f64 = 1e-12;
const Z_STEP_CAP: f64 = 1e-4;
const LOCAL_TOL_FACTOR: f64 = 1e-2;
/// Crossings closer than this to 0 or 1 are endpoint zeros missed by round-off.
const ENDPOINT_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
enum Forcing {
    Nonlinear,
    /// `f(y)` replaced by `λ y^(p-1)`
    Linear(f64),
}

struct System<'a> {
    problem: &'a Problem,
    forcing: Forcing,
    pm1: f64,
    inv_exp: f64,
    z_max: f64,
}

impl OdeSystem<2> for System<'_> {
    fn rhs(&self, x: f64, s: &[f64; 2], ds: &mut [f64; 2]) -> Result<(), RhsFailure> {
        let [y, z] = *s;
        let yp = sgn_pow(y, self.pm1);
        let q = self.problem.q.value(x);
        let w = self.problem.w.value(x);
        let wf = match self.forcing {
            Forcing::Nonlinear => w * self.problem.f.eval(y),
            Forcing::Linear(lambda) => lambda * w * yp,
        };
        ds[0] = sgn_pow(z, self.inv_exp);
        ds[1] = self.pm1 * (q * yp - wf);
        Ok(())
    }

    fn step_limit(&mut self, _x: f64, s: &[f64; 2]) -> Option<f64> {
        // y' = z^(1/(p-1)) is only Hölder at z = 0 when p > 2
        if self.pm1 <= 1.0 {
            return None;
        }
        let z = s[1].abs();
        self.z_max = self.z_max.max(z);
        (z < Z_EPS * (1.0 + self.z_max)).then_some(Z_STEP_CAP)
    }
}

/// A sampled solution `(y, z)` on `[0, 1]` with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    p: PExponent,
    solution: Solution<2>,
    tol: f64,
    lambda: Option<f64>,
}

impl Trajectory {
    pub fn exponent(&self) -> &PExponent {
        &self.p
    }

    /// Linear-problem eigenvalue parameter, when this is an eigenfunction.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn steps(&self) -> usize {
        self.solution.accepted
    }

    pub fn rejected_steps(&self) -> usize {
        self.solution.rejected
    }

    pub fn grid(&self) -> &[f64] {
        &self.solution.xs
    }

    /// `(y, z)` at the integration nodes.
    pub fn node_states(&self) -> &[[f64; 2]] {
        &self.solution.ys
    }

    /// `(y, z)` at `x ∈ [0, 1]` via dense output.
    pub fn state(&self, x: f64) -> (f64, f64) {
        let [y, z] = self.solution.eval(x);
        (y, z)
    }

    pub fn y(&self, x: f64) -> f64 {
        self.state(x).0
    }

    pub fn z(&self, x: f64) -> f64 {
        self.state(x).1
    }

    /// `y'(x) = z^(p*-1)`
    pub fn yprime(&self, x: f64) -> f64 {
        self.p.pow_inv(self.z(x))
    }

    /// Interior sign changes of `y` between integration nodes, refined on the
    /// dense output. Zeros at the endpoints are not reported.
    pub fn sign_changes(&self) -> Vec<f64> {
        let xs = &self.solution.xs;
        let ys = &self.solution.ys;
        let scale = ys.iter().fold(0.0_f64, |m, s| m.max(s[0].abs()));
        // values this small are treated as zero so endpoint zeros are not crossings
        let floor = 1e-9 * scale;
        let sign = |v: f64| if v.abs() <= floor { 0.0 } else { v.signum() };
        let mut out = Vec::new();
        let mut last: Option<(usize, f64)> = None;
        for (i, s) in ys.iter().enumerate() {
            let sg = sign(s[0]);
            if sg == 0.0 {
                continue;
            }
            if let Some((j, prev)) = last {
                if prev != sg {
                    let (mut lo, mut hi) = (xs[j], xs[i]);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if self.y(mid).signum() == prev {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let x = 0.5 * (lo + hi);
                    if x > ENDPOINT_BAND && x < 1.0 - ENDPOINT_BAND {
                        out.push(x);
                    }
                }
            }
            last = Some((i, sg));
        }
        out
    }

    /// Samples `(x, y, y', z)` on a uniform grid of `points` points.
    pub fn sample(&self, points: usize) -> Vec<[f64; 4]> {
        let m = points.max(2) - 1;
        (0..=m)
            .map(|i| {
                let x = i as f64 / m as f64;
                let (y, z) = self.state(x);
                [x, y, self.p.pow_inv(z), z]
            })
            .collect()
    }
}

fn run(problem: &Problem, forcing: Forcing, eta1: f64, eta2: f64, tol: f64) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !eta1.is_finite() || !eta2.is_finite() {
        return Err(Error::Domain("initial data must be finite".into()));
    }
    let p = &problem.p;
    let mut sys = System {
        problem,
        forcing,
        pm1: p.p() - 1.0,
        inv_exp: p.p_conj() - 1.0,
        z_max: 0.0,
    };
    let local = (tol * LOCAL_TOL_FACTOR).max(1e-14);
    let opts = Options {
        rtol: local,
        atol: local,
        max_steps: DEFAULT_MAX_STEPS,
        ..Options::default()
    };
    let z0 = p.pow_pm1(eta2);
    let solution = ode::integrate(&mut sys, 0.0, [eta1, z0], 1.0, &opts)?;
    Ok(Trajectory {
        p: p.clone(),
        solution,
        tol,
        lambda: match forcing {
            Forcing::Linear(l) => Some(l),
            Forcing::Nonlinear => None,
        },
    })
}

/// Solves the nonlinear equation with `y(0) = η₁`, `y'(0) = η₂` on `[0, 1]`.
pub fn integrate(problem: &Problem, eta1: f64, eta2: f64, tol: f64) -> Result<Trajectory> {
    run(problem, Forcing::Nonlinear, eta1, eta2, tol)
}

/// Solves the linear eigenvalue equation
/// `-(y'^(p-1))' = (p-1)(λw - q) y^(p-1)` with the same initial data.
pub fn integrate_linear(problem: &Problem, lambda: f64, eta1: f64, eta2: f64, tol: f64) -> Result<Trajectory> {
    run(problem, Forcing::Linear(lambda), eta1, eta2, tol)
}

/// `E(x) = |y'|^p/p - q|y|^p/p + w F(y)`.
///
/// Uses the trajectory's own forcing: for eigenfunctions `F(y) = λ|y|^p/p`.
pub fn energy(problem: &Problem, traj: &Trajectory, x: f64) -> f64 {
    let p = problem.p.p();
    let (y, z) = traj.state(x);
    let kinetic = z.abs().powf(problem.p.p_conj()) / p;
    let ay = y.abs().powf(p);
    let potential = match traj.lambda {
        Some(lambda) => lambda * ay / p,
        None => problem.f.antiderivative(y),
    };
    kinetic - problem.q.value(x) * ay / p + problem.w.value(x) * potential
}

/// Right side of the energy identity `E' = -q'|y|^p/p + w'F(y)`.
pub fn energy_derivative(problem: &Problem, traj: &Trajectory, x: f64) -> f64 {
    let p = problem.p.p();
    let y = traj.y(x);
    let ay = y.abs().powf(p);
    let potential = match traj.lambda {
        Some(lambda) => lambda * ay / p,
        None => problem.f.antiderivative(y),
    };
    -problem.q.derivative(x) * ay / p + problem.w.derivative(x) * potential
}
