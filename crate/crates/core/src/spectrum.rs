//! Eigenvalues of the half-linear problem
//!
//! ```text
//! -(y'^(p-1))' + (p-1) q y^(p-1) = (p-1) λ w y^(p-1)
//! ```
//!
//! under the same separated boundary conditions. `λ_n` is the unique `λ` with
//! terminal Prüfer angle `φ(1; λ) = nπ_p + β`; the angle is increasing in `λ`,
//! so bisection on the angle finds it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ivp::{self, Trajectory};
use crate::model::{BoundaryConditions, Problem};
use crate::pruefer::{self, AnglePath};

pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;
/// Largest `|λ|` tried while bracketing.
pub const LAMBDA_LIMIT: f64 = 1e12;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub n: usize,
    pub lambda: f64,
    /// Final bisection bracket; contains `lambda`.
    pub lambda_interval: (f64, f64),
    /// `|φ(1) - (nπ_p + β)|`
    pub residual: f64,
    /// Starts from `(S_p(α), S_p'(α))`, i.e. unit Prüfer radius at 0.
    pub eigenfunction: Trajectory,
    pub path: AnglePath,
}

impl Eigenpair {
    pub fn zero_count(&self) -> usize {
        self.path.zero_count()
    }
}

/// The root of `φ(1; λ) = nπ_p + β` without the eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRoot {
    pub n: usize,
    pub lambda: f64,
    pub lambda_interval: (f64, f64),
    pub residual: f64,
}

/// Integrator tolerance used for a given angle tolerance.
fn ode_tol(angle_tol: f64) -> f64 {
    (angle_tol * 0.1).clamp(1e-12, 1e-8)
}

fn search_error(n: usize, err: Error) -> Error {
    match err {
        Error::Domain(_) | Error::Config(_) | Error::EigenSearch { .. } => err,
        other => Error::EigenSearch {
            n,
            reason: other.to_string(),
        },
    }
}

/// Locates `λ_n` to `angle_tol` in the terminal angle.
pub fn eigenvalue_root(problem: &Problem, bc: &BoundaryConditions, n: usize, angle_tol: f64) -> Result<EigenRoot> {
    if !(angle_tol > 0.0) {
        return Err(Error::Domain(format!(
            "angle tolerance must be positive, got {angle_tol}"
        )));
    }
    bc.check(&problem.p)?;
    let target = n as f64 * problem.p.pi_p() + bc.beta;
    let tol = ode_tol(angle_tol);
    let gap = |lambda: f64| -> Result<f64> {
        let path = pruefer::linear_path(problem, bc, lambda, tol, false)?;
        Ok(path.terminal() - target)
    };
    let fail = |reason: String| Error::EigenSearch { n, reason };

    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    let mut g_lo = gap(lo).map_err(|e| search_error(n, e))?;
    let mut step = 1.0;
    while g_lo > 0.0 {
        hi = lo;
        step *= 2.0;
        lo -= step;
        if lo < -LAMBDA_LIMIT {
            return Err(fail(format!("no lower bracket above lambda = {:e}", -LAMBDA_LIMIT)));
        }
        g_lo = gap(lo).map_err(|e| search_error(n, e))?;
    }
    let mut g_hi = gap(hi).map_err(|e| search_error(n, e))?;
    let mut step = 1.0;
    while g_hi < 0.0 {
        lo = hi;
        g_lo = g_hi;
        step *= 2.0;
        hi += step;
        if hi > LAMBDA_LIMIT {
            return Err(fail(format!("no upper bracket below lambda = {LAMBDA_LIMIT:e}")));
        }
        g_hi = gap(hi).map_err(|e| search_error(n, e))?;
    }

    let done = |lambda: f64, residual: f64, lo: f64, hi: f64| EigenRoot {
        n,
        lambda,
        lambda_interval: (lo.min(lambda), hi.max(lambda)),
        residual,
    };
    if g_lo.abs() <= angle_tol {
        return Ok(done(lo, g_lo.abs(), lo, lo));
    }
    if g_hi.abs() <= angle_tol {
        return Ok(done(hi, g_hi.abs(), hi, hi));
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid).map_err(|e| search_error(n, e))?;
        if g.abs() <= angle_tol {
            let mut best = (mid, g.abs());
            // one secant step on the final bracket, kept only if it helps
            let (a, b, ga, gb) = if g < 0.0 {
                (mid, hi, g, g_hi)
            } else {
                (lo, mid, g_lo, g)
            };
            if gb != ga {
                let s = a - ga * (b - a) / (gb - ga);
                if s > a && s < b {
                    if let Ok(gs) = gap(s) {
                        if gs.abs() < best.1 {
                            best = (s, gs.abs());
                        }
                    }
                }
            }
            return Ok(done(best.0, best.1, a, b));
        }
        if g < 0.0 {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    Err(fail(format!(
        "bracket [{lo}, {hi}] collapsed with angle residual {:e}",
        g_lo.abs().min(g_hi.abs())
    )))
}

/// `λ_n` together with its eigenfunction.
pub fn eigenvalue(problem: &Problem, bc: &BoundaryConditions, n: usize, angle_tol: f64) -> Result<Eigenpair> {
    let root = eigenvalue_root(problem, bc, n, angle_tol)?;
    let tol = ode_tol(angle_tol);
    let path = pruefer::linear_path(problem, bc, root.lambda, tol, true).map_err(|e| search_error(n, e))?;
    if path.zero_count() != n {
        return Err(Error::ZeroCount {
            n,
            found: path.zero_count(),
        });
    }
    let sv = problem.p.sine(bc.alpha);
    let eigenfunction = ivp::integrate_linear(problem, root.lambda, sv.s, sv.c, tol).map_err(|e| search_error(n, e))?;
    Ok(Eigenpair {
        n,
        lambda: root.lambda,
        lambda_interval: root.lambda_interval,
        residual: root.residual,
        eigenfunction,
        path,
    })
}

/// `λ_0, ..., λ_{n_max}`, solved in parallel.
pub fn eigenvalues_up_to(
    problem: &Problem,
    bc: &BoundaryConditions,
    n_max: usize,
    angle_tol: f64,
) -> Result<Vec<Eigenpair>> {
    let pairs = (0..=n_max)
        .into_par_iter()
        .map(|n| eigenvalue(problem, bc, n, angle_tol))
        .collect::<Result<Vec<_>>>()?;
    check_increasing(pairs.iter().map(|e| (e.n, e.lambda)))?;
    Ok(pairs)
}

/// Eigenvalues only, without eigenfunctions.
pub fn eigenvalue_roots_up_to(
    problem: &Problem,
    bc: &BoundaryConditions,
    n_max: usize,
    angle_tol: f64,
) -> Result<Vec<EigenRoot>> {
    let roots = (0..=n_max)
        .into_par_iter()
        .map(|n| eigenvalue_root(problem, bc, n, angle_tol))
        .collect::<Result<Vec<_>>>()?;
    check_increasing(roots.iter().map(|e| (e.n, e.lambda)))?;
    Ok(roots)
}

fn check_increasing(values: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    let mut prev: Option<f64> = None;
    for (n, lambda) in values {
        if let Some(p) = prev {
            if lambda <= p {
                return Err(Error::EigenSearch {
                    n,
                    reason: format!("lambda_{n} = {lambda} does not exceed lambda_{} = {p}", n - 1),
                });
            }
        }
        prev = Some(lambda);
    }
    Ok(())
}
