//! Nodal solutions of the nonlinear problem by shooting on the amplitude `ρ`,
//! plus existence/nonexistence verdicts from the eigenvalues and the limits
//! `f₀`, `f∞`.
//!
//! With `(y, y')(0) = ρ (S_p(α), S_p'(α))` the boundary condition at 1 holds
//! exactly when `θ(1; ρ) = nπ_p + β`, in which case `y` has `n` interior zeros.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ivp::{self, Trajectory};
use crate::model::{BoundaryConditions, ExtReal, Nonlinearity, Problem};
use crate::pruefer::{self, AnglePath};
use crate::spectrum;

pub const DEFAULT_ANGLE_TOL: f64 = 1e-8;
pub const RHO_MIN: f64 = 1e-8;
pub const RHO_MAX: f64 = 1e8;
const PROBE_DECADES: i32 = 8;
const MAX_BISECTIONS: usize = 200;
/// Integrator tolerance for the angle equation.
const SHOOT_TOL: f64 = 1e-11;
/// Integrator tolerance for the reported trajectory.
const PROFILE_TOL: f64 = 1e-11;
/// Relative margin when comparing numerically computed eigenvalues.
const EIGEN_MARGIN: f64 = 1e-8;
/// Eigenvalues computed at most while looking for a gap containing the ratio range.
const MAX_GAP_INDEX: usize = 200;
const RATIO_GRID_POINTS: usize = 600;
/// Angle tolerance for eigenvalues beyond `n_max`, which are only compared
/// against the ratio bounds.
const GAP_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct NodalSolution {
    pub n: usize,
    pub rho: f64,
    /// Final bisection bracket in `ρ`; contains `rho`.
    pub rho_interval: (f64, f64),
    pub terminal_angle: f64,
    /// `|θ(1) - (nπ_p + β)|`
    pub bc_residual: f64,
    /// `|S_p'(α)y(0) - S_p(α)y'(0)|` and `|S_p'(β)y(1) - S_p(β)y'(1)|` of the trajectory.
    pub boundary_residuals: (f64, f64),
    pub trajectory: Trajectory,
    pub path: AnglePath,
}

impl NodalSolution {
    pub fn zero_count(&self) -> usize {
        self.path.zero_count()
    }

    /// Scale for the boundary residuals: `1 + r(0) + r(1)`.
    pub fn residual_scale(&self) -> f64 {
        1.0 + self.path.r(0.0) + self.path.r(1.0)
    }
}

/// `θ(1; ρ)`
pub fn terminal_angle_of_rho(problem: &Problem, bc: &BoundaryConditions, rho: f64) -> Result<f64> {
    Ok(pruefer::nonlinear_path(problem, bc, rho, SHOOT_TOL, false)?.terminal())
}

/// Probe order: `1, 10, 0.1, 100, 0.01, ...`
fn probe_exponents() -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=PROBE_DECADES).flat_map(|k| [k, -k]))
}

/// A solution with exactly `n` interior zeros.
pub fn find_nodal_solution(
    problem: &Problem,
    bc: &BoundaryConditions,
    n: usize,
    angle_tol: f64,
) -> Result<NodalSolution> {
    if !(angle_tol > 0.0) {
        return Err(Error::Domain(format!(
            "angle tolerance must be positive, got {angle_tol}"
        )));
    }
    bc.check(&problem.p)?;
    let target = n as f64 * problem.p.pi_p() + bc.beta;
    let gap = |log_rho: f64| -> Result<f64> { Ok(terminal_angle_of_rho(problem, bc, log_rho.exp())? - target) };

    // gap at each probed decade, indexed by exponent + PROBE_DECADES
    let mut probed: Vec<Option<f64>> = vec![None; 2 * PROBE_DECADES as usize + 1];
    let mut bracket = None;
    for k in probe_exponents() {
        let log_rho = k as f64 * std::f64::consts::LN_10;
        let g = match gap(log_rho) {
            Ok(g) => g,
            Err(Error::RadiusCollapse { .. }) | Err(Error::Integration { .. }) => continue,
            Err(e) => return Err(e),
        };
        if g.abs() <= angle_tol {
            return finish(problem, bc, n, log_rho.exp(), (log_rho.exp(), log_rho.exp()));
        }
        let idx = (k + PROBE_DECADES) as usize;
        probed[idx] = Some(g);
        // neighbour towards ρ = 1
        let inner = if k > 0 {
            idx - 1
        } else if k < 0 {
            idx + 1
        } else {
            continue;
        };
        if let Some(h) = probed[inner] {
            if (g < 0.0) != (h < 0.0) {
                let inner_log = (inner as f64 - PROBE_DECADES as f64) * std::f64::consts::LN_10;
                bracket = Some(if log_rho < inner_log {
                    (log_rho, inner_log, g, h)
                } else {
                    (inner_log, log_rho, h, g)
                });
                break;
            }
        }
    }
    let Some((mut lo, mut hi, g_lo, _)) = bracket else {
        return Err(Error::NoBracket {
            n,
            rho_min: RHO_MIN,
            rho_max: RHO_MAX,
        });
    };
    let lo_below = g_lo < 0.0;
    let mut best = f64::INFINITY;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid)?;
        best = best.min(g.abs());
        if g.abs() <= angle_tol {
            return finish(problem, bc, n, mid.exp(), (lo.exp(), hi.exp()));
        }
        if (g < 0.0) == lo_below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Stalled { n, residual: best })
}

fn finish(
    problem: &Problem,
    bc: &BoundaryConditions,
    n: usize,
    rho: f64,
    rho_interval: (f64, f64),
) -> Result<NodalSolution> {
    let p = &problem.p;
    let path = pruefer::nonlinear_path(problem, bc, rho, SHOOT_TOL, true)?;
    if path.zero_count() != n {
        return Err(Error::ZeroCount {
            n,
            found: path.zero_count(),
        });
    }
    let target = n as f64 * p.pi_p() + bc.beta;
    let a = p.sine(bc.alpha);
    let trajectory = ivp::integrate(problem, rho * a.s, rho * a.c, PROFILE_TOL)?;
    let residual_at = |angle: f64, x: f64| {
        let sv = p.sine(angle);
        (sv.c * trajectory.y(x) - sv.s * trajectory.yprime(x)).abs()
    };
    Ok(NodalSolution {
        n,
        rho,
        rho_interval: (rho_interval.0.min(rho), rho_interval.1.max(rho)),
        terminal_angle: path.terminal(),
        bc_residual: (path.terminal() - target).abs(),
        boundary_residuals: (residual_at(bc.alpha, 0.0), residual_at(bc.beta, 1.0)),
        trajectory,
        path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub terminal_angle: Option<f64>,
    pub zero_count: Option<usize>,
    pub error: Option<String>,
}

/// `ρ ↦ (θ(1; ρ), zero count)` on a grid; failures are recorded per row.
pub fn sweep(problem: &Problem, bc: &BoundaryConditions, rho_grid: &[f64]) -> Vec<SweepRow> {
    rho_grid
        .par_iter()
        .map(
            |&rho| match pruefer::nonlinear_path(problem, bc, rho, SHOOT_TOL, false) {
                Ok(path) => SweepRow {
                    rho,
                    terminal_angle: Some(path.terminal()),
                    zero_count: Some(path.zero_count()),
                    error: None,
                },
                Err(e) => SweepRow {
                    rho,
                    terminal_angle: None,
                    zero_count: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect()
}

/// `count` points spaced evenly in `log ρ` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    NoSolutionAbove,
    NoSolutionBelow,
    NoNontrivial,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsSource {
    User,
    /// Sampled on a log grid and combined with the limits.
    NumericalGrid,
}

/// `lo ≤ f(s)/s^(p-1) ≤ hi` for all `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBounds {
    #[serde(serialize_with = "extended")]
    pub lo: f64,
    #[serde(serialize_with = "extended")]
    pub hi: f64,
    pub source: BoundsSource,
}

fn extended<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExtReal::from_f64(*v).serialize(s)
}

/// Eigenvalues bounding the ratio range, `(k, λ_k)` and, unless the range lies
/// below `λ_0`, `(k + 1, λ_{k+1})`.
pub type EigenGap = ((usize, f64), Option<(usize, f64)>);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// The inequality that decided the verdict, in words.
    pub hypothesis: String,
    pub lambda_n: f64,
    pub f0: Option<ExtReal>,
    pub finf: Option<ExtReal>,
    pub ratio_bounds: Option<RatioBounds>,
    pub eigen_gap: Option<EigenGap>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub n: usize,
    pub verdict: Verdict,
    pub witness: Witness,
}

/// Bounds on `f(s)/s^(p-1)` over a log grid of `s ∈ [1e-6, 1e6]`, widened by
/// `f₀` and `f∞`. Only available for sign-power sums.
pub fn grid_ratio_bounds(problem: &Problem) -> Option<RatioBounds> {
    if !matches!(problem.f, Nonlinearity::SignPowerSum(_)) {
        return None;
    }
    let (f0, finf) = problem.limits().ok()?;
    let p = problem.p.p();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in log_grid(1e-6, 1e6, RATIO_GRID_POINTS) {
        let r = problem.f.ratio(s, p);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    for limit in [f0, finf] {
        let v = limit.value();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Some(RatioBounds {
        lo,
        hi,
        source: BoundsSource::NumericalGrid,
    })
}

fn below(a: f64, lambda: f64) -> bool {
    a < lambda - EIGEN_MARGIN * lambda.abs().max(1.0)
}

fn above(a: f64, lambda: f64) -> bool {
    a > lambda + EIGEN_MARGIN * lambda.abs().max(1.0)
}

/// Verdicts for `n = 0..=n_max`.
///
/// `ratio_bounds`, when given, are taken as true global bounds on
/// `f(s)/s^(p-1)`; otherwise they are sampled for sign-power sums.
pub fn classify(
    problem: &Problem,
    bc: &BoundaryConditions,
    n_max: usize,
    ratio_bounds: Option<(f64, f64)>,
) -> Result<Vec<ExistenceVerdict>> {
    let angle_tol = spectrum::DEFAULT_ANGLE_TOL;
    let mut lambdas: Vec<f64> = spectrum::eigenvalue_roots_up_to(problem, bc, n_max, angle_tol)?
        .iter()
        .map(|r| r.lambda)
        .collect();
    let limits = problem.limits().ok();
    let bounds = match ratio_bounds {
        Some((lo, hi)) => {
            if !(lo <= hi) || lo.is_nan() {
                return Err(Error::Config(format!("ratio bounds need lo <= hi, got ({lo}, {hi})")));
            }
            Some(RatioBounds {
                lo,
                hi,
                source: BoundsSource::User,
            })
        }
        None => grid_ratio_bounds(problem),
    };

    // an eigenvalue gap that contains the whole ratio range
    let gap = match bounds {
        Some(b) if b.hi.is_finite() => {
            while *lambdas.last().unwrap() < b.hi && lambdas.len() < MAX_GAP_INDEX {
                let k = lambdas.len();
                let root = spectrum::eigenvalue_root(problem, bc, k, angle_tol)
                    .or_else(|_| spectrum::eigenvalue_root(problem, bc, k, GAP_ANGLE_TOL));
                match root {
                    Ok(r) => lambdas.push(r.lambda),
                    Err(_) => break,
                }
            }
            let first_above = lambdas.iter().position(|&l| above(l, b.hi));
            match first_above {
                Some(0) => Some(((0, lambdas[0]), None)),
                Some(k) if below(lambdas[k - 1], b.lo) => Some(((k - 1, lambdas[k - 1]), Some((k, lambdas[k])))),
                _ => None,
            }
        }
        _ => None,
    };

    let verdicts = (0..=n_max)
        .map(|n| {
            let lambda_n = lambdas[n];
            let mut witness = Witness {
                hypothesis: String::new(),
                lambda_n,
                f0: limits.map(|l| l.0),
                finf: limits.map(|l| l.1),
                ratio_bounds: bounds,
                eigen_gap: None,
            };
            let verdict = if let Some((f0, finf)) = limits.filter(|(a, b)| a.strictly_brackets(*b, lambda_n)) {
                witness.hypothesis = if f0 < finf {
                    format!("f0 = {f0} < lambda_{n} < finf = {finf}")
                } else {
                    format!("finf = {finf} < lambda_{n} < f0 = {f0}")
                };
                Verdict::Exists
            } else if let Some(((k, lk), next)) = gap {
                let b = bounds.unwrap();
                witness.eigen_gap = Some(((k, lk), next));
                witness.hypothesis = match next {
                    None => format!("ratio <= {} < lambda_0 = {lk}", b.hi),
                    Some((k1, lk1)) => {
                        format!(
                            "lambda_{k} = {lk} < {} <= ratio <= {} < lambda_{k1} = {lk1}",
                            b.lo, b.hi
                        )
                    }
                };
                Verdict::NoNontrivial
            } else if let Some(b) = bounds.filter(|b| below(b.hi, lambda_n)) {
                witness.hypothesis = format!("ratio <= {} < lambda_{n} = {lambda_n}", b.hi);
                Verdict::NoSolutionAbove
            } else if let Some(b) = bounds.filter(|b| above(b.lo, lambda_n)) {
                witness.hypothesis = format!("ratio >= {} > lambda_{n} = {lambda_n}", b.lo);
                Verdict::NoSolutionBelow
            } else {
                witness.hypothesis = "no existence or nonexistence hypothesis holds".into();
                Verdict::Inconclusive
            };
            ExistenceVerdict { n, verdict, witness }
        })
        .collect();
    Ok(verdicts)
}
