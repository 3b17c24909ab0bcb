//! Problem data: the exponent, coefficients `q` and `w` on `[0, 1]`, the odd
//! nonlinearity `f`, and the separated boundary angles.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::genfun::PExponent;
use crate::interp::CubicSpline;
use crate::quad;

/// Tolerance for deciding that a power-law exponent equals `p - 1`.
const EXPONENT_TIE: f64 = 1e-12;

/// A nonnegative extended real: either a finite value or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn value(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(v)
        }
    }

    /// True when `x` lies strictly between `self` and `other`, in either order.
    pub fn strictly_brackets(self, other: ExtReal, x: f64) -> bool {
        let (a, b) = (self.value(), other.value());
        (a < x && x < b) || (b < x && x < a)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRealRepr {
    Num(f64),
    Str(String),
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => ExtRealRepr::Num(*v),
            ExtReal::Infinity => ExtRealRepr::Str("inf".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ExtRealRepr::deserialize(d)? {
            ExtRealRepr::Num(v) if v >= 0.0 && v.is_finite() => Ok(ExtReal::Finite(v)),
            ExtRealRepr::Num(v) => Err(D::Error::custom(format!("limit must be >= 0, got {v}"))),
            ExtRealRepr::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(ExtReal::Infinity),
            ExtRealRepr::Str(s) => Err(D::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// A `C¹` coefficient function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Constant(f64),
    /// `c₀ + c₁x + c₂x² + …`
    Polynomial(Vec<f64>),
    /// `a + b sin(ωx) + c cos(ωx)`
    Trig {
        a: f64,
        b: f64,
        c: f64,
        omega: f64,
    },
    Tabulated(CubicSpline),
}

impl Coefficient {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Polynomial(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Coefficient::Trig { a, b, c, omega } => {
                let (s, co) = (omega * x).sin_cos();
                a + b * s + c * co
            }
            Coefficient::Tabulated(sp) => sp.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(_) => 0.0,
            Coefficient::Polynomial(cs) => cs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
            Coefficient::Trig { b, c, omega, .. } => {
                let (s, co) = (omega * x).sin_cos();
                omega * (b * co - c * s)
            }
            Coefficient::Tabulated(sp) => sp.eval(x).1,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Constant(_) => true,
            Coefficient::Polynomial(cs) => cs.iter().skip(1).all(|c| *c == 0.0),
            Coefficient::Trig { b, c, omega, .. } => (*b == 0.0 && *c == 0.0) || *omega == 0.0,
            Coefficient::Tabulated(_) => false,
        }
    }

    fn is_well_formed(&self) -> bool {
        match self {
            Coefficient::Constant(c) => c.is_finite(),
            Coefficient::Polynomial(cs) => cs.iter().all(|c| c.is_finite()),
            Coefficient::Trig { a, b, c, omega } => [a, b, c, omega].iter().all(|v| v.is_finite()),
            Coefficient::Tabulated(_) => true,
        }
    }
}

/// One term `A·s^(ℓ)` of a sign-power sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    #[serde(rename = "a")]
    pub coef: f64,
    #[serde(rename = "l")]
    pub exponent: f64,
}

/// Positive branch of a tabulated nonlinearity on `s ≥ 0`, spline
/// interpolated, with power-law continuation past the last sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedF {
    pub table: CubicSpline,
    #[serde(default)]
    pub f0: Option<ExtReal>,
    #[serde(default)]
    pub finf: Option<ExtReal>,
}

impl TabulatedF {
    fn positive(&self, s: f64) -> f64 {
        let (xs, ys) = self.table.knots();
        let (s_last, f_last) = (xs[xs.len() - 1], ys[ys.len() - 1]);
        if s <= s_last {
            return self.table.value(s).max(0.0);
        }
        let slope = self.table.eval(s_last).1;
        let k = (s_last * slope / f_last).max(0.0);
        f_last * (s / s_last).powf(k)
    }
}

/// User-supplied odd nonlinearity, evaluated on `s > 0`.
#[derive(Clone)]
pub struct CustomF {
    pub name: String,
    pub positive: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f0: Option<ExtReal>,
    pub finf: Option<ExtReal>,
}

impl fmt::Debug for CustomF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomF")
            .field("name", &self.name)
            .field("f0", &self.f0)
            .field("finf", &self.finf)
            .finish()
    }
}

impl PartialEq for CustomF {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.positive, &other.positive) && self.f0 == other.f0 && self.finf == other.finf
    }
}

/// The nonlinearity `f`. Every variant is odd by construction: the positive
/// branch is evaluated at `|s|` and the sign reapplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `Σ Aᵢ s^(ℓᵢ)`
    SignPowerSum(Vec<PowerTerm>),
    /// `A sinh(Bs)`
    Sinh {
        a: f64,
        b: f64,
    },
    Tabulated(TabulatedF),
    #[serde(skip)]
    Custom(CustomF),
}

impl Nonlinearity {
    pub fn power(coef: f64, exponent: f64) -> Self {
        Nonlinearity::SignPowerSum(vec![PowerTerm { coef, exponent }])
    }

    pub fn power_sum(terms: &[(f64, f64)]) -> Self {
        Nonlinearity::SignPowerSum(
            terms
                .iter()
                .map(|&(coef, exponent)| PowerTerm { coef, exponent })
                .collect(),
        )
    }

    pub fn sinh(a: f64, b: f64) -> Self {
        Nonlinearity::Sinh { a, b }
    }

    pub fn custom(
        name: impl Into<String>,
        positive: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f0: Option<ExtReal>,
        finf: Option<ExtReal>,
    ) -> Self {
        Nonlinearity::Custom(CustomF {
            name: name.into(),
            positive: Arc::new(positive),
            f0,
            finf,
        })
    }

    fn positive(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::SignPowerSum(terms) => terms.iter().map(|t| t.coef * s.powf(t.exponent)).sum(),
            Nonlinearity::Sinh { a, b } => a * (b * s).sinh(),
            Nonlinearity::Tabulated(t) => t.positive(s),
            Nonlinearity::Custom(c) => (c.positive)(s),
        }
    }

    /// `f(s)`
    pub fn eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            0.0
        } else if s > 0.0 {
            self.positive(s)
        } else {
            -self.positive(-s)
        }
    }

    /// `F(y) = ∫₀^y f(s) ds`, even in `y`.
    pub fn antiderivative(&self, y: f64) -> f64 {
        let a = y.abs();
        if a == 0.0 {
            return 0.0;
        }
        match self {
            Nonlinearity::SignPowerSum(terms) => terms
                .iter()
                .map(|t| t.coef * a.powf(t.exponent + 1.0) / (t.exponent + 1.0))
                .sum(),
            Nonlinearity::Sinh { a: amp, b } => {
                // cosh(u) - 1 = 2 sinh²(u/2), free of cancellation near 0
                let h = (0.5 * b * a).sinh();
                amp / b * 2.0 * h * h
            }
            _ => quad::tanh_sinh(|s| self.positive(s), 0.0, a, 1e-13),
        }
    }

    /// `f(s) / s^(p-1)` for `s ≠ 0`; even in `s`.
    pub fn ratio(&self, s: f64, p: f64) -> f64 {
        let a = s.abs();
        match self {
            Nonlinearity::SignPowerSum(terms) => terms.iter().map(|t| t.coef * a.powf(t.exponent - (p - 1.0))).sum(),
            _ => self.positive(a) / a.powf(p - 1.0),
        }
    }

    /// `f₀` and `f∞`, the limits of `f(s)/s^{p-1}` at `0⁺` and `+∞`.
    pub fn limits(&self, p: &PExponent) -> Result<(ExtReal, ExtReal)> {
        let pm1 = p.p() - 1.0;
        match self {
            Nonlinearity::SignPowerSum(terms) => {
                if terms.is_empty() {
                    return Err(Error::Config("sign-power sum needs at least one term".into()));
                }
                let lo = terms.iter().map(|t| t.exponent).fold(f64::INFINITY, f64::min);
                let hi = terms.iter().map(|t| t.exponent).fold(f64::NEG_INFINITY, f64::max);
                let limit = |edge: f64, beyond: fn(f64, f64) -> bool| {
                    if (edge - pm1).abs() <= EXPONENT_TIE {
                        let sum = terms
                            .iter()
                            .filter(|t| (t.exponent - edge).abs() <= EXPONENT_TIE)
                            .map(|t| t.coef)
                            .sum();
                        ExtReal::Finite(sum)
                    } else if beyond(edge, pm1) {
                        ExtReal::Infinity
                    } else {
                        ExtReal::Finite(0.0)
                    }
                };
                Ok((limit(lo, |e, pm1| e < pm1), limit(hi, |e, pm1| e > pm1)))
            }
            Nonlinearity::Sinh { a, b } => {
                let f0 = if (pm1 - 1.0).abs() <= EXPONENT_TIE {
                    ExtReal::Finite(a * b)
                } else if pm1 < 1.0 {
                    // A sinh(Bs) / s^{p-1} ~ AB s^{2-p}
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::Infinity
                };
                Ok((f0, ExtReal::Infinity))
            }
            Nonlinearity::Tabulated(TabulatedF { f0, finf, .. }) | Nonlinearity::Custom(CustomF { f0, finf, .. }) => {
                match (f0, finf) {
                    (Some(a), Some(b)) => Ok((*a, *b)),
                    _ => Err(Error::Config(
                        "tabulated nonlinearity must declare both f0 and finf".into(),
                    )),
                }
            }
        }
    }

    fn is_well_formed(&self) -> std::result::Result<(), String> {
        match self {
            Nonlinearity::SignPowerSum(terms) => {
                if terms.is_empty() {
                    return Err("sign-power sum has no terms".into());
                }
                for t in terms {
                    if !(t.coef > 0.0 && t.exponent > 0.0) || !t.coef.is_finite() || !t.exponent.is_finite() {
                        return Err(format!("term A = {}, l = {} needs A > 0 and l > 0", t.coef, t.exponent));
                    }
                }
                Ok(())
            }
            Nonlinearity::Sinh { a, b } => {
                if *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(format!("sinh needs A > 0 and B > 0, got A = {a}, B = {b}"))
                }
            }
            Nonlinearity::Tabulated(_) | Nonlinearity::Custom(_) => Ok(()),
        }
    }
}

/// `f₀` and `f∞` of `f` relative to exponent `p`.
pub fn nonlinearity_limits(f: &Nonlinearity, p: &PExponent) -> Result<(ExtReal, ExtReal)> {
    f.limits(p)
}

/// Boundary angles: `S_p'(α)y(0) - S_p(α)y'(0) = 0`, `S_p'(β)y(1) - S_p(β)y'(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub alpha: f64,
    pub beta: f64,
}

impl BoundaryConditions {
    /// Unchecked; use [`BoundaryConditions::check`] or [`validate`].
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// `y(0) = y(1) = 0`.
    pub fn dirichlet(p: &PExponent) -> Self {
        Self::new(0.0, p.pi_p())
    }

    pub fn check(&self, p: &PExponent) -> Result<()> {
        let pi_p = p.pi_p();
        if !(self.alpha.is_finite() && self.alpha >= 0.0 && self.alpha < pi_p) {
            return Err(Error::Domain(format!(
                "alpha = {} outside [0, pi_p = {pi_p})",
                self.alpha
            )));
        }
        if !(self.beta.is_finite() && self.beta > 0.0 && self.beta <= pi_p) {
            return Err(Error::Domain(format!(
                "beta = {} outside (0, pi_p = {pi_p}]",
                self.beta
            )));
        }
        Ok(())
    }
}

/// `-(y'^(p-1))' + (p-1) q y^(p-1) = (p-1) w f(y)` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub p: PExponent,
    pub q: Coefficient,
    pub w: Coefficient,
    pub f: Nonlinearity,
}

impl Problem {
    pub fn new(p: f64, q: Coefficient, w: Coefficient, f: Nonlinearity) -> Result<Self> {
        Ok(Self {
            p: PExponent::new(p)?,
            q,
            w,
            f,
        })
    }

    pub fn with_exponent(p: PExponent, q: Coefficient, w: Coefficient, f: Nonlinearity) -> Self {
        Self { p, q, w, f }
    }

    pub fn limits(&self) -> Result<(ExtReal, ExtReal)> {
        self.f.limits(&self.p)
    }

    /// Same coefficients and exponent, different nonlinearity.
    pub fn with_nonlinearity(&self, f: Nonlinearity) -> Self {
        Self { f, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub condition: String,
    pub passed: bool,
    /// Offending sample point, when one exists.
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, condition_prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.condition.starts_with(condition_prefix))
    }

    /// Collapses failures into a single domain error.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let msg = self
            .failures()
            .map(|c| match c.witness {
                Some(x) => format!("{} (at {x}): {}", c.condition, c.detail),
                None => format!("{}: {}", c.condition, c.detail),
            })
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Domain(msg))
    }
}

pub fn validate(problem: &Problem, bc: &BoundaryConditions) -> ValidationReport {
    validate_with_grid(problem, bc, &[])
}

/// Checks the standing hypotheses on a 1001-point uniform grid plus `extra`.
pub fn validate_with_grid(problem: &Problem, bc: &BoundaryConditions, extra: &[f64]) -> ValidationReport {
    let mut checks = Vec::new();
    let mut grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    grid.extend(extra.iter().copied().filter(|x| (0.0..=1.0).contains(x)));

    let bad_w = grid.iter().copied().find(|&x| !(problem.w.value(x) > 0.0));
    checks.push(Check {
        condition: "C1: w > 0 on [0,1]".into(),
        passed: bad_w.is_none(),
        witness: bad_w,
        detail: match bad_w {
            Some(x) => format!("w({x}) = {}", problem.w.value(x)),
            None => "ok".into(),
        },
    });

    let bad_c1 = if !problem.q.is_well_formed() || !problem.w.is_well_formed() {
        Some(f64::NAN)
    } else {
        grid.iter().copied().find(|&x| {
            ![
                problem.q.value(x),
                problem.q.derivative(x),
                problem.w.value(x),
                problem.w.derivative(x),
            ]
            .iter()
            .all(|v| v.is_finite())
        })
    };
    checks.push(Check {
        condition: "C1: q, w continuously differentiable".into(),
        passed: bad_c1.is_none(),
        witness: bad_c1.filter(|x| !x.is_nan()),
        detail: if bad_c1.is_some() {
            "non-finite coefficient data".into()
        } else {
            "ok".into()
        },
    });

    let form = problem.f.is_well_formed();
    let bad_f = if form.is_ok() {
        (-60..=60)
            .map(|k| 10f64.powf(k as f64 / 10.0))
            .find(|&s| !(problem.f.eval(s) > 0.0) && problem.f.eval(s).is_finite())
    } else {
        None
    };
    checks.push(Check {
        condition: "C2: f(s) > 0 for s > 0, f odd".into(),
        passed: form.is_ok() && bad_f.is_none(),
        witness: bad_f,
        detail: match (&form, bad_f) {
            (Err(e), _) => e.clone(),
            (_, Some(s)) => format!("f({s}) = {}", problem.f.eval(s)),
            _ => "ok".into(),
        },
    });

    let lim = problem.limits();
    checks.push(Check {
        condition: "C3: limits f0, finf exist".into(),
        passed: lim.is_ok(),
        witness: None,
        detail: match lim {
            Ok((a, b)) => format!("f0 = {a}, finf = {b}"),
            Err(e) => e.to_string(),
        },
    });

    let pi_p = problem.p.pi_p();
    let alpha_ok = bc.alpha.is_finite() && bc.alpha >= 0.0 && bc.alpha < pi_p;
    checks.push(Check {
        condition: "alpha in [0, pi_p)".into(),
        passed: alpha_ok,
        witness: (!alpha_ok).then_some(bc.alpha),
        detail: format!("alpha = {}, pi_p = {pi_p}", bc.alpha),
    });
    let beta_ok = bc.beta.is_finite() && bc.beta > 0.0 && bc.beta <= pi_p;
    checks.push(Check {
        condition: "beta in (0, pi_p]".into(),
        passed: beta_ok,
        witness: (!beta_ok).then_some(bc.beta),
        detail: format!("beta = {}, pi_p = {pi_p}", bc.beta),
    });

    ValidationReport { checks }
}
