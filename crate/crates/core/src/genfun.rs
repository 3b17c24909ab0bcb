//! The generalized sine `S_p`, its derivative, the half-period `π_p` and the
//! sign-power map `y^(e) = |y|^e sgn y`.
//!
//! `S_p` solves `(y'^(p-1))' = -(p-1) y^(p-1)`, `y(0) = 0`, `y'(0) = 1`, and
//! satisfies `|S_p|^p + |S_p'|^p = 1`. On the first quarter period
//! `[0, π_p/2]` it is tabulated once per exponent by integrating that equation
//! in two smooth pieces:
//!
//! * below the point `x_m` where `S_p = S_p' = 2^{-1/p}`, the sine itself obeys
//!   `u' = (1 - u^p)^{1/p}`;
//! * above it, `z = S_p'^(p-1)` obeys `dz/ds = (p-1)(1 - |z|^{p*})^{1/p*}` in
//!   the reversed variable `s = π_p/2 - x`, starting from `z = 0`.
//!
//! Both right-hand sides stay away from the points where the original second
//! order equation loses smoothness (`S_p = 0` for `p < 2`, `S_p' = 0` for
//! `p > 2`). The rest of the real line is reached through the reflection
//! `S_p(π_p - x) = S_p(x)`, the odd shift `S_p(x + π_p) = -S_p(x)` and period
//! `2π_p`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem, Options, RhsFailure, Solution};
use crate::quad;

/// Tolerance used for the quarter-period tables.
const TABLE_TOL: f64 = 1e-14;
const TABLE_MAX_STEP: f64 = 2e-3;

/// Half-period `π_p = (2π/p) / sin(π/p)`.
pub fn pi_p(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((2.0 * PI / p) / (PI / p).sin())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be finite and > 1, got {p}")));
    }
    Ok(())
}

/// Sign-preserving power `|y|^e sgn y`, with `sgn_pow(0, e) = 0`.
#[inline]
pub fn sgn_pow(y: f64, e: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else if e == 1.0 {
        y
    } else if y > 0.0 {
        y.powf(e)
    } else {
        -(-y).powf(e)
    }
}

/// `S_p(x)`, `S_p'(x)` and their `p`-th absolute powers at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineValue {
    pub s: f64,
    pub c: f64,
    /// `|S_p(x)|^p`
    pub s_pow: f64,
    /// `|S_p'(x)|^p`
    pub c_pow: f64,
}

struct LowerArc {
    p: f64,
}

impl OdeSystem<1> for LowerArc {
    fn rhs(&self, _x: f64, y: &[f64; 1], dy: &mut [f64; 1]) -> Result<(), RhsFailure> {
        let u = y[0].max(0.0);
        dy[0] = (1.0 - u.powf(self.p)).max(0.0).powf(1.0 / self.p);
        Ok(())
    }
}

struct UpperArc {
    p: f64,
    p_conj: f64,
}

impl OdeSystem<1> for UpperArc {
    fn rhs(&self, _s: f64, y: &[f64; 1], dy: &mut [f64; 1]) -> Result<(), RhsFailure> {
        let z = y[0].max(0.0);
        dy[0] = (self.p - 1.0) * (1.0 - z.powf(self.p_conj)).max(0.0).powf(1.0 / self.p_conj);
        Ok(())
    }
}

struct SineTable {
    half: f64,
    x_m: f64,
    lower: Solution<1>,
    upper: Solution<1>,
}

impl SineTable {
    fn build(p: f64, p_conj: f64, pi_p: f64) -> Result<Self> {
        let half = 0.5 * pi_p;
        let u_m = 0.5f64.powf(1.0 / p);
        let x_m = quad::tanh_sinh(|t| (1.0 - t.powf(p)).powf(-1.0 / p), 0.0, u_m, 1e-15);
        let opts = Options {
            rtol: TABLE_TOL,
            atol: TABLE_TOL,
            h_max: TABLE_MAX_STEP,
            ..Options::default()
        };
        let lower = ode::integrate(&mut LowerArc { p }, 0.0, [0.0], x_m, &opts)?;
        let upper = ode::integrate(&mut UpperArc { p, p_conj }, 0.0, [0.0], half - x_m, &opts)?;
        Ok(Self {
            half,
            x_m,
            lower,
            upper,
        })
    }

    /// Valid for `x` in `[0, π_p/2]`.
    fn quarter(&self, x: f64, p: f64, p_conj: f64) -> SineValue {
        if x <= self.x_m {
            let u = self.lower.eval(x)[0].clamp(0.0, 1.0);
            let s_pow = u.powf(p);
            let c_pow = (1.0 - s_pow).max(0.0);
            SineValue {
                s: u,
                c: c_pow.powf(1.0 / p),
                s_pow,
                c_pow,
            }
        } else {
            let z = self.upper.eval(self.half - x)[0].clamp(0.0, 1.0);
            let c_pow = z.powf(p_conj);
            let s_pow = (1.0 - c_pow).max(0.0);
            SineValue {
                s: s_pow.powf(1.0 / p),
                c: z.powf(1.0 / (p - 1.0)),
                s_pow,
                c_pow,
            }
        }
    }
}

/// The exponent `p > 1` together with its conjugate, `π_p`, and the cached
/// quarter-period table of `S_p`. Cloning shares the table.
#[derive(Clone)]
pub struct PExponent {
    p: f64,
    p_conj: f64,
    pi_p: f64,
    table: Arc<SineTable>,
}

impl fmt::Debug for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PExponent")
            .field("p", &self.p)
            .field("p_conj", &self.p_conj)
            .field("pi_p", &self.pi_p)
            .finish()
    }
}

impl PartialEq for PExponent {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p)?;
        let p_conj = p / (p - 1.0);
        let pi_p = pi_p(p)?;
        let table = SineTable::build(p, p_conj, pi_p)?;
        Ok(Self {
            p,
            p_conj,
            pi_p,
            table: Arc::new(table),
        })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent `p* = p/(p-1)`.
    #[inline]
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    #[inline]
    pub fn pi_p(&self) -> f64 {
        self.pi_p
    }

    /// Point in `(0, π_p/2)` where `S_p = S_p'`.
    pub fn crossover(&self) -> f64 {
        self.table.x_m
    }

    /// `y^(p-1)`
    #[inline]
    pub fn pow_pm1(&self, y: f64) -> f64 {
        sgn_pow(y, self.p - 1.0)
    }

    /// Inverse of [`PExponent::pow_pm1`]: `z^(p*-1)`.
    #[inline]
    pub fn pow_inv(&self, z: f64) -> f64 {
        sgn_pow(z, self.p_conj - 1.0)
    }

    pub fn sine(&self, x: f64) -> SineValue {
        let pi_p = self.pi_p;
        let (mut t, mut s_sign, c_sign) = if x < 0.0 { (-x, -1.0, 1.0) } else { (x, 1.0, 1.0) };
        let mut c_sign = c_sign;
        let period = 2.0 * pi_p;
        if t >= period {
            t %= period;
        }
        if t >= pi_p {
            t -= pi_p;
            s_sign = -s_sign;
            c_sign = -c_sign;
        }
        if t > self.table.half {
            t = (pi_p - t).max(0.0);
            c_sign = -c_sign;
        }
        let v = self.table.quarter(t, self.p, self.p_conj);
        SineValue {
            s: s_sign * v.s,
            c: c_sign * v.c,
            s_pow: v.s_pow,
            c_pow: v.c_pow,
        }
    }

    /// `S_p(x)`
    pub fn sp(&self, x: f64) -> f64 {
        self.sine(x).s
    }

    /// `S_p'(x)`
    pub fn sp_prime(&self, x: f64) -> f64 {
        self.sine(x).c
    }
}

/// `S_p(x)` for a one-off exponent. Builds a table per call; hold a
/// [`PExponent`] for repeated evaluation.
pub fn sp(p: f64, x: f64) -> Result<f64> {
    Ok(PExponent::new(p)?.sp(x))
}

/// `S_p'(x)` for a one-off exponent.
pub fn sp_prime(p: f64, x: f64) -> Result<f64> {
    Ok(PExponent::new(p)?.sp_prime(x))
}
