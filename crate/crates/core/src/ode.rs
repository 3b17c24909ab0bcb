//! Dormand–Prince 5(4) integrator with PI step control and the 4th-order
//! continuous extension of Hairer, Nørsett & Wanner.
//!
//! Every system in this crate is two-dimensional or smaller, so the state is a
//! fixed-size array and no allocation happens inside a step.

use std::fmt;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Smallest step the controller will attempt before giving up.
pub const MIN_STEP: f64 = 1e-14;

/// Failure raised by a right-hand side evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum RhsFailure {
    /// The Prüfer radius dropped below the representable range.
    RadiusCollapse,
    /// Any other non-finite or undefined evaluation.
    Other(String),
}

/// A first-order system `y' = F(x, y)` on `N` components.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, x: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<(), RhsFailure>;

    /// Optional cap on the next step, consulted before every attempt.
    fn step_limit(&mut self, _x: f64, _y: &[f64; N]) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    StepUnderflow { x: f64, h: f64 },
    TooManySteps { x: f64, steps: usize },
    NonFinite { x: f64 },
    Rhs { x: f64, failure: RhsFailure },
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepUnderflow { x, h } => {
                write!(f, "step size {h:e} underflow at x = {x}")
            }
            OdeError::TooManySteps { x, steps } => {
                write!(f, "exceeded {steps} steps at x = {x}")
            }
            OdeError::NonFinite { x } => write!(f, "non-finite state at x = {x}"),
            OdeError::Rhs { x, failure } => write!(f, "right-hand side failed at x = {x}: {failure:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Keep the per-step interpolants. Terminal-value-only callers turn this off.
    pub dense: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            dense: true,
        }
    }
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct Segment<const N: usize> {
    pub x0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        let theta = (x - self.x0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i]))))
    }

    pub fn start(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [f64; N] {
        std::array::from_fn(|i| self.rcont[0][i] + self.rcont[1][i])
    }
}

/// Result of an integration: nodes, terminal state and (optionally) the
/// dense-output segments covering `[x0, x_end]`.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub segments: Vec<Segment<N>>,
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl<const N: usize> Solution<N> {
    pub fn x_start(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_end(&self) -> f64 {
        *self.xs.last().expect("solution has at least one node")
    }

    pub fn terminal(&self) -> [f64; N] {
        *self.ys.last().expect("solution has at least one node")
    }

    pub fn is_dense(&self) -> bool {
        !self.segments.is_empty() || self.xs.len() == 1
    }

    /// Index of the segment containing `x`, clamped to the integration range.
    pub fn segment_index(&self, x: f64) -> usize {
        let n = self.segments.len();
        debug_assert!(n > 0);
        // first segment whose right end is >= x
        let idx = self.segments.partition_point(|s| s.x1() < x);
        idx.min(n - 1)
    }

    /// Dense-output evaluation. Panics if the solution was computed with
    /// `dense = false`.
    pub fn eval(&self, x: f64) -> [f64; N] {
        if self.segments.is_empty() {
            assert!(self.xs.len() == 1, "solution was integrated without dense output");
            return self.ys[0];
        }
        let seg = &self.segments[self.segment_index(x)];
        if x == seg.x1() {
            return seg.end();
        }
        seg.eval(x)
    }
}

fn rms_error<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &Options) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / sk;
        acc += e * e;
    }
    (acc / N as f64).sqrt()
}

fn eval_rhs<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    x: f64,
    y: &[f64; N],
    dy: &mut [f64; N],
    evals: &mut usize,
) -> Result<(), OdeError> {
    *evals += 1;
    sys.rhs(x, y, dy).map_err(|failure| OdeError::Rhs { x, failure })
}

fn initial_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    x0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    opts: &Options,
    evals: &mut usize,
) -> Result<f64, OdeError> {
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(opts.h_max).min(span);
    let y1: [f64; N] = std::array::from_fn(|i| y0[i] + h * f0[i]);
    let mut f1 = [0.0; N];
    eval_rhs(sys, x0 + h, &y1, &mut f1, evals)?;
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(opts.h_max).min(span).max(MIN_STEP * 10.0))
}

/// Integrates `sys` from `x0` to `x_end > x0` starting at `y0`.
pub fn integrate<S: OdeSystem<N>, const N: usize>(
    sys: &mut S,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    opts: &Options,
) -> Result<Solution<N>, OdeError> {
    assert!(x_end >= x0, "integration must run forward");
    let mut sol = Solution {
        xs: vec![x0],
        ys: vec![y0],
        segments: Vec::new(),
        accepted: 0,
        rejected: 0,
        rhs_evals: 0,
    };
    if x_end == x0 {
        return Ok(sol);
    }
    let span = x_end - x0;

    const SAFE: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const FACC1: f64 = 1.0 / 0.2;
    const FACC2: f64 = 1.0 / 10.0;

    let mut x = x0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    eval_rhs(sys, x, &y, &mut k1, &mut sol.rhs_evals)?;
    let mut h = initial_step(sys, x, &y, &k1, span, opts, &mut sol.rhs_evals)?;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);

    loop {
        if sol.accepted + sol.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps {
                x,
                steps: opts.max_steps,
            });
        }
        if let Some(cap) = sys.step_limit(x, &y) {
            h = h.min(cap);
        }
        h = h.min(opts.h_max);
        let last = x + 1.01 * h >= x_end;
        if last {
            h = x_end - x;
        }
        if h < MIN_STEP && !last {
            return Err(OdeError::StepUnderflow { x, h });
        }

        let mut ys = [0.0; N];
        for i in 0..N {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        eval_rhs(sys, x + C2 * h, &ys, &mut k2, &mut sol.rhs_evals)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        eval_rhs(sys, x + C3 * h, &ys, &mut k3, &mut sol.rhs_evals)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        eval_rhs(sys, x + C4 * h, &ys, &mut k4, &mut sol.rhs_evals)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        eval_rhs(sys, x + C5 * h, &ys, &mut k5, &mut sol.rhs_evals)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let xph = if last { x_end } else { x + h };
        eval_rhs(sys, xph, &ys, &mut k6, &mut sol.rhs_evals)?;
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        eval_rhs(sys, xph, &y1, &mut k7, &mut sol.rhs_evals)?;

        let mut errv = [0.0; N];
        for i in 0..N {
            errv[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = rms_error(&errv, &y, &y1, opts);
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            // treat as a hard rejection
            sol.rejected += 1;
            h *= 0.1;
            last_rejected = true;
            if h < MIN_STEP {
                return Err(OdeError::NonFinite { x });
            }
            continue;
        }

        let fac11 = err.powf(EXPO1);
        let mut fac = fac11 / facold.powf(BETA);
        fac = FACC2.max(FACC1.min(fac / SAFE));
        let mut hnew = h / fac;

        if err <= 1.0 {
            facold = err.max(1e-4);
            sol.accepted += 1;
            if opts.dense {
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    rcont[0][i] = y[i];
                    rcont[1][i] = ydiff;
                    rcont[2][i] = bspl;
                    rcont[3][i] = ydiff - h * k7[i] - bspl;
                    rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                sol.segments.push(Segment { x0: x, h, rcont });
            }
            k1 = k7;
            y = y1;
            x = xph;
            sol.xs.push(x);
            sol.ys.push(y);
            if last {
                return Ok(sol);
            }
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            hnew = h / FACC1.min(fac11 / SAFE);
            sol.rejected += 1;
            last_rejected = true;
            h = hnew;
            if h < MIN_STEP {
                return Err(OdeError::StepUnderflow { x, h });
            }
        }
    }
}
