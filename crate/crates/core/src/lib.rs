//! Eigenvalues and nodal solutions of the one-dimensional p-Laplacian problem
//!
//! ```text
//! -(y'^(p-1))' + (p-1) q(x) y^(p-1) = (p-1) w(x) f(y),   0 < x < 1,
//! S_p'(α) y(0) - S_p(α) y'(0) = 0,   S_p'(β) y(1) - S_p(β) y'(1) = 0,
//! ```
//!
//! where `y^(p-1) = |y|^(p-2) y` and `S_p` is the generalized sine. Solutions
//! are found by shooting on a generalized Prüfer angle.

// `!(a > b)` style comparisons are used on purpose so NaN takes the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod genfun;
pub mod interp;
pub mod ivp;
pub mod model;
pub mod ode;
pub mod pruefer;
pub mod quad;
pub mod shooting;
pub mod spectrum;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use genfun::{pi_p, sgn_pow, PExponent};
pub use ivp::Trajectory;
pub use model::{BoundaryConditions, Coefficient, ExtReal, Nonlinearity, Problem};
pub use pruefer::AnglePath;
pub use shooting::{ExistenceVerdict, NodalSolution, Verdict};
pub use spectrum::Eigenpair;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/generalized-sine.md")]
    mod generalized_sine {}
    #[doc = include_str!("../../../book/src/problem.md")]
    mod problem {}
    #[doc = include_str!("../../../book/src/integration.md")]
    mod integration {}
    #[doc = include_str!("../../../book/src/pruefer.md")]
    mod pruefer {}
    #[doc = include_str!("../../../book/src/eigenvalues.md")]
    mod eigenvalues {}
    #[doc = include_str!("../../../book/src/nodal-solutions.md")]
    mod nodal_solutions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    mod accuracy {}
}
