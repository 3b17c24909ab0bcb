//! JSON run configuration: problem data, boundary angles, command parameters
//! and output settings.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfun::PExponent;
use crate::model::{self, BoundaryConditions, Coefficient, Nonlinearity, Problem};
use crate::shooting;

/// An angle given either directly or as a multiple of `π_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleSpec {
    Value(f64),
    PiPFraction(f64),
}

impl AngleSpec {
    pub fn resolve(self, p: &PExponent) -> f64 {
        match self {
            AngleSpec::Value(v) => v,
            AngleSpec::PiPFraction(f) => f * p.pi_p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub p: f64,
    #[serde(default = "zero")]
    pub q: Coefficient,
    #[serde(default = "one")]
    pub w: Coefficient,
    pub f: Nonlinearity,
}

fn zero() -> Coefficient {
    Coefficient::Constant(0.0)
}

fn one() -> Coefficient {
    Coefficient::Constant(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcSpec {
    pub alpha: AngleSpec,
    pub beta: AngleSpec,
}

impl Default for BcSpec {
    /// Dirichlet at both ends.
    fn default() -> Self {
        Self {
            alpha: AngleSpec::Value(0.0),
            beta: AngleSpec::PiPFraction(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RhoGrid {
    Values(Vec<f64>),
    LogSpace { min: f64, max: f64, count: usize },
}

impl Default for RhoGrid {
    fn default() -> Self {
        RhoGrid::LogSpace {
            min: 1e-4,
            max: 1e4,
            count: 50,
        }
    }
}

impl RhoGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            RhoGrid::Values(v) => v.clone(),
            RhoGrid::LogSpace { min, max, count } => shooting::log_grid(*min, *max, *count),
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("params.rho_grid: {msg}")));
        match self {
            RhoGrid::Values(v) => match v.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
                Some(r) => bad(format!("rho = {r} is not positive and finite")),
                None => Ok(()),
            },
            RhoGrid::LogSpace { min, max, .. } => {
                if *min > 0.0 && min <= max && max.is_finite() {
                    Ok(())
                } else {
                    bad(format!("need 0 < min <= max, got min = {min}, max = {max}"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Zero count for `solve`.
    pub n: usize,
    /// Largest index for `eigs` and `classify`.
    pub n_max: usize,
    /// Terminal-angle tolerance; the command's default when absent.
    pub angle_tol: Option<f64>,
    pub rho_grid: RhoGrid,
    /// User-asserted bounds `[lo, hi]` on `f(s)/s^(p-1)` for `classify`.
    pub ratio_bounds: Option<[f64; 2]>,
    /// Uniform sample count for solution profiles.
    pub profile_points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n: 0,
            n_max: 4,
            angle_tol: None,
            rho_grid: RhoGrid::default(),
            ratio_bounds: None,
            profile_points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Where `solve` writes the Prüfer angle path, if anywhere.
    pub angle_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub bc: BcSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// Parses a JSON document; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Config(format!("field `{path}`: {inner}"))
        })?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Builds and validates the problem and boundary conditions.
    pub fn build(&self) -> Result<(Problem, BoundaryConditions)> {
        let spec = &self.problem;
        let problem = Problem::new(spec.p, spec.q.clone(), spec.w.clone(), spec.f.clone())
            .map_err(|e| Error::Config(format!("field `problem.p`: {e}")))?;
        let bc = BoundaryConditions::new(self.bc.alpha.resolve(&problem.p), self.bc.beta.resolve(&problem.p));
        model::validate(&problem, &bc)
            .into_result()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.params.rho_grid.check()?;
        if let Some(t) = self.params.angle_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!(
                    "field `params.angle_tol`: must be positive, got {t}"
                )));
            }
        }
        if let Some([lo, hi]) = self.params.ratio_bounds {
            if !(lo <= hi) {
                return Err(Error::Config(format!(
                    "field `params.ratio_bounds`: need lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok((problem, bc))
    }
}
