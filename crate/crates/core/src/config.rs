//! Run configuration (`--config` JSON).

use crate::conventions::{CG_MAXITER, CG_TOL, EPS_DIV, EPS_HAM, EPS_MASSEY, EPS_PERIOD};
use crate::error::{Error, Result};
use crate::links::{BoxSpec, Scene};
use crate::massey::SolveParams;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Grid size of the co-momentum suite when the config sets none.
pub const COMOMENTUM_DEFAULT_N: usize = 32;
/// Smallest grid accepted by a config.
pub const MIN_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub n: usize,
    /// Box side for link scenes; the co-momentum suite always uses `2π`.
    #[serde(rename = "L", default)]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeConfig {
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub flux: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eps_div: f64,
    pub eps_ham: f64,
    pub eps_massey: f64,
    pub eps_period: f64,
    pub cg_tol: f64,
    pub cg_maxiter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_div: EPS_DIV,
            eps_ham: EPS_HAM,
            eps_massey: EPS_MASSEY,
            eps_period: EPS_PERIOD,
            cg_tol: CG_TOL,
            cg_maxiter: CG_MAXITER,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub export_fields: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Overrides the scene box.
    pub grid: Option<GridConfig>,
    /// Overrides the scene tube.
    pub tube: TubeConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub seed: u64,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("eps_div", t.eps_div),
            ("eps_ham", t.eps_ham),
            ("eps_massey", t.eps_massey),
            ("eps_period", t.eps_period),
            ("cg_tol", t.cg_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if t.cg_maxiter == 0 {
            return Err(Error::Invalid("tolerances.cg_maxiter must be positive".into()));
        }
        if let Some(g) = self.grid {
            if g.n < MIN_N {
                return Err(Error::Invalid(format!("grid.N must be at least {MIN_N}, got {}", g.n)));
            }
            if let Some(l) = g.l {
                if !(l.is_finite() && l > 0.0) {
                    return Err(Error::Invalid(format!("grid.L must be positive, got {l}")));
                }
            }
        }
        for (name, v) in [("radius", self.tube.radius), ("flux", self.tube.flux)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Invalid(format!("tube.{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// The scene with grid and tube overrides applied.
    pub fn apply(&self, scene: &Scene) -> Scene {
        let mut s = scene.clone();
        if let Some(g) = self.grid {
            s.box_spec = BoxSpec { n: g.n, l: g.l.unwrap_or(s.box_spec.l) };
        }
        if let Some(r) = self.tube.radius {
            s.tube.radius = r;
        }
        if let Some(f) = self.tube.flux {
            s.tube.flux = f;
        }
        s
    }

    pub fn comomentum_n(&self) -> usize {
        self.grid.map_or(COMOMENTUM_DEFAULT_N, |g| g.n)
    }

    pub fn solve_params(&self) -> SolveParams {
        let t = &self.tolerances;
        SolveParams {
            cg_tol: t.cg_tol,
            cg_maxiter: t.cg_maxiter,
            eps_period: t.eps_period,
            eps_massey: t.eps_massey,
            ..SolveParams::default()
        }
    }
}
