//! Run configuration, readable from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dod::VolumeVariant;
use crate::equations::EquationKey;
use crate::error::{Error, Result};
use crate::limiter::LimiterConfig;
use crate::mesh::{banded_mesh, model_mesh, sod_mesh, split_band, AlphaSpec, CutCellMesh};
use crate::riemann::{FluxKey, RoeJacobian};
use crate::spatial::{BoundaryCondition, Stabilization};

/// Initial data and exact solution of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKey {
    /// `sin 2πx` advected with unit speed.
    Sine,
    /// Smooth solution with a matching source term.
    Manufactured,
    /// `sin(4π(x + 0.5))`, steepening into shocks.
    SineShock,
    /// Three-wave linear system with smooth periodic data.
    Wave,
    /// Sod's shock tube on (−1, 1).
    Sod,
}

impl std::str::FromStr for ProblemKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Self::Sine),
            "manufactured" => Ok(Self::Manufactured),
            "sine-shock" => Ok(Self::SineShock),
            "wave" => Ok(Self::Wave),
            "sod" => Ok(Self::Sod),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshLayout {
    Uniform,
    /// One split background cell, index `k` (1-based).
    Model,
    /// Every background cell inside `band` is split.
    Banded,
    /// Cells whose midpoint lies in `band` are split.
    Midpoint,
    /// The shock-tube mesh on (−1, 1) with band (−0.75, 0.75).
    Sod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub layout: MeshLayout,
    pub n: usize,
    #[serde(default = "unit_interval")]
    pub domain: (f64, f64),
    #[serde(default)]
    pub band: Option<(f64, f64)>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaSpec,
}

fn unit_interval() -> (f64, f64) {
    (0.0, 1.0)
}

fn default_alpha() -> AlphaSpec {
    AlphaSpec::constant(0.1)
}

impl MeshSpec {
    pub fn banded(n: usize, alpha: AlphaSpec) -> Self {
        Self {
            layout: MeshLayout::Banded,
            n,
            domain: unit_interval(),
            band: Some((0.1, 0.9)),
            k: None,
            alpha,
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn build(&self) -> Result<CutCellMesh> {
        let band = || {
            self.band
                .ok_or_else(|| Error::Config(format!("mesh layout {:?} needs a band", self.layout)))
        };
        match self.layout {
            MeshLayout::Uniform => CutCellMesh::uniform(self.n, self.domain),
            MeshLayout::Model => {
                let k = self
                    .k
                    .ok_or_else(|| Error::Config("model mesh needs the split index k".into()))?;
                let AlphaSpec::Constant { value } = self.alpha else {
                    return Err(Error::Config("model mesh needs a constant cut fraction".into()));
                };
                model_mesh(self.n, k, value, self.domain)
            }
            MeshLayout::Banded => banded_mesh(self.n, self.domain, band()?, &self.alpha),
            MeshLayout::Midpoint => split_band(self.n, self.domain, band()?, &self.alpha),
            MeshLayout::Sod => match self.alpha {
                AlphaSpec::Random { seed } => sod_mesh(self.n, seed),
                _ => split_band(self.n, (-1.0, 1.0), (-0.75, 0.75), &self.alpha),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationSpec {
    pub enabled: bool,
    /// Use the earlier volume penalty (advection with the upwind flux only).
    pub legacy: bool,
    /// Average Euler states with the componentwise square-root formula instead of Roe's.
    pub literal_roe_average: bool,
    pub kink_aware: bool,
}

impl Default for StabilizationSpec {
    fn default() -> Self {
        Self {
            enabled: true,
            legacy: false,
            literal_roe_average: false,
            kink_aware: true,
        }
    }
}

impl StabilizationSpec {
    pub fn to_stabilization(self, nu: f64) -> Stabilization {
        Stabilization {
            enabled: self.enabled,
            variant: if self.legacy {
                VolumeVariant::Legacy
            } else {
                VolumeVariant::Full
            },
            nu,
            kink_aware: self.kink_aware,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoeSpec {
    pub entropy_fix: Option<f64>,
    pub jacobian: RoeJacobian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write an extra snapshot every this many steps.
    pub snapshot_every: Option<usize>,
    pub dump_mesh: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_every: None,
            dump_mesh: false,
        }
    }
}

/// Sweep over degrees, resolutions and cut-fraction modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub p_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub alphas: Vec<AlphaSpec>,
}

impl ConvergenceSpec {
    /// Degrees 0 to 3, N from 20 to 160, α = 1e-1, 1e-6 and random cut fractions with seed 42.
    pub fn standard() -> Self {
        Self {
            p_list: vec![0, 1, 2, 3],
            n_list: vec![20, 40, 80, 160],
            alphas: vec![AlphaSpec::constant(1e-1), AlphaSpec::constant(1e-6), AlphaSpec::random(42)],
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationKey,
    pub flux: FluxKey,
    pub problem: ProblemKey,
    pub mesh: MeshSpec,
    pub p: usize,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Final time; the problem's default when absent.
    #[serde(default)]
    pub t_final: Option<f64>,
    /// Boundary condition; periodic except for the shock tube when absent.
    #[serde(default)]
    pub bc: Option<BoundaryCondition>,
    /// Runge–Kutta order; `p + 1` capped at four when absent.
    #[serde(default)]
    pub rk_order: Option<usize>,
    #[serde(default)]
    pub limiter: LimiterConfig,
    #[serde(default)]
    pub stabilization: StabilizationSpec,
    #[serde(default)]
    pub roe: RoeSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub convergence: Option<ConvergenceSpec>,
}

fn default_nu() -> f64 {
    0.4
}

impl RunConfig {
    /// Read a `.toml` or `.json` file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            _ => Self::from_toml(&text)?,
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::Config(format!("nu = {} outside (0, 1)", self.nu)));
        }
        if self.p > 15 {
            return Err(Error::Config(format!("degree {} above 15", self.p)));
        }
        if let Some(t) = self.t_final {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("final time {t} is negative")));
            }
        }
        let ok = matches!(
            (self.equation, self.problem),
            (EquationKey::Advection, ProblemKey::Sine)
                | (EquationKey::Burgers, ProblemKey::Manufactured | ProblemKey::SineShock)
                | (EquationKey::Linsys, ProblemKey::Wave)
                | (EquationKey::Euler, ProblemKey::Manufactured | ProblemKey::Sod)
        );
        if !ok {
            return Err(Error::Config(format!(
                "problem {:?} is not defined for {:?}",
                self.problem, self.equation
            )));
        }
        Ok(())
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc.unwrap_or(match self.problem {
            ProblemKey::Sod => BoundaryCondition::Transmissive,
            _ => BoundaryCondition::Periodic,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.t_final.unwrap_or(match self.problem {
            ProblemKey::SineShock => 0.1,
            ProblemKey::Sod => 0.4,
            _ => 1.0,
        })
    }

    /// Shock tube with `n` background cells and random cut fractions.
    pub fn sod(n: usize, p: usize, seed: u64) -> Self {
        Self {
            equation: EquationKey::Euler,
            flux: FluxKey::Roe,
            problem: ProblemKey::Sod,
            mesh: MeshSpec {
                layout: MeshLayout::Sod,
                n,
                domain: (-1.0, 1.0),
                band: None,
                k: None,
                alpha: AlphaSpec::random(seed),
            },
            p,
            nu: 0.4,
            t_final: None,
            bc: None,
            rk_order: None,
            limiter: if p > 0 {
                LimiterConfig {
                    positivity: true,
                    ..LimiterConfig::tvdm()
                }
            } else {
                LimiterConfig::default()
            },
            stabilization: StabilizationSpec::default(),
            roe: RoeSpec::default(),
            output: OutputSpec::default(),
            convergence: None,
        }
    }

    /// Burgers with `sin(4π(x + 0.5))` on the 180-cell mesh.
    pub fn burgers_shock(p: usize, limited: bool) -> Self {
        Self {
            equation: EquationKey::Burgers,
            flux: FluxKey::Godunov,
            problem: ProblemKey::SineShock,
            mesh: MeshSpec::banded(100, AlphaSpec::random(42)),
            p,
            nu: 0.4,
            t_final: None,
            bc: None,
            rk_order: None,
            limiter: if limited {
                LimiterConfig::tvdm()
            } else {
                LimiterConfig::default()
            },
            stabilization: StabilizationSpec::default(),
            roe: RoeSpec::default(),
            output: OutputSpec::default(),
            convergence: None,
        }
    }

    /// A manufactured or smooth periodic run on the banded mesh.
    pub fn smooth(equation: EquationKey, p: usize, n: usize, alpha: AlphaSpec) -> Self {
        let (flux, problem) = match equation {
            EquationKey::Advection => (FluxKey::Upwind, ProblemKey::Sine),
            EquationKey::Burgers => (FluxKey::Godunov, ProblemKey::Manufactured),
            EquationKey::Linsys => (FluxKey::LinsysExact, ProblemKey::Wave),
            EquationKey::Euler => (FluxKey::Roe, ProblemKey::Manufactured),
        };
        Self {
            equation,
            flux,
            problem,
            mesh: MeshSpec::banded(n, alpha),
            p,
            nu: 0.4,
            t_final: None,
            bc: None,
            rk_order: None,
            limiter: LimiterConfig::default(),
            stabilization: StabilizationSpec::default(),
            roe: RoeSpec::default(),
            output: OutputSpec::default(),
            convergence: None,
        }
    }
}
