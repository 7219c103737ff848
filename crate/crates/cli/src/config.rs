//! Run configuration: what to run, on which space and mesh, and how to step
//! in time. A config can be read from TOML, built from flags, or both (flags
//! win), and serializes back to the same TOML.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use swg_core::mesh::MeshFamily;
use swg_core::studies::{ProjectionTarget, TimeStep};

use crate::error::{usage, CliError};

pub const DEFAULT_R: usize = 4;
pub const DEFAULT_MU: usize = 2;
pub const DEFAULT_LAMBDA: f64 = 0.05;
pub const DEFAULT_T: f64 = 1.0;
pub const DEFAULT_MMS: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    SpatialStudy,
    TemporalStudy,
    ProjectionStudy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SpatialStudy => "spatial-study",
            Command::TemporalStudy => "temporal-study",
            Command::ProjectionStudy => "projection-study",
        }
    }

    fn is_time_stepped(self) -> bool {
        !matches!(self, Command::ProjectionStudy)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub r: usize,
    pub mu: usize,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            r: DEFAULT_R,
            mu: DEFAULT_MU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshConfig {
    pub family: String,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            family: MeshFamily::QuasiA.name().to_string(),
            n: Vec::new(),
        }
    }
}

/// At most one of `lambda`, `k`, `M` may be set. If none is, commands that
/// step in time use `lambda = 0.05`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    #[serde(rename = "M_ref", default, skip_serializing_if = "Option::is_none")]
    pub m_ref: Option<usize>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_final: DEFAULT_T,
            lambda: None,
            k: None,
            m: None,
            m_ref: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub time: TimeConfig,
    /// Manufactured solution id. `solve` also accepts 0: zero initial data
    /// and no forcing.
    #[serde(default = "default_mms")]
    pub mms: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linf_samples: Option<usize>,
}

fn default_mms() -> u8 {
    DEFAULT_MMS
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            space: SpaceConfig::default(),
            mesh: MeshConfig::default(),
            time: TimeConfig::default(),
            mms: DEFAULT_MMS,
            target: None,
            output: None,
            quad_points: None,
            linf_samples: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    pub fn family(&self) -> Result<MeshFamily, CliError> {
        MeshFamily::from_str(&self.mesh.family).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn projection_target(&self) -> Result<ProjectionTarget, CliError> {
        self.target
            .as_deref()
            .unwrap_or("nonsmooth")
            .parse()
            .map_err(|e: swg_core::Error| CliError::Usage(e.to_string()))
    }

    /// The single time-step rule of a spatial study or a solve.
    pub fn time_step(&self) -> Result<TimeStep, CliError> {
        let t = &self.time;
        match (t.lambda, t.k, &t.m) {
            (None, None, None) => Ok(TimeStep::Courant(DEFAULT_LAMBDA)),
            (Some(l), None, None) => Ok(TimeStep::Courant(l)),
            (None, Some(k), None) => Ok(TimeStep::Fixed(k)),
            (None, None, Some(m)) => match m.as_slice() {
                [m] => Ok(TimeStep::Steps(*m)),
                _ => usage(format!(
                    "{} takes a single M, got {}",
                    self.command,
                    m.len()
                )),
            },
            _ => usage("give only one of --lambda, --k and --M"),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), CliError> {
        let r = self.space.r;
        let mu = self.space.mu;
        if r < 3 {
            return usage(format!("r must be at least 3, got {r}"));
        }
        if mu < 1 || mu + 2 > r {
            return usage(format!(
                "mu must lie in [1, r - 2] = [1, {}], got {mu}",
                r - 2
            ));
        }
        let family = self.family()?;
        if self.mesh.n.is_empty() {
            return usage("no resolution given (--N)");
        }
        if let Some(&n) = self.mesh.n.iter().find(|&&n| !family.accepts(n)) {
            let rule = match family {
                MeshFamily::Uniform => "N >= 1",
                MeshFamily::QuasiA => "an even N >= 2",
                MeshFamily::QuasiB => "an odd N",
            };
            return usage(format!("the {family} mesh needs {rule}, got N = {n}"));
        }
        let t = &self.time;
        if !(t.t_final > 0.0 && t.t_final.is_finite()) {
            return usage(format!("T must be positive, got {}", t.t_final));
        }
        if self.linf_samples == Some(0) {
            return usage("--linf-samples must be positive");
        }
        match self.command {
            Command::Solve => {
                if self.mesh.n.len() != 1 {
                    return usage("solve takes a single N");
                }
                if self.mms > 2 {
                    return usage(format!(
                        "--mms must be 0, 1 or 2 for solve, got {}",
                        self.mms
                    ));
                }
                self.time_step()?;
            }
            Command::SpatialStudy => {
                self.check_mms()?;
                self.time_step()?;
            }
            Command::TemporalStudy => {
                self.check_mms()?;
                if self.mesh.n.len() != 1 {
                    return usage("temporal-study takes a single N");
                }
                if t.lambda.is_some() || t.k.is_some() {
                    return usage("temporal-study takes an M list, not --lambda or --k");
                }
                let Some(ms) = t.m.as_ref().filter(|m| !m.is_empty()) else {
                    return usage("temporal-study needs an M list (--M)");
                };
                if ms.contains(&0) {
                    return usage("M values must be positive");
                }
                let max_m = *ms.iter().max().unwrap_or(&0);
                match t.m_ref {
                    None => return usage("temporal-study needs --M-ref"),
                    Some(m_ref) if m_ref <= max_m => {
                        return usage(format!("M_ref = {m_ref} must exceed max(M) = {max_m}"))
                    }
                    Some(_) => {}
                }
            }
            Command::ProjectionStudy => {
                if r < 4 {
                    return usage("projection-study measures the H3 error and needs r >= 4");
                }
                self.projection_target()?;
            }
        }
        if self.command.is_time_stepped() {
            if let Some(l) = t.lambda {
                if !(l > 0.0 && l.is_finite()) {
                    return usage(format!("lambda must be positive, got {l}"));
                }
            }
            if let Some(k) = t.k {
                if !(k > 0.0 && k.is_finite()) {
                    return usage(format!("k must be positive, got {k}"));
                }
            }
        }
        Ok(())
    }

    fn check_mms(&self) -> Result<(), CliError> {
        if !(1..=2).contains(&self.mms) {
            return usage(format!("--mms must be 1 or 2, got {}", self.mms));
        }
        Ok(())
    }
}
