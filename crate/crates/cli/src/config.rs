//! Experiment configuration. Every table rejects unknown keys.

use std::path::Path;

use anyhow::{Context, Result};
use oam_lattice::disorder::{DisorderScope, Envelope};
use oam_lattice::edge::EdgeSide;
use oam_lattice::hamiltonian::{GaugeConfig, Model};
use oam_lattice::{Boundary, Flux, LatticeSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spectrum,
    Butterfly,
    EdgeMap,
    Displacement,
    Chern,
    Bands,
    Disorder,
    Qsh,
    DispersionCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub omega: OmegaConfig,
    #[serde(default)]
    pub edge: EdgeConfig,
    #[serde(default)]
    pub map: MapConfig,
    pub disorder: Option<DisorderConfig>,
    #[serde(default)]
    pub butterfly: ButterflyConfig,
    #[serde(default)]
    pub chern: ChernConfig,
    #[serde(default)]
    pub qsh: QshConfig,
    #[serde(default)]
    pub optics: OpticsConfig,
}

fn default_gamma() -> f64 {
    0.2
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            gamma: default_gamma(),
            lattice: LatticeConfig::default(),
            model: ModelConfig::default(),
            omega: OmegaConfig::default(),
            edge: EdgeConfig::default(),
            map: MapConfig::default(),
            disorder: None,
            butterfly: ButterflyConfig::default(),
            chern: ChernConfig::default(),
            qsh: QshConfig::default(),
            optics: OpticsConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryConfig {
    Open,
    Periodic,
}

impl From<BoundaryConfig> for Boundary {
    fn from(b: BoundaryConfig) -> Self {
        match b {
            BoundaryConfig::Open => Boundary::Open,
            BoundaryConfig::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub n_x: usize,
    pub l_min: i64,
    pub l_max: i64,
    pub bc_x: BoundaryConfig,
    pub bc_y: BoundaryConfig,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { n_x: 10, l_min: -50, l_max: 50, bc_x: BoundaryConfig::Open, bc_y: BoundaryConfig::Periodic }
    }
}

impl LatticeConfig {
    pub fn spec(&self, spin_dim: usize) -> oam_lattice::Result<LatticeSpec> {
        LatticeSpec::new(self.n_x, self.l_min, self.l_max, spin_dim, self.bc_x.into(), self.bc_y.into())
    }

    pub fn window(&self) -> i64 {
        self.l_max - self.l_min + 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Landau { phi0: String },
    OamGauge { phi0: String },
    Dirac { phi0: String },
    Qsh { beta0: f64, lambda0: f64 },
    NonAbelian { gauge: GaugeConfig<f64> },
    Decoupled,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Landau { phi0: "1/6".into() }
    }
}

impl ModelConfig {
    pub fn flux(&self) -> Option<oam_lattice::Result<Flux>> {
        match self {
            ModelConfig::Landau { phi0 } | ModelConfig::OamGauge { phi0 } | ModelConfig::Dirac { phi0 } => {
                Some(phi0.parse())
            }
            _ => None,
        }
    }

    pub fn model(&self) -> oam_lattice::Result<Model<f64>> {
        Ok(match self {
            ModelConfig::Landau { phi0 } => Model::Landau { phi0: phi0.parse()? },
            ModelConfig::OamGauge { phi0 } => Model::OamGauge { phi0: phi0.parse()? },
            ModelConfig::Dirac { phi0 } => Model::Dirac { phi0: phi0.parse()? },
            ModelConfig::Qsh { beta0, lambda0 } => Model::Qsh { beta0: *beta0, lambda0: *lambda0 },
            ModelConfig::NonAbelian { gauge } => Model::NonAbelian(gauge.clone()),
            ModelConfig::Decoupled => Model::Decoupled,
        })
    }

    pub fn spin_dim(&self) -> usize {
        match self {
            ModelConfig::Dirac { .. } | ModelConfig::Qsh { .. } | ModelConfig::NonAbelian { .. } => 2,
            _ => 1,
        }
    }
}

/// Either an explicit list or `points` values evenly spanning [min, max].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaConfig {
    #[serde(default = "omega_min")]
    pub min: f64,
    #[serde(default = "omega_max")]
    pub max: f64,
    #[serde(default = "omega_points")]
    pub points: usize,
    pub values: Option<Vec<f64>>,
}

fn omega_min() -> f64 {
    -4.5
}
fn omega_max() -> f64 {
    4.5
}
fn omega_points() -> usize {
    400
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self { min: omega_min(), max: omega_max(), points: omega_points(), values: None }
    }
}

impl OmegaConfig {
    pub fn grid(&self) -> Vec<f64> {
        match &self.values {
            Some(v) => v.clone(),
            None => oam_lattice::scattering::linspace(self.min, self.max, self.points),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub side: EdgeSide,
    pub depth: usize,
    #[serde(default)]
    pub input_l: i64,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self { side: EdgeSide::Right, depth: 3, input_l: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub omega: f64,
    pub j: usize,
    pub l: i64,
    #[serde(default)]
    pub s: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { omega: -2.2, j: 0, l: 0, s: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    #[serde(default)]
    pub sigma_detuning: f64,
    #[serde(default)]
    pub sigma_coupling_mag: f64,
    #[serde(default)]
    pub sigma_coupling_phase: f64,
    #[serde(default)]
    pub sigma_loss: f64,
    /// Width w of F(x) = 1 − e^{−(x/w)²}; absent means no envelope.
    pub envelope_width: Option<f64>,
    #[serde(default)]
    pub scope: DisorderScope,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_input_ls")]
    pub input_ls: Vec<i64>,
}

fn default_trials() -> usize {
    100
}
fn default_input_ls() -> Vec<i64> {
    vec![0]
}

impl DisorderConfig {
    pub fn model(&self) -> oam_lattice::Disorder {
        oam_lattice::Disorder {
            sigma_detuning: self.sigma_detuning,
            sigma_coupling_mag: self.sigma_coupling_mag,
            sigma_coupling_phase: self.sigma_coupling_phase,
            sigma_loss: self.sigma_loss,
            oam_envelope: self.envelope_width.map(|width| Envelope { width }),
            scope: self.scope,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ButterflyConfig {
    pub q_max: i64,
}

impl Default for ButterflyConfig {
    fn default() -> Self {
        Self { q_max: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernConfig {
    pub nkx: usize,
    pub nky: usize,
    pub touch_tol: f64,
}

impl Default for ChernConfig {
    fn default() -> Self {
        Self { nkx: 48, nky: 48, touch_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QshConfig {
    pub lambda0: f64,
    pub beta0: Vec<f64>,
    pub target: f64,
    pub nk: usize,
    /// β₀ values at which polarized transmission maps are written.
    #[serde(default)]
    pub map_beta0: Vec<f64>,
}

impl Default for QshConfig {
    fn default() -> Self {
        Self { lambda0: 0.6, beta0: vec![0.0, 0.075, 0.125], target: -1.6, nk: 48, map_beta0: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsConfig {
    pub r: Vec<f64>,
    pub s_c: f64,
    /// k₀ S_c = 2πn and k₀ S_a = (2m + 1)π.
    pub n: u32,
    pub m: u32,
    #[serde(default)]
    pub phi_x: f64,
    #[serde(default)]
    pub phi_y: f64,
    pub grid: usize,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self { r: vec![0.05, 0.1, 0.2], s_c: 1.0, n: 101, m: 30, phi_x: 0.0, phi_y: 0.0, grid: 16 }
    }
}

/// Parses a config, reporting the key path of the first offending entry.
pub fn parse(text: &str) -> Result<Config> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("at `{path}`: {}", e.into_inner().message().trim())
    })
}

pub fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text)
}
