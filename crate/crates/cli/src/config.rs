//! Experiment configuration. Every run is determined by this structure plus the
//! master seed; the hash of its canonical JSON form is written into each output.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wiretap_ldpc::protocol::NoiseMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub channel: ChannelConfig,
    pub code: CodeConfig,
    pub capacity: CapacityConfig,
    pub simulate: SimulateConfig,
    pub sweep: SweepSection,
    pub design: DesignConfig,
    pub bounds: BoundsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: None,
            out: PathBuf::from("out"),
            channel: ChannelConfig::default(),
            code: CodeConfig::default(),
            capacity: CapacityConfig::default(),
            simulate: SimulateConfig::default(),
            sweep: SweepSection::default(),
            design: DesignConfig::default(),
            bounds: BoundsConfig::default(),
        }
    }
}

/// Channel settings in decibels; converted to linear scale once, at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Maximum SNR `P / sigma^2` in dB.
    pub snr_db: f64,
    /// Wiretapper gain `alpha^2` in dB.
    pub alpha_db: f64,
    /// Operating `beta_tilde`; full power when absent.
    pub beta_tilde: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            snr_db: -0.15,
            alpha_db: 0.0,
            beta_tilde: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeSource {
    Sample,
    Load,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub source: CodeSource,
    pub n: usize,
    /// Regular degrees; ignored when `distribution` is set.
    pub dv: usize,
    pub dc: usize,
    /// Irregular degree distribution (JSON).
    pub distribution: Option<PathBuf>,
    /// Code bundle to load when `source = "load"`.
    pub path: Option<PathBuf>,
    pub remove_4cycles: bool,
    /// Second regular code stacked under `C` to form `W` (comparison scheme).
    pub extra: Option<ExtraCode>,
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self {
            source: CodeSource::Sample,
            n: 100_000,
            dv: 3,
            dc: 4,
            distribution: None,
            path: None,
            remove_4cycles: true,
            extra: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraCode {
    pub dv: usize,
    pub dc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig {
    pub snr_db_min: f64,
    pub snr_db_max: f64,
    pub snr_db_step: f64,
    pub r_l: Vec<f64>,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            snr_db_min: -5.0,
            snr_db_max: 5.0,
            snr_db_step: 1.0,
            r_l: vec![0.0, 0.1, 0.25],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub k: usize,
    pub trials: u64,
    pub max_iter: usize,
    pub noise: NoiseMode,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            k: 0,
            trials: 1000,
            max_iter: 200,
            noise: NoiseMode::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Key lengths; when empty, `key_rates` times `n` is used.
    pub k: Vec<usize>,
    pub key_rates: Vec<f64>,
    /// Explicit `beta_tilde` candidates; otherwise `beta_step_db` below full power.
    pub beta_grid: Vec<f64>,
    /// Spacing of the default grid in dB of `beta_tilde^2`.
    pub beta_step_db: f64,
    pub beta_count: usize,
    pub trials: u64,
    pub refine_trials: u64,
    pub eps_cap: f64,
    pub batch: u64,
    pub max_iter: usize,
    pub noise: NoiseMode,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            k: Vec::new(),
            key_rates: vec![0.05, 0.1, 0.15, 0.2],
            beta_grid: Vec::new(),
            beta_step_db: 0.05,
            beta_count: 20,
            trials: 2000,
            refine_trials: 10_000,
            eps_cap: 0.01,
            batch: 64,
            max_iter: 200,
            noise: NoiseMode::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignConfig {
    pub initial: Option<PathBuf>,
    pub r_k: f64,
    pub eps: f64,
    pub m_s: usize,
    pub m_w: usize,
    pub delta: f64,
    pub max_rounds: usize,
    pub max_var_degree: Option<u32>,
    pub rho_step: bool,
    pub grid_span: f64,
    pub grid_intervals: usize,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            initial: None,
            r_k: 0.155,
            eps: 1e-6,
            m_s: 100,
            m_w: 100,
            delta: 0.5,
            max_rounds: 50,
            max_var_degree: None,
            rho_step: true,
            grid_span: wiretap_ldpc::density::DEFAULT_LLR_SPAN,
            grid_intervals: wiretap_ldpc::density::DEFAULT_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub dv: u32,
    pub dc: u32,
    /// Defaults to `1 - dv/dc`.
    pub r_c: Option<f64>,
    pub r_k: f64,
    pub n: Vec<u64>,
    /// When set, degrees are chosen by the asymptotic parameter selection.
    pub epsilon: Option<f64>,
    pub max_dv: u32,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            dv: 6,
            dc: 8,
            r_c: None,
            r_k: 0.1,
            n: vec![10_000, 100_000, 1_000_000],
            epsilon: None,
            max_dv: 20_000,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.channel.snr_db.is_finite() || !self.channel.alpha_db.is_finite() {
            bail!("channel snr_db and alpha_db must be finite");
        }
        if self.code.n == 0 {
            bail!("code.n must be positive");
        }
        if self.code.source == CodeSource::Load && self.code.path.is_none() {
            bail!("code.source = \"load\" needs code.path");
        }
        // an inverted snr range is allowed and yields an empty grid
        let c = &self.capacity;
        if !(c.snr_db_step > 0.0) {
            bail!("capacity.snr_db_step must be positive");
        }
        if c.r_l.iter().any(|r| !(0.0..=1.0).contains(r)) {
            bail!("capacity.r_l values must lie in [0, 1]");
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, leaving out the output directory
    /// and thread count, which do not affect results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.threads = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
