//! Run configuration shared by the batch commands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::Variant;
use crate::error::{Error, Result};
use crate::indicators::GammaIndicators;
use crate::inner::{AmgMode, SpectralInterval};
use crate::minres::{DEFAULT_MAXIT, DEFAULT_TOL};
use crate::pdeopt::{Observation, MAX_LEVEL, MIN_LEVEL};
use crate::synthetic::GridPreset;

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "DSADDLE_OUT";

/// Chebyshev step counts reported in the tables.
pub const DEFAULT_CHEB_ITERS: [usize; 7] = [1, 2, 3, 4, 5, 7, 10];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    SynthVerify,
    Pdeco,
    Bounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub levels: Vec<u32>,
    /// `None` selects the defaults of the observation type.
    pub betas: Option<Vec<f64>>,
    pub cheb_iters: Vec<usize>,
    pub observation: Observation,
    pub amg_mode: AmgMode,
    pub interval: SpectralInterval,
    pub preset: GridPreset,
    /// Repeats per grid cell; `None` selects the preset default.
    pub seeds: Option<usize>,
    pub base_seed: u64,
    pub eigens: bool,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub tol: f64,
    pub maxit: usize,
    pub indicators: Option<GammaIndicators>,
    /// `None` selects every variant that applies to the indicators.
    pub variants: Option<Vec<Variant>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: Subcommand::Pdeco,
            levels: vec![4],
            betas: None,
            cheb_iters: DEFAULT_CHEB_ITERS.to_vec(),
            observation: Observation::Full,
            amg_mode: AmgMode::Exact,
            interval: SpectralInterval::Analytic,
            preset: GridPreset::Ci,
            seeds: None,
            base_seed: 0,
            eigens: true,
            out: PathBuf::from("results"),
            workers: None,
            tol: DEFAULT_TOL,
            maxit: DEFAULT_MAXIT,
            indicators: None,
            variants: None,
        }
    }
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        RunConfig { subcommand, ..Default::default() }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn betas(&self) -> Vec<f64> {
        self.betas.clone().unwrap_or_else(|| self.observation.default_betas().to_vec())
    }

    pub fn repeats(&self) -> usize {
        self.seeds.unwrap_or_else(|| self.preset.default_repeats())
    }

    /// Replaces `out` with the value of [`OUT_ENV`] when it is set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUT_ENV).filter(|d| !d.is_empty()) {
            self.out = PathBuf::from(dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.levels.is_empty() || self.levels.iter().any(|k| !(MIN_LEVEL..=MAX_LEVEL).contains(k)) {
            return bad(format!("levels must be non-empty and lie in {MIN_LEVEL}..={MAX_LEVEL}"));
        }
        if self.betas().iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return bad("betas must be positive".into());
        }
        if self.cheb_iters.is_empty() || self.cheb_iters.contains(&0) {
            return bad("cheb-iters must be non-empty and positive".into());
        }
        if self.seeds == Some(0) {
            return bad("seeds must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.maxit == 0 {
            return bad("maxit must be positive".into());
        }
        if let Some(g) = &self.indicators {
            g.validate()?;
        }
        Ok(())
    }
}
