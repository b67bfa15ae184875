use std::path::{Path, PathBuf};

use clap::Args;
use polytrack_core::sim::Curvature;
use polytrack_core::AlgorithmParams;
use serde::Deserialize;

use crate::CliError;

/// Flags shared by every subcommand. Anything given here overrides the
/// matching field of the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Smallest curvature of the sector
    #[arg(long)]
    pub m: Option<f64>,
    /// Largest curvature of the sector
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Integrator order
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of curvature samples in the rate sweep
    #[arg(long)]
    pub grid: Option<usize>,
    /// Simulation horizon
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// optimal, heavy_ball, gradient_descent, custom or random; compare takes
    /// a comma-separated list
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Seed for `--algorithm random`
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Extra flags for `np-check`.
#[derive(Debug, Clone, Default, Args)]
pub struct NpFlags {
    /// Candidate rate; defaults to the lower bound for the sector and order
    #[arg(long)]
    pub rho: Option<f64>,
    /// Spacing of the pole perturbations
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub a: Option<Vec<Vec<f64>>>,
    pub delta: Option<Curvature>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub algorithm: Option<String>,
    pub algorithms: Option<Vec<String>>,
    pub params: Option<AlgorithmParams>,
    pub params_path: Option<PathBuf>,
    pub init_offset: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub rho: Option<f64>,
    pub pick_delta: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        if let Some(rel) = &cfg.params_path {
            let full = path.parent().map_or(rel.clone(), |d| d.join(rel));
            let text = std::fs::read_to_string(&full)
                .map_err(|e| CliError::Input(format!("cannot read params {}: {e}", full.display())))?;
            let params = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("params {}: {e}", full.display())))?;
            cfg.params = Some(params);
        }
        Ok(cfg)
    }

    /// Config file (if any) with the command-line flags laid over it.
    pub fn resolve(flags: &Flags, np: Option<&NpFlags>) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.m = flags.m.or(cfg.m);
        cfg.l = flags.l.or(cfg.l);
        cfg.n = flags.n.or(cfg.n);
        cfg.grid = flags.grid.or(cfg.grid);
        cfg.t = flags.t.or(cfg.t);
        cfg.seed = flags.seed.or(cfg.seed);
        if let Some(alg) = &flags.algorithm {
            cfg.algorithm = Some(alg.clone());
            cfg.algorithms = Some(alg.split(',').map(|s| s.trim().to_string()).collect());
        }
        if let Some(np) = np {
            cfg.rho = np.rho.or(cfg.rho);
            cfg.pick_delta = np.delta.or(cfg.pick_delta);
        }
        Ok(cfg)
    }

    pub fn sector(&self) -> Result<(f64, f64), CliError> {
        match (self.m, self.l) {
            (Some(m), Some(l)) => Ok((m, l)),
            _ => Err(CliError::Input("the sector needs both --m and --L".into())),
        }
    }

    pub fn order(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Input("missing integrator order --n".into()))
    }
}
