use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use magbound::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Constants, corner sweep and the 2D cross-check.
    Theorem1,
    /// Curved-boundary sweeps and the A coefficient.
    Theorem2,
    /// Weak-coupling limit of the square well.
    Appendix,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Theorem1 => "theorem1",
            Preset::Theorem2 => "theorem2",
            Preset::Appendix => "appendix",
        }
    }
}

/// One run, as persisted in `config.json`. Serializes to a flat object keyed
/// by `command`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Degennes {
        xi_min: f64,
        xi_max: f64,
        points: usize,
    },
    CornerBound {
        deltas: Vec<f64>,
    },
    CurvedBound {
        kappa: String,
        mean: f64,
        width: f64,
        path: Option<String>,
        deltas: Vec<f64>,
        rho: f64,
        c_hat: f64,
    },
    WeakCoupling {
        potential: String,
        mean: f64,
        deltas: Vec<f64>,
        window: Option<f64>,
        n: usize,
    },
    Solve2d {
        kind: String,
        delta: f64,
        radius: f64,
        h: f64,
        k: usize,
        mean: f64,
        width: f64,
        field: bool,
    },
    Reproduce {
        preset: Preset,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    /// Recorded for completeness; no stage draws random numbers.
    pub seed: u64,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { version: VERSION.to_string(), seed: 0, command }
    }

    pub fn preset(preset: Preset) -> Self {
        Self::new(Command::Reproduce { preset })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Checks that need no computation.
    pub fn validate(&self) -> Result<()> {
        let sweep = |deltas: &[f64]| -> Result<()> {
            if deltas.is_empty() {
                return Err(Error::Config("empty delta sweep".into()));
            }
            if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
                return Err(Error::Config(format!("delta = {d} must be positive")));
            }
            Ok(())
        };
        match &self.command {
            Command::Degennes { xi_min, xi_max, points } => {
                if !(xi_min < xi_max) || *points < 2 {
                    return Err(Error::Config(format!("need xi_min < xi_max and points >= 2, got [{xi_min}, {xi_max}] x {points}")));
                }
            }
            Command::CornerBound { deltas } => sweep(deltas)?,
            Command::CurvedBound { deltas, .. } => sweep(deltas)?,
            Command::WeakCoupling { deltas, n, .. } => {
                sweep(deltas)?;
                if *n < 3 {
                    return Err(Error::Config(format!("n = {n} is too small")));
                }
            }
            Command::Solve2d { delta, radius, h, k, .. } => {
                if !(*delta >= 0.0 && *radius > 0.0 && *h > 0.0 && *k >= 1) {
                    return Err(Error::Config(format!("invalid 2D run delta = {delta}, radius = {radius}, h = {h}, k = {k}")));
                }
            }
            Command::Reproduce { .. } => {}
        }
        Ok(())
    }
}
