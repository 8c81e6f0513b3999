use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::verify::VerifyConfig;

use super::CliError;

/// Effective settings of one invocation: built-in defaults, then the config file, then flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Sphere-rule size.
    pub samples: usize,
    /// Solver tolerance for `position`.
    pub tol: f64,
    pub max_iter: usize,
    /// Dimension for corpus body names.
    pub dim: Option<usize>,
    /// `script L_k` for every `k`.
    pub script_l: f64,
    /// Injected type-2 references keyed by `l_p` exponent, e.g. `"4" = 2.0`.
    pub t2: BTreeMap<String, f64>,
    /// Default window for unknown universal constants.
    pub window: [f64; 2],
    /// Overrides keyed `"<check_id>.<bound>"`.
    pub windows: BTreeMap<String, [f64; 2]>,
    pub stability_factor: f64,
    /// JSONL destination; the CSV summary goes next to it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            seed: v.seed,
            samples: v.samples,
            tol: 1e-9,
            max_iter: 200,
            dim: None,
            script_l: v.script_l,
            t2: BTreeMap::new(),
            window: v.window,
            windows: v.windows,
            stability_factor: v.stability_factor,
            out: None,
        }
    }
}

/// Flag values; `None` leaves the file or default in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Parses a TOML file (`.toml`) or JSON otherwise.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let is_toml = path.extension().is_some_and(|e| e == "toml");
        if is_toml {
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| {
                CliError::Usage(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
            })
        }
    }

    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match file {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(v) = flags.seed {
            cfg.seed = v;
        }
        if let Some(v) = flags.samples {
            cfg.samples = v;
        }
        if let Some(v) = flags.tol {
            cfg.tol = v;
        }
        if let Some(v) = flags.dim {
            cfg.dim = Some(v);
        }
        if flags.out.is_some() {
            cfg.out.clone_from(&flags.out);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(CliError::Usage(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("max_iter must be positive".into()));
        }
        if self.t2.values().any(|v| !(*v >= 1.0)) {
            return Err(CliError::Usage("type-2 references must be >= 1".into()));
        }
        self.verify_config().validate()?;
        Ok(())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            seed: self.seed,
            samples: self.samples,
            script_l: self.script_l,
            window: self.window,
            windows: self.windows.clone(),
            stability_factor: self.stability_factor,
        }
    }

    /// Injected `T_2(l_p)`, falling back to the built-in reference.
    pub fn t2_reference(&self, p: f64) -> f64 {
        self.t2
            .iter()
            .find(|(k, _)| k.parse::<f64>().is_ok_and(|q| q == p))
            .map_or_else(|| self.verify_config().t2_reference(p), |(_, v)| *v)
    }

    /// Hex sha-256 of the canonical JSON, with the output path left out.
    pub fn hash(&self) -> String {
        let mut copy = self.clone();
        copy.out = None;
        let json = serde_json::to_string(&copy).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
