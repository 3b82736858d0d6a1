use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierSpec;
use crate::datasets::{validate_fractions, EvaluationProtocol, DEFAULT_FRACTIONS};
use crate::descriptors::{DescriptorConfig, DescriptorKind};
use crate::error::{Error, Result};

/// Everything needed to reproduce one experiment grid. Stored as TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub output: PathBuf,
    /// Feature cache root; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub fractions: Vec<f64>,
    pub descriptors: Vec<DescriptorKind>,
    /// Write one per-group CSV per grid cell.
    pub audit: bool,
    pub protocol: EvaluationProtocol,
    pub descriptor: DescriptorConfig,
    pub classifiers: Vec<ClassifierSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::from("corpus"),
            output: PathBuf::from("results"),
            cache_dir: None,
            seed: 0,
            jobs: 0,
            fractions: DEFAULT_FRACTIONS.to_vec(),
            descriptors: DescriptorKind::ALL.to_vec(),
            audit: true,
            protocol: EvaluationProtocol::default(),
            descriptor: DescriptorConfig::default(),
            classifiers: ClassifierSpec::defaults(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.descriptors.is_empty() {
            return Err(Error::Config("no descriptors selected".into()));
        }
        if self.classifiers.is_empty() {
            return Err(Error::Config("no classifiers selected".into()));
        }
        let mut seen = HashSet::new();
        if let Some(d) = self.descriptors.iter().find(|d| !seen.insert(**d)) {
            return Err(Error::Config(format!("descriptor {d} listed twice")));
        }
        let mut names = HashSet::new();
        for spec in &self.classifiers {
            spec.validate()?;
            if !names.insert(spec.short_name()) {
                return Err(Error::Config(format!("two classifiers share the name {}", spec.short_name())));
            }
        }
        validate_fractions(&self.fractions)?;
        self.protocol.validate()?;
        self.descriptor.validate()?;
        Ok(())
    }
}
