//! Fixed-length image descriptors: color autocorrelogram, edge-orientation
//! histogram, fuzzy opponent-color histogram and pyramid HOG.

mod autocolor;
pub mod canny;
mod edgehist;
mod fuzzy;
mod phog;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::imaging::RasterImage;

pub use autocolor::extract_autocolor;
pub use canny::{canny, CannyConfig, EdgeMap};
pub use edgehist::extract_edgehist;
pub use fuzzy::{extract_fuzzyopp, triangular_memberships};
pub use phog::extract_phog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    AutoColor,
    Edge,
    Fuzzy,
    Phog,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 4] = [
        DescriptorKind::AutoColor,
        DescriptorKind::Edge,
        DescriptorKind::Fuzzy,
        DescriptorKind::Phog,
    ];

    /// Lowercase identifier used in config files and cache paths.
    pub fn id(self) -> &'static str {
        match self {
            DescriptorKind::AutoColor => "autocolor",
            DescriptorKind::Edge => "edge",
            DescriptorKind::Fuzzy => "fuzzy",
            DescriptorKind::Phog => "phog",
        }
    }

    /// Name printed in reports.
    pub fn display_name(self) -> &'static str {
        match self {
            DescriptorKind::AutoColor => "AutoColor",
            DescriptorKind::Edge => "Edge",
            DescriptorKind::Fuzzy => "Fuzzy",
            DescriptorKind::Phog => "PHOG",
        }
    }

    /// Whether the output is an L1-normalized histogram.
    pub fn is_histogram(self) -> bool {
        !matches!(self, DescriptorKind::AutoColor)
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DescriptorKind::ALL
            .into_iter()
            .find(|k| k.id().eq_ignore_ascii_case(s) || k.display_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown descriptor {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    descriptor: DescriptorKind,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(descriptor: DescriptorKind, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { descriptor, values }
    }

    pub fn descriptor(&self) -> DescriptorKind {
        self.descriptor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AutoColorConfig {
    pub levels_per_channel: usize,
    pub distances: Vec<usize>,
}

impl Default for AutoColorConfig {
    fn default() -> Self {
        Self {
            levels_per_channel: 4,
            distances: vec![1, 3, 5, 7],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeHistConfig {
    /// The image is split into `grid x grid` sub-images.
    pub grid: usize,
    pub orientation_bins: usize,
}

impl Default for EdgeHistConfig {
    fn default() -> Self {
        Self {
            grid: 4,
            orientation_bins: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzyConfig {
    pub bins_per_axis: usize,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        Self { bins_per_axis: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhogConfig {
    pub orientation_bins: usize,
    /// Finest pyramid level; level `l` has `2^l x 2^l` cells.
    pub pyramid_levels: usize,
}

impl Default for PhogConfig {
    fn default() -> Self {
        Self {
            orientation_bins: 8,
            pyramid_levels: 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DescriptorConfig {
    pub autocolor: AutoColorConfig,
    pub edge: EdgeHistConfig,
    pub fuzzy: FuzzyConfig,
    pub phog: PhogConfig,
    pub canny: CannyConfig,
}

impl DescriptorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        let ac = &self.autocolor;
        if ac.levels_per_channel == 0 || ac.levels_per_channel > 256 {
            return bad("autocolor.levels_per_channel must be in 1..=256");
        }
        if ac.distances.is_empty() || ac.distances.contains(&0) {
            return bad("autocolor.distances must be non-empty and positive");
        }
        if self.edge.grid == 0 || self.edge.orientation_bins == 0 {
            return bad("edge.grid and edge.orientation_bins must be >= 1");
        }
        if self.fuzzy.bins_per_axis == 0 {
            return bad("fuzzy.bins_per_axis must be >= 1");
        }
        if self.phog.orientation_bins == 0 || self.phog.pyramid_levels > 8 {
            return bad("phog.orientation_bins must be >= 1 and pyramid_levels <= 8");
        }
        let c = &self.canny;
        if !(c.gaussian_sigma.is_finite() && c.gaussian_sigma >= 0.0) {
            return bad("canny.gaussian_sigma must be finite and non-negative");
        }
        if !(0.0 < c.low_ratio && c.low_ratio < c.high_ratio && c.high_ratio <= 1.0) {
            return bad("canny ratios must satisfy 0 < low_ratio < high_ratio <= 1");
        }
        Ok(())
    }

    /// Output length of `kind` under this configuration.
    pub fn dimension(&self, kind: DescriptorKind) -> usize {
        match kind {
            DescriptorKind::AutoColor => {
                self.autocolor.levels_per_channel.pow(3) * self.autocolor.distances.len()
            }
            DescriptorKind::Edge => self.edge.grid * self.edge.grid * self.edge.orientation_bins,
            DescriptorKind::Fuzzy => self.fuzzy.bins_per_axis.pow(3),
            DescriptorKind::Phog => {
                let cells: usize = (0..=self.phog.pyramid_levels).map(|l| 4usize.pow(l as u32)).sum();
                self.phog.orientation_bins * cells
            }
        }
    }

    /// Short hash of the parameters that affect `kind`.
    pub fn fingerprint(&self, kind: DescriptorKind) -> String {
        let relevant = match kind {
            DescriptorKind::AutoColor => serde_json::to_string(&self.autocolor),
            DescriptorKind::Edge => serde_json::to_string(&(&self.edge, &self.canny)),
            DescriptorKind::Fuzzy => serde_json::to_string(&self.fuzzy),
            DescriptorKind::Phog => serde_json::to_string(&(&self.phog, &self.canny)),
        }
        .expect("config serializes");
        let digest = Sha256::digest(format!("{}:{relevant}", kind.id()).as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Runs the descriptor named by `kind`.
pub fn extract(kind: DescriptorKind, image: &RasterImage, cfg: &DescriptorConfig) -> FeatureVector {
    match kind {
        DescriptorKind::AutoColor => extract_autocolor(image, cfg),
        DescriptorKind::Edge => extract_edgehist(image, cfg),
        DescriptorKind::Fuzzy => extract_fuzzyopp(image, cfg),
        DescriptorKind::Phog => extract_phog(image, cfg),
    }
}

/// Divides by the sum unless the sum is zero.
pub(crate) fn l1_normalize(values: &mut [f64]) {
    let sum: f64 = values.iter().sum();
    if sum > 0.0 {
        values.iter_mut().for_each(|v| *v /= sum);
    }
}

/// Bin of an undirected angle in `[0, pi)` among `bins` uniform bins.
#[inline]
pub(crate) fn orientation_bin(theta: f64, bins: usize) -> usize {
    ((theta / std::f64::consts::PI * bins as f64) as usize).min(bins - 1)
}
