use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::descriptors::{extract, DescriptorConfig, DescriptorKind};
use crate::error::{Error, Result};
use crate::imaging::RasterImage;

/// Runs descriptors with an optional on-disk cache at
/// `<cache_dir>/<descriptor>/<config hash>/<image hash>.csvrow`.
///
/// Values are written in shortest round-trip form, so a cache hit returns
/// bit-identical features. Entries are written to a temporary file and
/// renamed into place, so concurrent writers never expose partial rows.
#[derive(Debug)]
pub struct FeatureExtractor {
    cfg: DescriptorConfig,
    cache_dir: Option<PathBuf>,
    computed: AtomicUsize,
    hits: AtomicUsize,
}

impl FeatureExtractor {
    pub fn new(cfg: DescriptorConfig, cache_dir: Option<PathBuf>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            cache_dir,
            computed: AtomicUsize::new(0),
            hits: AtomicUsize::new(0),
        })
    }

    pub fn config(&self) -> &DescriptorConfig {
        &self.cfg
    }

    /// Descriptor evaluations performed (cache misses).
    pub fn extraction_count(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn entry_path(&self, kind: DescriptorKind, image: &RasterImage) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| {
            d.join(kind.id())
                .join(self.cfg.fingerprint(kind))
                .join(format!("{}.csvrow", image.content_hash()))
        })
    }

    pub fn extract(&self, kind: DescriptorKind, image: &RasterImage) -> Result<Vec<f64>> {
        let entry = self.entry_path(kind, image);
        let dim = self.cfg.dimension(kind);
        if let Some(path) = &entry {
            match read_row(path, dim) {
                Ok(Some(v)) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(v);
                }
                Ok(None) => {}
                Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
        let values = extract(kind, image, &self.cfg).into_values();
        self.computed.fetch_add(1, Ordering::Relaxed);
        if let Some(path) = &entry {
            write_row(path, &values)?;
        }
        Ok(values)
    }
}

fn read_row(path: &Path, dim: usize) -> Result<Option<Vec<f64>>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let values = text
        .trim_end()
        .split(',')
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Error::format("cache row", e.to_string()))?;
    if values.len() != dim || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::format("cache row", format!("expected {dim} finite values")));
    }
    Ok(Some(values))
}

fn write_row(path: &Path, values: &[f64]) -> Result<()> {
    let dir = path.parent().expect("cache entries live in a directory");
    fs::create_dir_all(dir)?;
    let line = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    writeln!(tmp, "{line}")?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
