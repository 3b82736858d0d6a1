use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::load_image;

const IMAGE_EXTENSIONS: [&str; 5] = ["ppm", "png", "jpg", "jpeg", "pnm"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusClass {
    pub name: String,
    pub paths: Vec<PathBuf>,
}

/// Directory-per-class image collection. Class `i` of [`classes`] has
/// label `i`.
///
/// [`classes`]: ImageCorpus::classes
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageCorpus {
    root: PathBuf,
    classes: Vec<CorpusClass>,
}

impl ImageCorpus {
    pub fn new(root: impl Into<PathBuf>, classes: Vec<CorpusClass>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidCorpus(format!("need at least 2 classes, found {}", classes.len())));
        }
        if let Some(c) = classes.iter().find(|c| c.paths.is_empty()) {
            return Err(Error::InvalidCorpus(format!("class {:?} has no images", c.name)));
        }
        Ok(Self {
            root: root.into(),
            classes,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn classes(&self) -> &[CorpusClass] {
        &self.classes
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.paths.len()).collect()
    }

    /// Size of the smallest class.
    pub fn n_min(&self) -> usize {
        self.classes.iter().map(|c| c.paths.len()).min().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.classes.iter().map(|c| c.paths.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    out.sort();
    Ok(out)
}

/// Scans `<root>/<class>/<image>`. Classes and files are sorted by name.
/// Files that fail to decode are skipped with a warning.
pub fn load_corpus(root: impl AsRef<Path>) -> Result<ImageCorpus> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::InvalidCorpus(format!("{} is not a directory", root.display())));
    }
    let mut classes = Vec::new();
    for dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let name = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::InvalidCorpus(format!("class directory {} is not UTF-8", dir.display())))?
            .to_string();
        let candidates: Vec<PathBuf> = sorted_entries(&dir)?
            .into_iter()
            .filter(|p| p.is_file() && has_image_extension(p))
            .collect();
        let paths: Vec<PathBuf> = candidates
            .into_par_iter()
            .filter_map(|p| match load_image(&p) {
                Ok(_) => Some(p),
                Err(e) => {
                    log::warn!("skipping {}: {e}", p.display());
                    None
                }
            })
            .collect();
        if paths.is_empty() {
            return Err(Error::InvalidCorpus(format!("class {name:?} has no decodable images")));
        }
        classes.push(CorpusClass { name, paths });
    }
    ImageCorpus::new(root, classes)
}
