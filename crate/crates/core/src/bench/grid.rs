use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::classifiers::{cross_validate, predict_proba, train, ClassifierSpec};
use crate::datasets::{draw_balanced, load_corpus, materialize, FeatureExtractor, ImageCorpus, Material, ProtocolMode};
use crate::descriptors::DescriptorKind;
use crate::error::{Error, Result};
use crate::imaging::{build_group_with, load_image};
use crate::rng::{derive_seed, str_key};
use crate::voting::{score_groups, single_accuracy, GroupPredictions, VotingScheme};

/// One line of a results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub descriptor: String,
    pub classifier: String,
    pub samples: usize,
    pub accuracy: f64,
    pub soft_voting: f64,
    pub hard_voting: f64,
}

impl ResultRow {
    /// Gain of soft plus hard voting over the baseline.
    pub fn improvement(&self) -> f64 {
        (self.soft_voting - self.accuracy) + (self.hard_voting - self.accuracy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub descriptor: String,
    pub classifier: String,
    pub samples: usize,
    pub error: String,
}

/// Per-group predictions of one grid cell, kept for audit files.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAudit {
    pub descriptor: String,
    pub classifier: String,
    pub samples: usize,
    pub groups: Vec<GroupPredictions>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridOutcome {
    /// Sorted by descriptor and classifier in config order, then samples.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
    /// Empty unless auditing is enabled.
    pub audits: Vec<CellAudit>,
}

impl GridOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seed for one cell, derived from the master seed and the cell key.
pub fn cell_seed(master: u64, kind: DescriptorKind, classifier: &ClassifierSpec, samples: usize) -> u64 {
    derive_seed(
        master,
        &[str_key(kind.id()), str_key(&classifier.short_name()), samples as u64],
    )
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Distinct sample sizes, ascending.
fn grid_sizes(cfg: &RunConfig, corpus: &ImageCorpus) -> Result<Vec<usize>> {
    let plan = crate::datasets::plan_sampling(corpus, &cfg.fractions, cfg.seed)?;
    Ok(plan.sizes.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
}

fn guarded<T>(f: impl FnOnce() -> Result<T>) -> std::result::Result<T, String> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(e.to_string()),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(format!("panicked: {msg}"))
        }
    }
}

struct CellResult {
    accuracy: f64,
    soft: f64,
    hard: f64,
    groups: Vec<GroupPredictions>,
}

fn run_cell(
    cfg: &RunConfig,
    material: &Material,
    kind: DescriptorKind,
    spec: &ClassifierSpec,
    samples: usize,
) -> Result<CellResult> {
    let seed = cell_seed(cfg.seed, kind, spec, samples);
    let spec = spec.reseeded(seed);
    let model = train(&spec, &material.train)?;
    let groups = material
        .groups
        .iter()
        .map(|g| {
            let dists = g
                .variants
                .iter()
                .map(|v| predict_proba(&model, v))
                .collect::<Result<Vec<_>>>()?;
            GroupPredictions::from_dists(g.source_id.clone(), g.label, dists)
        })
        .collect::<Result<Vec<_>>>()?;
    let accuracy = match cfg.protocol.mode {
        ProtocolMode::Paper => cross_validate(&spec, &material.train, cfg.protocol.cv_folds, seed)?.accuracy,
        ProtocolMode::Holdout => single_accuracy(&groups)?,
    };
    Ok(CellResult {
        accuracy,
        soft: score_groups(&groups, VotingScheme::Soft)?,
        hard: score_groups(&groups, VotingScheme::Hard)?,
        groups,
    })
}

/// Loads the configured corpus and runs the grid on it.
pub fn run_grid(cfg: &RunConfig) -> Result<GridOutcome> {
    cfg.validate()?;
    let corpus = load_corpus(&cfg.corpus)?;
    run_grid_on(cfg, &corpus)
}

/// Runs every (descriptor, classifier, size) cell. A failing cell is
/// reported in `failures` and the rest of the grid carries on; only config
/// and corpus problems abort the whole run.
pub fn run_grid_on(cfg: &RunConfig, corpus: &ImageCorpus) -> Result<GridOutcome> {
    cfg.validate()?;
    let sizes = grid_sizes(cfg, corpus)?;
    let extractor = FeatureExtractor::new(cfg.descriptor.clone(), cfg.cache_dir.clone())?;
    let class_names = corpus.class_names();
    let pool = thread_pool(cfg.jobs)?;

    let slices: Vec<(usize, usize)> = (0..cfg.descriptors.len())
        .flat_map(|d| (0..sizes.len()).map(move |s| (d, s)))
        .collect();
    let materials: Vec<std::result::Result<Material, String>> = pool.install(|| {
        slices
            .par_iter()
            .map(|&(d, s)| {
                guarded(|| {
                    let drawn = draw_balanced(corpus, sizes[s], cfg.seed)?;
                    materialize(&drawn, &class_names, &cfg.protocol, cfg.descriptors[d], &extractor, cfg.seed)
                })
            })
            .collect()
    });
    log::info!(
        "features ready: {} computed, {} from cache",
        extractor.extraction_count(),
        extractor.cache_hits()
    );

    // Cells in canonical report order.
    let cells: Vec<(usize, usize, usize)> = (0..cfg.descriptors.len())
        .flat_map(|d| {
            let sizes = &sizes;
            (0..cfg.classifiers.len()).flat_map(move |c| (0..sizes.len()).map(move |s| (d, c, s)))
        })
        .collect();
    let results: Vec<std::result::Result<CellResult, String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(d, c, s)| {
                let material = materials[d * sizes.len() + s].as_ref().map_err(Clone::clone)?;
                guarded(|| run_cell(cfg, material, cfg.descriptors[d], &cfg.classifiers[c], sizes[s]))
            })
            .collect()
    });

    let mut out = GridOutcome::default();
    for (&(d, c, s), result) in cells.iter().zip(results) {
        let descriptor = cfg.descriptors[d].display_name().to_string();
        let classifier = cfg.classifiers[c].short_name();
        let samples = sizes[s];
        match result {
            Ok(r) => {
                out.rows.push(ResultRow {
                    descriptor: descriptor.clone(),
                    classifier: classifier.clone(),
                    samples,
                    accuracy: r.accuracy,
                    soft_voting: r.soft,
                    hard_voting: r.hard,
                });
                if cfg.audit {
                    out.audits.push(CellAudit {
                        descriptor,
                        classifier,
                        samples,
                        groups: r.groups,
                    });
                }
            }
            Err(error) => {
                log::error!("cell {descriptor}/{classifier}/{samples} failed: {error}");
                out.failures.push(CellFailure {
                    descriptor,
                    classifier,
                    samples,
                    error,
                });
            }
        }
    }
    Ok(out)
}

/// Fills the feature cache with every descriptor of every variant of every
/// corpus image. Returns the number of descriptor evaluations performed.
pub fn extract_corpus(cfg: &RunConfig) -> Result<usize> {
    cfg.validate()?;
    if cfg.cache_dir.is_none() {
        return Err(Error::Config("extraction needs cache_dir to be set".into()));
    }
    let corpus = load_corpus(&cfg.corpus)?;
    let extractor = FeatureExtractor::new(cfg.descriptor.clone(), cfg.cache_dir.clone())?;
    let paths: Vec<_> = corpus
        .classes()
        .iter()
        .enumerate()
        .flat_map(|(label, c)| c.paths.iter().map(move |p| (label, p)))
        .collect();
    thread_pool(cfg.jobs)?.install(|| {
        paths.par_iter().try_for_each(|&(label, path)| {
            let image = load_image(path)?;
            let group = build_group_with(&image, path.display().to_string(), label, &cfg.protocol.augment);
            for variant in group.variants() {
                for &kind in &cfg.descriptors {
                    extractor.extract(kind, variant)?;
                }
            }
            Ok::<_, Error>(())
        })
    })?;
    Ok(extractor.extraction_count())
}
