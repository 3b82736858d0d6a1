//! Image corpora, balanced sampling, and assembly of training rows and
//! evaluation groups.

mod cache;
mod corpus;
mod materialize;
mod sampling;
mod synth;

pub use cache::FeatureExtractor;
pub use corpus::{load_corpus, CorpusClass, ImageCorpus};
pub use materialize::{holdout_split, materialize, EvaluationProtocol, GroupFeatures, Material, ProtocolMode};
pub use sampling::{
    draw_balanced, plan_sampling, sample_sizes, validate_fractions, Sample, SamplingPlan, DEFAULT_FRACTIONS,
};
pub use synth::{render_glyph, synthetic_class_names, write_synthetic_corpus};
