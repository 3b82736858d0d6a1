//! Text model files: a magic line, the spec as JSON, then the fitted state
//! as JSON, one per line.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassifierSpec, ModelState, TrainedModel};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "RVOTE1";

#[derive(Serialize, Deserialize)]
struct Payload {
    class_count: usize,
    n_features: usize,
    state: ModelState,
}

fn state_matches(spec: &ClassifierSpec, state: &ModelState) -> bool {
    matches!(
        (spec, state),
        (ClassifierSpec::Knn(_), ModelState::Knn(_))
            | (ClassifierSpec::C45(_), ModelState::Tree(_))
            | (ClassifierSpec::NaiveBayes(_), ModelState::Bayes(_))
            | (ClassifierSpec::RandomForest(_), ModelState::Forest(_))
            | (ClassifierSpec::Smo(_), ModelState::Smo(_))
    )
}

pub fn write_model(model: &TrainedModel, mut out: impl Write) -> Result<()> {
    let bad = |e: serde_json::Error| Error::format("model", e.to_string());
    let spec = serde_json::to_string(&model.spec).map_err(bad)?;
    let payload = serde_json::to_string(&Payload {
        class_count: model.class_count,
        n_features: model.n_features,
        state: model.state.clone(),
    })
    .map_err(bad)?;
    writeln!(out, "{MODEL_MAGIC}")?;
    writeln!(out, "{spec}")?;
    writeln!(out, "{payload}")?;
    Ok(())
}

pub fn read_model(input: impl Read) -> Result<TrainedModel> {
    let mut lines = BufReader::new(input).lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::format("model", format!("missing {what} line")))
    };
    let magic = next("magic")?;
    if magic.trim_end() != MODEL_MAGIC {
        return Err(Error::format("model", format!("unknown header {magic:?}")));
    }
    let spec: ClassifierSpec =
        serde_json::from_str(&next("spec")?).map_err(|e| Error::format("model", format!("spec: {e}")))?;
    let payload: Payload =
        serde_json::from_str(&next("payload")?).map_err(|e| Error::format("model", format!("payload: {e}")))?;
    if !state_matches(&spec, &payload.state) {
        return Err(Error::format("model", "payload does not match the declared algorithm"));
    }
    Ok(TrainedModel {
        spec,
        class_count: payload.class_count,
        n_features: payload.n_features,
        state: payload.state,
    })
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    read_model(fs::File::open(path)?)
}
