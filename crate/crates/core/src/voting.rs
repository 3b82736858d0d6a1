//! Merging the per-variant predictions of one augmented group.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{argmax_lowest, ProbDist};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VotingScheme {
    Hard,
    Soft,
}

impl fmt::Display for VotingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VotingScheme::Hard => "hard",
            VotingScheme::Soft => "soft",
        })
    }
}

impl FromStr for VotingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hard" => Ok(VotingScheme::Hard),
            "soft" => Ok(VotingScheme::Soft),
            _ => Err(Error::UnsupportedScheme(s.to_string())),
        }
    }
}

/// Predictions for every variant of one source image. Variant 0 is the
/// un-augmented original.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPredictions {
    source_id: String,
    true_label: usize,
    class_count: usize,
    labels: Vec<usize>,
    dists: Option<Vec<ProbDist>>,
}

impl GroupPredictions {
    pub fn new(
        source_id: impl Into<String>,
        true_label: usize,
        class_count: usize,
        labels: Vec<usize>,
        dists: Option<Vec<ProbDist>>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("a group needs at least one prediction"));
        }
        if true_label >= class_count || labels.iter().any(|&l| l >= class_count) {
            return Err(Error::invalid(format!("label out of range for {class_count} classes")));
        }
        if let Some(d) = &dists {
            if d.len() != labels.len() {
                return Err(Error::invalid("one distribution per prediction is required"));
            }
            for (i, (dist, &l)) in d.iter().zip(&labels).enumerate() {
                if dist.len() != class_count {
                    return Err(Error::invalid(format!("distribution {i} has {} classes", dist.len())));
                }
                if dist.argmax() != l {
                    return Err(Error::invalid(format!("label {i} is not the argmax of its distribution")));
                }
            }
        }
        Ok(Self {
            source_id: source_id.into(),
            true_label,
            class_count,
            labels,
            dists,
        })
    }

    /// Labels derived from the distributions.
    pub fn from_dists(source_id: impl Into<String>, true_label: usize, dists: Vec<ProbDist>) -> Result<Self> {
        let c = dists.first().map_or(0, ProbDist::len);
        let labels = dists.iter().map(ProbDist::argmax).collect();
        Self::new(source_id, true_label, c, labels, Some(dists))
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn true_label(&self) -> usize {
        self.true_label
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn dists(&self) -> Option<&[ProbDist]> {
        self.dists.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tally {
    /// Votes per class.
    Counts(Vec<usize>),
    /// Mean distribution.
    Mean(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoteOutcome {
    pub winner: usize,
    pub scheme: VotingScheme,
    pub tally: Tally,
    /// More than one class shared the top score.
    pub tie_broken: bool,
}

/// Majority vote. Ties go to the tied class with the largest summed
/// probability, then to the lowest index.
pub fn hard_vote(gp: &GroupPredictions) -> VoteOutcome {
    let mut counts = vec![0usize; gp.class_count];
    for &l in &gp.labels {
        counts[l] += 1;
    }
    let top = *counts.iter().max().expect("at least one class");
    let tied: Vec<usize> = (0..gp.class_count).filter(|&c| counts[c] == top).collect();
    let winner = match (&gp.dists, tied.len()) {
        (_, 1) => tied[0],
        (Some(d), _) => {
            let sums: Vec<f64> = tied.iter().map(|&c| d.iter().map(|p| p.probs()[c]).sum()).collect();
            tied[argmax_lowest(&sums)]
        }
        (None, _) => tied[0],
    };
    VoteOutcome {
        winner,
        scheme: VotingScheme::Hard,
        tie_broken: tied.len() > 1,
        tally: Tally::Counts(counts),
    }
}

/// Arithmetic mean of the distributions, then argmax.
pub fn soft_vote(gp: &GroupPredictions) -> Result<VoteOutcome> {
    let dists = gp
        .dists
        .as_ref()
        .ok_or_else(|| Error::UnsupportedScheme("soft voting needs class probabilities".into()))?;
    let n = dists.len() as f64;
    let mut mean = vec![0.0; gp.class_count];
    for d in dists {
        for (m, p) in mean.iter_mut().zip(d.probs()) {
            *m += p;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let winner = argmax_lowest(&mean);
    let tie_broken = mean.iter().filter(|&&m| m == mean[winner]).count() > 1;
    Ok(VoteOutcome {
        winner,
        scheme: VotingScheme::Soft,
        tally: Tally::Mean(mean),
        tie_broken,
    })
}

pub fn vote(gp: &GroupPredictions, scheme: VotingScheme) -> Result<VoteOutcome> {
    match scheme {
        VotingScheme::Hard => Ok(hard_vote(gp)),
        VotingScheme::Soft => soft_vote(gp),
    }
}

/// Fraction of groups whose voted winner is the true label.
pub fn score_groups(groups: &[GroupPredictions], scheme: VotingScheme) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::invalid("no groups to score"));
    }
    let mut correct = 0usize;
    for g in groups {
        correct += usize::from(vote(g, scheme)?.winner == g.true_label);
    }
    Ok(correct as f64 / groups.len() as f64)
}

/// Accuracy of the un-augmented original (variant 0) alone.
pub fn single_accuracy(groups: &[GroupPredictions]) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::invalid("no groups to score"));
    }
    let correct = groups.iter().filter(|g| g.labels[0] == g.true_label).count();
    Ok(correct as f64 / groups.len() as f64)
}

/// One CSV row per group: id, truth, both winners, the tie flag and every
/// variant label. `soft_winner` is empty without probabilities.
pub fn write_audit_csv(groups: &[GroupPredictions], out: impl Write) -> Result<()> {
    let width = groups.iter().map(GroupPredictions::len).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["source_id", "true", "hard_winner", "soft_winner", "tie_broken"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..width).map(|i| format!("label_{i}")));
    w.write_record(&header)?;
    for g in groups {
        let hard = hard_vote(g);
        let soft = soft_vote(g).ok();
        let mut row = vec![
            g.source_id.clone(),
            g.true_label.to_string(),
            hard.winner.to_string(),
            soft.map_or(String::new(), |s| s.winner.to_string()),
            hard.tie_broken.to_string(),
        ];
        row.extend((0..width).map(|i| g.labels.get(i).map_or(String::new(), |l| l.to_string())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
