//! Confusion counts and derived scores with a configurable positive class.
//!
//! Scoring rules:
//! - a parsed prediction of the positive class is TP when the gold agrees, FP otherwise;
//! - a parsed prediction of the other class is TN when the gold agrees, FN otherwise;
//! - an unparseable prediction is FN when the gold is positive, and otherwise
//!   lands in `unparseable` rather than TN.
//!
//! Unparseable answers are therefore always wrong for accuracy.

use serde::Serialize;

use super::dataset::Label;
use crate::error::{AadError, Result};
use crate::parser::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_positives: usize,
    #[serde(rename = "fp")]
    pub false_positives: usize,
    #[serde(rename = "fn")]
    pub false_negatives: usize,
    #[serde(rename = "tn")]
    pub true_negatives: usize,
    /// Unparseable answers to negative-gold items (those to positive-gold
    /// items are already counted as false negatives).
    pub unparseable: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positives
            + self.false_positives
            + self.false_negatives
            + self.true_negatives
            + self.unparseable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub counts: ConfusionCounts,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Fraction of all items answered "yes".
    pub yes_rate: f64,
    /// Fraction of all items whose answer could not be parsed.
    pub unparseable_rate: f64,
}

pub fn compute_metrics(
    predictions: &[Verdict],
    golds: &[Label],
    positive_class: Label,
) -> Result<Metrics> {
    if predictions.len() != golds.len() {
        return Err(AadError::Input(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            golds.len()
        )));
    }
    if predictions.is_empty() {
        return Err(AadError::Input(
            "cannot score an empty prediction set".into(),
        ));
    }
    let positive = positive_class.as_verdict();
    let negative = positive_class.other().as_verdict();
    let mut counts = ConfusionCounts::default();
    let mut yes = 0usize;
    let mut unparseable = 0usize;
    for (&pred, &gold) in predictions.iter().zip(golds) {
        let gold_positive = gold == positive_class;
        if pred == Verdict::Yes {
            yes += 1;
        }
        match pred {
            p if p == positive && gold_positive => counts.true_positives += 1,
            p if p == positive => counts.false_positives += 1,
            p if p == negative && gold_positive => counts.false_negatives += 1,
            p if p == negative => counts.true_negatives += 1,
            _ => {
                unparseable += 1;
                if gold_positive {
                    counts.false_negatives += 1;
                } else {
                    counts.unparseable += 1;
                }
            }
        }
    }

    let n = predictions.len() as f64;
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(
        counts.true_positives,
        counts.true_positives + counts.false_positives,
    );
    let recall = ratio(
        counts.true_positives,
        counts.true_positives + counts.false_negatives,
    );
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics {
        counts,
        accuracy: (counts.true_positives + counts.true_negatives) as f64 / n,
        precision,
        recall,
        f1,
        yes_rate: yes as f64 / n,
        unparseable_rate: unparseable as f64 / n,
    })
}
