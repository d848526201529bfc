use rayon::prelude::*;
use serde::Serialize;

use super::dataset::{Dataset, Label};
use super::metrics::{compute_metrics, Metrics};
use crate::config::DecodingConfig;
use crate::decoder::generate;
use crate::error::{AadError, Result};
use crate::logits::validate_alpha;
use crate::parser::{extract_verdict, Verdict};
use crate::provider::LogitProvider;

/// Share of items allowed to fail (and be scored unparseable) before a run aborts.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// The parts of the decoding config worth echoing next to a score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub alpha: f64,
    pub prefix: String,
    pub strategy: String,
    pub max_new_tokens: usize,
}

impl From<&DecodingConfig> for ConfigSummary {
    fn from(c: &DecodingConfig) -> Self {
        Self {
            alpha: c.alpha,
            prefix: c.prefix_prompt.clone(),
            strategy: c.strategy.to_string(),
            max_new_tokens: c.max_new_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemResult {
    pub id: String,
    pub gold: Label,
    pub verdict: Verdict,
    /// Generated answer; `None` when the item failed.
    pub text: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub positive_class: Label,
    pub metrics: Metrics,
    pub config: ConfigSummary,
    /// Per-item outcomes, ordered by id.
    pub items: Vec<ItemResult>,
}

impl EvalReport {
    pub fn failures(&self) -> impl Iterator<Item = &ItemResult> {
        self.items.iter().filter(|i| i.error.is_some())
    }
}

/// Generates an answer for every item, parses its verdict and scores the set.
///
/// Items are evaluated on the current rayon pool. Up to 1% of items may fail
/// at the provider; those are scored as unparseable. More failures abort
/// the run.
pub fn run_eval(
    dataset: &Dataset,
    provider: &dyn LogitProvider,
    config: &DecodingConfig,
) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(AadError::Input(format!(
            "dataset {} is empty",
            dataset.name
        )));
    }
    config.validate()?;
    dataset.validate()?;
    let world = dataset.toy_world().ok();

    let mut items: Vec<ItemResult> = dataset
        .items
        .par_iter()
        .map(|item| {
            let outcome = dataset
                .load_audio(&item.audio, world.as_ref())
                .and_then(|audio| generate(provider, &audio, &item.question, config));
            match outcome {
                Ok(result) => ItemResult {
                    id: item.id.clone(),
                    gold: item.gold,
                    verdict: extract_verdict(&result.text),
                    text: Some(result.text),
                    error: None,
                },
                Err(e) => ItemResult {
                    id: item.id.clone(),
                    gold: item.gold,
                    verdict: Verdict::Unparseable,
                    text: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    items.sort_by(|a, b| a.id.cmp(&b.id));

    let failed: Vec<&ItemResult> = items.iter().filter(|i| i.error.is_some()).collect();
    if failed.len() as f64 > MAX_FAILURE_RATE * items.len() as f64 {
        let first = failed[0];
        return Err(AadError::Run(format!(
            "{} of {} items failed; first ({}): {}",
            failed.len(),
            items.len(),
            first.id,
            first.error.as_deref().unwrap_or_default()
        )));
    }

    let predictions: Vec<Verdict> = items.iter().map(|i| i.verdict).collect();
    let golds: Vec<Label> = items.iter().map(|i| i.gold).collect();
    let metrics = compute_metrics(&predictions, &golds, dataset.positive_class)?;
    Ok(EvalReport {
        dataset: dataset.name.clone(),
        positive_class: dataset.positive_class,
        metrics,
        config: config.into(),
        items,
    })
}

#[derive(Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub prefix: String,
    pub outcome: Result<EvalReport>,
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_succeeded(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.is_ok())
    }
}

/// One [`run_eval`] per (prefix, alpha) pair: prefixes in the outer loop,
/// alphas in the inner, both in input order. A failing row is recorded and
/// the sweep moves on. An empty `prefixes` list uses `base.prefix_prompt`.
pub fn sweep_alpha(
    dataset: &Dataset,
    provider: &dyn LogitProvider,
    alphas: &[f64],
    prefixes: &[String],
    base: &DecodingConfig,
) -> Result<SweepReport> {
    if alphas.is_empty() {
        return Err(AadError::Config(
            "alpha sweep needs at least one value".into(),
        ));
    }
    for &alpha in alphas {
        validate_alpha(alpha)?;
    }
    let default_prefix = [base.prefix_prompt.clone()];
    let prefixes = if prefixes.is_empty() {
        &default_prefix[..]
    } else {
        prefixes
    };
    let mut report = SweepReport::default();
    for prefix in prefixes {
        for &alpha in alphas {
            let config = base.clone().with_alpha(alpha).with_prefix(prefix.clone());
            report.rows.push(SweepRow {
                alpha,
                prefix: prefix.clone(),
                outcome: run_eval(dataset, provider, &config),
            });
        }
    }
    Ok(report)
}
