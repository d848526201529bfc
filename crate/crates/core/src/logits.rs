//! Logit and probability vectors plus the two numeric kernels the decoder
//! is built on: max-shifted softmax and the with/without-audio contrast.

use serde::{Deserialize, Serialize};

use crate::error::{AadError, Result};

/// Index into a provider's vocabulary.
pub type TokenId = u32;

/// Unnormalized next-token scores over the whole vocabulary.
///
/// Always holds at least two values, all finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogitVector(Vec<f64>);

impl LogitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(AadError::NumericInput(format!(
                "logit vector needs at least 2 entries, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(AadError::NumericInput(format!(
                "logit {i} is not finite ({v})"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest score; the lowest index wins ties.
    pub fn argmax(&self) -> TokenId {
        argmax(&self.0)
    }
}

impl<'de> Deserialize<'de> for LogitVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        LogitVector::new(values).map_err(serde::de::Error::custom)
    }
}

/// A normalized distribution produced by [`stable_softmax`].
///
/// Entries are non-negative and sum to one within 1e-9. They are strictly
/// positive unless a logit gap exceeds the `f64` exponent range (~745).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, token: TokenId) -> Option<f64> {
        self.0.get(token as usize).copied()
    }

    pub fn argmax(&self) -> TokenId {
        argmax(&self.0)
    }
}

fn argmax(values: &[f64]) -> TokenId {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best as TokenId
}

/// Softmax of `logits / temperature`, evaluated after subtracting the maximum.
pub fn stable_softmax(logits: &LogitVector, temperature: f64) -> Result<ProbabilityVector> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(AadError::Config(format!(
            "temperature must be positive and finite, got {temperature}"
        )));
    }
    let values = logits.values();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AadError::NumericInput("non-finite logit".into()));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = values
        .iter()
        .map(|v| ((v - max) / temperature).exp())
        .collect();
    // the max entry contributes exp(0) = 1, so the sum is always >= 1
    let sum: f64 = out.iter().sum();
    for p in &mut out {
        *p /= sum;
    }
    Ok(ProbabilityVector(out))
}

/// Contrasts the with-audio scores against the blank-audio scores:
/// `(1 + alpha) * with_audio - alpha * without_audio`, elementwise.
///
/// `alpha = 0` returns `with_audio` unchanged, bit for bit.
pub fn aad_combine(
    with_audio: &LogitVector,
    without_audio: &LogitVector,
    alpha: f64,
) -> Result<LogitVector> {
    validate_alpha(alpha)?;
    if with_audio.len() != without_audio.len() {
        return Err(AadError::ProviderContract(format!(
            "logit length mismatch: with-audio {} vs without-audio {}",
            with_audio.len(),
            without_audio.len()
        )));
    }
    let combined: Vec<f64> = with_audio
        .values()
        .iter()
        .zip(without_audio.values())
        // same value as (1 + a)w - a*u, but equal inputs give exactly w back
        .map(|(&w, &u)| w + alpha * (w - u))
        .collect();
    if combined.iter().any(|v| !v.is_finite()) {
        return Err(AadError::NumericInput(
            "contrastive combination overflowed".into(),
        ));
    }
    Ok(LogitVector(combined))
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(AadError::Config(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    Ok(())
}
