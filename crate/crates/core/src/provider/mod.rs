//! The model boundary: anything that can answer "next-token logits for this
//! audio, this prompt, and these generated tokens".

mod remote;
mod toy;
pub mod wire;

use std::sync::Arc;

use serde::Serialize;
use url::Url;

use crate::audio::AudioClip;
use crate::error::{AadError, Result};
use crate::logits::{LogitVector, TokenId};

pub use remote::{RemoteOptions, RemoteProvider};
pub use toy::{
    toy_logits, ToyProvider, ToyWorld, MAX_TOY_OBJECTS, TOY_EOS, TOY_NO, TOY_VOCABULARY, TOY_YES,
};

/// One forward-pass request. Serializes to the `/v1/logits` request body.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogitRequest<'a> {
    pub prompt_text: &'a str,
    pub generated_tokens: &'a [TokenId],
    pub audio: &'a AudioClip,
    /// Set when `audio` is the zeroed copy of the real clip.
    pub blank: bool,
}

impl<'a> LogitRequest<'a> {
    /// Checks token bounds and that a blank request really carries silence.
    pub fn validate(&self, vocabulary_size: usize) -> Result<()> {
        if let Some(&bad) = self
            .generated_tokens
            .iter()
            .find(|&&t| t as usize >= vocabulary_size)
        {
            return Err(AadError::ProviderContract(format!(
                "token id {bad} out of range for vocabulary of {vocabulary_size}"
            )));
        }
        if self.blank && !self.audio.is_silent() {
            return Err(AadError::ProviderContract(
                "blank request carries non-zero audio".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Toy,
    Remote,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderDescriptor {
    pub kind: ProviderKind,
    pub vocabulary_size: usize,
    pub endpoint: Option<Url>,
    /// Token strings by id, when the provider publishes them.
    pub tokens: Option<Vec<String>>,
    pub eos_token: Option<TokenId>,
}

impl ProviderDescriptor {
    pub fn token_text(&self, token: TokenId) -> Option<&str> {
        self.tokens
            .as_ref()
            .and_then(|t| t.get(token as usize))
            .map(String::as_str)
    }

    /// Verifies a returned vector has exactly one score per vocabulary entry.
    pub fn check_logits(&self, logits: &LogitVector) -> Result<()> {
        if logits.len() != self.vocabulary_size {
            return Err(AadError::ProviderContract(format!(
                "provider returned {} logits, descriptor declares {}",
                logits.len(),
                self.vocabulary_size
            )));
        }
        Ok(())
    }
}

/// A source of next-token logits. Implementations must be deterministic and
/// safe to call from several threads at once.
pub trait LogitProvider: Send + Sync {
    fn descriptor(&self) -> &ProviderDescriptor;

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector>;
}

impl<P: LogitProvider + ?Sized> LogitProvider for &P {
    fn descriptor(&self) -> &ProviderDescriptor {
        (**self).descriptor()
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        (**self).next_token_logits(request)
    }
}

impl<P: LogitProvider + ?Sized> LogitProvider for Box<P> {
    fn descriptor(&self) -> &ProviderDescriptor {
        (**self).descriptor()
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        (**self).next_token_logits(request)
    }
}

impl<P: LogitProvider + ?Sized> LogitProvider for Arc<P> {
    fn descriptor(&self) -> &ProviderDescriptor {
        (**self).descriptor()
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        (**self).next_token_logits(request)
    }
}
