//! JSON bodies of the HTTP logit protocol.
//!
//! ```text
//! POST {endpoint}/v1/logits      LogitRequest   -> LogitsResponse | ErrorBody
//! GET  {endpoint}/v1/descriptor                 -> DescriptorBody
//! ```
//!
//! Requests are serialized straight from [`LogitRequest`](super::LogitRequest);
//! [`OwnedLogitRequest`] is the server-side decoding of the same body.

use serde::{Deserialize, Serialize};

use super::LogitRequest;
use crate::audio::AudioClip;
use crate::logits::TokenId;

pub const LOGITS_PATH: &str = "v1/logits";
pub const DESCRIPTOR_PATH: &str = "v1/descriptor";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnedLogitRequest {
    pub prompt_text: String,
    pub generated_tokens: Vec<TokenId>,
    pub audio: AudioClip,
    pub blank: bool,
}

impl OwnedLogitRequest {
    pub fn as_request(&self) -> LogitRequest<'_> {
        LogitRequest {
            prompt_text: &self.prompt_text,
            generated_tokens: &self.generated_tokens,
            audio: &self.audio,
            blank: self.blank,
        }
    }
}

impl From<&LogitRequest<'_>> for OwnedLogitRequest {
    fn from(r: &LogitRequest<'_>) -> Self {
        Self {
            prompt_text: r.prompt_text.to_owned(),
            generated_tokens: r.generated_tokens.to_vec(),
            audio: r.audio.clone(),
            blank: r.blank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitsResponse {
    pub vocabulary_size: usize,
    pub logits: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorBody {
    pub vocabulary_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    /// Optional extension: id of the end-of-sequence token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eos_token_id: Option<TokenId>,
}
