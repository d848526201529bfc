use std::thread;
use std::time::Duration;

use reqwest::blocking::{Client, Response};
use url::Url;

use super::wire::{DescriptorBody, ErrorBody, LogitsResponse, DESCRIPTOR_PATH, LOGITS_PATH};
use super::{LogitProvider, LogitRequest, ProviderDescriptor, ProviderKind};
use crate::error::{AadError, Result};
use crate::logits::{LogitVector, TokenId};

const EOS_SPELLINGS: [&str; 4] = ["<eos>", "</s>", "<|endoftext|>", "<|im_end|>"];

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub timeout: Duration,
    /// Extra attempts after a transient failure (transport error or 503).
    pub max_retries: u32,
    /// Wait before the first retry; doubles on each subsequent one.
    pub initial_backoff: Duration,
}

impl Default for RemoteOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(60),
            max_retries: 2,
            initial_backoff: Duration::from_millis(100),
        }
    }
}

/// Logit provider reached over the JSON/HTTP protocol in [`super::wire`].
#[derive(Debug)]
pub struct RemoteProvider {
    client: Client,
    logits_url: Url,
    options: RemoteOptions,
    descriptor: ProviderDescriptor,
}

impl RemoteProvider {
    /// Fetches the descriptor from `endpoint` and returns a ready provider.
    pub fn connect(endpoint: &str, options: RemoteOptions) -> Result<Self> {
        let mut base = Url::parse(endpoint)
            .map_err(|e| AadError::Config(format!("invalid endpoint {endpoint:?}: {e}")))?;
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        let join = |p: &str| {
            base.join(p)
                .map_err(|e| AadError::Config(format!("invalid endpoint {endpoint:?}: {e}")))
        };
        let descriptor_url = join(DESCRIPTOR_PATH)?;
        let logits_url = join(LOGITS_PATH)?;
        let client = Client::builder()
            .timeout(options.timeout)
            .build()
            .map_err(|e| AadError::Transport(e.to_string()))?;

        let body: DescriptorBody = with_retries(&options, || {
            let resp = client
                .get(descriptor_url.clone())
                .send()
                .map_err(transport)?;
            decode_success(resp)
        })?;
        if body.vocabulary_size < 2 {
            return Err(AadError::ProviderContract(format!(
                "descriptor declares vocabulary size {}",
                body.vocabulary_size
            )));
        }
        if let Some(tokens) = &body.tokens {
            if tokens.len() != body.vocabulary_size {
                return Err(AadError::ProviderContract(format!(
                    "descriptor lists {} tokens for vocabulary size {}",
                    tokens.len(),
                    body.vocabulary_size
                )));
            }
        }
        let eos_token = body.eos_token_id.or_else(|| {
            body.tokens.as_ref().and_then(|tokens| {
                tokens
                    .iter()
                    .position(|t| EOS_SPELLINGS.contains(&t.as_str()))
                    .map(|i| i as TokenId)
            })
        });
        if let Some(eos) = eos_token {
            if eos as usize >= body.vocabulary_size {
                return Err(AadError::ProviderContract(format!(
                    "eos token {eos} outside vocabulary"
                )));
            }
        }

        Ok(Self {
            client,
            logits_url,
            options,
            descriptor: ProviderDescriptor {
                kind: ProviderKind::Remote,
                vocabulary_size: body.vocabulary_size,
                endpoint: Some(base),
                tokens: body.tokens,
                eos_token,
            },
        })
    }
}

impl LogitProvider for RemoteProvider {
    fn descriptor(&self) -> &ProviderDescriptor {
        &self.descriptor
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        request.validate(self.descriptor.vocabulary_size)?;
        let body: LogitsResponse = with_retries(&self.options, || {
            let resp = self
                .client
                .post(self.logits_url.clone())
                .json(request)
                .send()
                .map_err(transport)?;
            decode_success(resp)
        })?;
        if body.vocabulary_size != self.descriptor.vocabulary_size {
            return Err(AadError::ProviderContract(format!(
                "response declares vocabulary size {}, descriptor says {}",
                body.vocabulary_size, self.descriptor.vocabulary_size
            )));
        }
        let logits =
            LogitVector::new(body.logits).map_err(|e| AadError::ProviderContract(e.to_string()))?;
        self.descriptor.check_logits(&logits)?;
        Ok(logits)
    }
}

fn with_retries<T>(options: &RemoteOptions, mut call: impl FnMut() -> Result<T>) -> Result<T> {
    let mut backoff = options.initial_backoff;
    let mut attempt = 0;
    loop {
        match call() {
            Err(e) if e.is_retryable() && attempt < options.max_retries => {
                thread::sleep(backoff);
                backoff *= 2;
                attempt += 1;
            }
            other => return other,
        }
    }
}

fn transport(e: reqwest::Error) -> AadError {
    AadError::Transport(e.to_string())
}

fn decode_success<T: serde::de::DeserializeOwned>(resp: Response) -> Result<T> {
    let status = resp.status();
    let text = resp.text().map_err(transport)?;
    if !status.is_success() {
        let message = serde_json::from_str::<ErrorBody>(&text)
            .map(|b| b.error)
            .unwrap_or(text);
        return Err(AadError::Remote {
            status: status.as_u16(),
            message,
        });
    }
    serde_json::from_str(&text)
        .map_err(|e| AadError::ProviderContract(format!("malformed response body: {e}")))
}
