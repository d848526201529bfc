//! The autoregressive contrastive decoding loop.
//!
//! Every step queries the provider twice, once with the real clip and once
//! with its zeroed copy, contrasts the two logit vectors and picks a token
//! from the resulting distribution. Both queries share the prompt and the
//! generated prefix; they run concurrently and are joined before combining.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::audio::{make_blank, AudioClip};
use crate::config::{DecodingConfig, GenerationState, Strategy};
use crate::error::{AadError, Result};
use crate::logits::{aad_combine, stable_softmax, LogitVector, ProbabilityVector, TokenId};
use crate::prompt::assemble_prompt;
use crate::provider::{LogitProvider, LogitRequest, ProviderDescriptor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step_index: usize,
    pub with_audio_logits: LogitVector,
    pub without_audio_logits: LogitVector,
    pub aad_distribution: ProbabilityVector,
    pub chosen_token: TokenId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Eos,
    MaxTokens,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationResult {
    pub tokens: Vec<TokenId>,
    pub text: String,
    /// Empty unless the config asked for step records.
    pub steps: Vec<StepRecord>,
    pub stop_reason: StopReason,
}

/// Runs one decoding step. Builds the blank clip itself; [`generate`]
/// builds it once per sequence instead.
pub fn decode_step(
    provider: &dyn LogitProvider,
    audio: &AudioClip,
    state: &GenerationState,
    config: &DecodingConfig,
) -> Result<(TokenId, StepRecord)> {
    config.validate()?;
    let blank = make_blank(audio);
    step(provider, audio, &blank, state, config)
}

fn step(
    provider: &dyn LogitProvider,
    audio: &AudioClip,
    blank: &AudioClip,
    state: &GenerationState,
    config: &DecodingConfig,
) -> Result<(TokenId, StepRecord)> {
    let with_request = LogitRequest {
        prompt_text: &state.prompt_text,
        generated_tokens: &state.generated_tokens,
        audio,
        blank: false,
    };
    let without_request = LogitRequest {
        audio: blank,
        blank: true,
        ..with_request
    };
    let (with_audio, without_audio) = rayon::join(
        || provider.next_token_logits(&with_request),
        || provider.next_token_logits(&without_request),
    );
    let (with_audio, without_audio) = (with_audio?, without_audio?);
    if with_audio.len() != without_audio.len() {
        return Err(AadError::ProviderContract(format!(
            "with-audio and blank-audio calls returned {} and {} logits",
            with_audio.len(),
            without_audio.len()
        )));
    }
    let descriptor = provider.descriptor();
    descriptor.check_logits(&with_audio)?;

    let combined = aad_combine(&with_audio, &without_audio, config.alpha)?;
    let distribution = stable_softmax(&combined, config.strategy.temperature())?;
    let token = match config.strategy {
        Strategy::Greedy => distribution.argmax(),
        Strategy::Sampled { seed, .. } => sample(&distribution, seed, state.step_index()),
    };
    let record = StepRecord {
        step_index: state.step_index(),
        with_audio_logits: with_audio,
        without_audio_logits: without_audio,
        aad_distribution: distribution,
        chosen_token: token,
    };
    Ok((token, record))
}

/// Categorical draw. Each step uses its own ChaCha stream of `seed`, so a
/// step's choice depends only on the seed and the step index.
fn sample(distribution: &ProbabilityVector, seed: u64, step_index: usize) -> TokenId {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step_index as u64);
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    for (i, p) in distribution.values().iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i as TokenId;
        }
    }
    // rounding left the total just under u; take the last token with mass
    distribution
        .values()
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(0) as TokenId
}

/// Generates an answer to `question` about `audio`, prefixing the question
/// with `config.prefix_prompt`.
pub fn generate(
    provider: &dyn LogitProvider,
    audio: &AudioClip,
    question: &str,
    config: &DecodingConfig,
) -> Result<GenerationResult> {
    config.validate()?;
    let prompt = assemble_prompt(&config.prefix_prompt, question)?;
    let blank = make_blank(audio);
    let eos = provider.descriptor().eos_token;

    let mut state = GenerationState::new(prompt);
    let mut steps = Vec::new();
    let mut stop_reason = StopReason::MaxTokens;
    while state.step_index() < config.max_new_tokens {
        let index = state.step_index();
        let (token, record) =
            step(provider, audio, &blank, &state, config).map_err(|source| AadError::Step {
                step: index,
                source: Box::new(source),
            })?;
        state.push(token);
        if config.record_steps {
            steps.push(record);
        }
        if Some(token) == eos {
            stop_reason = StopReason::Eos;
            break;
        }
    }

    let text = detokenize(provider.descriptor(), &state.generated_tokens);
    Ok(GenerationResult {
        tokens: state.generated_tokens,
        text,
        steps,
        stop_reason,
    })
}

/// Joins token strings with single spaces; punctuation-only tokens attach
/// to the preceding token and the end-of-sequence token is dropped. Ids
/// without a published string render as `<id>`.
pub fn detokenize(descriptor: &ProviderDescriptor, tokens: &[TokenId]) -> String {
    let mut text = String::new();
    for &token in tokens {
        if Some(token) == descriptor.eos_token {
            continue;
        }
        let piece = match descriptor.token_text(token) {
            Some(s) => s.to_owned(),
            None => format!("<{token}>"),
        };
        let punctuation = !piece.is_empty() && piece.chars().all(|c| c.is_ascii_punctuation());
        if !text.is_empty() && !punctuation {
            text.push(' ');
        }
        text.push_str(&piece);
    }
    text
}
