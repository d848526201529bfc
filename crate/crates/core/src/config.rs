use serde::{Deserialize, Serialize};

use crate::error::{AadError, Result};
use crate::logits::{validate_alpha, TokenId};
use crate::prompt::FOCUS_PREFIX;

/// How the next token is chosen from the contrasted distribution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strategy {
    /// Argmax; the lowest token id wins ties.
    #[default]
    Greedy,
    /// Seeded categorical draw from `softmax(combined / temperature)`.
    Sampled { seed: u64, temperature: f64 },
}

impl Strategy {
    pub fn temperature(&self) -> f64 {
        match self {
            Strategy::Greedy => 1.0,
            Strategy::Sampled { temperature, .. } => *temperature,
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Greedy => f.write_str("greedy"),
            Strategy::Sampled { seed, temperature } => {
                write!(f, "sampled(seed={seed}, temperature={temperature})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingConfig {
    /// Contrastive weight; 0 is standard decoding.
    pub alpha: f64,
    pub max_new_tokens: usize,
    pub strategy: Strategy,
    pub prefix_prompt: String,
    pub record_steps: bool,
}

impl Default for DecodingConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_new_tokens: 64,
            strategy: Strategy::Greedy,
            prefix_prompt: FOCUS_PREFIX.to_owned(),
            record_steps: true,
        }
    }
}

impl DecodingConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.prefix_prompt = prefix.into();
        self
    }

    pub fn with_max_new_tokens(mut self, n: usize) -> Self {
        self.max_new_tokens = n;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_record_steps(mut self, record: bool) -> Self {
        self.record_steps = record;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        if self.max_new_tokens == 0 {
            return Err(AadError::Config("max_new_tokens must be >= 1".into()));
        }
        if let Strategy::Sampled { temperature, .. } = self.strategy {
            if !(temperature.is_finite() && temperature > 0.0) {
                return Err(AadError::Config(format!(
                    "temperature must be > 0, got {temperature}"
                )));
            }
        }
        Ok(())
    }
}

/// Text context plus the tokens generated so far.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenerationState {
    pub prompt_text: String,
    pub generated_tokens: Vec<TokenId>,
}

impl GenerationState {
    pub fn new(prompt_text: impl Into<String>) -> Self {
        Self {
            prompt_text: prompt_text.into(),
            generated_tokens: Vec::new(),
        }
    }

    pub fn step_index(&self) -> usize {
        self.generated_tokens.len()
    }

    pub fn push(&mut self, token: TokenId) {
        self.generated_tokens.push(token);
    }
}
