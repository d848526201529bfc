//! Audio-aware decoding: contrastive next-token selection for audio-language
//! models, plus a yes/no object-hallucination evaluation harness.
//!
//! At each step the model is queried twice, with the real clip and with a
//! silent copy of the same length, and the token is chosen from
//! `softmax((1 + α) · with_audio − α · without_audio)`. Tokens whose score
//! rises when the model can hear the audio are promoted; α = 0 is ordinary
//! decoding.
//!
//! ```
//! use std::collections::BTreeSet;
//! use aad_core::{generate, DecodingConfig, ToyProvider, ToyWorld};
//!
//! let world = ToyWorld::synthetic(6, 0).unwrap();
//! let scene: BTreeSet<&str> = ["dog"].into_iter().collect();
//! let audio = world.render_scene(&scene).unwrap();
//! let provider = ToyProvider::new(world);
//! let question = "Is there a sound of a cat in the audio?";
//!
//! let plain = generate(&provider, &audio, question, &DecodingConfig::default().with_alpha(0.0)).unwrap();
//! let aad = generate(&provider, &audio, question, &DecodingConfig::default().with_alpha(1.0)).unwrap();
//! assert_eq!(plain.text, "yes");
//! assert_eq!(aad.text, "no");
//! ```

pub mod audio;
pub mod config;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod logits;
pub mod parser;
pub mod prompt;
pub mod provider;

pub use audio::{make_blank, AudioClip};
pub use config::{DecodingConfig, GenerationState, Strategy};
pub use decoder::{decode_step, generate, GenerationResult, StepRecord, StopReason};
pub use error::{AadError, Result};
pub use logits::{aad_combine, stable_softmax, LogitVector, ProbabilityVector, TokenId};
pub use parser::{extract_verdict, Verdict};
pub use prompt::{assemble_prompt, object_question, FOCUS_PREFIX, LISTEN_PREFIX};
pub use provider::{
    LogitProvider, LogitRequest, ProviderDescriptor, ProviderKind, RemoteOptions, RemoteProvider,
    ToyProvider, ToyWorld,
};
