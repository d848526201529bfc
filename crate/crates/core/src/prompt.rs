use crate::error::{AadError, Result};

/// Prefix that asks the model to attend to the audio before answering.
pub const FOCUS_PREFIX: &str = "Focus on the given audio and answer the following question";

/// Short alternate prefix used in prompt-sensitivity runs.
pub const LISTEN_PREFIX: &str = "Listen.";

/// Joins `prefix` and `question` with a single space. An empty prefix yields the question alone.
pub fn assemble_prompt(prefix: &str, question: &str) -> Result<String> {
    if question.is_empty() {
        return Err(AadError::Input("question must not be empty".into()));
    }
    if prefix.is_empty() {
        Ok(question.to_owned())
    } else {
        Ok(format!("{prefix} {question}"))
    }
}

/// The yes/no question asked about a single sound-source object.
pub fn object_question(object: &str) -> String {
    format!("Is there a sound of a {object} in the audio?")
}
