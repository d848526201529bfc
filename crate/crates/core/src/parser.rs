//! Rule-based yes/no extraction from free-form answers.
//!
//! Text is lowercased and split at every character that is not a letter or
//! digit; the first word that is exactly `yes` or `no` decides. Negations
//! without the word "no" ("not present") are deliberately left unparseable.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unparseable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unparseable => "unparseable",
        })
    }
}

pub fn extract_verdict(text: &str) -> Verdict {
    words(text)
        .iter()
        .find_map(|w| match w.as_str() {
            "yes" => Some(Verdict::Yes),
            "no" => Some(Verdict::No),
            _ => None,
        })
        .unwrap_or(Verdict::Unparseable)
}

/// Lowercased alphanumeric runs of `text`, in order.
pub(crate) fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}
