//! Choosing absent objects for "no"-gold questions.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AadError, Result};
use crate::provider::ToyWorld;

/// Named sampling strategy, as chosen on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingKind {
    Random,
    Adversarial,
    Popular,
}

impl SamplingKind {
    pub fn with_seed(self, seed: u64) -> AbsentStrategy {
        match self {
            SamplingKind::Random => AbsentStrategy::Random { seed },
            SamplingKind::Adversarial => AbsentStrategy::Adversarial,
            SamplingKind::Popular => AbsentStrategy::Popular,
        }
    }
}

impl std::fmt::Display for SamplingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplingKind::Random => "random",
            SamplingKind::Adversarial => "adversarial",
            SamplingKind::Popular => "popular",
        })
    }
}

impl std::str::FromStr for SamplingKind {
    type Err = AadError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SamplingKind::Random),
            "adversarial" => Ok(SamplingKind::Adversarial),
            "popular" => Ok(SamplingKind::Popular),
            other => Err(AadError::Input(format!(
                "unknown sampling strategy {other:?} (random, adversarial, popular)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsentStrategy {
    /// Uniform without replacement over the absent objects.
    Random { seed: u64 },
    /// Absent objects that co-occur most with the present ones.
    Adversarial,
    /// The most frequent absent objects.
    Popular,
}

/// Picks `k` objects not in `present`. Adversarial and popular rank by
/// score, highest first, breaking ties by name.
pub fn sample_absent_objects(
    world: &ToyWorld,
    present: &BTreeSet<String>,
    strategy: AbsentStrategy,
    k: usize,
) -> Result<Vec<String>> {
    let mut present_ids = Vec::with_capacity(present.len());
    for name in present {
        present_ids.push(
            world
                .index_of(name)
                .ok_or_else(|| AadError::Input(format!("present object {name:?} not in world")))?,
        );
    }
    let complement: Vec<usize> = (0..world.len())
        .filter(|i| !present_ids.contains(i))
        .collect();
    if k == 0 || k > complement.len() {
        return Err(AadError::Input(format!(
            "cannot sample {k} absent objects from {} candidates",
            complement.len()
        )));
    }
    let name = |i: usize| world.objects()[i].clone();

    let chosen = match strategy {
        AbsentStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rand::seq::index::sample(&mut rng, complement.len(), k)
                .into_iter()
                .map(|j| name(complement[j]))
                .collect()
        }
        AbsentStrategy::Adversarial => top_k(world, &complement, k, |c| {
            present_ids
                .iter()
                .map(|&p| u64::from(world.cooccurrence(c, p)))
                .sum()
        }),
        AbsentStrategy::Popular => top_k(world, &complement, k, |c| u64::from(world.frequency(c))),
    };
    Ok(chosen)
}

fn top_k(
    world: &ToyWorld,
    candidates: &[usize],
    k: usize,
    score: impl Fn(usize) -> u64,
) -> Vec<String> {
    let mut ranked: Vec<(u64, &str)> = candidates
        .iter()
        .map(|&c| (score(c), world.objects()[c].as_str()))
        .collect();
    ranked.sort_by_key(|&(s, name)| (Reverse(s), name));
    ranked
        .into_iter()
        .take(k)
        .map(|(_, name)| name.to_owned())
        .collect()
}
