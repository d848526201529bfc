use std::collections::BTreeSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::{AudioSource, Dataset, EvalItem, Label};
use super::sampling::{sample_absent_objects, SamplingKind};
use crate::error::{AadError, Result};
use crate::prompt::object_question;
use crate::provider::ToyWorld;

/// Largest number of objects placed in one synthetic clip.
pub const MAX_OBJECTS_PER_CLIP: usize = 3;

/// Builds a balanced yes/no benchmark over synthetic clips.
///
/// Each of the `n_items / 2` clips contains 1 to 3 random objects and yields
/// two questions: one about an object it contains (gold yes) and one about an
/// absent object chosen by `kind` (gold no). The positive class is `no`.
pub fn build_benchmark(
    world: &ToyWorld,
    n_items: usize,
    kind: SamplingKind,
    seed: u64,
) -> Result<Dataset> {
    if n_items == 0 || !n_items.is_multiple_of(2) {
        return Err(AadError::Input(format!(
            "item count must be even and positive, got {n_items}"
        )));
    }
    if world.len() < 2 {
        return Err(AadError::Input(
            "benchmark needs a world with at least 2 objects".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_present = MAX_OBJECTS_PER_CLIP.min(world.len() - 1);
    let clips = n_items / 2;
    let width = (clips - 1).to_string().len().max(4);
    let mut items = Vec::with_capacity(n_items);

    for clip in 0..clips {
        let size = rng.random_range(1..=max_present);
        let present: BTreeSet<String> = rand::seq::index::sample(&mut rng, world.len(), size)
            .into_iter()
            .map(|i| world.objects()[i].clone())
            .collect();
        let yes_object = present
            .iter()
            .nth(rng.random_range(0..present.len()))
            .expect("present set is non-empty")
            .clone();
        let strategy = kind.with_seed(rng.next_u64());
        let no_object = sample_absent_objects(world, &present, strategy, 1)?.remove(0);

        let audio = AudioSource::Synthetic { present };
        for (object, gold) in [(yes_object, Label::Yes), (no_object, Label::No)] {
            items.push(EvalItem {
                id: format!("{clip:0width$}-{gold}"),
                audio: audio.clone(),
                question: object_question(&object),
                gold,
            });
        }
    }

    let mut dataset = Dataset::new(format!("toy-{kind}-seed{seed}"), Label::No, items);
    dataset.labels = Some(world.objects().to_vec());
    dataset.world = Some(world.clone());
    Ok(dataset)
}
