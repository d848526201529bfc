mod support;

use aad_core::harness::{
    build_benchmark, run_eval, sweep_alpha, AudioSource, Dataset, Label, SamplingKind,
};
use aad_core::{AadError, DecodingConfig, ToyProvider, ToyWorld, FOCUS_PREFIX, LISTEN_PREFIX};
use support::Flaky;

fn toy_bench(strategy: SamplingKind, n: usize, seed: u64) -> (ToyWorld, Dataset) {
    let world = ToyWorld::synthetic(6, 7).unwrap();
    let dataset = build_benchmark(&world, n, strategy, seed).unwrap();
    (world, dataset)
}

#[test]
fn alpha_zero_always_answers_yes() {
    let (world, dataset) = toy_bench(SamplingKind::Random, 200, 7);
    let provider = ToyProvider::new(world);
    let config = DecodingConfig::default().with_alpha(0.0).with_prefix("");
    let report = run_eval(&dataset, &provider, &config).unwrap();
    assert_eq!(report.metrics.yes_rate, 1.0);
    assert_eq!(report.metrics.f1, 0.0);
    assert_eq!(report.metrics.accuracy, 0.5);
}

#[test]
fn alpha_one_separates_perfectly() {
    let (world, dataset) = toy_bench(SamplingKind::Random, 200, 7);
    let provider = ToyProvider::new(world);
    let config = DecodingConfig::default().with_alpha(1.0).with_prefix("");
    let report = run_eval(&dataset, &provider, &config).unwrap();
    assert_eq!(report.metrics.f1, 1.0);
    assert_eq!(report.metrics.accuracy, 1.0);
    assert_eq!(report.metrics.yes_rate, 0.5);
    assert_eq!(report.items.len(), 200);
    assert!(report.failures().next().is_none());
}

#[test]
fn report_ignores_item_order() {
    let (world, dataset) = toy_bench(SamplingKind::Adversarial, 40, 2);
    let provider = ToyProvider::new(world);
    let config = DecodingConfig::default().with_alpha(0.5);
    let forward = run_eval(&dataset, &provider, &config).unwrap();
    let mut shuffled = dataset.clone();
    shuffled.items.reverse();
    shuffled.items.rotate_left(7);
    assert_eq!(run_eval(&shuffled, &provider, &config).unwrap(), forward);
}

#[test]
fn empty_dataset_is_an_input_error() {
    let world = ToyWorld::synthetic(4, 0).unwrap();
    let mut dataset = build_benchmark(&world, 2, SamplingKind::Random, 0).unwrap();
    dataset.items.clear();
    let err = run_eval(
        &dataset,
        &ToyProvider::new(world),
        &DecodingConfig::default(),
    );
    assert!(matches!(err, Err(AadError::Input(_))));
}

fn poisoned_dataset(bad: usize) -> (ToyWorld, Dataset) {
    let (world, mut dataset) = toy_bench(SamplingKind::Random, 200, 7);
    for item in dataset.items.iter_mut().take(bad) {
        item.question = format!("{} POISON", item.question);
    }
    (world, dataset)
}

#[test]
fn few_provider_failures_count_as_unparseable() {
    let (world, dataset) = poisoned_dataset(2);
    let provider = Flaky {
        inner: ToyProvider::new(world),
        poison: "POISON".into(),
    };
    let report = run_eval(&dataset, &provider, &DecodingConfig::default()).unwrap();
    assert_eq!(report.failures().count(), 2);
    assert_eq!(report.metrics.unparseable_rate, 0.01);
}

#[test]
fn many_provider_failures_abort() {
    let (world, dataset) = poisoned_dataset(3);
    let provider = Flaky {
        inner: ToyProvider::new(world),
        poison: "POISON".into(),
    };
    let err = run_eval(&dataset, &provider, &DecodingConfig::default()).unwrap_err();
    assert!(matches!(err, AadError::Run(_)), "{err}");
}

#[test]
fn sweep_rows_follow_input_order_and_match_direct_runs() {
    let (world, dataset) = toy_bench(SamplingKind::Popular, 60, 1);
    let provider = ToyProvider::new(world);
    let base = DecodingConfig::default();
    let prefixes = vec![
        String::new(),
        FOCUS_PREFIX.to_owned(),
        LISTEN_PREFIX.to_owned(),
    ];
    let alphas = [0.0, 1.0];
    let sweep = sweep_alpha(&dataset, &provider, &alphas, &prefixes, &base).unwrap();
    assert_eq!(sweep.rows.len(), 6);
    let mut i = 0;
    for prefix in &prefixes {
        for &alpha in &alphas {
            let row = &sweep.rows[i];
            assert_eq!((row.alpha, row.prefix.as_str()), (alpha, prefix.as_str()));
            let direct = run_eval(
                &dataset,
                &provider,
                &base.clone().with_alpha(alpha).with_prefix(prefix.clone()),
            )
            .unwrap();
            assert_eq!(row.outcome.as_ref().unwrap(), &direct);
            i += 1;
        }
    }
}

#[test]
fn sweep_yes_rate_never_increases() {
    for seed in 0..5 {
        let (world, dataset) = toy_bench(SamplingKind::Random, 100, seed);
        let provider = ToyProvider::new(world);
        let alphas = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0];
        let sweep = sweep_alpha(
            &dataset,
            &provider,
            &alphas,
            &[],
            &DecodingConfig::default(),
        )
        .unwrap();
        let rates: Vec<f64> = sweep
            .rows
            .iter()
            .map(|r| r.outcome.as_ref().unwrap().metrics.yes_rate)
            .collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
    }
}

#[test]
fn sweep_records_failed_rows_and_continues() {
    let (world, dataset) = poisoned_dataset(5);
    let provider = Flaky {
        inner: ToyProvider::new(world),
        poison: "POISON".into(),
    };
    // only the empty prefix lets the poisoned questions through unchanged;
    // all rows fail the same way, so the sweep must still report every row
    let sweep = sweep_alpha(
        &dataset,
        &provider,
        &[0.0, 1.0],
        &[String::new()],
        &DecodingConfig::default(),
    )
    .unwrap();
    assert_eq!(sweep.rows.len(), 2);
    assert!(!sweep.all_succeeded());
}

#[test]
fn sweep_validates_alphas() {
    let (world, dataset) = toy_bench(SamplingKind::Random, 4, 0);
    let provider = ToyProvider::new(world);
    let base = DecodingConfig::default();
    assert!(sweep_alpha(&dataset, &provider, &[], &[], &base).is_err());
    assert!(sweep_alpha(&dataset, &provider, &[0.5, -1.0], &[], &base).is_err());
}

#[test]
fn adversarial_no_items_maximize_cooccurrence() {
    let world = ToyWorld::new(
        vec!["dog".into(), "cat".into(), "car".into()],
        vec![vec![0, 5, 1], vec![5, 0, 2], vec![1, 2, 0]],
        vec![10, 6, 2],
    )
    .unwrap();
    let dataset = build_benchmark(&world, 20, SamplingKind::Adversarial, 11).unwrap();
    assert_eq!(dataset.label_counts(), (10, 10));
    for item in dataset.items.iter().filter(|i| i.gold == Label::No) {
        let AudioSource::Synthetic { present } = &item.audio else {
            unreachable!()
        };
        let score = |o: &str| -> u32 {
            let k = world.index_of(o).unwrap();
            present
                .iter()
                .map(|p| world.cooccurrence(k, world.index_of(p).unwrap()))
                .sum()
        };
        let best = world
            .objects()
            .iter()
            .filter(|o| !present.contains(*o))
            .map(|o| score(o))
            .max()
            .unwrap();
        let asked = world.find_queried_object(&item.question).unwrap();
        assert!(!present.contains(asked));
        assert_eq!(score(asked), best);
    }
}

#[test]
fn file_backed_items_are_evaluated() {
    let dir = tempfile::tempdir().unwrap();
    let world = ToyWorld::synthetic(4, 0).unwrap();
    let clip = support::scene(&world, &["dog"]);
    clip.write_wav(dir.path().join("dog.wav")).unwrap();
    let mut dataset = Dataset::new(
        "files",
        Label::No,
        vec![
            aad_core::harness::EvalItem {
                id: "a".into(),
                audio: AudioSource::Path("dog.wav".into()),
                question: "Is there a sound of a dog in the audio?".into(),
                gold: Label::Yes,
            },
            aad_core::harness::EvalItem {
                id: "b".into(),
                audio: AudioSource::Path("dog.wav".into()),
                question: "Is there a sound of a cat in the audio?".into(),
                gold: Label::No,
            },
        ],
    );
    dataset.base_dir = Some(dir.path().to_path_buf());
    let report = run_eval(
        &dataset,
        &ToyProvider::new(world),
        &DecodingConfig::default().with_alpha(1.0),
    )
    .unwrap();
    assert_eq!(report.metrics.accuracy, 1.0);
}
