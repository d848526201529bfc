//! The `aad` command-line tool.
//!
//! [`dispatch`] parses arguments, runs the chosen subcommand and maps the
//! outcome to an exit code: 0 on success, 1 when a run fails, 2 for usage
//! and configuration errors.

mod args;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::time::Duration;

use aad_core::harness::{
    build_benchmark, load_dataset, markdown_table, run_eval, save_dataset, sweep_alpha,
    write_csv_file, Dataset,
};
use aad_core::{
    generate, AadError, AudioClip, DecodingConfig, GenerationResult, LogitProvider, RemoteOptions,
    RemoteProvider, Strategy, ToyProvider, ToyWorld,
};
use clap::Parser;

pub use args::{Cli, Command};
use args::{
    DecodeArgs, EvalArgs, GenerateArgs, ProviderArgs, ProviderChoice, SweepArgs, SynthArgs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUN_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &AadError) -> i32 {
    match e.root() {
        AadError::Config(_) => EXIT_USAGE,
        _ => EXIT_RUN_ERROR,
    }
}

fn strategy(seed: u64, temperature: Option<f64>) -> Strategy {
    match temperature {
        Some(temperature) => Strategy::Sampled { seed, temperature },
        None => Strategy::Greedy,
    }
}

fn decoding_config(decode: &DecodeArgs, alpha: f64, record_steps: bool) -> DecodingConfig {
    DecodingConfig::default()
        .with_alpha(alpha)
        .with_prefix(decode.prefix.clone())
        .with_max_new_tokens(decode.max_tokens as usize)
        .with_strategy(strategy(decode.seed, decode.temperature))
        .with_record_steps(record_steps)
}

fn endpoint(args: &ProviderArgs) -> aad_core::Result<&str> {
    args.endpoint.as_deref().ok_or_else(|| {
        AadError::Config("--provider remote needs --endpoint or AAD_ENDPOINT".into())
    })
}

/// Rejects a remote provider without an endpoint before any work is done.
fn check_provider(args: &ProviderArgs) -> aad_core::Result<()> {
    if args.provider == ProviderChoice::Remote {
        endpoint(args)?;
    }
    Ok(())
}

fn remote(args: &ProviderArgs) -> aad_core::Result<RemoteProvider> {
    let endpoint = endpoint(args)?;
    let options = RemoteOptions {
        timeout: Duration::from_secs_f64(args.timeout),
        ..RemoteOptions::default()
    };
    RemoteProvider::connect(endpoint, options)
}

/// The provider for a dataset run. The toy provider takes its world from
/// the dataset.
fn dataset_provider(
    args: &ProviderArgs,
    dataset: &Dataset,
) -> aad_core::Result<Box<dyn LogitProvider>> {
    Ok(match args.provider {
        ProviderChoice::Toy => Box::new(ToyProvider::new(dataset.toy_world()?)),
        ProviderChoice::Remote => Box::new(remote(args)?),
    })
}

fn with_pool<T>(jobs: usize, f: impl FnOnce() -> T + Send) -> aad_core::Result<T>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| AadError::Run(format!("starting worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn cmd_generate(args: GenerateArgs) -> aad_core::Result<i32> {
    let config = decoding_config(&args.decode, args.alpha, args.steps);
    config.validate()?;
    check_provider(&args.provider)?;
    let world = ToyWorld::synthetic(args.objects as usize, args.decode.seed)?;
    let audio = match (&args.audio, &args.present) {
        (Some(path), _) => AudioClip::read_wav(path)?,
        (None, Some(present)) => {
            let set: BTreeSet<&str> = present.iter().map(|s| s.trim()).collect();
            world.render_scene(&set).map_err(|e| match e {
                AadError::Input(m) => AadError::Config(format!(
                    "{m}; known objects: {}",
                    world.objects().join(", ")
                )),
                other => other,
            })?
        }
        (None, None) => unreachable!("clap requires one of --audio and --present"),
    };
    let provider: Box<dyn LogitProvider> = match args.provider.provider {
        ProviderChoice::Toy => Box::new(ToyProvider::new(world).verbose(true)),
        ProviderChoice::Remote => Box::new(remote(&args.provider)?),
    };
    let result = generate(provider.as_ref(), &audio, &args.question, &config)?;
    println!("{}", result.text);
    if args.steps {
        print!("\n{}", step_table(provider.as_ref(), &result));
    }
    Ok(EXIT_OK)
}

fn token_label(provider: &dyn LogitProvider, id: u32) -> String {
    match provider.descriptor().token_text(id) {
        Some(text) => format!("`{text}`"),
        None => format!("#{id}"),
    }
}

fn step_table(provider: &dyn LogitProvider, result: &GenerationResult) -> String {
    let mut md = String::from(
        "| Step | Token | P(token) | Logit with audio | Logit without audio | Runner-up |\n\
         |---:|:---|---:|---:|---:|:---|\n",
    );
    for step in &result.steps {
        let chosen = step.chosen_token as usize;
        let probs = step.aad_distribution.values();
        let runner_up = probs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != chosen)
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, p)| format!("{} ({p:.3})", token_label(provider, i as u32)))
            .unwrap_or_default();
        let _ = writeln!(
            md,
            "| {} | {} | {:.4} | {:.3} | {:.3} | {} |",
            step.step_index,
            token_label(provider, step.chosen_token),
            probs[chosen],
            step.with_audio_logits.values()[chosen],
            step.without_audio_logits.values()[chosen],
            runner_up
        );
    }
    md
}

fn cmd_eval(args: EvalArgs) -> aad_core::Result<i32> {
    let run = &args.run;
    let config = decoding_config(&run.decode, args.alpha, false);
    config.validate()?;
    check_provider(&run.provider)?;
    let dataset = load_dataset(&run.dataset)?;
    let provider = dataset_provider(&run.provider, &dataset)?;
    let report = with_pool(run.jobs, || run_eval(&dataset, provider.as_ref(), &config))??;

    let failed = report.failures().count();
    if failed > 0 {
        eprintln!("warning: {failed} item(s) failed at the provider and were scored unparseable");
    }
    let rows = [report.report_row()];
    if let Some(path) = &run.report {
        write_csv_file(&rows, path)?;
    }
    print!(
        "{}",
        markdown_table(&title(&dataset, run.provider.provider), &rows)
    );
    Ok(EXIT_OK)
}

fn cmd_sweep(args: SweepArgs) -> aad_core::Result<i32> {
    let base = DecodingConfig::default()
        .with_max_new_tokens(args.max_tokens as usize)
        .with_strategy(strategy(args.seed, args.temperature))
        .with_record_steps(false);
    base.validate()?;
    check_provider(&args.provider)?;
    let dataset = load_dataset(&args.dataset)?;
    let provider = dataset_provider(&args.provider, &dataset)?;
    let sweep = with_pool(args.jobs, || {
        sweep_alpha(
            &dataset,
            provider.as_ref(),
            &args.alphas,
            &args.prefixes,
            &base,
        )
    })??;

    let rows = sweep.report_rows();
    if let Some(path) = &args.report {
        write_csv_file(&rows, path)?;
    }
    print!(
        "{}",
        markdown_table(&title(&dataset, args.provider.provider), &rows)
    );
    if sweep.all_succeeded() {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: some sweep rows failed");
        Ok(EXIT_RUN_ERROR)
    }
}

fn cmd_synth(args: SynthArgs) -> aad_core::Result<i32> {
    let world = ToyWorld::synthetic(args.objects as usize, args.seed)?;
    let dataset = build_benchmark(&world, args.items, args.strategy.into(), args.seed)?;
    save_dataset(&dataset, &args.out)?;
    println!(
        "wrote {} items ({} objects, {} sampling, seed {}) to {}",
        dataset.len(),
        world.len(),
        aad_core::harness::SamplingKind::from(args.strategy),
        args.seed,
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn title(dataset: &Dataset, provider: ProviderChoice) -> String {
    let provider = match provider {
        ProviderChoice::Toy => "toy",
        ProviderChoice::Remote => "remote",
    };
    format!(
        "{} ({} items, positive class `{}`, {provider} provider)",
        dataset.name,
        dataset.len(),
        dataset.positive_class
    )
}
