//! A deterministic stand-in for an audio-language model with a built-in
//! "yes" prior.
//!
//! The toy answers a single yes/no question about one object. Its step-0
//! score for "yes" is `b + s * a`, where `b` is the prior (yes bias), `s` the
//! evidence strength and `a` the audio evidence: `+1` if the queried object
//! is audible, `-1` if it is not, and `0` when the request carries blank
//! audio. "no" always scores 0 and every other token -10. After step 0 the
//! toy emits `<eos>` (or, in verbose mode, the filler `, there is sound`
//! before `<eos>`).
//!
//! Scenes are rendered as sums of pure tones, one frequency per object, so
//! the provider can "hear" which objects a clip contains from the waveform
//! alone. This keeps it a pure function of the request and lets the same
//! toy sit behind the HTTP protocol.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LogitProvider, LogitRequest, ProviderDescriptor, ProviderKind};
use crate::audio::AudioClip;
use crate::error::{AadError, Result};
use crate::logits::{LogitVector, TokenId};
use crate::parser::words;

pub const TOY_VOCABULARY: [&str; 8] = ["yes", "no", ",", "there", "is", "not", "sound", "<eos>"];
pub const TOY_YES: TokenId = 0;
pub const TOY_NO: TokenId = 1;
pub const TOY_EOS: TokenId = 7;

const FILLER: [TokenId; 5] = [2, 3, 4, 6, TOY_EOS];
const HIGH: f64 = 10.0;
const LOW: f64 = -10.0;

pub const DEFAULT_YES_BIAS: f64 = 1.0;
pub const DEFAULT_EVIDENCE_STRENGTH: f64 = 0.6;

/// Tone frequencies are `BASE + k * SPACING` Hz; with a 16 kHz, 4000-sample
/// clip every tone lands on its own DFT bin.
const SCENE_RATE: u32 = 16_000;
const SCENE_LEN: usize = 4_000;
const TONE_BASE_HZ: f64 = 100.0;
const TONE_SPACING_HZ: f64 = 20.0;
const SCENE_PEAK: f64 = 0.8;
const HEARING_THRESHOLD: f64 = 1e-3;

/// Upper bound on world size so every tone stays below Nyquist and above
/// the hearing threshold when all objects sound at once.
pub const MAX_TOY_OBJECTS: usize = 256;

const OBJECT_NAMES: [&str; 48] = [
    "dog",
    "cat",
    "car",
    "rain",
    "bird",
    "siren",
    "baby",
    "train",
    "thunder",
    "wind",
    "engine",
    "bell",
    "horn",
    "clock",
    "phone",
    "guitar",
    "piano",
    "drum",
    "violin",
    "whistle",
    "footsteps",
    "applause",
    "laughter",
    "speech",
    "water",
    "fire",
    "door",
    "hammer",
    "saw",
    "drill",
    "helicopter",
    "airplane",
    "motorcycle",
    "truck",
    "bus",
    "boat",
    "cow",
    "sheep",
    "horse",
    "rooster",
    "frog",
    "insect",
    "typewriter",
    "music",
    "vacuum",
    "knock",
    "cough",
    "sneeze",
];

/// Object inventory with co-occurrence and frequency statistics, plus the
/// toy model's prior and evidence parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WorldSpec")]
pub struct ToyWorld {
    objects: Vec<String>,
    cooccurrence: Vec<Vec<u32>>,
    frequency: Vec<u32>,
    yes_bias: f64,
    evidence_strength: f64,
}

#[derive(Deserialize)]
struct WorldSpec {
    objects: Vec<String>,
    cooccurrence: Vec<Vec<u32>>,
    frequency: Vec<u32>,
    #[serde(default = "default_bias")]
    yes_bias: f64,
    #[serde(default = "default_strength")]
    evidence_strength: f64,
}

fn default_bias() -> f64 {
    DEFAULT_YES_BIAS
}

fn default_strength() -> f64 {
    DEFAULT_EVIDENCE_STRENGTH
}

impl TryFrom<WorldSpec> for ToyWorld {
    type Error = AadError;

    fn try_from(s: WorldSpec) -> Result<Self> {
        ToyWorld::new(s.objects, s.cooccurrence, s.frequency)?
            .with_parameters(s.yes_bias, s.evidence_strength)
    }
}

impl ToyWorld {
    pub fn new(
        objects: Vec<String>,
        cooccurrence: Vec<Vec<u32>>,
        frequency: Vec<u32>,
    ) -> Result<Self> {
        let n = objects.len();
        if n > MAX_TOY_OBJECTS {
            return Err(AadError::Input(format!(
                "world has {n} objects, at most {MAX_TOY_OBJECTS} supported"
            )));
        }
        let unique: BTreeSet<&str> = objects.iter().map(String::as_str).collect();
        if unique.len() != n {
            return Err(AadError::Input("duplicate object names".into()));
        }
        if let Some(bad) = objects.iter().find(|o| words(o).is_empty()) {
            return Err(AadError::Input(format!(
                "object name {bad:?} contains no word characters"
            )));
        }
        if cooccurrence.len() != n || cooccurrence.iter().any(|row| row.len() != n) {
            return Err(AadError::Input(format!(
                "co-occurrence matrix must be {n}x{n}"
            )));
        }
        for i in 0..n {
            if cooccurrence[i][i] != 0 {
                return Err(AadError::Input(format!(
                    "co-occurrence diagonal must be zero ({})",
                    objects[i]
                )));
            }
            for j in 0..i {
                if cooccurrence[i][j] != cooccurrence[j][i] {
                    return Err(AadError::Input(format!(
                        "co-occurrence not symmetric for ({}, {})",
                        objects[i], objects[j]
                    )));
                }
            }
        }
        if frequency.len() != n {
            return Err(AadError::Input(format!(
                "expected {n} frequencies, got {}",
                frequency.len()
            )));
        }
        Ok(Self {
            objects,
            cooccurrence,
            frequency,
            yes_bias: DEFAULT_YES_BIAS,
            evidence_strength: DEFAULT_EVIDENCE_STRENGTH,
        })
    }

    /// Objects with no co-occurrence or frequency information.
    pub fn from_labels(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![vec![0; n]; n], vec![0; n])
    }

    /// Builds statistics from per-clip annotations: frequency is the number
    /// of clips an object appears in, co-occurrence the number of clips two
    /// objects share.
    pub fn from_annotations<S>(clips: &[BTreeSet<S>]) -> Result<Self>
    where
        S: AsRef<str> + Ord,
    {
        let objects: BTreeSet<&str> = clips.iter().flatten().map(AsRef::as_ref).collect();
        let objects: Vec<String> = objects.into_iter().map(str::to_owned).collect();
        let index: BTreeMap<&str, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let n = objects.len();
        let mut cooc = vec![vec![0u32; n]; n];
        let mut freq = vec![0u32; n];
        for clip in clips {
            let ids: Vec<usize> = clip.iter().map(|o| index[o.as_ref()]).collect();
            for (a, &i) in ids.iter().enumerate() {
                freq[i] += 1;
                for &j in &ids[a + 1..] {
                    cooc[i][j] += 1;
                    cooc[j][i] += 1;
                }
            }
        }
        Self::new(objects, cooc, freq)
    }

    /// A random world of `n` named sound sources. Co-occurrence counts are
    /// drawn from 0..=9 and frequencies from 1..=100.
    pub fn synthetic(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(AadError::Input("a world needs at least 2 objects".into()));
        }
        let objects: Vec<String> = (0..n)
            .map(|k| match OBJECT_NAMES.get(k) {
                Some(name) => (*name).to_owned(),
                None => format!("object{k}"),
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cooc = vec![vec![0u32; n]; n];
        #[allow(clippy::needless_range_loop)] // symmetric fill
        for i in 0..n {
            for j in 0..i {
                let c = rng.random_range(0..=9);
                cooc[i][j] = c;
                cooc[j][i] = c;
            }
        }
        let freq = (0..n).map(|_| rng.random_range(1..=100)).collect();
        Self::new(objects, cooc, freq)
    }

    pub fn with_parameters(mut self, yes_bias: f64, evidence_strength: f64) -> Result<Self> {
        if !yes_bias.is_finite() {
            return Err(AadError::Config("yes bias must be finite".into()));
        }
        if !(evidence_strength.is_finite() && evidence_strength >= 0.0) {
            return Err(AadError::Config(
                "evidence strength must be finite and >= 0".into(),
            ));
        }
        self.yes_bias = yes_bias;
        self.evidence_strength = evidence_strength;
        Ok(self)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn index_of(&self, object: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == object)
    }

    pub fn cooccurrence(&self, a: usize, b: usize) -> u32 {
        self.cooccurrence[a][b]
    }

    pub fn frequency(&self, object: usize) -> u32 {
        self.frequency[object]
    }

    pub fn yes_bias(&self) -> f64 {
        self.yes_bias
    }

    pub fn evidence_strength(&self) -> f64 {
        self.evidence_strength
    }

    /// Renders `present` as a 0.25 s, 16 kHz sum of one tone per object.
    pub fn render_scene<S>(&self, present: &BTreeSet<S>) -> Result<AudioClip>
    where
        S: AsRef<str> + Ord,
    {
        let mut ids = Vec::with_capacity(present.len());
        for name in present {
            let name = name.as_ref();
            ids.push(
                self.index_of(name).ok_or_else(|| {
                    AadError::Input(format!("object {name:?} is not in the world"))
                })?,
            );
        }
        let amplitude = SCENE_PEAK / ids.len().max(1) as f64;
        let samples = (0..SCENE_LEN)
            .map(|n| {
                let t = n as f64 / f64::from(SCENE_RATE);
                ids.iter()
                    .map(|&k| amplitude * (TAU * tone_hz(k) * t).sin())
                    .sum::<f64>() as f32
            })
            .collect();
        AudioClip::new(samples, SCENE_RATE)
    }

    /// Objects whose tone is present in `clip` above the hearing threshold.
    pub fn hear(&self, clip: &AudioClip) -> BTreeSet<String> {
        if clip.is_empty() || clip.is_silent() {
            return BTreeSet::new();
        }
        let rate = f64::from(clip.sample_rate());
        let len = clip.len() as f64;
        (0..self.objects.len())
            .filter(|&k| {
                let hz = tone_hz(k);
                if hz >= rate / 2.0 {
                    return false;
                }
                2.0 * goertzel_magnitude(clip.samples(), hz / rate) / len > HEARING_THRESHOLD
            })
            .map(|k| self.objects[k].clone())
            .collect()
    }

    /// The world object named in `prompt`, matched on whole words. The
    /// earliest occurrence wins; at the same position the longer name wins.
    pub fn find_queried_object(&self, prompt: &str) -> Result<&str> {
        let prompt_words = words(prompt);
        let mut best: Option<(usize, usize, usize)> = None;
        for (k, object) in self.objects.iter().enumerate() {
            let name = words(object);
            let Some(pos) = prompt_words
                .windows(name.len())
                .position(|w| w == name.as_slice())
            else {
                continue;
            };
            let better = match best {
                None => true,
                Some((p, l, _)) => pos < p || (pos == p && name.len() > l),
            };
            if better {
                best = Some((pos, name.len(), k));
            }
        }
        best.map(|(_, _, k)| self.objects[k].as_str())
            .ok_or_else(|| AadError::QuestionParse(format!("no known object named in {prompt:?}")))
    }
}

fn tone_hz(k: usize) -> f64 {
    TONE_BASE_HZ + TONE_SPACING_HZ * k as f64
}

/// Magnitude of the DFT of `samples` at `cycles_per_sample`, via the
/// Goertzel recurrence.
fn goertzel_magnitude(samples: &[f32], cycles_per_sample: f64) -> f64 {
    let omega = TAU * cycles_per_sample;
    let coeff = 2.0 * omega.cos();
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for &x in samples {
        let s0 = f64::from(x) + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    // |X|^2 without the final phase rotation
    (s1 * s1 + s2 * s2 - coeff * s1 * s2).max(0.0).sqrt()
}

/// Logits of the toy model for a request, given which objects the clip contains.
pub fn toy_logits<S>(
    world: &ToyWorld,
    present: &BTreeSet<S>,
    queried: &str,
    request: &LogitRequest<'_>,
) -> Result<LogitVector>
where
    S: AsRef<str> + Ord,
{
    scripted_logits(world, present, queried, request, false)
}

fn scripted_logits<S>(
    world: &ToyWorld,
    present: &BTreeSet<S>,
    queried: &str,
    request: &LogitRequest<'_>,
    verbose: bool,
) -> Result<LogitVector>
where
    S: AsRef<str> + Ord,
{
    if world.index_of(queried).is_none() {
        return Err(AadError::Input(format!(
            "queried object {queried:?} is not in the world"
        )));
    }
    let mut logits = vec![LOW; TOY_VOCABULARY.len()];
    let step = request.generated_tokens.len();
    if step == 0 {
        let evidence = if request.blank {
            0.0
        } else if present.iter().any(|p| p.as_ref() == queried) {
            1.0
        } else {
            -1.0
        };
        logits[TOY_YES as usize] = world.yes_bias + world.evidence_strength * evidence;
        logits[TOY_NO as usize] = 0.0;
    } else {
        let forced = if verbose {
            FILLER[(step - 1).min(FILLER.len() - 1)]
        } else {
            TOY_EOS
        };
        logits[forced as usize] = HIGH;
    }
    LogitVector::new(logits)
}

/// [`LogitProvider`] over a [`ToyWorld`].
#[derive(Debug, Clone)]
pub struct ToyProvider {
    world: ToyWorld,
    verbose: bool,
    descriptor: ProviderDescriptor,
}

impl ToyProvider {
    pub fn new(world: ToyWorld) -> Self {
        Self {
            world,
            verbose: false,
            descriptor: ProviderDescriptor {
                kind: ProviderKind::Toy,
                vocabulary_size: TOY_VOCABULARY.len(),
                endpoint: None,
                tokens: Some(TOY_VOCABULARY.iter().map(|t| (*t).to_owned()).collect()),
                eos_token: Some(TOY_EOS),
            },
        }
    }

    /// Follow the verdict with `, there is sound` before ending.
    pub fn verbose(mut self, verbose: bool) -> Self {
        self.verbose = verbose;
        self
    }

    pub fn world(&self) -> &ToyWorld {
        &self.world
    }
}

impl LogitProvider for ToyProvider {
    fn descriptor(&self) -> &ProviderDescriptor {
        &self.descriptor
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        request.validate(self.descriptor.vocabulary_size)?;
        let queried = self.world.find_queried_object(request.prompt_text)?;
        let present = if request.blank {
            BTreeSet::new()
        } else {
            self.world.hear(request.audio)
        };
        scripted_logits(&self.world, &present, queried, request, self.verbose)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::make_blank;

    fn three() -> ToyWorld {
        ToyWorld::new(
            vec!["dog".into(), "cat".into(), "car".into()],
            vec![vec![0, 5, 1], vec![5, 0, 0], vec![1, 0, 0]],
            vec![10, 6, 2],
        )
        .unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| (*s).to_owned()).collect()
    }

    fn request<'a>(audio: &'a AudioClip, prompt: &'a str, blank: bool) -> LogitRequest<'a> {
        LogitRequest {
            prompt_text: prompt,
            generated_tokens: &[],
            audio,
            blank,
        }
    }

    #[test]
    fn step_zero_scores() {
        let world = three();
        let audio = AudioClip::new(vec![0.1; 4], 16_000).unwrap();
        let blank = make_blank(&audio);
        let q = "Is there a sound of a cat in the audio?";
        let present = set(&["dog"]);

        let absent = toy_logits(&world, &present, "cat", &request(&audio, q, false)).unwrap();
        assert!((absent.values()[0] - 0.4).abs() < 1e-12);
        assert_eq!(absent.values()[1], 0.0);
        assert!(absent.values()[2..].iter().all(|&v| v == LOW));
        assert_eq!(absent.argmax(), TOY_YES);

        let blanked = toy_logits(&world, &present, "cat", &request(&blank, q, true)).unwrap();
        assert_eq!(blanked.values()[0], 1.0);
        assert_eq!(blanked.values()[1], 0.0);

        let heard = toy_logits(&world, &set(&["cat"]), "cat", &request(&audio, q, false)).unwrap();
        assert!((heard.values()[0] - 1.6).abs() < 1e-12);
    }

    #[test]
    fn later_steps_end_the_sequence() {
        let world = three();
        let audio = AudioClip::new(vec![], 16_000).unwrap();
        let req = LogitRequest {
            prompt_text: "cat?",
            generated_tokens: &[TOY_NO],
            audio: &audio,
            blank: false,
        };
        let l = toy_logits(&world, &set(&[]), "cat", &req).unwrap();
        assert_eq!(l.argmax(), TOY_EOS);
        assert_eq!(l.values()[TOY_EOS as usize], HIGH);
    }

    #[test]
    fn verbose_filler_sequence() {
        let provider = ToyProvider::new(three()).verbose(true);
        let audio = three().render_scene(&set(&["dog"])).unwrap();
        let mut tokens = vec![];
        for _ in 0..8 {
            let req = LogitRequest {
                prompt_text: "Is there a sound of a dog in the audio?",
                generated_tokens: &tokens,
                audio: &audio,
                blank: false,
            };
            let next = provider.next_token_logits(&req).unwrap().argmax();
            tokens.push(next);
            if next == TOY_EOS {
                break;
            }
        }
        let text: Vec<&str> = tokens.iter().map(|&t| TOY_VOCABULARY[t as usize]).collect();
        assert_eq!(text, ["yes", ",", "there", "is", "sound", "<eos>"]);
    }

    #[test]
    fn goertzel_agrees_with_direct_dft() {
        let samples: Vec<f32> = (0..1000)
            .map(|n| ((n * 37 % 101) as f32 / 50.0) - 1.0)
            .collect();
        for f in [0.0125, 0.1, 0.3] {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (n, &x) in samples.iter().enumerate() {
                let phase = TAU * f * n as f64;
                re += f64::from(x) * phase.cos();
                im -= f64::from(x) * phase.sin();
            }
            let direct = re.hypot(im);
            assert!((goertzel_magnitude(&samples, f) - direct).abs() < 1e-6 * direct.max(1.0));
        }
    }

    #[test]
    fn hearing_recovers_rendered_scene() {
        let world = ToyWorld::synthetic(MAX_TOY_OBJECTS, 3).unwrap();
        for present in [
            set(&["dog"]),
            set(&["cat", "rain", "object200"]),
            world.objects().iter().cloned().collect(),
        ] {
            let clip = world.render_scene(&present).unwrap();
            assert_eq!(world.hear(&clip), present);
        }
        let silent = world.render_scene(&BTreeSet::<String>::new()).unwrap();
        assert!(world.hear(&silent).is_empty());
        assert!(world.render_scene(&set(&["unicorn"])).is_err());
    }

    #[test]
    fn question_parsing() {
        let world = ToyWorld::new(
            vec!["car".into(), "car horn".into(), "cat".into()],
            vec![vec![0; 3]; 3],
            vec![0; 3],
        )
        .unwrap();
        assert_eq!(
            world
                .find_queried_object("Is there a CAT or a car?")
                .unwrap(),
            "cat"
        );
        assert_eq!(
            world.find_queried_object("a car horn, then a cat").unwrap(),
            "car horn"
        );
        // whole words only: "cats" and "scar" don't count
        assert!(matches!(
            world.find_queried_object("cats near a scar"),
            Err(AadError::QuestionParse(_))
        ));
    }

    #[test]
    fn provider_rejects_out_of_range_tokens() {
        let provider = ToyProvider::new(three());
        let audio = AudioClip::new(vec![0.0; 4], 16_000).unwrap();
        let req = LogitRequest {
            prompt_text: "dog?",
            generated_tokens: &[8],
            audio: &audio,
            blank: false,
        };
        assert!(matches!(
            provider.next_token_logits(&req),
            Err(AadError::ProviderContract(_))
        ));
    }

    #[test]
    fn provider_is_deterministic() {
        let world = ToyWorld::synthetic(6, 1).unwrap();
        let provider = ToyProvider::new(world.clone());
        let audio = world.render_scene(&set(&["dog", "cat"])).unwrap();
        let req = request(&audio, "Is there a sound of a car in the audio?", false);
        let a = provider.next_token_logits(&req).unwrap();
        let b = provider.next_token_logits(&req).unwrap();
        let bits = |l: &LogitVector| l.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn hallucination_regime() {
        let world = three();
        let audio = world.render_scene(&set(&["dog"])).unwrap();
        let blank = make_blank(&audio);
        let q = "Is there a sound of a cat in the audio?";
        let provider = ToyProvider::new(world);
        let with = provider
            .next_token_logits(&request(&audio, q, false))
            .unwrap();
        let without = provider
            .next_token_logits(&request(&blank, q, true))
            .unwrap();
        assert_eq!(with.argmax(), TOY_YES);
        let combined = crate::logits::aad_combine(&with, &without, 1.0).unwrap();
        assert_eq!(combined.argmax(), TOY_NO);
        assert!((combined.values()[0] - (-0.2)).abs() < 1e-12);
    }

    #[test]
    fn world_validation() {
        let asym = ToyWorld::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![2, 0]],
            vec![1, 1],
        );
        assert!(asym.is_err());
        let diag = ToyWorld::new(
            vec!["a".into(), "b".into()],
            vec![vec![1, 0], vec![0, 0]],
            vec![1, 1],
        );
        assert!(diag.is_err());
        let dup = ToyWorld::from_labels(vec!["a".into(), "a".into()]);
        assert!(dup.is_err());
        assert!(ToyWorld::synthetic(1, 0).is_err());
        assert!(three().with_parameters(1.0, -0.1).is_err());
    }

    #[test]
    fn annotations_build_statistics() {
        let clips = vec![
            set(&["dog", "cat"]),
            set(&["dog", "car"]),
            set(&["dog", "cat"]),
        ];
        let world = ToyWorld::from_annotations(&clips).unwrap();
        assert_eq!(world.objects(), &["car", "cat", "dog"]);
        let (car, cat, dog) = (0, 1, 2);
        assert_eq!(world.cooccurrence(dog, cat), 2);
        assert_eq!(world.cooccurrence(cat, dog), 2);
        assert_eq!(world.cooccurrence(dog, car), 1);
        assert_eq!(world.cooccurrence(car, cat), 0);
        assert_eq!(world.frequency(dog), 3);
        assert_eq!(world.frequency(car), 1);
    }

    #[test]
    fn world_json_round_trip() {
        let world = ToyWorld::synthetic(5, 9)
            .unwrap()
            .with_parameters(0.8, 0.5)
            .unwrap();
        let json = serde_json::to_string(&world).unwrap();
        assert_eq!(serde_json::from_str::<ToyWorld>(&json).unwrap(), world);
        let bad = r#"{"objects":["a","b"],"cooccurrence":[[0,1],[3,0]],"frequency":[1,1]}"#;
        assert!(serde_json::from_str::<ToyWorld>(bad).is_err());
    }
}
