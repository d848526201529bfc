//! Benchmark items and their on-disk form.
//!
//! A dataset is a JSON-lines file with one item per line plus a sidecar
//! `<stem>.meta.json` holding the dataset name, the positive class, and
//! optionally the label universe and a toy world:
//!
//! ```text
//! {"id":"000000-yes","audio":{"synthetic":{"present":["dog"]}},"question":"...","gold":"yes"}
//! {"id":"clip-17","audio":{"path":"clips/17.wav"},"question":"...","gold":"no"}
//! ```
//!
//! Relative audio paths resolve against the dataset file's directory.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{AadError, Result};
use crate::parser::Verdict;
use crate::provider::ToyWorld;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Yes => Label::No,
            Label::No => Label::Yes,
        }
    }

    pub fn as_verdict(self) -> Verdict {
        match self {
            Label::Yes => Verdict::Yes,
            Label::No => Verdict::No,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Yes => "yes",
            Label::No => "no",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = AadError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yes" => Ok(Label::Yes),
            "no" => Ok(Label::No),
            other => Err(AadError::Input(format!(
                "expected yes or no, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AudioSource {
    Path(PathBuf),
    Synthetic { present: BTreeSet<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    pub id: String,
    pub audio: AudioSource,
    pub question: String,
    pub gold: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub positive_class: Label,
    pub items: Vec<EvalItem>,
    /// Object label universe, for ingested benchmarks.
    pub labels: Option<Vec<String>>,
    /// Object statistics and toy parameters, for synthetic benchmarks.
    pub world: Option<ToyWorld>,
    /// Directory relative audio paths resolve against.
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    name: String,
    positive_class: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    world: Option<ToyWorld>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, positive_class: Label, items: Vec<EvalItem>) -> Self {
        Self {
            name: name.into(),
            positive_class,
            items,
            labels: None,
            world: None,
            base_dir: None,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let yes = self.items.iter().filter(|i| i.gold == Label::Yes).count();
        (yes, self.items.len() - yes)
    }

    pub fn is_balanced(&self) -> bool {
        let (yes, no) = self.label_counts();
        yes == no
    }

    /// Unique ids, non-empty questions.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for item in &self.items {
            if item.question.is_empty() {
                return Err(AadError::Input(format!("item {}: empty question", item.id)));
            }
            if !seen.insert(item.id.as_str()) {
                return Err(AadError::Input(format!("duplicate item id {}", item.id)));
            }
        }
        Ok(())
    }

    /// The world a toy provider should use for this dataset: the stored world,
    /// else one built from the label universe, else from the objects named in
    /// synthetic clips.
    pub fn toy_world(&self) -> Result<ToyWorld> {
        if let Some(world) = &self.world {
            return Ok(world.clone());
        }
        if let Some(labels) = &self.labels {
            return ToyWorld::from_labels(labels.clone());
        }
        let objects: BTreeSet<&String> = self
            .items
            .iter()
            .filter_map(|i| match &i.audio {
                AudioSource::Synthetic { present } => Some(present),
                AudioSource::Path(_) => None,
            })
            .flatten()
            .collect();
        if objects.is_empty() {
            return Err(AadError::Input(format!(
                "dataset {} has no world, labels, or synthetic objects for the toy provider",
                self.name
            )));
        }
        ToyWorld::from_labels(objects.into_iter().cloned().collect())
    }

    /// Loads the clip an item refers to. Synthetic scenes need a world to
    /// render against.
    pub fn load_audio(&self, source: &AudioSource, world: Option<&ToyWorld>) -> Result<AudioClip> {
        match source {
            AudioSource::Path(path) => {
                let full = match &self.base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                AudioClip::read_wav(full)
            }
            AudioSource::Synthetic { present } => {
                let world = world.or(self.world.as_ref()).ok_or_else(|| {
                    AadError::Input("synthetic audio needs a world to render".into())
                })?;
                world.render_scene(present)
            }
        }
    }
}

/// `bench.jsonl` -> `bench.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Reads a JSON-lines dataset and its sidecar. Without a sidecar the name
/// is the file stem and the positive class is `no`.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| AadError::io(path, e))?;
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AadError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item: EvalItem = serde_json::from_str(&line)
            .map_err(|e| AadError::Input(format!("{}:{}: {e}", path.display(), n + 1)))?;
        items.push(item);
    }

    let meta_path = sidecar_path(path);
    let sidecar = match fs::read_to_string(&meta_path) {
        Ok(text) => Some(
            serde_json::from_str::<Sidecar>(&text)
                .map_err(|e| AadError::Input(format!("{}: {e}", meta_path.display())))?,
        ),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(AadError::io(meta_path, e)),
    };
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (name, positive_class, labels, world) = match sidecar {
        Some(s) => (s.name, s.positive_class, s.labels, s.world),
        None => (stem, Label::No, None, None),
    };
    let dataset = Dataset {
        name,
        positive_class,
        items,
        labels,
        world,
        base_dir: path.parent().map(Path::to_path_buf),
    };
    dataset.validate()?;
    Ok(dataset)
}

/// Writes the items as JSON lines and the metadata to the sidecar.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| AadError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in &dataset.items {
        let line = serde_json::to_string(item).expect("items serialize");
        writeln!(out, "{line}").map_err(|e| AadError::io(path, e))?;
    }
    out.flush().map_err(|e| AadError::io(path, e))?;

    let sidecar = Sidecar {
        name: dataset.name.clone(),
        positive_class: dataset.positive_class,
        labels: dataset.labels.clone(),
        world: dataset.world.clone(),
    };
    let meta_path = sidecar_path(path);
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(&meta_path, json + "\n").map_err(|e| AadError::io(meta_path, e))
}
