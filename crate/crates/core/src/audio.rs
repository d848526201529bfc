//! Waveform clips and the silent counterpart used for the without-audio branch.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AadError, Result};

/// Mono waveform with a sample rate. Samples are finite, nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AudioClip {
    sample_rate: u32,
    samples: Vec<f32>,
}

impl AudioClip {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(AadError::Input("sample rate must be > 0".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AadError::NumericInput(format!(
                "audio sample {i} is not finite"
            )));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn is_silent(&self) -> bool {
        self.samples.iter().all(|&s| s == 0.0)
    }

    /// Reads a WAV file, averaging channels down to mono.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
        let spec = reader.spec();
        let channels = usize::from(spec.channels.max(1));
        let interleaved: Vec<f32> = match spec.sample_format {
            hound::SampleFormat::Float => reader
                .into_samples::<f32>()
                .collect::<Result<_, _>>()
                .map_err(|e| wav_error(path, e))?,
            hound::SampleFormat::Int => {
                let scale = (1i64 << (spec.bits_per_sample - 1)) as f32;
                reader
                    .into_samples::<i32>()
                    .map(|s| s.map(|v| v as f32 / scale))
                    .collect::<Result<_, _>>()
                    .map_err(|e| wav_error(path, e))?
            }
        };
        let samples = interleaved
            .chunks(channels)
            .map(|frame| frame.iter().sum::<f32>() / frame.len() as f32)
            .collect();
        Self::new(samples, spec.sample_rate)
    }

    /// Writes the clip as a mono 32-bit float WAV file.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
        for &s in &self.samples {
            writer.write_sample(s).map_err(|e| wav_error(path, e))?;
        }
        writer.finalize().map_err(|e| wav_error(path, e))
    }
}

impl<'de> Deserialize<'de> for AudioClip {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sample_rate: u32,
            samples: Vec<f32>,
        }
        let raw = Raw::deserialize(deserializer)?;
        AudioClip::new(raw.samples, raw.sample_rate).map_err(serde::de::Error::custom)
    }
}

fn wav_error(path: &Path, err: hound::Error) -> AadError {
    match err {
        hound::Error::IoError(e) => AadError::io(path, e),
        other => AadError::Input(format!("{}: {other}", path.display())),
    }
}

/// A zero-valued copy of `audio`: same length, same sample rate.
pub fn make_blank(audio: &AudioClip) -> AudioClip {
    AudioClip {
        sample_rate: audio.sample_rate,
        samples: vec![0.0; audio.samples.len()],
    }
}
