//! WAV decoding, resampling and short-time framing.

use std::f64::consts::PI;
use std::path::Path;

use crate::{Error, Result};

/// Decoded mono signal with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub source_path: String,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32, source_path: impl Into<String>) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        AudioClip {
            samples,
            sample_rate,
            source_path: source_path.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    /// Window coefficients of length `n`. Hann uses the symmetric form
    /// `0.5 - 0.5 cos(2 pi k / (n - 1))`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => {
                if n < 2 {
                    return vec![1.0; n];
                }
                let denom = (n - 1) as f64;
                (0..n)
                    .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / denom).cos())
                    .collect()
            }
        }
    }
}

/// Row-major matrix of overlapping, windowed frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f64>,
    pub frame_length: usize,
    pub hop_length: usize,
    pub sample_rate: u32,
    pub window: Window,
}

impl FrameMatrix {
    pub fn n_frames(&self) -> usize {
        self.data.len() / self.frame_length
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.data[i * self.frame_length..(i + 1) * self.frame_length]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.frame_length)
    }
}

/// Number of complete frames of length `frame_length` at stride `hop_length`
/// in a signal of `len` samples.
pub fn frame_count(len: usize, frame_length: usize, hop_length: usize) -> usize {
    if len < frame_length {
        0
    } else {
        (len - frame_length) / hop_length + 1
    }
}

/// Splits the clip into frames starting at multiples of `hop_length`,
/// multiplying each by `window`. A trailing partial frame is dropped.
pub fn frame(clip: &AudioClip, frame_length: usize, hop_length: usize, window: Window) -> FrameMatrix {
    assert!(frame_length >= 2, "frame_length must be at least 2");
    assert!(hop_length >= 1, "hop_length must be at least 1");
    let n_frames = frame_count(clip.samples.len(), frame_length, hop_length);
    let coeffs = window.coefficients(frame_length);
    let mut data = Vec::with_capacity(n_frames * frame_length);
    for i in 0..n_frames {
        let start = i * hop_length;
        let chunk = &clip.samples[start..start + frame_length];
        data.extend(chunk.iter().zip(&coeffs).map(|(x, w)| x * w));
    }
    FrameMatrix {
        data,
        frame_length,
        hop_length,
        sample_rate: clip.sample_rate,
        window,
    }
}

/// Linear-interpolation resampling to `target_rate`.
///
/// The output has `round(len * target / source)` samples; output sample `j`
/// reads the source at position `j * source / target`.
pub fn resample(clip: &AudioClip, target_rate: u32) -> AudioClip {
    assert!(target_rate > 0, "target rate must be positive");
    if target_rate == clip.sample_rate {
        return clip.clone();
    }
    let src = &clip.samples;
    let ratio = clip.sample_rate as f64 / target_rate as f64;
    let out_len = (src.len() as f64 * target_rate as f64 / clip.sample_rate as f64).round() as usize;
    let last = src.len().saturating_sub(1);
    let samples = (0..out_len)
        .map(|j| {
            let pos = j as f64 * ratio;
            let i = pos.floor() as usize;
            if i >= last {
                return src.get(last).copied().unwrap_or(0.0);
            }
            let frac = pos - i as f64;
            src[i] + (src[i + 1] - src[i]) * frac
        })
        .collect();
    AudioClip {
        samples,
        sample_rate: target_rate,
        source_path: clip.source_path.clone(),
    }
}

/// Reads a PCM 16-bit or IEEE float 32-bit WAV file and mixes it to mono.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let malformed = |reason: String| Error::MalformedWav {
        path: name.clone(),
        reason,
    };
    let unsupported = |reason: String| Error::UnsupportedFormat {
        path: name.clone(),
        reason,
    };

    let reader = match hound::WavReader::open(path) {
        Ok(r) => r,
        Err(hound::Error::IoError(e)) if e.kind() != std::io::ErrorKind::UnexpectedEof => {
            return Err(Error::io(path, e))
        }
        Err(hound::Error::Unsupported) => {
            return Err(unsupported("compression code other than PCM or IEEE float".into()))
        }
        Err(e) => return Err(malformed(e.to_string())),
    };
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 || channels > 2 {
        return Err(unsupported(format!("{channels} channels")));
    }
    if spec.sample_rate == 0 {
        return Err(malformed("sample rate 0".into()));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| malformed(e.to_string()))?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| malformed(e.to_string()))?,
        (fmt, bits) => return Err(unsupported(format!("{bits}-bit {fmt:?} samples"))),
    };

    if !interleaved.len().is_multiple_of(channels) {
        return Err(malformed("data chunk ends mid-frame".into()));
    }
    let samples: Vec<f64> = interleaved
        .chunks_exact(channels)
        .map(|c| {
            let v = c.iter().sum::<f64>() / channels as f64;
            if v.is_nan() {
                0.0
            } else {
                v.clamp(-1.0, 1.0)
            }
        })
        .collect();
    if samples.is_empty() {
        return Err(malformed("no samples in data chunk".into()));
    }
    Ok(AudioClip {
        samples,
        sample_rate: spec.sample_rate,
        source_path: name,
    })
}

/// Writes a mono clip as 16-bit PCM, clamping to `[-1, 1]`.
pub fn write_wav_pcm16(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let to_io = |e: hound::Error| match e {
        hound::Error::IoError(e) => Error::io(path, e),
        other => Error::io(path, std::io::Error::other(other.to_string())),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(to_io)?;
    for &x in &clip.samples {
        let v = (x.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer.write_sample(v).map_err(to_io)?;
    }
    writer.finalize().map_err(to_io)
}
