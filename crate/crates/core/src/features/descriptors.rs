//! Frame-level chroma, spectral shape and time-domain descriptors.

use crate::audio::FrameMatrix;
use crate::util::mean_std;

use super::spectrum::Spectrogram;

pub const PITCH_CLASSES: usize = 12;

/// Pitch class of a positive frequency, 0 = A.
pub fn pitch_class(freq: f64) -> usize {
    let semitones = (12.0 * (freq / 440.0).log2()).round() as i64;
    semitones.rem_euclid(PITCH_CLASSES as i64) as usize
}

/// Per-frame chroma vectors, each normalised to sum to one. Silent frames
/// get the uniform vector.
pub fn chroma(spec: &Spectrogram) -> Vec<[f64; PITCH_CLASSES]> {
    let classes: Vec<Option<usize>> = spec
        .bin_freqs
        .iter()
        .map(|&f| (f > 0.0).then(|| pitch_class(f)))
        .collect();
    spec.iter()
        .map(|row| {
            let mut c = [0.0; PITCH_CLASSES];
            for (m, class) in row.iter().zip(&classes) {
                if let Some(class) = class {
                    c[*class] += m * m;
                }
            }
            let total: f64 = c.iter().sum();
            if total > 0.0 {
                c.iter_mut().for_each(|v| *v /= total);
            } else {
                c = [1.0 / PITCH_CLASSES as f64; PITCH_CLASSES];
            }
            c
        })
        .collect()
}

/// Mean and population STD over all normalised chroma entries.
pub fn chroma_stats(spec: &Spectrogram) -> (f64, f64) {
    let pooled: Vec<f64> = chroma(spec).into_iter().flatten().collect();
    mean_std(&pooled)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralShape {
    pub centroid: f64,
    pub bandwidth: f64,
    pub rolloff: f64,
}

/// Magnitude-weighted centroid, spread and roll-off for one frame.
pub fn spectral_shape(magnitudes: &[f64], freqs: &[f64], rolloff_fraction: f64) -> SpectralShape {
    let total: f64 = magnitudes.iter().sum();
    if total <= 0.0 {
        return SpectralShape::default();
    }
    let centroid = magnitudes.iter().zip(freqs).map(|(m, f)| m * f).sum::<f64>() / total;
    let spread = magnitudes
        .iter()
        .zip(freqs)
        .map(|(m, f)| m * (f - centroid) * (f - centroid))
        .sum::<f64>()
        / total;
    let target = rolloff_fraction * total;
    let mut cumulative = 0.0;
    let mut rolloff = *freqs.last().unwrap_or(&0.0);
    for (m, f) in magnitudes.iter().zip(freqs) {
        cumulative += m;
        if cumulative >= target {
            rolloff = *f;
            break;
        }
    }
    SpectralShape {
        centroid,
        bandwidth: spread.max(0.0).sqrt(),
        rolloff,
    }
}

pub fn spectral_descriptors(spec: &Spectrogram, rolloff_fraction: f64) -> Vec<SpectralShape> {
    assert!(
        rolloff_fraction > 0.0 && rolloff_fraction <= 1.0,
        "rolloff fraction must lie in (0, 1]"
    );
    spec.iter()
        .map(|row| spectral_shape(row, &spec.bin_freqs, rolloff_fraction))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeShape {
    pub rms: f64,
    pub zcr: f64,
}

/// Sign changes between consecutive samples divided by `N - 1`. A zero
/// sample keeps the sign of the last non-zero sample before it.
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let mut crossings = 0usize;
    let mut previous: Option<bool> = None;
    for &x in frame {
        if x == 0.0 {
            continue;
        }
        let positive = x > 0.0;
        if previous.is_some_and(|p| p != positive) {
            crossings += 1;
        }
        previous = Some(positive);
    }
    crossings as f64 / (frame.len() - 1) as f64
}

pub fn rms(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt()
}

pub fn time_descriptors(frames: &FrameMatrix) -> Vec<TimeShape> {
    frames
        .iter()
        .map(|f| TimeShape {
            rms: rms(f),
            zcr: zero_crossing_rate(f),
        })
        .collect()
}
