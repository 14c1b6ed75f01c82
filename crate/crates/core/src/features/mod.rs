//! Clip-level acoustic feature extraction.
//!
//! Every clip maps to a fixed 48-entry [`FeatureVector`]. The layout is
//! frozen; see [`FEATURE_NAMES`] for the column order.

mod descriptors;
mod lpc;
mod mfcc;
mod pitch;
mod spectrum;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::{self, AudioClip, Window};
use crate::util::mean_std;
use crate::{Error, Result};

pub use descriptors::{
    chroma, chroma_stats, pitch_class, rms, spectral_descriptors, spectral_shape, time_descriptors,
    zero_crossing_rate, SpectralShape, TimeShape, PITCH_CLASSES,
};
pub use lpc::{
    autocorrelation, formants, frame_formants, levinson_durbin, lpc_order, polynomial_roots, FormantParams,
};
pub use mfcc::{hz_to_mel, mel_to_hz, mfcc, MelFilterbank};
pub use pitch::{jitter_shimmer, pitch_track, Perturbation, PitchParams, PitchTrack};
pub use spectrum::{stft, Spectrogram};

pub const MFCC_COUNT: usize = 13;
pub const FEATURE_COUNT: usize = 48;

/// Canonical column names, in vector order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "pitch_mean",
    "pitch_std",
    "jitter_mean",
    "jitter_std",
    "shimmer_mean",
    "shimmer_std",
    "formant_f1",
    "formant_f2",
    "formant_f3",
    "formant_f4",
    "chroma_mean",
    "chroma_std",
    "rms_mean",
    "rms_std",
    "centroid_mean",
    "centroid_std",
    "bandwidth_mean",
    "bandwidth_std",
    "rolloff_mean",
    "rolloff_std",
    "zcr_mean",
    "zcr_std",
    "mfcc_mean_0",
    "mfcc_mean_1",
    "mfcc_mean_2",
    "mfcc_mean_3",
    "mfcc_mean_4",
    "mfcc_mean_5",
    "mfcc_mean_6",
    "mfcc_mean_7",
    "mfcc_mean_8",
    "mfcc_mean_9",
    "mfcc_mean_10",
    "mfcc_mean_11",
    "mfcc_mean_12",
    "mfcc_std_0",
    "mfcc_std_1",
    "mfcc_std_2",
    "mfcc_std_3",
    "mfcc_std_4",
    "mfcc_std_5",
    "mfcc_std_6",
    "mfcc_std_7",
    "mfcc_std_8",
    "mfcc_std_9",
    "mfcc_std_10",
    "mfcc_std_11",
    "mfcc_std_12",
];

pub fn feature_names() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

/// Column offsets into a [`FeatureVector`].
pub mod index {
    pub const PITCH_MEAN: usize = 0;
    pub const PITCH_STD: usize = 1;
    pub const JITTER_MEAN: usize = 2;
    pub const JITTER_STD: usize = 3;
    pub const SHIMMER_MEAN: usize = 4;
    pub const SHIMMER_STD: usize = 5;
    pub const FORMANTS: usize = 6;
    pub const CHROMA_MEAN: usize = 10;
    pub const CHROMA_STD: usize = 11;
    pub const RMS_MEAN: usize = 12;
    pub const RMS_STD: usize = 13;
    pub const CENTROID_MEAN: usize = 14;
    pub const CENTROID_STD: usize = 15;
    pub const BANDWIDTH_MEAN: usize = 16;
    pub const BANDWIDTH_STD: usize = 17;
    pub const ROLLOFF_MEAN: usize = 18;
    pub const ROLLOFF_STD: usize = 19;
    pub const ZCR_MEAN: usize = 20;
    pub const ZCR_STD: usize = 21;
    pub const MFCC_MEAN: usize = 22;
    pub const MFCC_STD: usize = 35;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.to_vec()
    }
}

impl std::ops::Index<usize> for FeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Analysis parameters. Serialises as flat `key = value` lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Clips are resampled to this rate (Hz) before analysis.
    pub target_rate: u32,
    pub spectral_frame_length: usize,
    pub spectral_hop_length: usize,
    pub pitch_frame_length: usize,
    pub pitch_hop_length: usize,
    pub f0_min: f64,
    pub f0_max: f64,
    pub voicing_threshold: f64,
    pub energy_gate: f64,
    pub rolloff_fraction: f64,
    pub n_mels: usize,
    pub log_floor: f64,
    pub pre_emphasis: f64,
    pub formant_max_bandwidth: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            target_rate: 16000,
            spectral_frame_length: 512,
            spectral_hop_length: 256,
            pitch_frame_length: 1024,
            pitch_hop_length: 256,
            f0_min: 50.0,
            f0_max: 500.0,
            voicing_threshold: 0.5,
            energy_gate: 1e-4,
            rolloff_fraction: 0.85,
            n_mels: 40,
            log_floor: 1e-10,
            pre_emphasis: 0.97,
            formant_max_bandwidth: 400.0,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.target_rate == 0 {
            return fail("target_rate must be positive");
        }
        if self.spectral_frame_length < 2 || self.pitch_frame_length < 2 {
            return fail("frame lengths must be at least 2");
        }
        if self.spectral_hop_length == 0 || self.pitch_hop_length == 0 {
            return fail("hop lengths must be at least 1");
        }
        if !(self.f0_min > 0.0 && self.f0_min < self.f0_max) {
            return fail("need 0 < f0_min < f0_max");
        }
        if self.target_rate as f64 / self.f0_min + 2.0 >= self.pitch_frame_length as f64 {
            return fail("pitch_frame_length must exceed the longest period searched (target_rate / f0_min)");
        }
        if !(self.rolloff_fraction > 0.0 && self.rolloff_fraction <= 1.0) {
            return fail("rolloff_fraction must lie in (0, 1]");
        }
        if self.n_mels < MFCC_COUNT {
            return fail("n_mels must be at least 13");
        }
        if self.log_floor.is_nan() || self.log_floor <= 0.0 {
            return fail("log_floor must be positive");
        }
        if !(self.voicing_threshold.is_finite() && self.energy_gate >= 0.0) {
            return fail("voicing_threshold must be finite and energy_gate non-negative");
        }
        if !(self.pre_emphasis.is_finite() && self.formant_max_bandwidth > 0.0) {
            return fail("pre_emphasis must be finite and formant_max_bandwidth positive");
        }
        Ok(())
    }

    pub fn pitch_params(&self) -> PitchParams {
        PitchParams {
            frame_length: self.pitch_frame_length,
            hop_length: self.pitch_hop_length,
            f0_min: self.f0_min,
            f0_max: self.f0_max,
            voicing_threshold: self.voicing_threshold,
            energy_gate: self.energy_gate,
        }
    }

    pub fn formant_params(&self) -> FormantParams {
        FormantParams {
            pre_emphasis: self.pre_emphasis,
            max_bandwidth: self.formant_max_bandwidth,
            ..FormantParams::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("feature config serialises")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: FeatureConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Computes the 48 clip-level features.
///
/// The clip is resampled to `config.target_rate` first. Aggregates are the
/// mean and population STD over frames (voiced frames only for pitch);
/// degenerate aggregates are 0.
pub fn extract_features(clip: &AudioClip, config: &FeatureConfig) -> Result<FeatureVector> {
    config.validate()?;
    let clip = audio::resample(clip, config.target_rate);
    let mut v = [0.0; FEATURE_COUNT];

    let track = pitch_track(&clip, &config.pitch_params());
    let (pitch_mean, pitch_std) = mean_std(&track.voiced_f0());
    let perturbation = jitter_shimmer(&track);
    v[index::PITCH_MEAN] = pitch_mean;
    v[index::PITCH_STD] = pitch_std;
    v[index::JITTER_MEAN] = perturbation.jitter_mean;
    v[index::JITTER_STD] = perturbation.jitter_std;
    v[index::SHIMMER_MEAN] = perturbation.shimmer_mean;
    v[index::SHIMMER_STD] = perturbation.shimmer_std;
    let f = formants(&clip, &track, &config.formant_params());
    v[index::FORMANTS..index::FORMANTS + 4].copy_from_slice(&f);

    let hann = audio::frame(&clip, config.spectral_frame_length, config.spectral_hop_length, Window::Hann);
    let spec = stft(&hann);
    let (chroma_mean, chroma_std) = chroma_stats(&spec);
    v[index::CHROMA_MEAN] = chroma_mean;
    v[index::CHROMA_STD] = chroma_std;

    let raw = audio::frame(
        &clip,
        config.spectral_frame_length,
        config.spectral_hop_length,
        Window::Rectangular,
    );
    let time = time_descriptors(&raw);
    let rms: Vec<f64> = time.iter().map(|t| t.rms).collect();
    let zcr: Vec<f64> = time.iter().map(|t| t.zcr).collect();
    (v[index::RMS_MEAN], v[index::RMS_STD]) = mean_std(&rms);
    (v[index::ZCR_MEAN], v[index::ZCR_STD]) = mean_std(&zcr);

    let shapes = spectral_descriptors(&spec, config.rolloff_fraction);
    let centroid: Vec<f64> = shapes.iter().map(|s| s.centroid).collect();
    let bandwidth: Vec<f64> = shapes.iter().map(|s| s.bandwidth).collect();
    let rolloff: Vec<f64> = shapes.iter().map(|s| s.rolloff).collect();
    (v[index::CENTROID_MEAN], v[index::CENTROID_STD]) = mean_std(&centroid);
    (v[index::BANDWIDTH_MEAN], v[index::BANDWIDTH_STD]) = mean_std(&bandwidth);
    (v[index::ROLLOFF_MEAN], v[index::ROLLOFF_STD]) = mean_std(&rolloff);

    let cepstra = mfcc(&spec, config.n_mels, MFCC_COUNT, config.log_floor);
    for c in 0..MFCC_COUNT {
        let series: Vec<f64> = cepstra.iter().map(|frame| frame[c]).collect();
        (v[index::MFCC_MEAN + c], v[index::MFCC_STD + c]) = mean_std(&series);
    }

    for (name, x) in FEATURE_NAMES.iter().zip(v.iter_mut()) {
        if !x.is_finite() {
            log::warn!("{}: non-finite {name}, replaced by 0", clip.source_path);
            *x = 0.0;
        }
    }
    Ok(FeatureVector(v))
}

/// Loads a WAV file and extracts its features.
pub fn extract_file(path: impl AsRef<Path>, config: &FeatureConfig) -> Result<FeatureVector> {
    let clip = audio::load_wav(path)?;
    extract_features(&clip, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_sized() {
        let mut names = FEATURE_NAMES.to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), FEATURE_COUNT);
        assert_eq!(FEATURE_NAMES[index::MFCC_MEAN], "mfcc_mean_0");
        assert_eq!(FEATURE_NAMES[index::MFCC_STD + 12], "mfcc_std_12");
        assert_eq!(FEATURE_NAMES[index::ZCR_STD], "zcr_std");
    }

    #[test]
    fn config_round_trips_through_text() {
        let cfg = FeatureConfig {
            n_mels: 32,
            f0_max: 400.0,
            ..FeatureConfig::default()
        };
        let text = cfg.to_toml();
        assert!(text.contains("n_mels = 32"));
        assert_eq!(FeatureConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(FeatureConfig::from_toml("").unwrap(), FeatureConfig::default());
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(FeatureConfig::from_toml("n_mels = 8").is_err());
        assert!(FeatureConfig::from_toml("rolloff_fraction = 0.0").is_err());
        assert!(FeatureConfig::from_toml("f0_min = 10.0").is_err());
    }

    #[test]
    fn silence_gives_degenerate_vector() {
        let clip = AudioClip::new(vec![0.0; 16000], 16000, "silence");
        let v = extract_features(&clip, &FeatureConfig::default()).unwrap();
        for i in [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 20, 21] {
            assert_eq!(v[i], 0.0, "{}", FEATURE_NAMES[i]);
        }
        assert!((v[index::CHROMA_MEAN] - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(v[index::CHROMA_STD], 0.0);
        assert!(v.values().iter().all(|x| x.is_finite()));
    }
}
