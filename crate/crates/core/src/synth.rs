//! Synthetic voice corpus.
//!
//! `real` clips are glottal-pulse voices with cycle-to-cycle period and
//! amplitude perturbation, vibrato, a slow loudness drift and breath noise.
//! `fake` clips use the same source and vocal-tract model but with a steady
//! (or linearly gliding) pitch, constant amplitude and no noise.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::audio::{write_wav_pcm16, AudioClip};
use crate::dataset::Label;
use crate::{Error, Result};

/// Resonances shared by the vowels the generator draws from, as
/// `(frequency, bandwidth)` pairs in Hz.
const VOWELS: [[(f64, f64); 3]; 5] = [
    [(730.0, 90.0), (1090.0, 110.0), (2440.0, 170.0)],
    [(270.0, 60.0), (2290.0, 100.0), (3010.0, 200.0)],
    [(300.0, 60.0), (870.0, 90.0), (2240.0, 170.0)],
    [(530.0, 70.0), (1840.0, 100.0), (2480.0, 160.0)],
    [(570.0, 80.0), (840.0, 90.0), (2410.0, 170.0)],
];

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceParams {
    pub f0: f64,
    /// Total relative f0 change over the clip (fake voices only).
    pub glide: f64,
    /// Standard deviation of the per-cycle relative period change.
    pub jitter: f64,
    /// Standard deviation of the per-cycle relative amplitude change.
    pub shimmer: f64,
    pub vibrato_rate: f64,
    pub vibrato_depth: f64,
    /// Breath noise level relative to the voiced peak.
    pub noise: f64,
    pub formants: [(f64, f64); 3],
    pub peak: f64,
}

impl VoiceParams {
    /// Draws voice parameters for one clip of the given class.
    pub fn random(label: Label, rng: &mut impl Rng) -> Self {
        let vowel = VOWELS[rng.gen_range(0..VOWELS.len())];
        let mut formants = vowel;
        for f in &mut formants {
            f.0 *= rng.gen_range(0.92..1.08);
        }
        let f0 = rng.gen_range(90.0..220.0);
        let peak = rng.gen_range(0.5..0.9);
        match label {
            Label::Real => VoiceParams {
                f0,
                glide: 0.0,
                jitter: rng.gen_range(0.01..0.02),
                shimmer: rng.gen_range(0.05..0.10),
                vibrato_rate: rng.gen_range(4.0..6.0),
                vibrato_depth: rng.gen_range(0.015..0.03),
                noise: rng.gen_range(0.01..0.03),
                formants,
                peak,
            },
            Label::Fake => VoiceParams {
                f0,
                glide: rng.gen_range(-0.03..0.03),
                jitter: 0.0,
                shimmer: 0.0,
                vibrato_rate: 0.0,
                vibrato_depth: 0.0,
                noise: 0.0,
                formants,
                peak,
            },
        }
    }
}

/// Glottal flow over one period, `phase` in `[0, 1)`.
fn glottal_flow(phase: f64) -> f64 {
    const OPEN: f64 = 0.4;
    const CLOSE: f64 = 0.16;
    if phase < OPEN {
        0.5 * (1.0 - (PI * phase / OPEN).cos())
    } else if phase < OPEN + CLOSE {
        (PI * (phase - OPEN) / (2.0 * CLOSE)).cos()
    } else {
        0.0
    }
}

/// Two-pole resonator run in place.
fn resonate(signal: &mut [f64], freq: f64, bandwidth: f64, rate: f64) {
    let r = (-PI * bandwidth / rate).exp();
    let a1 = 2.0 * r * (2.0 * PI * freq / rate).cos();
    let a2 = -r * r;
    let gain = 1.0 - a1 - a2;
    let (mut y1, mut y2) = (0.0, 0.0);
    for x in signal.iter_mut() {
        let y = gain * *x + a1 * y1 + a2 * y2;
        y2 = y1;
        y1 = y;
        *x = y;
    }
}

/// Renders one voice; the randomness of the perturbations comes from `rng`.
pub fn render(params: &VoiceParams, duration: f64, sample_rate: u32, rng: &mut impl Rng) -> Vec<f64> {
    let rate = sample_rate as f64;
    let n = (duration * rate).round() as usize;
    let cycle_jitter = Normal::new(0.0, params.jitter.max(1e-12)).expect("finite std");
    let cycle_shimmer = Normal::new(0.0, params.shimmer.max(1e-12)).expect("finite std");
    let breath = Normal::new(0.0, 1.0).expect("unit std");
    let natural = params.jitter > 0.0;
    let vibrato_phase = rng.gen_range(0.0..2.0 * PI);
    let drift_rate = rng.gen_range(0.5..1.5);
    let drift_phase = rng.gen_range(0.0..2.0 * PI);

    let mut flow = Vec::with_capacity(n);
    let mut phase = 0.0;
    let (mut period_scale, mut amp_scale) = (1.0, 1.0);
    for i in 0..n {
        let t = i as f64 / rate;
        let mut f = params.f0 * (1.0 + params.glide * t / duration.max(1e-9));
        f *= 1.0 + params.vibrato_depth * (2.0 * PI * params.vibrato_rate * t + vibrato_phase).sin();
        f /= period_scale;
        phase += f / rate;
        if phase >= 1.0 {
            phase -= 1.0;
            if natural {
                period_scale = (1.0 + cycle_jitter.sample(rng)).clamp(0.9, 1.1);
                amp_scale = (1.0 + cycle_shimmer.sample(rng)).clamp(0.6, 1.4);
            }
        }
        let mut a = amp_scale;
        if natural {
            a *= 1.0 + 0.15 * (2.0 * PI * drift_rate * t + drift_phase).sin();
        }
        flow.push(a * glottal_flow(phase));
    }

    // Lip radiation.
    let mut signal: Vec<f64> = flow
        .iter()
        .enumerate()
        .map(|(i, &x)| x - if i == 0 { 0.0 } else { flow[i - 1] })
        .collect();
    for &(freq, bw) in &params.formants {
        if freq < rate / 2.0 - bw {
            resonate(&mut signal, freq, bw, rate);
        }
    }
    let voiced_peak = signal.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if params.noise > 0.0 && voiced_peak > 0.0 {
        for x in &mut signal {
            *x += params.noise * voiced_peak * breath.sample(rng);
        }
    }
    let peak = signal.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        let g = params.peak / peak;
        signal.iter_mut().for_each(|x| *x *= g);
    }
    signal
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub n_real: usize,
    pub n_fake: usize,
    pub duration: f64,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            n_real: 100,
            n_fake: 100,
            duration: 2.0,
            sample_rate: 16_000,
            seed: 42,
        }
    }
}

/// Renders clip `index` of the given class; independent of every other clip.
pub fn render_clip(spec: &CorpusSpec, label: Label, index: usize) -> AudioClip {
    let stream = (label.code() as u64) << 32 | index as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let params = VoiceParams::random(label, &mut rng);
    let samples = render(&params, spec.duration, spec.sample_rate, &mut rng);
    AudioClip::new(samples, spec.sample_rate, format!("{}_{index:04}.wav", label.as_str()))
}

/// Writes `real_NNNN.wav` / `fake_NNNN.wav` clips and a `manifest.csv`
/// listing them into `dir`; returns the manifest path.
pub fn write_corpus(dir: impl AsRef<Path>, spec: &CorpusSpec) -> Result<PathBuf> {
    let dir = dir.as_ref();
    if spec.duration <= 0.0 || !spec.duration.is_finite() || spec.sample_rate == 0 {
        return Err(Error::InvalidParams(
            "corpus duration and sample rate must be positive".into(),
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::from("path,label\n");
    for (label, count) in [(Label::Real, spec.n_real), (Label::Fake, spec.n_fake)] {
        for i in 0..count {
            let clip = render_clip(spec, label, i);
            write_wav_pcm16(dir.join(&clip.source_path), &clip)?;
            let _ = writeln!(manifest, "{},{}", clip.source_path, label.as_str());
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
