//! Mel-frequency cepstral coefficients.

use std::f64::consts::PI;

use super::spectrum::Spectrogram;

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with edges equally spaced on the mel scale between
/// 0 Hz and `max_freq`.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `n_mels` rows of one weight per spectrogram bin.
    weights: Vec<Vec<f64>>,
}

impl MelFilterbank {
    pub fn new(n_mels: usize, bin_freqs: &[f64], max_freq: f64) -> Self {
        let mel_max = hz_to_mel(max_freq);
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_mels + 1) as f64))
            .collect();
        let weights = (0..n_mels)
            .map(|m| {
                let (lo, centre, hi) = (edges[m], edges[m + 1], edges[m + 2]);
                bin_freqs
                    .iter()
                    .map(|&f| {
                        if f > lo && f <= centre {
                            (f - lo) / (centre - lo)
                        } else if f > centre && f < hi {
                            (hi - f) / (hi - centre)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        MelFilterbank { weights }
    }

    pub fn n_mels(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Filter energies of a power spectrum.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.iter().zip(power).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Orthonormal DCT-II basis, `n_out` rows of length `n_in`.
fn dct_matrix(n_in: usize, n_out: usize) -> Vec<Vec<f64>> {
    let n = n_in as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            (0..n_in)
                .map(|i| scale * (PI * k as f64 * (2.0 * i as f64 + 1.0) / (2.0 * n)).cos())
                .collect()
        })
        .collect()
}

/// Per-frame cepstral coefficients `0..n_mfcc` from log mel energies of the
/// squared magnitudes, floored at `log_floor` before the logarithm.
pub fn mfcc(spec: &Spectrogram, n_mels: usize, n_mfcc: usize, log_floor: f64) -> Vec<Vec<f64>> {
    assert!(n_mfcc <= n_mels, "cannot keep more coefficients than mel bands");
    let bank = MelFilterbank::new(n_mels, &spec.bin_freqs, spec.sample_rate as f64 / 2.0);
    let dct = dct_matrix(n_mels, n_mfcc);
    let mut power = vec![0.0; spec.n_bins];
    spec.iter()
        .map(|row| {
            for (p, m) in power.iter_mut().zip(row) {
                *p = m * m;
            }
            let log_energy: Vec<f64> = bank
                .apply(&power)
                .into_iter()
                .map(|e| e.max(log_floor).ln())
                .collect();
            dct.iter()
                .map(|basis| basis.iter().zip(&log_energy).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}
