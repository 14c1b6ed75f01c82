use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::FrameMatrix;

/// Magnitude spectrogram with one row of `n_bins = N/2 + 1` bins per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    magnitudes: Vec<f64>,
    pub n_bins: usize,
    /// Centre frequency of each bin in Hz, `k * sample_rate / N`.
    pub bin_freqs: Vec<f64>,
    pub frame_length: usize,
    pub hop_length: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    /// Builds a spectrogram from explicit magnitude rows, using the bin layout
    /// of an `frame_length`-point transform at `sample_rate`.
    pub fn from_rows(rows: &[Vec<f64>], frame_length: usize, hop_length: usize, sample_rate: u32) -> Self {
        let n_bins = frame_length / 2 + 1;
        let mut magnitudes = Vec::with_capacity(rows.len() * n_bins);
        for row in rows {
            assert_eq!(row.len(), n_bins, "row length must be frame_length / 2 + 1");
            magnitudes.extend_from_slice(row);
        }
        Spectrogram {
            magnitudes,
            n_bins,
            bin_freqs: bin_frequencies(frame_length, sample_rate),
            frame_length,
            hop_length,
            sample_rate,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.magnitudes.len().checked_div(self.n_bins).unwrap_or(0)
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.magnitudes[i * self.n_bins..(i + 1) * self.n_bins]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.magnitudes.chunks_exact(self.n_bins.max(1))
    }
}

pub(crate) fn bin_frequencies(frame_length: usize, sample_rate: u32) -> Vec<f64> {
    let n_bins = frame_length / 2 + 1;
    (0..n_bins)
        .map(|k| k as f64 * sample_rate as f64 / frame_length as f64)
        .collect()
}

/// Magnitude of the DFT of every frame, bins `0..=N/2`.
pub fn stft(frames: &FrameMatrix) -> Spectrogram {
    let n = frames.frame_length;
    let n_bins = n / 2 + 1;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buffer = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut magnitudes = Vec::with_capacity(frames.n_frames() * n_bins);
    for frame in frames.iter() {
        for (b, &x) in buffer.iter_mut().zip(frame) {
            *b = Complex::new(x, 0.0);
        }
        fft.process_with_scratch(&mut buffer, &mut scratch);
        magnitudes.extend(buffer[..n_bins].iter().map(|c| c.norm()));
    }
    Spectrogram {
        magnitudes,
        n_bins,
        bin_freqs: bin_frequencies(n, frames.sample_rate),
        frame_length: n,
        hop_length: frames.hop_length,
        sample_rate: frames.sample_rate,
    }
}
