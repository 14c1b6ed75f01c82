//! Autocorrelation pitch tracking and frame-level jitter/shimmer.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{frame, AudioClip, Window};
use crate::util::mean_std;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchParams {
    pub frame_length: usize,
    pub hop_length: usize,
    pub f0_min: f64,
    pub f0_max: f64,
    /// Minimum normalised autocorrelation peak for a voiced frame.
    pub voicing_threshold: f64,
    /// Minimum frame RMS for a voiced frame.
    pub energy_gate: f64,
}

impl Default for PitchParams {
    fn default() -> Self {
        PitchParams {
            frame_length: 1024,
            hop_length: 256,
            f0_min: 50.0,
            f0_max: 500.0,
            voicing_threshold: 0.5,
            energy_gate: 1e-4,
        }
    }
}

/// Per-frame fundamental frequency, voicing and peak amplitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PitchTrack {
    /// Hz; 0 for unvoiced frames.
    pub f0: Vec<f64>,
    pub voiced: Vec<bool>,
    pub peak_amp: Vec<f64>,
    pub frame_length: usize,
    pub hop_length: usize,
}

impl PitchTrack {
    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }

    pub fn voiced_f0(&self) -> Vec<f64> {
        self.f0
            .iter()
            .zip(&self.voiced)
            .filter(|(_, &v)| v)
            .map(|(&f, _)| f)
            .collect()
    }
}

/// Autocorrelation of a mean-removed frame for lags `0..=max_lag`, computed
/// through a zero-padded FFT.
struct Autocorrelator {
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Autocorrelator {
    fn new(frame_length: usize) -> Self {
        let size = (2 * frame_length).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        let ifft = planner.plan_fft_inverse(size);
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        Autocorrelator {
            fft,
            ifft,
            buffer: vec![Complex::new(0.0, 0.0); size],
            scratch: vec![Complex::new(0.0, 0.0); scratch_len],
        }
    }

    fn compute(&mut self, x: &[f64], max_lag: usize, out: &mut Vec<f64>) {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        self.buffer.fill(Complex::new(0.0, 0.0));
        for (b, &v) in self.buffer.iter_mut().zip(x) {
            b.re = v - mean;
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        for b in self.buffer.iter_mut() {
            *b = Complex::new(b.norm_sqr(), 0.0);
        }
        self.ifft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        let scale = 1.0 / self.buffer.len() as f64;
        out.clear();
        out.extend(self.buffer[..=max_lag].iter().map(|c| c.re * scale));
    }
}

/// Tracks f0 over rectangular frames.
///
/// The candidate period is the highest local maximum of `r(lag) / r(0)` for
/// lags in `[rate / f0_max, rate / f0_min]`; a frame is voiced when that peak
/// reaches the voicing threshold and the frame RMS passes the energy gate.
/// The period is refined by a parabola through the peak and its neighbours.
pub fn pitch_track(clip: &AudioClip, params: &PitchParams) -> PitchTrack {
    let rate = clip.sample_rate as f64;
    let frames = frame(clip, params.frame_length, params.hop_length, Window::Rectangular);
    let lag_min = ((rate / params.f0_max).ceil() as usize).max(2);
    let lag_max = ((rate / params.f0_min).floor() as usize).min(params.frame_length.saturating_sub(2));

    let mut track = PitchTrack {
        frame_length: params.frame_length,
        hop_length: params.hop_length,
        ..Default::default()
    };
    let mut acf = Autocorrelator::new(params.frame_length);
    let mut r = Vec::new();

    for x in frames.iter() {
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let frame_rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
        let mut f0 = 0.0;
        if frame_rms >= params.energy_gate && lag_min < lag_max {
            acf.compute(x, lag_max + 1, &mut r);
            if r[0] > 0.0 {
                let best = (lag_min..=lag_max)
                    .filter(|&l| r[l] > r[l - 1] && r[l] >= r[l + 1])
                    .max_by(|&a, &b| r[a].total_cmp(&r[b]).then(b.cmp(&a)));
                if let Some(lag) = best {
                    if r[lag] / r[0] >= params.voicing_threshold {
                        let (prev, here, next) = (r[lag - 1], r[lag], r[lag + 1]);
                        let curvature = prev - 2.0 * here + next;
                        let shift = if curvature < 0.0 {
                            (0.5 * (prev - next) / curvature).clamp(-0.5, 0.5)
                        } else {
                            0.0
                        };
                        f0 = (rate / (lag as f64 + shift)).clamp(params.f0_min, params.f0_max);
                    }
                }
            }
        }
        track.f0.push(f0);
        track.voiced.push(f0 > 0.0);
        track.peak_amp.push(peak);
    }
    track
}

/// Frame-to-frame perturbation statistics of a pitch track.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    pub jitter_mean: f64,
    pub jitter_std: f64,
    pub shimmer_mean: f64,
    pub shimmer_std: f64,
}

/// Relative jitter and shimmer pooled over maximal voiced runs.
///
/// Within a run, the jitter deltas are `|T[i+1] - T[i]| / mean(T)` with
/// `T = 1 / f0`, and the shimmer deltas are `|A[i+1] - A[i]| / mean(A)` on
/// the frame peak amplitudes. All outputs are 0 without at least two
/// consecutive voiced frames.
pub fn jitter_shimmer(track: &PitchTrack) -> Perturbation {
    let mut jitter = Vec::new();
    let mut shimmer = Vec::new();
    let mut start = 0;
    while start < track.len() {
        if !track.voiced[start] {
            start += 1;
            continue;
        }
        let mut end = start;
        while end < track.len() && track.voiced[end] {
            end += 1;
        }
        if end - start >= 2 {
            let periods: Vec<f64> = track.f0[start..end].iter().map(|f| 1.0 / f).collect();
            relative_deltas(&periods, &mut jitter);
            relative_deltas(&track.peak_amp[start..end], &mut shimmer);
        }
        start = end;
    }
    let (jitter_mean, jitter_std) = mean_std(&jitter);
    let (shimmer_mean, shimmer_std) = mean_std(&shimmer);
    Perturbation {
        jitter_mean,
        jitter_std,
        shimmer_mean,
        shimmer_std,
    }
}

fn relative_deltas(values: &[f64], out: &mut Vec<f64>) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean <= 0.0 {
        out.extend(std::iter::repeat_n(0.0, values.len() - 1));
        return;
    }
    out.extend(values.windows(2).map(|w| (w[1] - w[0]).abs() / mean));
}
