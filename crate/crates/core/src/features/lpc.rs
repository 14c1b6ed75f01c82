//! Linear prediction, polynomial root finding and formant estimation.

use num_complex::Complex64;

use crate::audio::{AudioClip, Window};
use crate::util::median;

use super::pitch::PitchTrack;

/// Biased autocorrelation `r[k] = sum x[n] x[n + k]` for `k = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| {
            if k >= x.len() {
                0.0
            } else {
                x[..x.len() - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum()
            }
        })
        .collect()
}

/// Levinson-Durbin recursion.
///
/// Returns the prediction polynomial `[1, a1, .., ap]` whose coefficients
/// solve `sum_k a_k r[|i - k|] = -r[i]` for `i = 1..=p`, or `None` when the
/// autocorrelation is degenerate (zero energy or a non-positive prediction
/// error along the way).
pub fn levinson_durbin(r: &[f64], order: usize) -> Option<Vec<f64>> {
    assert!(r.len() > order, "need autocorrelation lags 0..=order");
    if r[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut error = r[0];
    let mut prev = a.clone();
    for i in 1..=order {
        let acc: f64 = (0..i).map(|j| a[j] * r[i - j]).sum();
        let k = -acc / error;
        prev[..i].copy_from_slice(&a[..i]);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        error *= 1.0 - k * k;
        if error <= 0.0 || !error.is_finite() {
            return None;
        }
    }
    Some(a)
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of the polynomial with coefficients in descending
/// degree order, found by simultaneous Aberth-Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let first = coeffs.iter().position(|&c| c != 0.0);
    let Some(first) = first else { return Vec::new() };
    let lead = coeffs[first];
    let monic: Vec<f64> = coeffs[first..].iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;
    if degree == 0 {
        return Vec::new();
    }

    // Start on a circle sized by the geometric mean of the root moduli,
    // rotated off the real axis so conjugate pairs separate.
    let radius = monic[degree].abs().powf(1.0 / degree as f64).max(0.5);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..degree {
            let z = roots[k];
            let (p, dp) = horner(&monic, z);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &w)| (z - w).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                roots[k] = z - step;
                max_step = max_step.max(step.norm() / (1.0 + z.norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormantParams {
    pub pre_emphasis: f64,
    /// Roots with a wider bandwidth than this (Hz) are not formants.
    pub max_bandwidth: f64,
    pub min_freq: f64,
    /// Candidates must lie this far (Hz) below the Nyquist frequency.
    pub nyquist_margin: f64,
}

impl Default for FormantParams {
    fn default() -> Self {
        FormantParams {
            pre_emphasis: 0.97,
            max_bandwidth: 400.0,
            min_freq: 90.0,
            nyquist_margin: 50.0,
        }
    }
}

/// Prediction order used for a sample rate: two poles per kHz plus two.
pub fn lpc_order(sample_rate: u32) -> usize {
    2 + sample_rate as usize / 1000
}

/// Formant candidates of one analysis frame, ascending.
///
/// `previous` is the sample preceding the frame (for pre-emphasis).
pub fn frame_formants(samples: &[f64], previous: f64, sample_rate: u32, params: &FormantParams) -> Vec<f64> {
    let rate = sample_rate as f64;
    let order = lpc_order(sample_rate);
    let window = Window::Hann.coefficients(samples.len());
    let mut last = previous;
    let emphasised: Vec<f64> = samples
        .iter()
        .zip(&window)
        .map(|(&x, w)| {
            let y = x - params.pre_emphasis * last;
            last = x;
            y * w
        })
        .collect();
    let r = autocorrelation(&emphasised, order);
    let Some(a) = levinson_durbin(&r, order) else {
        return Vec::new();
    };
    let nyquist = rate / 2.0;
    let mut found: Vec<f64> = polynomial_roots(&a)
        .into_iter()
        .filter(|z| z.im > 0.0)
        .filter_map(|z| {
            let freq = z.arg() * rate / (2.0 * std::f64::consts::PI);
            let bandwidth = -(rate / std::f64::consts::PI) * z.norm().ln();
            let in_band = freq > params.min_freq && freq < nyquist - params.nyquist_margin;
            (in_band && bandwidth < params.max_bandwidth).then_some(freq)
        })
        .collect();
    found.sort_by(f64::total_cmp);
    found
}

/// Utterance-level F1..F4: per slot, the median over voiced frames of that
/// frame's k-th formant candidate. Slots nobody filled are 0.
pub fn formants(clip: &AudioClip, track: &PitchTrack, params: &FormantParams) -> [f64; 4] {
    let mut slots: [Vec<f64>; 4] = Default::default();
    for (i, &voiced) in track.voiced.iter().enumerate() {
        if !voiced {
            continue;
        }
        let start = i * track.hop_length;
        let end = start + track.frame_length;
        if end > clip.samples.len() {
            break;
        }
        let previous = if start > 0 { clip.samples[start - 1] } else { 0.0 };
        let found = frame_formants(&clip.samples[start..end], previous, clip.sample_rate, params);
        for (slot, f) in slots.iter_mut().zip(found) {
            slot.push(f);
        }
    }
    let mut out = [0.0; 4];
    for (o, slot) in out.iter_mut().zip(slots.iter_mut()) {
        *o = median(slot).unwrap_or(0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &v) in c.iter().enumerate() {
                next[i] += v;
                next[i + 1] -= v * r;
            }
            c = next;
        }
        c.iter().map(|v| v.re).collect()
    }

    fn assert_same_roots(found: &[Complex64], expected: &[Complex64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        let mut used = vec![false; found.len()];
        for e in expected {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < tol, "root {e} missed by {dist}");
            used[idx] = true;
        }
    }

    #[test]
    fn quadratic_roots() {
        let roots = polynomial_roots(&[1.0, -3.0, 2.0]);
        assert_same_roots(&roots, &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)], 1e-12);
        let roots = polynomial_roots(&[2.0, 0.0, 2.0]);
        assert_same_roots(&roots, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn recovers_conjugate_pole_pairs() {
        let mut expected = Vec::new();
        for (k, (r, theta)) in [(0.95, 0.3), (0.9, 0.8), (0.97, 1.4), (0.8, 2.0), (0.85, 2.7)].iter().enumerate() {
            let z = Complex64::from_polar(*r, *theta + 0.01 * k as f64);
            expected.push(z);
            expected.push(z.conj());
        }
        let coeffs = poly_from_roots(&expected);
        assert_same_roots(&polynomial_roots(&coeffs), &expected, 1e-9);
    }

    #[test]
    fn levinson_on_ar1_process() {
        // r[k] = rho^k is the autocorrelation of an AR(1) process; the optimal
        // predictor is a1 = -rho with all higher coefficients zero.
        let rho: f64 = 0.6;
        let r: Vec<f64> = (0..6).map(|k| rho.powi(k)).collect();
        let a = levinson_durbin(&r, 5).unwrap();
        assert!((a[1] + rho).abs() < 1e-12);
        assert!(a[2..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn levinson_rejects_zero_energy() {
        assert!(levinson_durbin(&[0.0; 5], 4).is_none());
    }

    #[test]
    fn order_follows_rate() {
        assert_eq!(lpc_order(16000), 18);
        assert_eq!(lpc_order(8000), 10);
    }

    #[test]
    fn unvoiced_track_has_no_formants() {
        let clip = AudioClip::new(vec![0.1; 4096], 16000, "flat");
        let track = PitchTrack {
            f0: vec![0.0; 13],
            voiced: vec![false; 13],
            peak_amp: vec![0.1; 13],
            frame_length: 1024,
            hop_length: 256,
        };
        assert_eq!(formants(&clip, &track, &FormantParams::default()), [0.0; 4]);
    }
}
