//! Brute-force reference implementations and data generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spoofscan_core::{AudioClip, Hyperparams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|X[k]|` for `k = 0..=N/2` by the defining sum.
pub fn naive_dft_magnitudes(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &x) in frame.iter().enumerate() {
                let angle = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                re += x * angle.cos();
                im += x * angle.sin();
            }
            (re * re + im * im).sqrt()
        })
        .collect()
}

/// Mel filterbank matrix, log energies and a dense orthonormal DCT-II,
/// written from the textbook definitions.
pub fn mfcc_oracle(
    magnitudes: &[f64],
    bin_freqs: &[f64],
    max_freq: f64,
    n_mels: usize,
    n_mfcc: usize,
    floor: f64,
) -> Vec<f64> {
    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let step = mel(max_freq) / (n_mels + 1) as f64;
    let points: Vec<f64> = (0..n_mels + 2).map(|i| hz(step * i as f64)).collect();
    let bank = DMatrix::from_fn(n_mels, bin_freqs.len(), |m, k| {
        let f = bin_freqs[k];
        let rise = (f - points[m]) / (points[m + 1] - points[m]);
        let fall = (points[m + 2] - f) / (points[m + 2] - points[m + 1]);
        rise.min(fall).max(0.0)
    });
    let power = DVector::from_iterator(magnitudes.len(), magnitudes.iter().map(|m| m * m));
    let log_energy = (bank * power).map(|e| e.max(floor).ln());
    let n = n_mels as f64;
    let dct = DMatrix::from_fn(n_mfcc, n_mels, |k, i| {
        let norm = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        norm * (PI * k as f64 * (i as f64 + 0.5) / n).cos()
    });
    (dct * log_energy).iter().copied().collect()
}

/// Predictor coefficients `[1, a1..ap]` from the Toeplitz normal equations
/// solved by dense LU.
pub fn toeplitz_lpc(r: &[f64], order: usize) -> Vec<f64> {
    let m = DMatrix::from_fn(order, order, |i, j| r[i.abs_diff(j)]);
    let rhs = DVector::from_iterator(order, (1..=order).map(|i| -r[i]));
    let a = m.lu().solve(&rhs).expect("non-singular Toeplitz system");
    std::iter::once(1.0).chain(a.iter().copied()).collect()
}

/// Roots of `c[0] z^n + c[1] z^(n-1) + .. + c[n]` as companion matrix
/// eigenvalues.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[j + 1] / coeffs[0]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().map(|c| Complex64::new(c.re, c.im)).collect()
}

/// Root split under logistic loss at the prior: every feature, every
/// midpoint between consecutive distinct values, gain from direct sums.
/// Returns `(feature, threshold, gain)` of the first candidate (in feature
/// then threshold order) whose gain is within `1e-9` relative of the best.
pub fn brute_force_root_split(x: &[Vec<f64>], y: &[u8], params: &Hyperparams) -> Option<(usize, f64, f64)> {
    let prior = (y.iter().map(|&l| l as f64).sum::<f64>() / y.len() as f64).clamp(1e-6, 1.0 - 1e-6);
    let g: Vec<f64> = y.iter().map(|&l| prior - l as f64).collect();
    let h = prior * (1.0 - prior);
    let score = |rows: &[usize]| {
        let gs: f64 = rows.iter().map(|&i| g[i]).sum();
        gs * gs / (h * rows.len() as f64 + params.lambda)
    };
    let all: Vec<usize> = (0..x.len()).collect();
    let parent = score(&all);
    let mut candidates = Vec::new();
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = x.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (left, right): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| x[i][f] < t);
            if left.len() < params.min_samples_leaf || right.len() < params.min_samples_leaf {
                continue;
            }
            let gain = 0.5 * (score(&left) + score(&right) - parent) - params.gamma;
            candidates.push((f, t, gain));
        }
    }
    let best = candidates.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
    if best <= 0.0 {
        return None;
    }
    candidates.into_iter().find(|c| c.2 >= best - 1e-9 * best.abs())
}

/// Rows of standard-normal features whose label is the majority vote of the
/// signs of three randomly placed informative columns.
pub fn planted_table(seed: u64, rows: usize, width: usize) -> (Vec<Vec<f64>>, Vec<u8>, Vec<usize>) {
    let mut rng = rng(seed);
    let mut columns: Vec<usize> = (0..width).collect();
    columns.shuffle(&mut rng);
    let mut informative = columns[..3].to_vec();
    informative.sort_unstable();
    let mut x = Vec::with_capacity(rows);
    let mut y = Vec::with_capacity(rows);
    for _ in 0..rows {
        let row: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
        let votes = informative.iter().filter(|&&j| row[j] > 0.0).count();
        y.push(u8::from(votes >= 2));
        x.push(row);
    }
    (x, y, informative)
}

/// Rows separated by the hyperplane `w . x = 0` with a margin.
pub fn separable_table(seed: u64, rows: usize, width: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = rng(seed);
    let w: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
    let mut x = Vec::with_capacity(rows);
    let mut y = Vec::with_capacity(rows);
    while x.len() < rows {
        let row: Vec<f64> = (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
        if s.abs() < 0.05 {
            continue;
        }
        y.push(u8::from(s > 0.0));
        x.push(row);
    }
    (x, y)
}

pub fn sine(freq: f64, rate: u32, seconds: f64, amplitude: f64) -> Vec<f64> {
    let n = (rate as f64 * seconds).round() as usize;
    (0..n)
        .map(|i| amplitude * (2.0 * PI * freq * i as f64 / rate as f64).sin())
        .collect()
}

/// Small random classification problem (M <= 50 rows, D <= 4 columns) with
/// single-split hyperparameters.
pub fn random_split_case(seed: u64) -> (Vec<Vec<f64>>, Vec<u8>, Hyperparams) {
    let mut rng = rng(seed);
    let m = rng.gen_range(2..=50);
    let d = rng.gen_range(1..=4);
    // Half the cases use a handful of distinct values to force tied gains.
    let coarse = seed.is_multiple_of(2);
    let x: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..d)
                .map(|_| if coarse { rng.gen_range(0..4) as f64 } else { rng.gen_range(-1.0..1.0) })
                .collect()
        })
        .collect();
    let mut y: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2)).collect();
    y[0] = 0;
    y[1] = 1;
    let params = Hyperparams {
        n_trees: 1,
        max_depth: 1,
        min_samples_leaf: rng.gen_range(1..=3),
        learning_rate: 0.3,
        lambda: rng.gen_range(0.1..2.0),
        gamma: if rng.gen_bool(0.3) { rng.gen_range(0.0..0.5) } else { 0.0 },
    };
    (x, y, params)
}

fn resonate(x: &mut [f64], freq: f64, bandwidth: f64, rate: f64) {
    let r = (-PI * bandwidth / rate).exp();
    let a1 = 2.0 * r * (2.0 * PI * freq / rate).cos();
    let a2 = -r * r;
    let (mut y1, mut y2) = (0.0, 0.0);
    for v in x.iter_mut() {
        let y = *v + a1 * y1 + a2 * y2;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}

/// 120 Hz pulse train through resonators at 700 Hz (80 Hz bandwidth) and
/// 1200 Hz (90 Hz bandwidth), one second at 16 kHz.
pub fn vowel() -> AudioClip {
    const RATE: u32 = 16_000;
    let n = RATE as usize;
    let period = RATE as f64 / 120.0;
    let mut x = vec![0.0; n];
    let mut next = 0.0;
    while (next as usize) < n {
        x[next as usize] = 1.0;
        next += period;
    }
    resonate(&mut x, 700.0, 80.0, RATE as f64);
    resonate(&mut x, 1200.0, 90.0, RATE as f64);
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    AudioClip::new(x.iter().map(|v| 0.8 * v / peak).collect(), RATE, "vowel")
}
