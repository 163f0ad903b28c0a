//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;
use wimax_phy::fec::{conv_encode, puncture, ConvCode, PuncturePattern};
use wimax_phy::Bit;

/// Composite Simpson rule on [a, b] with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Gaussian tail Q(x) for x ≥ 0 by integrating
/// (1/π) ∫₀^{π/2} exp(−x² / (2 sin²θ)) dθ.
pub fn q_function(x: f64) -> f64 {
    assert!(x >= 0.0);
    simpson(
        |t| {
            let s = t.sin();
            if s == 0.0 {
                0.0
            } else {
                (-x * x / (2.0 * s * s)).exp()
            }
        },
        0.0,
        PI / 2.0,
        4000,
    ) / PI
}

/// Uncoded BPSK over AWGN.
pub fn bpsk_awgn_ber(eb_n0: f64) -> f64 {
    q_function((2.0 * eb_n0).sqrt())
}

/// Closed form for uncoded BPSK over flat Rayleigh fading with mean SNR γ̄.
pub fn bpsk_rayleigh_closed_form(gamma: f64) -> f64 {
    0.5 * (1.0 - (gamma / (1.0 + gamma)).sqrt())
}

/// The same average by integrating Q(√(2γ)) against the exponential SNR
/// density (substituting γ = γ̄·v²).
pub fn bpsk_rayleigh_numeric(gamma: f64) -> f64 {
    simpson(
        |v| 2.0 * v * q_function((2.0 * gamma).sqrt() * v) * (-v * v).exp(),
        0.0,
        7.0,
        2000,
    )
}

/// Naive O(N²) DFT, X[k] = Σ x[n]·e^{−2πikn/N}.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((k * j) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Message lengths up to `max_len` whose mother codeword is a whole number
/// of puncture spans.
pub fn valid_lengths(pattern: &PuncturePattern, code: &ConvCode, max_len: usize) -> Vec<usize> {
    (1..=max_len)
        .filter(|&l| code.encoded_len(l).is_multiple_of(pattern.span()))
        .collect()
}

/// Exhaustive ML: every message of length `len` scored by correlation of
/// its punctured codeword (±1, 0 → +1) with `received`. Returns the best
/// score and every message attaining it.
pub fn ml_decode_exhaustive(
    received: &[f64],
    len: usize,
    code: &ConvCode,
    pattern: &PuncturePattern,
) -> (f64, Vec<Vec<Bit>>) {
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for m in 0..(1usize << len) {
        let msg: Vec<Bit> = (0..len).map(|i| ((m >> i) & 1) as Bit).collect();
        let score = codeword_score(&msg, received, code, pattern);
        if score > best + 1e-12 {
            best = score;
            argmax.clear();
            argmax.push(msg);
        } else if (score - best).abs() <= 1e-12 {
            argmax.push(msg);
        }
    }
    (best, argmax)
}

pub fn codeword_score(msg: &[Bit], received: &[f64], code: &ConvCode, pattern: &PuncturePattern) -> f64 {
    let cw = puncture(&conv_encode(msg, code), pattern).unwrap();
    cw.iter()
        .zip(received)
        .map(|(&b, &r)| if b == 0 { r } else { -r })
        .sum()
}
