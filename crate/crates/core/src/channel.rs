//! AWGN, flat Rayleigh block fading, the i.i.d. MIMO channel, and the
//! Eb/N0 → noise-variance calibration.

use crate::error::{sizing, Error, Result};
use crate::Complex64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::str::FromStr;

/// Nr × Nt complex channel matrix.
pub type ChannelMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Rayleigh => "rayleigh",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh" => Ok(ChannelKind::Rayleigh),
            other => Err(Error::Config(format!("unknown channel type {other:?}"))),
        }
    }
}

/// How long one fading realization persists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coherence {
    /// New realization every OFDM symbol.
    Symbol,
    /// One realization for the whole frame.
    Frame,
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coherence::Symbol => "symbol",
            Coherence::Frame => "frame",
        })
    }
}

impl FromStr for Coherence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbol" => Ok(Coherence::Symbol),
            "frame" => Ok(Coherence::Frame),
            other => Err(Error::Config(format!("unknown coherence {other:?}"))),
        }
    }
}

/// One channel state: the gain matrix (1 × 1 for SISO) and noise variance
/// per complex sample, held for `coherence` OFDM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: ChannelMatrix,
    pub noise_var: f64,
    pub coherence: usize,
}

/// Circularly-symmetric complex Gaussian with E|z|² = `var`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// y = x + n with n ~ CN(0, noise_var).
pub fn awgn<R: Rng + ?Sized>(x: &[Complex64], noise_var: f64, rng: &mut R) -> Vec<Complex64> {
    let mut y = x.to_vec();
    awgn_in_place(&mut y, noise_var, rng);
    y
}

pub fn awgn_in_place<R: Rng + ?Sized>(x: &mut [Complex64], noise_var: f64, rng: &mut R) {
    if noise_var == 0.0 {
        return;
    }
    for v in x.iter_mut() {
        *v += complex_gaussian(rng, noise_var);
    }
}

/// Unit-power Rayleigh gain h = (g1 + j g2)/√2.
pub fn rayleigh_gain<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    complex_gaussian(rng, 1.0)
}

/// Applies one Rayleigh gain to the whole block.
pub fn rayleigh_flat<R: Rng + ?Sized>(x: &[Complex64], rng: &mut R) -> (Vec<Complex64>, Complex64) {
    let h = rayleigh_gain(rng);
    (x.iter().map(|v| v * h).collect(), h)
}

/// I.i.d. CN(0, 1) entries.
pub fn rayleigh_matrix<R: Rng + ?Sized>(nr: usize, nt: usize, rng: &mut R) -> ChannelMatrix {
    // Column-major fill keeps draw order fixed for a given (nr, nt).
    DMatrix::from_fn(nr, nt, |_, _| complex_gaussian(rng, 1.0))
}

/// Identity-like Nr × Nt matrix (ones on the leading diagonal).
pub fn identity_matrix(nr: usize, nt: usize) -> ChannelMatrix {
    DMatrix::from_fn(nr, nt, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// y[r][t] = Σ_a H[r, a]·x[a][t] + n[r][t], n ~ CN(0, noise_var).
pub fn mimo_apply<R: Rng + ?Sized>(
    x_streams: &[Vec<Complex64>],
    h: &ChannelMatrix,
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    if x_streams.len() != h.ncols() {
        return Err(sizing(format!(
            "{} transmit streams for a channel with {} columns",
            x_streams.len(),
            h.ncols()
        )));
    }
    let len = x_streams.first().map_or(0, Vec::len);
    if x_streams.iter().any(|s| s.len() != len) {
        return Err(sizing("transmit streams differ in length"));
    }
    let mut y = vec![vec![Complex64::new(0.0, 0.0); len]; h.nrows()];
    for (r, out) in y.iter_mut().enumerate() {
        for (a, stream) in x_streams.iter().enumerate() {
            let g = h[(r, a)];
            for (o, &v) in out.iter_mut().zip(stream) {
                *o += g * v;
            }
        }
        awgn_in_place(out, noise_var, rng);
    }
    Ok(y)
}

/// Eb/N0 bookkeeping for one operating point.
///
/// Energy is referenced to the data subcarriers: each data bin carries unit
/// total transmit energy, split 1/Nt per antenna, and each bin delivers
/// `bits_per_symbol · code_rate_total` information bits per antenna stream.
/// Pilot and cyclic-prefix energy is reported through [`SnrSpec::used_fraction`]
/// but not charged to Eb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    pub eb_n0_db: f64,
    pub bits_per_symbol: usize,
    pub code_rate_total: f64,
    pub nt: usize,
    pub nfft: usize,
    pub cp_length: usize,
}

impl SnrSpec {
    pub fn eb_n0(&self) -> f64 {
        db_to_linear(self.eb_n0_db)
    }

    /// Es/N0 per transmitted stream symbol:
    /// Eb/N0 · bits_per_symbol · code_rate_total / Nt.
    pub fn es_n0(&self) -> f64 {
        self.eb_n0() * self.bits_per_symbol as f64 * self.code_rate_total / self.nt as f64
    }

    pub fn es_n0_db(&self) -> f64 {
        linear_to_db(self.es_n0())
    }

    /// Share of transmitted samples that carry data:
    /// (192 / nfft) · (nfft / (nfft + cp)).
    pub fn used_fraction(&self) -> f64 {
        (crate::ofdm::DATA_CARRIERS as f64 / self.nfft as f64)
            * (self.nfft as f64 / (self.nfft + self.cp_length) as f64)
    }

    /// Noise variance per data bin and receive antenna after the FFT.
    pub fn bin_noise_var(&self) -> f64 {
        (1.0 / self.nt as f64) / self.es_n0()
    }

    /// Time-domain noise variance per sample that yields
    /// [`SnrSpec::bin_noise_var`] after an unscaled `nfft`-point FFT.
    pub fn sample_noise_var(&self) -> f64 {
        self.bin_noise_var() / self.nfft as f64
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_noise_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        assert_eq!(awgn(&x, 0.0, &mut rng), x);
    }

    #[test]
    fn awgn_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let var = 0.37;
        let n = 1_000_000;
        let y = awgn(&vec![c(0.0, 0.0); n], var, &mut rng);
        let power = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        assert!((power / var - 1.0).abs() < 0.01, "{power}");
        let mean: Complex64 = y.iter().sum::<Complex64>() / n as f64;
        let bound = 4.0 * (var / 2.0).sqrt() / (n as f64).sqrt();
        assert!(mean.re.abs() < bound && mean.im.abs() < bound);
    }

    #[test]
    fn rayleigh_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let p = (0..n).map(|_| rayleigh_gain(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((p - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn rayleigh_envelope_ks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut r: Vec<f64> = (0..n).map(|_| rayleigh_gain(&mut rng).norm()).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = |x: f64| 1.0 - (-x * x).exp();
        let d = r
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn flat_block_shares_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let (y, h) = rayleigh_flat(&x, &mut rng);
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(a * h, *b);
        }
    }

    #[test]
    fn mimo_apply_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = vec![c(0.5, -1.0), c(2.0, 0.0)];
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let y = mimo_apply(&[s.clone(), s.clone()], &h, 0.0, &mut rng).unwrap();
        assert_eq!(y[0], s);
        assert_eq!(y[1], s.iter().map(|v| v * 2.0).collect::<Vec<_>>());
        let eye = identity_matrix(2, 2);
        assert_eq!(mimo_apply(&[s.clone(), s.clone()], &eye, 0.0, &mut rng).unwrap(), vec![s.clone(), s.clone()]);
        assert!(mimo_apply(std::slice::from_ref(&s), &eye, 0.0, &mut rng).is_err());
        assert!(mimo_apply(&[s.clone(), vec![]], &eye, 0.0, &mut rng).is_err());
    }

    #[test]
    fn mimo_received_energy() {
        // Per-antenna symbols scaled by 1/√Nt keep E‖Hx‖² = Nr.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (nr, nt, trials) = (2, 2, 100_000);
        let mut acc = 0.0;
        for _ in 0..trials {
            let h = rayleigh_matrix(nr, nt, &mut rng);
            let x: Vec<Vec<Complex64>> = (0..nt)
                .map(|_| vec![complex_gaussian(&mut rng, 1.0) / (nt as f64).sqrt()])
                .collect();
            let y = mimo_apply(&x, &h, 0.0, &mut rng).unwrap();
            acc += y.iter().map(|s| s[0].norm_sqr()).sum::<f64>();
        }
        let mean = acc / trials as f64;
        assert!((mean / nr as f64 - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn matrix_entries_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50_000;
        let mut acc = DMatrix::<f64>::zeros(2, 3);
        for _ in 0..n {
            acc += rayleigh_matrix(2, 3, &mut rng).map(|v| v.norm_sqr());
        }
        for v in acc.iter() {
            assert!((v / n as f64 - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn snr_formula() {
        let s = SnrSpec {
            eb_n0_db: 10.0,
            bits_per_symbol: 4,
            code_rate_total: 0.75,
            nt: 2,
            nfft: 256,
            cp_length: 32,
        };
        assert!((s.es_n0() - 10.0 * 4.0 * 0.75 / 2.0).abs() < 1e-12);
        assert!((s.used_fraction() - (192.0 / 256.0) * (256.0 / 288.0)).abs() < 1e-15);
        assert!((s.bin_noise_var() - 1.0 / (10.0 * 4.0 * 0.75)).abs() < 1e-15);
        assert!((s.sample_noise_var() * 256.0 - s.bin_noise_var()).abs() < 1e-15);
        assert!((s.es_n0_db() - linear_to_db(15.0)).abs() < 1e-12);
    }

    #[test]
    fn parse_names() {
        assert_eq!("rayleigh".parse::<ChannelKind>().unwrap(), ChannelKind::Rayleigh);
        assert_eq!("frame".parse::<Coherence>().unwrap(), Coherence::Frame);
        assert!("rician".parse::<ChannelKind>().is_err());
    }
}
