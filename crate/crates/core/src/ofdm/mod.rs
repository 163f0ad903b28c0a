//! OFDM symbol assembly: carrier layout with pilots, IFFT/FFT, cyclic
//! prefix, and least-squares pilot channel estimation.

mod fft;

pub use fft::{fft, ifft, Fft};

use crate::error::{sizing, Error, Result};
use crate::Complex64;
use std::fmt;
use std::str::FromStr;

/// Data subcarriers per OFDM symbol.
pub const DATA_CARRIERS: usize = 192;
/// Pilot subcarriers per OFDM symbol.
pub const PILOT_CARRIERS: usize = 8;
/// Used subcarriers on each side of DC.
const HALF_USED: i32 = 100;
const PILOT_OFFSETS: [i32; PILOT_CARRIERS] = [-88, -63, -38, -13, 13, 38, 63, 88];

/// Guard interval as a fraction of the FFT length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CpRatio {
    Quarter,
    Eighth,
    Sixteenth,
    ThirtySecond,
}

impl CpRatio {
    pub fn denominator(self) -> usize {
        match self {
            CpRatio::Quarter => 4,
            CpRatio::Eighth => 8,
            CpRatio::Sixteenth => 16,
            CpRatio::ThirtySecond => 32,
        }
    }
}

impl fmt::Display for CpRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.denominator())
    }
}

impl FromStr for CpRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/4" => Ok(CpRatio::Quarter),
            "1/8" => Ok(CpRatio::Eighth),
            "1/16" => Ok(CpRatio::Sixteenth),
            "1/32" => Ok(CpRatio::ThirtySecond),
            other => Err(Error::Config(format!("unsupported cyclic prefix ratio {other:?}"))),
        }
    }
}

/// Carrier layout and transform sizes for one OFDM symbol.
///
/// Subcarriers −100..=100 excluding DC are used; pilots sit at ±13, ±38,
/// ±63 and ±88 and the remaining 192 carry data. Everything else (guard
/// bands and DC) is null. Logical subcarrier k lives in FFT bin k mod nfft.
#[derive(Debug, Clone)]
pub struct OfdmParams {
    nfft: usize,
    cp_ratio: CpRatio,
    data_bins: Vec<usize>,
    pilot_bins: Vec<usize>,
    /// Logical subcarrier offsets matching `data_bins` / `pilot_bins`.
    data_offsets: Vec<i32>,
    fft: Fft,
}

impl OfdmParams {
    pub fn new(nfft: usize, cp_ratio: CpRatio) -> Result<Self> {
        if !nfft.is_power_of_two() || nfft < 256 {
            return Err(Error::Config(format!(
                "nfft = {nfft} must be a power of two of at least 256"
            )));
        }
        let bin = |k: i32| (k + nfft as i32) as usize % nfft;
        let data_offsets: Vec<i32> = (-HALF_USED..=HALF_USED)
            .filter(|&k| k != 0 && !PILOT_OFFSETS.contains(&k))
            .collect();
        debug_assert_eq!(data_offsets.len(), DATA_CARRIERS);
        Ok(OfdmParams {
            nfft,
            cp_ratio,
            data_bins: data_offsets.iter().map(|&k| bin(k)).collect(),
            pilot_bins: PILOT_OFFSETS.iter().map(|&k| bin(k)).collect(),
            data_offsets,
            fft: Fft::new(nfft)?,
        })
    }

    pub fn nfft(&self) -> usize {
        self.nfft
    }

    pub fn cp_ratio(&self) -> CpRatio {
        self.cp_ratio
    }

    pub fn cp_length(&self) -> usize {
        self.nfft / self.cp_ratio.denominator()
    }

    pub fn symbol_length(&self) -> usize {
        self.nfft + self.cp_length()
    }

    pub fn data_bins(&self) -> &[usize] {
        &self.data_bins
    }

    pub fn pilot_bins(&self) -> &[usize] {
        &self.pilot_bins
    }

    pub fn null_bins(&self) -> Vec<usize> {
        let mut used = vec![false; self.nfft];
        for &b in self.data_bins.iter().chain(&self.pilot_bins) {
            used[b] = true;
        }
        (0..self.nfft).filter(|&b| !used[b]).collect()
    }

    pub fn fft_plan(&self) -> &Fft {
        &self.fft
    }

    /// Places data and the fixed +1 pilots into frequency bins.
    pub fn assemble(&self, data: &[Complex64]) -> Result<Vec<Complex64>> {
        self.assemble_with_pilots(data, &[Complex64::new(1.0, 0.0); PILOT_CARRIERS])
    }

    pub fn assemble_with_pilots(
        &self,
        data: &[Complex64],
        pilots: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        if data.len() != DATA_CARRIERS {
            return Err(sizing(format!(
                "OFDM symbol needs {DATA_CARRIERS} data values, got {}",
                data.len()
            )));
        }
        if pilots.len() != PILOT_CARRIERS {
            return Err(sizing(format!(
                "OFDM symbol needs {PILOT_CARRIERS} pilot values, got {}",
                pilots.len()
            )));
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); self.nfft];
        for (&b, &v) in self.data_bins.iter().zip(data) {
            bins[b] = v;
        }
        for (&b, &v) in self.pilot_bins.iter().zip(pilots) {
            bins[b] = v;
        }
        Ok(bins)
    }

    pub fn disassemble(&self, bins: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_bins(bins)?;
        Ok(self.data_bins.iter().map(|&b| bins[b]).collect())
    }

    pub fn pilots(&self, bins: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_bins(bins)?;
        Ok(self.pilot_bins.iter().map(|&b| bins[b]).collect())
    }

    fn check_bins(&self, bins: &[Complex64]) -> Result<()> {
        if bins.len() != self.nfft {
            return Err(sizing(format!(
                "expected {} frequency bins, got {}",
                self.nfft,
                bins.len()
            )));
        }
        Ok(())
    }

    /// Frequency bins → time samples with cyclic prefix.
    pub fn modulate(&self, bins: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut time = bins.to_vec();
        self.fft.inverse_in_place(&mut time)?;
        add_cp(&time, self.cp_length())
    }

    /// Time samples with cyclic prefix → frequency bins.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        if samples.len() != self.symbol_length() {
            return Err(sizing(format!(
                "expected {} samples, got {}",
                self.symbol_length(),
                samples.len()
            )));
        }
        let mut bins = remove_cp(samples, self.cp_length(), self.nfft)?;
        self.fft.forward_in_place(&mut bins)?;
        Ok(bins)
    }
}

/// Prepends the last `cp_length` samples.
pub fn add_cp(time: &[Complex64], cp_length: usize) -> Result<Vec<Complex64>> {
    if cp_length >= time.len() {
        return Err(Error::Parameter(format!(
            "cyclic prefix {cp_length} must be shorter than the symbol ({})",
            time.len()
        )));
    }
    let mut out = Vec::with_capacity(time.len() + cp_length);
    out.extend_from_slice(&time[time.len() - cp_length..]);
    out.extend_from_slice(time);
    Ok(out)
}

/// Drops the first `cp_length` samples of a `nfft + cp_length` block.
pub fn remove_cp(samples: &[Complex64], cp_length: usize, nfft: usize) -> Result<Vec<Complex64>> {
    if cp_length >= nfft {
        return Err(Error::Parameter(format!(
            "cyclic prefix {cp_length} must be shorter than nfft {nfft}"
        )));
    }
    if samples.len() != nfft + cp_length {
        return Err(sizing(format!(
            "expected {} samples, got {}",
            nfft + cp_length,
            samples.len()
        )));
    }
    Ok(samples[cp_length..].to_vec())
}

/// Least-squares channel estimate at the data carriers.
///
/// Each pilot with a non-zero transmitted value gives rx/tx; data carriers
/// are linearly interpolated between the nearest usable pilots on either
/// side and held flat beyond the outermost ones.
pub fn ls_channel_estimate(
    rx_pilots: &[Complex64],
    tx_pilots: &[Complex64],
    params: &OfdmParams,
) -> Result<Vec<Complex64>> {
    if rx_pilots.len() != PILOT_CARRIERS || tx_pilots.len() != PILOT_CARRIERS {
        return Err(sizing(format!(
            "expected {PILOT_CARRIERS} pilots, got {} received and {} transmitted",
            rx_pilots.len(),
            tx_pilots.len()
        )));
    }
    let anchors: Vec<(f64, Complex64)> = PILOT_OFFSETS
        .iter()
        .zip(rx_pilots.iter().zip(tx_pilots))
        .filter(|(_, (_, tx))| tx.norm_sqr() > 0.0)
        .map(|(&k, (rx, tx))| (k as f64, rx / tx))
        .collect();
    if anchors.is_empty() {
        return Err(Error::Parameter("no usable pilots for estimation".into()));
    }
    let first = anchors[0];
    let last = anchors[anchors.len() - 1];
    Ok(params
        .data_offsets
        .iter()
        .map(|&k| {
            let k = k as f64;
            if k <= first.0 {
                return first.1;
            }
            if k >= last.0 {
                return last.1;
            }
            let i = anchors.partition_point(|a| a.0 <= k);
            let (ka, ha) = anchors[i - 1];
            let (kb, hb) = anchors[i];
            let w = (k - ka) / (kb - ka);
            ha * (1.0 - w) + hb * w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> OfdmParams {
        OfdmParams::new(256, CpRatio::Eighth).unwrap()
    }

    fn random_data(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn layout_partitions_bins() {
        for nfft in [256, 512, 2048] {
            let p = OfdmParams::new(nfft, CpRatio::Quarter).unwrap();
            let mut seen = vec![0u8; nfft];
            for &b in p.data_bins().iter().chain(p.pilot_bins()).chain(&p.null_bins()) {
                seen[b] += 1;
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
        let p = params();
        assert_eq!(p.data_bins().len() + p.pilot_bins().len() + p.null_bins().len(), 256);
        assert_eq!(p.null_bins().len(), 56);
        assert!(p.null_bins().contains(&0));
        assert!(OfdmParams::new(128, CpRatio::Eighth).is_err());
        assert!(OfdmParams::new(300, CpRatio::Eighth).is_err());
    }

    #[test]
    fn zero_data_leaves_only_pilots() {
        let p = params();
        let bins = p.assemble(&[c(0.0, 0.0); 192]).unwrap();
        let nonzero: Vec<usize> = (0..256).filter(|&b| bins[b].norm() > 0.0).collect();
        let mut pilots = p.pilot_bins().to_vec();
        pilots.sort();
        assert_eq!(nonzero, pilots);
        assert!(p.assemble(&[c(0.0, 0.0); 191]).is_err());
    }

    #[test]
    fn cp_lengths_and_cyclic_property() {
        let p = OfdmParams::new(256, CpRatio::Quarter).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_data(&mut rng, 256);
        let y = add_cp(&x, p.cp_length()).unwrap();
        assert_eq!(y.len(), 320);
        assert_eq!(&y[..64], &x[192..]);
        assert_eq!(remove_cp(&y, 64, 256).unwrap(), x);
        assert!(add_cp(&x, 256).is_err());
        assert!(remove_cp(&y, 256, 256).is_err());
    }

    #[test]
    fn full_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ratio in [CpRatio::Quarter, CpRatio::Eighth, CpRatio::Sixteenth, CpRatio::ThirtySecond] {
            let p = OfdmParams::new(256, ratio).unwrap();
            let data = random_data(&mut rng, 192);
            let tx = p.modulate(&p.assemble(&data).unwrap()).unwrap();
            let back = p.disassemble(&p.demodulate(&tx).unwrap()).unwrap();
            for (a, b) in data.iter().zip(&back) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn cp_turns_convolution_into_multiplication() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_data(&mut rng, 192);
        let bins = p.assemble(&data).unwrap();
        let tx = p.modulate(&bins).unwrap();
        for taps in [1, 2, 7, p.cp_length()] {
            let h = random_data(&mut rng, taps);
            // linear convolution, truncated to the transmitted length
            let rx: Vec<Complex64> = (0..tx.len())
                .map(|n| (0..taps).filter(|&d| d <= n).map(|d| h[d] * tx[n - d]).sum())
                .collect();
            let got = p.demodulate(&rx).unwrap();
            for (k, (g, x)) in got.iter().zip(&bins).enumerate() {
                let hk: Complex64 = h
                    .iter()
                    .enumerate()
                    .map(|(d, &t)| t * Complex64::from_polar(1.0, -2.0 * PI * (k * d) as f64 / 256.0))
                    .sum();
                assert!((g - hk * x).norm() < 1e-9, "taps {taps} bin {k}");
            }
        }
    }

    #[test]
    fn ls_flat_and_identity() {
        let p = params();
        let data = vec![c(0.5, -0.5); 192];
        for h in [c(1.0, 0.0), c(0.3, -1.2)] {
            let rx: Vec<Complex64> = p.assemble(&data).unwrap().iter().map(|v| v * h).collect();
            let est = ls_channel_estimate(&p.pilots(&rx).unwrap(), &[c(1.0, 0.0); 8], &p).unwrap();
            assert_eq!(est.len(), 192);
            assert!(est.iter().all(|e| (e - h).norm() < 1e-15));
        }
    }

    #[test]
    fn ls_skips_silent_pilots() {
        let p = params();
        let mut tx = [c(1.0, 0.0); 8];
        for t in tx.iter_mut().skip(1).step_by(2) {
            *t = c(0.0, 0.0);
        }
        let h = c(-0.7, 0.2);
        let rx: Vec<Complex64> = tx.iter().map(|t| t * h).collect();
        let est = ls_channel_estimate(&rx, &tx, &p).unwrap();
        assert!(est.iter().all(|e| (e - h).norm() < 1e-15));
        assert!(ls_channel_estimate(&rx, &[c(0.0, 0.0); 8], &p).is_err());
    }

    #[test]
    fn ls_two_tap_within_interpolation_bound() {
        let p = params();
        let (h0, h1) = (c(0.8, 0.1), c(0.3, -0.4));
        let resp = |k: i32| h0 + h1 * Complex64::from_polar(1.0, -2.0 * PI * k as f64 / 256.0);
        let rx: Vec<Complex64> = PILOT_OFFSETS.iter().map(|&k| resp(k)).collect();
        let est = ls_channel_estimate(&rx, &[c(1.0, 0.0); 8], &p).unwrap();
        let w = 2.0 * PI / 256.0;
        let d1 = h1.norm() * w;
        let d2 = h1.norm() * w * w;
        for (&k, e) in p.data_offsets.iter().zip(&est) {
            let truth = resp(k);
            let bound = if k < PILOT_OFFSETS[0] {
                d1 * (PILOT_OFFSETS[0] - k) as f64
            } else if k > PILOT_OFFSETS[7] {
                d1 * (k - PILOT_OFFSETS[7]) as f64
            } else {
                let i = PILOT_OFFSETS.partition_point(|&q| q <= k);
                let (a, b) = (PILOT_OFFSETS[i - 1], PILOT_OFFSETS[i]);
                d2 * ((k - a) * (b - k)) as f64 / 2.0
            };
            assert!((e - truth).norm() <= bound + 1e-12, "k {k}");
        }
    }
}
