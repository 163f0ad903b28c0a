use crate::error::{sizing, Result};
use crate::Complex64;
use std::f64::consts::PI;

/// Iterative radix-2 decimation-in-time FFT with precomputed twiddles and
/// bit-reversal table. `forward` is unscaled; `inverse` scales by 1/N.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    /// e^{-2πik/N}, k < N/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(sizing(format!("FFT length {n} is not a power of two")));
        }
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Fft { n, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check(&self, data: &[Complex64]) -> Result<()> {
        if data.len() != self.n {
            return Err(sizing(format!(
                "FFT input has {} samples, plan length is {}",
                data.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check(data)?;
        self.transform(data, false);
        Ok(())
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check(data)?;
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }
}

/// Time-domain samples from frequency bins (scaled by 1/N).
pub fn ifft(freq: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Fft::new(freq.len())?;
    let mut out = freq.to_vec();
    plan.inverse_in_place(&mut out)?;
    Ok(out)
}

/// Frequency bins from time-domain samples (unscaled).
pub fn fft(time: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Fft::new(time.len())?;
    let mut out = time.to_vec();
    plan.forward_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn impulse_gives_constant() {
        let mut x = vec![Complex64::new(0.0, 0.0); 64];
        x[0] = Complex64::new(1.0, 0.0);
        for v in ifft(&x).unwrap() {
            assert!((v - Complex64::new(1.0 / 64.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [1, 2, 8, 64, 256] {
            let x = random_vec(&mut rng, n);
            let y = fft(&ifft(&x).unwrap()).unwrap();
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_vec(&mut rng, 256);
        let t = ifft(&x).unwrap();
        let ef: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let et: f64 = t.iter().map(|v| v.norm_sqr()).sum();
        assert!((et * 256.0 - ef).abs() / ef < 1e-9);
    }

    #[test]
    fn non_power_of_two() {
        assert!(Fft::new(0).is_err());
        assert!(Fft::new(96).is_err());
        let plan = Fft::new(8).unwrap();
        assert!(plan.forward_in_place(&mut [Complex64::new(0.0, 0.0); 4]).is_err());
    }
}
