use super::gf256 as gf;
use crate::error::{Error, Result};
use thiserror::Error as ThisError;

/// Systematic Reed–Solomon code over GF(2^8), shortened from length 255.
///
/// The generator polynomial has roots α^0 … α^(2t−1). Codewords are message
/// symbols followed by 2t parity symbols; the first symbol is the
/// highest-degree coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsCode {
    n: usize,
    k: usize,
    /// Monic generator, highest degree first, length 2t + 1.
    generator: Vec<u8>,
}

/// Why a received word could not be decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ThisError)]
pub enum RsDecodeError {
    #[error("received word has {got} symbols, code length is {expected}")]
    Length { got: usize, expected: usize },
    #[error("more errors than the code can correct")]
    Uncorrectable,
}

impl RsCode {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > 255 || k == 0 || k >= n || !(n - k).is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "RS({n}, {k}) needs 0 < k < n <= 255 with n − k even"
            )));
        }
        let mut generator = vec![1u8];
        for i in 0..n - k {
            // multiply by (x + α^i)
            let root = gf::exp(i);
            let mut next = vec![0u8; generator.len() + 1];
            for (j, &c) in generator.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= gf::mul(c, root);
            }
            generator = next;
        }
        Ok(RsCode { n, k, generator })
    }

    /// Shortened code of length `n` correcting `t` symbol errors.
    pub fn shortened(n: usize, t: usize) -> Result<Self> {
        if n <= 2 * t {
            return Err(Error::Parameter(format!(
                "RS length {n} leaves no message symbols with t = {t}"
            )));
        }
        RsCode::new(n, n - 2 * t)
    }

    /// The full-length (255, 239, t = 8) outer code.
    pub fn ieee_255_239() -> Self {
        RsCode::new(255, 239).expect("valid code")
    }

    /// Small (40, 36, t = 2) code for fast checks.
    pub fn small_40_36() -> Self {
        RsCode::new(40, 36).expect("valid code")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    /// Symbols removed from the full-length code.
    pub fn shortening(&self) -> usize {
        255 - self.n
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>> {
        if msg.len() != self.k {
            return Err(Error::Sizing(format!(
                "RS message has {} symbols, expected {}",
                msg.len(),
                self.k
            )));
        }
        let nparity = self.n - self.k;
        let mut parity = vec![0u8; nparity];
        for &m in msg {
            let fb = m ^ parity[0];
            parity.rotate_left(1);
            parity[nparity - 1] = 0;
            if fb != 0 {
                for (p, &g) in parity.iter_mut().zip(&self.generator[1..]) {
                    *p ^= gf::mul(fb, g);
                }
            }
        }
        let mut out = Vec::with_capacity(self.n);
        out.extend_from_slice(msg);
        out.extend_from_slice(&parity);
        Ok(out)
    }

    fn syndromes(&self, word: &[u8]) -> Vec<u8> {
        (0..self.n - self.k)
            .map(|j| gf::eval_high_first(word, gf::exp(j)))
            .collect()
    }

    /// Bounded-distance decoding (Berlekamp–Massey, Chien search, Forney).
    /// Returns the message and the number of corrected symbols.
    pub fn decode(&self, word: &[u8]) -> std::result::Result<(Vec<u8>, usize), RsDecodeError> {
        if word.len() != self.n {
            return Err(RsDecodeError::Length {
                got: word.len(),
                expected: self.n,
            });
        }
        let synd = self.syndromes(word);
        if synd.iter().all(|&s| s == 0) {
            return Ok((word[..self.k].to_vec(), 0));
        }
        let locator = berlekamp_massey(&synd);
        let nerr = locator.len() - 1;
        if nerr > self.t() {
            return Err(RsDecodeError::Uncorrectable);
        }

        // Chien search over the positions that exist in the shortened code.
        let mut positions = Vec::with_capacity(nerr);
        for i in 0..self.n {
            let power = self.n - 1 - i;
            let x_inv = gf::exp(255 - power % 255);
            if gf::eval_low_first(&locator, x_inv) == 0 {
                positions.push(i);
            }
        }
        if positions.len() != nerr {
            return Err(RsDecodeError::Uncorrectable);
        }

        // Ω(x) = S(x) Λ(x) mod x^(2t)
        let two_t = synd.len();
        let mut omega = vec![0u8; two_t];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in locator.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] ^= gf::mul(s, l);
                }
            }
        }
        // Formal derivative: odd-degree terms shift down one.
        let deriv: Vec<u8> = locator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();

        let mut fixed = word.to_vec();
        for &i in &positions {
            let power = self.n - 1 - i;
            let x = gf::exp(power);
            let x_inv = gf::inv(x);
            let denom = gf::eval_low_first(&deriv, x_inv);
            if denom == 0 {
                return Err(RsDecodeError::Uncorrectable);
            }
            let mag = gf::mul(x, gf::div(gf::eval_low_first(&omega, x_inv), denom));
            fixed[i] ^= mag;
        }
        if self.syndromes(&fixed).iter().any(|&s| s != 0) {
            return Err(RsDecodeError::Uncorrectable);
        }
        fixed.truncate(self.k);
        Ok((fixed, nerr))
    }
}

/// Error-locator polynomial Λ(x), lowest degree first, trimmed to its degree.
fn berlekamp_massey(synd: &[u8]) -> Vec<u8> {
    let mut c = vec![0u8; synd.len() + 1];
    let mut b = vec![0u8; synd.len() + 1];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last_d = 1u8;
    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=l {
            d ^= gf::mul(c[i], synd[n - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = gf::div(d, last_d);
        let prev = c.clone();
        for i in 0..c.len() - shift {
            c[i + shift] ^= gf::mul(coef, b[i]);
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last_d = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(l + 1);
    c
}

pub fn rs_encode(msg: &[u8], code: &RsCode) -> Result<Vec<u8>> {
    code.encode(msg)
}

pub fn rs_decode(
    word: &[u8],
    code: &RsCode,
) -> std::result::Result<(Vec<u8>, usize), RsDecodeError> {
    code.decode(word)
}
