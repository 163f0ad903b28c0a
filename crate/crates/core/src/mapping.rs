//! Gray-coded BPSK/QPSK/16QAM/64QAM mapping and hard/soft demapping.
//!
//! Each axis carries an independent Gray code: the first half of a symbol's
//! bits select the in-phase level, the second half the quadrature level, and
//! axis level `i` (most negative first) carries label `i ^ (i >> 1)`. For
//! 16QAM this reads 00 → −3, 01 → −1, 11 → +1, 10 → +3 on each axis.
//! BPSK maps 0 → −1 and 1 → +1 on the real axis.

use crate::error::{sizing, Error, Result};
use crate::{Bit, Complex64};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    pub fn constellation(self) -> Constellation {
        Constellation::new(self)
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "qpsk" => Ok(Modulation::Qpsk),
            "16qam" => Ok(Modulation::Qam16),
            "64qam" => Ok(Modulation::Qam64),
            other => Err(Error::Config(format!("unknown modulation {other:?}"))),
        }
    }
}

/// Gray-labeled levels on one axis, indexed by axis label.
#[derive(Debug, Clone, PartialEq)]
struct Axis {
    bits: usize,
    levels: Vec<f64>,
}

impl Axis {
    fn new(bits: usize, scale: f64) -> Self {
        let count = 1usize << bits;
        let mut levels = vec![0.0; count];
        for i in 0..count {
            let gray = i ^ (i >> 1);
            levels[gray] = (2.0 * i as f64 - (count as f64 - 1.0)) * scale;
        }
        Axis { bits, levels }
    }

    fn empty() -> Self {
        Axis {
            bits: 0,
            levels: vec![0.0],
        }
    }

    /// Nearest level; ties go to the lowest label.
    #[inline]
    fn slice(&self, y: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, &a) in self.levels.iter().enumerate() {
            let d = (y - a) * (y - a);
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    #[inline]
    fn llrs(&self, y: f64, noise_var: f64, out: &mut Vec<f64>) {
        for j in (0..self.bits).rev() {
            let mut d0 = f64::INFINITY;
            let mut d1 = f64::INFINITY;
            for (label, &a) in self.levels.iter().enumerate() {
                let d = (y - a) * (y - a);
                if (label >> j) & 1 == 0 {
                    d0 = d0.min(d);
                } else {
                    d1 = d1.min(d);
                }
            }
            out.push((d1 - d0) / noise_var);
        }
    }
}

/// Unit-average-energy constellation with Gray labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    modulation: Modulation,
    i_axis: Axis,
    q_axis: Axis,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let (i_axis, q_axis) = match modulation {
            Modulation::Bpsk => (Axis::new(1, 1.0), Axis::empty()),
            Modulation::Qpsk => {
                let s = 1.0 / 2f64.sqrt();
                (Axis::new(1, s), Axis::new(1, s))
            }
            Modulation::Qam16 => {
                let s = 1.0 / 10f64.sqrt();
                (Axis::new(2, s), Axis::new(2, s))
            }
            Modulation::Qam64 => {
                let s = 1.0 / 42f64.sqrt();
                (Axis::new(3, s), Axis::new(3, s))
            }
        };
        let points = (0..modulation.order())
            .map(|label| {
                let il = label >> q_axis.bits;
                let ql = label & ((1 << q_axis.bits) - 1);
                Complex64::new(i_axis.levels[il], q_axis.levels[ql])
            })
            .collect();
        Constellation {
            modulation,
            i_axis,
            q_axis,
            points,
        }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    /// Points indexed by label; the label's first bit is its MSB.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn label_bits(&self, label: usize) -> impl Iterator<Item = Bit> + '_ {
        let n = self.bits_per_symbol();
        (0..n).rev().map(move |j| ((label >> j) & 1) as Bit)
    }

    /// Label of the nearest point (ties to the lowest label).
    #[inline]
    pub fn nearest(&self, y: Complex64) -> usize {
        (self.i_axis.slice(y.re) << self.q_axis.bits) | self.q_axis.slice(y.im)
    }

    /// Appends the max-log LLRs of one symbol (positive favors 0).
    #[inline]
    pub fn llrs_into(&self, y: Complex64, noise_var: f64, out: &mut Vec<f64>) {
        self.i_axis.llrs(y.re, noise_var, out);
        self.q_axis.llrs(y.im, noise_var, out);
    }
}

pub fn map_bits(bits: &[Bit], c: &Constellation) -> Result<Vec<Complex64>> {
    let bps = c.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(sizing(format!(
            "{} bits is not a multiple of {bps} bits per symbol",
            bits.len()
        )));
    }
    Ok(bits
        .chunks_exact(bps)
        .map(|g| c.points[g.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)])
        .collect())
}

pub fn demap_hard(symbols: &[Complex64], c: &Constellation) -> Vec<Bit> {
    let mut out = Vec::with_capacity(symbols.len() * c.bits_per_symbol());
    for &y in symbols {
        out.extend(c.label_bits(c.nearest(y)));
    }
    out
}

pub fn demap_soft(symbols: &[Complex64], noise_var: f64, c: &Constellation) -> Result<Vec<f64>> {
    if !(noise_var > 0.0) {
        return Err(Error::Parameter(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }
    let mut out = Vec::with_capacity(symbols.len() * c.bits_per_symbol());
    for &y in symbols {
        c.llrs_into(y, noise_var, &mut out);
    }
    Ok(out)
}
