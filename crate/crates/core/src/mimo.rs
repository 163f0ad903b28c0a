//! Spatial multiplexing: stream mapping across transmit antennas, ZF / MMSE /
//! exhaustive ML detection, and ergodic capacity.

use crate::channel::{rayleigh_matrix, ChannelMatrix};
use crate::error::{sizing, Error, Result};
use crate::mapping::Constellation;
use crate::Complex64;
use nalgebra::DMatrix;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// Condition number above which a channel is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;
/// Largest joint candidate set the ML detector will enumerate.
pub const ML_MAX_CANDIDATES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Zf,
    Mmse,
    Ml,
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Zf => "zf",
            Detector::Mmse => "mmse",
            Detector::Ml => "ml",
        })
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zf" => Ok(Detector::Zf),
            "mmse" => Ok(Detector::Mmse),
            "ml" => Ok(Detector::Ml),
            other => Err(Error::Config(format!("unknown detector {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    pub nt: usize,
    pub nr: usize,
    pub detector: Detector,
}

impl AntennaConfig {
    pub fn siso(detector: Detector) -> Self {
        AntennaConfig {
            nt: 1,
            nr: 1,
            detector,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.nr == 0 {
            return Err(Error::Config("antenna counts must be at least 1".into()));
        }
        if self.nr < self.nt {
            return Err(Error::Config(format!(
                "{}x{} needs at least as many receive as transmit antennas",
                self.nt, self.nr
            )));
        }
        if self.nt > 1 && self.nr < 2 {
            return Err(Error::Config(
                "spatial multiplexing needs at least 2 receive antennas".into(),
            ));
        }
        Ok(())
    }

    pub fn is_multiplexed(&self) -> bool {
        self.nt > 1
    }
}

/// Round-robin split: stream a carries symbols a, a + nt, …, each scaled
/// by 1/√nt so total transmit power does not depend on nt.
pub fn sm_multiplex(symbols: &[Complex64], nt: usize) -> Result<Vec<Vec<Complex64>>> {
    if nt == 0 || !symbols.len().is_multiple_of(nt) {
        return Err(sizing(format!(
            "{} symbols cannot be split across {nt} antennas",
            symbols.len()
        )));
    }
    let scale = 1.0 / (nt as f64).sqrt();
    let mut streams = vec![Vec::with_capacity(symbols.len() / nt); nt];
    for group in symbols.chunks_exact(nt) {
        for (stream, &s) in streams.iter_mut().zip(group) {
            stream.push(s * scale);
        }
    }
    Ok(streams)
}

/// Inverse of [`sm_multiplex`], undoing the 1/√nt scaling.
pub fn sm_demultiplex(streams: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let nt = streams.len();
    let len = streams.first().map_or(0, Vec::len);
    if streams.iter().any(|s| s.len() != len) {
        return Err(sizing("streams differ in length"));
    }
    let scale = (nt as f64).sqrt();
    let mut out = Vec::with_capacity(nt * len);
    for i in 0..len {
        out.extend(streams.iter().map(|s| s[i] * scale));
    }
    Ok(out)
}

fn condition_number(h: &ChannelMatrix) -> f64 {
    let sv = h.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Linear receive filter x̂ = W·y.
#[derive(Debug, Clone)]
pub struct LinearDetector {
    w: DMatrix<Complex64>,
    /// W·H, used for per-stream gain and residual interference.
    wh: DMatrix<Complex64>,
}

impl LinearDetector {
    /// W = (HᴴH)⁻¹Hᴴ.
    pub fn zf(h: &ChannelMatrix) -> Result<Self> {
        Self::regularized(h, 0.0)
    }

    /// W = (HᴴH + σ²I)⁻¹Hᴴ.
    pub fn mmse(h: &ChannelMatrix, noise_var: f64) -> Result<Self> {
        if !(noise_var >= 0.0) {
            return Err(Error::Parameter(format!(
                "noise variance must be non-negative, got {noise_var}"
            )));
        }
        Self::regularized(h, noise_var)
    }

    fn regularized(h: &ChannelMatrix, reg: f64) -> Result<Self> {
        if h.nrows() < h.ncols() {
            return Err(Error::Config(format!(
                "linear detection needs nr >= nt, channel is {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        if reg == 0.0 {
            let cond = condition_number(h);
            if cond > SINGULAR_CONDITION {
                return Err(Error::SingularChannel(cond));
            }
        }
        let hh = h.adjoint();
        let gram = &hh * h + DMatrix::<Complex64>::identity(h.ncols(), h.ncols()) * Complex64::new(reg, 0.0);
        let inv = gram
            .try_inverse()
            .ok_or(Error::SingularChannel(f64::INFINITY))?;
        let w = inv * hh;
        let wh = &w * h;
        Ok(LinearDetector { w, wh })
    }

    pub fn filter(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    pub fn apply(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.w.ncols() {
            return Err(sizing(format!(
                "received vector has {} entries, filter expects {}",
                y.len(),
                self.w.ncols()
            )));
        }
        Ok((0..self.w.nrows())
            .map(|i| (0..y.len()).map(|r| self.w[(i, r)] * y[r]).sum())
            .collect())
    }

    /// Gain of stream i on its own symbol, (W·H)ᵢᵢ.
    pub fn stream_gain(&self, i: usize) -> Complex64 {
        self.wh[(i, i)]
    }

    /// Interference-plus-noise variance on stream i, for transmitted symbols
    /// of energy `symbol_energy` and receive noise variance `noise_var`.
    pub fn stream_distortion(&self, i: usize, symbol_energy: f64, noise_var: f64) -> f64 {
        let interference: f64 = (0..self.wh.ncols())
            .filter(|&j| j != i)
            .map(|j| self.wh[(i, j)].norm_sqr())
            .sum();
        let noise: f64 = self.w.row(i).iter().map(|v| v.norm_sqr()).sum();
        interference * symbol_energy + noise * noise_var
    }
}

/// x̂ = pinv(H)·y.
pub fn zf_detect(y: &[Complex64], h: &ChannelMatrix) -> Result<Vec<Complex64>> {
    LinearDetector::zf(h)?.apply(y)
}

/// x̂ = (HᴴH + σ²I)⁻¹Hᴴ·y.
pub fn mmse_detect(y: &[Complex64], h: &ChannelMatrix, noise_var: f64) -> Result<Vec<Complex64>> {
    LinearDetector::mmse(h, noise_var)?.apply(y)
}

/// Joint ML decision.
#[derive(Debug, Clone, PartialEq)]
pub struct MlDecision {
    /// Constellation label per transmit antenna.
    pub labels: Vec<usize>,
    pub symbols: Vec<Complex64>,
    /// ‖y − Hx̂‖²
    pub distance: f64,
}

/// Exhaustive joint detector over all M^nt candidate vectors. `h` is the
/// effective channel seen by unscaled constellation points.
#[derive(Debug, Clone)]
pub struct MlDetector {
    nt: usize,
    nr: usize,
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
    /// columns[a][p * nr + r] = H[r, a] · point[p]
    columns: Vec<Vec<Complex64>>,
}

impl MlDetector {
    pub fn new(h: &ChannelMatrix, constellation: &Constellation) -> Result<Self> {
        let (nr, nt) = h.shape();
        let order = constellation.order();
        let candidates = order.checked_pow(nt as u32).unwrap_or(usize::MAX);
        if nt == 0 || nt > 2 || candidates > ML_MAX_CANDIDATES {
            return Err(Error::Config(format!(
                "ML enumeration over {order}^{nt} candidates exceeds the bound (nt <= 2, {ML_MAX_CANDIDATES} candidates)"
            )));
        }
        let points = constellation.points().to_vec();
        let columns = (0..nt)
            .map(|a| {
                points
                    .iter()
                    .flat_map(|&p| (0..nr).map(move |r| (r, p)))
                    .map(|(r, p)| h[(r, a)] * p)
                    .collect()
            })
            .collect();
        Ok(MlDetector {
            nt,
            nr,
            order,
            bits_per_symbol: constellation.bits_per_symbol(),
            points,
            columns,
        })
    }

    fn check(&self, y: &[Complex64]) -> Result<()> {
        if y.len() != self.nr {
            return Err(sizing(format!(
                "received vector has {} entries, channel has {} rows",
                y.len(),
                self.nr
            )));
        }
        Ok(())
    }

    /// Calls `visit(labels, distance)` for every candidate in lexicographic
    /// label order (antenna 0 most significant).
    #[inline]
    fn enumerate(&self, y: &[Complex64], mut visit: impl FnMut(&[usize], f64)) {
        let nr = self.nr;
        match self.nt {
            1 => {
                for p in 0..self.order {
                    let col = &self.columns[0][p * nr..(p + 1) * nr];
                    let d: f64 = y.iter().zip(col).map(|(a, b)| (a - b).norm_sqr()).sum();
                    visit(&[p], d);
                }
            }
            _ => {
                let mut resid = vec![Complex64::new(0.0, 0.0); nr];
                for p0 in 0..self.order {
                    let c0 = &self.columns[0][p0 * nr..(p0 + 1) * nr];
                    for r in 0..nr {
                        resid[r] = y[r] - c0[r];
                    }
                    for p1 in 0..self.order {
                        let c1 = &self.columns[1][p1 * nr..(p1 + 1) * nr];
                        let d: f64 = resid.iter().zip(c1).map(|(a, b)| (a - b).norm_sqr()).sum();
                        visit(&[p0, p1], d);
                    }
                }
            }
        }
    }

    /// Minimum-distance candidate; ties go to the lowest label vector.
    pub fn detect(&self, y: &[Complex64]) -> Result<MlDecision> {
        self.check(y)?;
        let mut best = (f64::INFINITY, vec![0usize; self.nt]);
        self.enumerate(y, |labels, d| {
            if d < best.0 {
                best.0 = d;
                best.1.copy_from_slice(labels);
            }
        });
        Ok(MlDecision {
            symbols: best.1.iter().map(|&l| self.points[l]).collect(),
            labels: best.1,
            distance: best.0,
        })
    }

    /// Appends max-log LLRs for every bit of every antenna (antenna 0
    /// first), positive favoring 0.
    pub fn llrs_into(&self, y: &[Complex64], noise_var: f64, out: &mut Vec<f64>) -> Result<()> {
        self.check(y)?;
        // best[a][p]: smallest distance over candidates where antenna a sends p
        let mut best = vec![vec![f64::INFINITY; self.order]; self.nt];
        self.enumerate(y, |labels, d| {
            for (a, &l) in labels.iter().enumerate() {
                if d < best[a][l] {
                    best[a][l] = d;
                }
            }
        });
        for per_antenna in &best {
            for j in (0..self.bits_per_symbol).rev() {
                let mut d = [f64::INFINITY; 2];
                for (label, &v) in per_antenna.iter().enumerate() {
                    let b = (label >> j) & 1;
                    d[b] = d[b].min(v);
                }
                out.push((d[1] - d[0]) / noise_var);
            }
        }
        Ok(())
    }
}

/// argmin over all candidate vectors of ‖y − Hx‖².
pub fn ml_detect(y: &[Complex64], h: &ChannelMatrix, constellation: &Constellation) -> Result<MlDecision> {
    MlDetector::new(h, constellation)?.detect(y)
}

/// log2 det(I + (snr/nt)·H·Hᴴ) for one channel matrix.
pub fn capacity_of(h: &ChannelMatrix, snr: f64) -> f64 {
    let (nr, nt) = h.shape();
    let m = DMatrix::<Complex64>::identity(nr, nr) + (h * h.adjoint()) * Complex64::new(snr / nt as f64, 0.0);
    let chol = m.cholesky().expect("I + (snr/nt)·HHᴴ is positive definite");
    chol.l_dirty()
        .diagonal()
        .iter()
        .map(|d| 2.0 * d.re.log2())
        .sum()
}

/// Monte Carlo mean of [`capacity_of`] over i.i.d. CN(0, 1) channels,
/// in bits/s/Hz.
pub fn ergodic_capacity<R: Rng + ?Sized>(nt: usize, nr: usize, snr: f64, trials: usize, rng: &mut R) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Parameter("capacity estimate needs at least one trial".into()));
    }
    let total: f64 = (0..trials)
        .map(|_| capacity_of(&rayleigh_matrix(nr, nt, rng), snr))
        .sum();
    Ok(total / trials as f64)
}
