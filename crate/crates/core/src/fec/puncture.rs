use crate::error::{sizing, Error, Result};
use std::fmt;
use std::str::FromStr;

/// Convolutional code rate after puncturing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeRate {
    Half,
    TwoThirds,
    ThreeQuarters,
}

impl CodeRate {
    /// (k, n) with rate k/n.
    pub fn ratio(self) -> (usize, usize) {
        match self {
            CodeRate::Half => (1, 2),
            CodeRate::TwoThirds => (2, 3),
            CodeRate::ThreeQuarters => (3, 4),
        }
    }

    pub fn value(self) -> f64 {
        let (k, n) = self.ratio();
        k as f64 / n as f64
    }

    pub fn pattern(self) -> PuncturePattern {
        PuncturePattern::for_rate(self)
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, n) = self.ratio();
        write!(f, "{k}/{n}")
    }
}

impl FromStr for CodeRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/2" => Ok(CodeRate::Half),
            "2/3" => Ok(CodeRate::TwoThirds),
            "3/4" => Ok(CodeRate::ThreeQuarters),
            other => Err(Error::Config(format!("unsupported code rate {other:?}"))),
        }
    }
}

/// Keep/delete mask over `2 * period` consecutive mother-code bits
/// (x1 y1 x2 y2 ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    period: usize,
    keep_mask: Vec<bool>,
    kept: usize,
}

impl PuncturePattern {
    pub fn new(keep_mask: Vec<bool>) -> Result<Self> {
        if keep_mask.is_empty() || !keep_mask.len().is_multiple_of(2) {
            return Err(Error::Parameter(
                "puncture mask must cover a whole number of bit pairs".into(),
            ));
        }
        let kept = keep_mask.iter().filter(|&&k| k).count();
        if kept == 0 {
            return Err(Error::Parameter("puncture mask deletes every bit".into()));
        }
        Ok(PuncturePattern {
            period: keep_mask.len() / 2,
            keep_mask,
            kept,
        })
    }

    /// 802.16 patterns: 2/3 keeps X1 Y1 Y2, 3/4 keeps X1 Y1 Y2 X3.
    pub fn for_rate(rate: CodeRate) -> Self {
        let mask = match rate {
            CodeRate::Half => vec![true, true],
            CodeRate::TwoThirds => vec![true, true, false, true],
            CodeRate::ThreeQuarters => vec![true, true, false, true, true, false],
        };
        PuncturePattern::new(mask).expect("built-in pattern is valid")
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.keep_mask
    }

    /// Mother bits covered by one application of the mask.
    pub fn span(&self) -> usize {
        self.keep_mask.len()
    }

    pub fn kept_per_span(&self) -> usize {
        self.kept
    }

    pub fn effective_rate(&self) -> f64 {
        self.period as f64 / self.kept as f64
    }

    pub fn punctured_len(&self, mother_len: usize) -> Result<usize> {
        if !mother_len.is_multiple_of(self.span()) {
            return Err(sizing(format!(
                "{mother_len} coded bits is not a multiple of the puncture span {}",
                self.span()
            )));
        }
        Ok(mother_len / self.span() * self.kept)
    }
}

/// Deletes the masked-out positions of `coded`.
pub fn puncture<T: Copy>(coded: &[T], pattern: &PuncturePattern) -> Result<Vec<T>> {
    let out_len = pattern.punctured_len(coded.len())?;
    let mut out = Vec::with_capacity(out_len);
    for chunk in coded.chunks_exact(pattern.span()) {
        out.extend(
            chunk
                .iter()
                .zip(&pattern.keep_mask)
                .filter(|(_, &keep)| keep)
                .map(|(&v, _)| v),
        );
    }
    Ok(out)
}

/// Reinserts erased positions holding the neutral metric 0.0.
pub fn depuncture(received: &[f64], pattern: &PuncturePattern) -> Result<Vec<f64>> {
    if !received.len().is_multiple_of(pattern.kept) {
        return Err(sizing(format!(
            "{} metrics is not a multiple of the {} kept bits per puncture span",
            received.len(),
            pattern.kept
        )));
    }
    let mut out = Vec::with_capacity(received.len() / pattern.kept * pattern.span());
    for chunk in received.chunks_exact(pattern.kept) {
        let mut it = chunk.iter();
        for &keep in &pattern.keep_mask {
            out.push(if keep { *it.next().unwrap() } else { 0.0 });
        }
    }
    Ok(out)
}
