//! BER curves and their CSV form.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// CSV header, column order fixed.
pub const CSV_HEADER: &str = "eb_n0_db,bits_sent,bit_errors,ber,frames_sent,frame_errors,fer,ci95_halfwidth";

/// Counts at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub eb_n0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frames_sent: u64,
    pub frame_errors: u64,
    pub fer: f64,
    /// Half-width of the 95% confidence interval on `ber`.
    pub ci95_halfwidth: f64,
}

impl BerPoint {
    /// Interval `ber ± ci95_halfwidth`, clipped to [0, 1].
    pub fn ci(&self) -> (f64, f64) {
        (
            (self.ber - self.ci95_halfwidth).max(0.0),
            (self.ber + self.ci95_halfwidth).min(1.0),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BerCurve {
    /// Used in error messages; not serialized.
    pub label: String,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn new(label: impl Into<String>, points: Vec<BerPoint>) -> Self {
        BerCurve {
            label: label.into(),
            points,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.eb_n0_db, p.bits_sent, p.bit_errors, p.ber, p.frames_sent, p.frame_errors, p.fer, p.ci95_halfwidth
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn from_csv(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
            Some((_, h)) => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header {CSV_HEADER:?}, got {h:?}"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty file".into(),
                })
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if fields.len() != 8 {
                return Err(err(format!("expected 8 fields, got {}", fields.len())));
            }
            let f = |j: usize| {
                fields[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad number {:?}", fields[j])))
            };
            let u = |j: usize| {
                fields[j]
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| err(format!("bad count {:?}", fields[j])))
            };
            points.push(BerPoint {
                eb_n0_db: f(0)?,
                bits_sent: u(1)?,
                bit_errors: u(2)?,
                ber: f(3)?,
                frames_sent: u(4)?,
                frame_errors: u(5)?,
                fer: f(6)?,
                ci95_halfwidth: f(7)?,
            });
        }
        Ok(BerCurve::new(label, points))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Reads a CSV; the file name becomes the label.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        BerCurve::from_csv(path.display().to_string(), &text).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point() -> impl Strategy<Value = BerPoint> {
        (-20.0..60.0f64, 1u64..1_000_000_000, 0.0..1.0f64, 1u64..100_000, 0.0..1.0f64).prop_map(
            |(snr, bits, frac, frames, ffrac)| {
                let errors = (bits as f64 * frac) as u64;
                let ferr = (frames as f64 * ffrac) as u64;
                BerPoint {
                    eb_n0_db: snr,
                    bits_sent: bits,
                    bit_errors: errors,
                    ber: errors as f64 / bits as f64,
                    frames_sent: frames,
                    frame_errors: ferr,
                    fer: ferr as f64 / frames as f64,
                    ci95_halfwidth: frac * 1e-3,
                }
            },
        )
    }

    proptest! {
        #[test]
        fn csv_round_trip(points in prop::collection::vec(point(), 0..12)) {
            let curve = BerCurve::new("x", points);
            let text = curve.to_csv();
            prop_assert!(!text.contains('\r'));
            prop_assert_eq!(BerCurve::from_csv("x", &text).unwrap(), curve);
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(BerCurve::from_csv("x", "").is_err());
        assert!(BerCurve::from_csv("x", "a,b\n").is_err());
        let bad = format!("{CSV_HEADER}\n1,2,3\n");
        assert!(matches!(BerCurve::from_csv("x", &bad), Err(Error::Parse { line: 2, .. })));
        let bad = format!("{CSV_HEADER}\n1,2,3,x,5,6,7,8\n");
        assert!(BerCurve::from_csv("x", &bad).is_err());
    }
}
