//! SNR gap between two BER curves at a target BER.

use super::curve::BerCurve;
use crate::error::{Error, Result};

/// Eb/N0 at which `curve` crosses `target`, by linear interpolation of
/// log10(BER) between the first bracketing pair of points.
pub fn snr_at_ber(curve: &BerCurve, target: f64) -> Result<f64> {
    let unbracketed = || Error::Unbracketed {
        curve: curve.label.clone(),
        target,
    };
    if !(target > 0.0 && target < 1.0) {
        return Err(unbracketed());
    }
    for pair in curve.points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.ber == target {
            return Ok(a.eb_n0_db);
        }
        if a.ber > target && b.ber <= target {
            if b.ber == target {
                return Ok(b.eb_n0_db);
            }
            if b.ber <= 0.0 {
                // Zero-error point: no finite log10, so the crossing is
                // not located.
                return Err(unbracketed());
            }
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            return Ok(a.eb_n0_db + (lt - la) / (lb - la) * (b.eb_n0_db - a.eb_n0_db));
        }
    }
    match curve.points.last() {
        Some(p) if p.ber == target => Ok(p.eb_n0_db),
        _ => Err(unbracketed()),
    }
}

/// snr_a − snr_b at `target`; positive when curve b reaches the target at
/// lower Eb/N0.
pub fn snr_gain(curve_a: &BerCurve, curve_b: &BerCurve, target: f64) -> Result<f64> {
    Ok(snr_at_ber(curve_a, target)? - snr_at_ber(curve_b, target)?)
}
