use super::conv::ConvCode;
use crate::error::{sizing, Result};
use crate::Bit;

/// Maps hard bits to metrics: 0 → +1, 1 → −1.
pub fn hard_metrics(bits: &[Bit]) -> Vec<f64> {
    bits.iter().map(|&b| 1.0 - 2.0 * b as f64).collect()
}

/// Maximum-likelihood sequence decoder for a zero-tail terminated
/// [`ConvCode`]. Path metric is the correlation sum of `metric * (1 - 2c)`
/// over coded bits c, maximized; full-block traceback.
#[derive(Debug, Clone)]
pub struct ViterbiDecoder {
    code: ConvCode,
    /// Output pair sign per (state, input): +1 for coded 0, −1 for coded 1.
    signs: Vec<[(f64, f64); 2]>,
}

impl ViterbiDecoder {
    pub fn new(code: &ConvCode) -> Self {
        let signs = (0..code.num_states())
            .map(|s| {
                let sign = |u: Bit| {
                    let (x, y) = code.outputs(s, u);
                    (1.0 - 2.0 * x as f64, 1.0 - 2.0 * y as f64)
                };
                [sign(0), sign(1)]
            })
            .collect();
        ViterbiDecoder {
            code: code.clone(),
            signs,
        }
    }

    pub fn code(&self) -> &ConvCode {
        &self.code
    }

    pub fn decode(&self, metrics: &[f64]) -> Result<Vec<Bit>> {
        let m = self.code.memory();
        if !metrics.len().is_multiple_of(2) || metrics.len() < 2 * m {
            return Err(sizing(format!(
                "{} metrics is not 2·(L + {m}) for any message length L",
                metrics.len()
            )));
        }
        let steps = metrics.len() / 2;
        let n_states = self.code.num_states();
        let half = n_states / 2;

        let mut pm = vec![f64::NEG_INFINITY; n_states];
        pm[0] = 0.0;
        let mut next = vec![f64::NEG_INFINITY; n_states];
        // decisions[t * n_states + s]: low bit of the surviving predecessor.
        let mut decisions = vec![0u8; steps * n_states];

        for (t, pair) in metrics.chunks_exact(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let row = &mut decisions[t * n_states..(t + 1) * n_states];
            for (s_next, (slot, dec)) in next.iter_mut().zip(row.iter_mut()).enumerate() {
                let u = (s_next >= half) as usize;
                let p0 = (s_next & (half - 1)) << 1;
                let p1 = p0 | 1;
                let (x0, y0) = self.signs[p0][u];
                let (x1, y1) = self.signs[p1][u];
                let c0 = pm[p0] + x0 * a + y0 * b;
                let c1 = pm[p1] + x1 * a + y1 * b;
                // Ties keep the lower-indexed predecessor.
                if c1 > c0 {
                    *slot = c1;
                    *dec = 1;
                } else {
                    *slot = c0;
                    *dec = 0;
                }
            }
            std::mem::swap(&mut pm, &mut next);
        }

        let mut bits = vec![0u8; steps];
        let mut s = 0usize;
        for t in (0..steps).rev() {
            bits[t] = (s >= half) as Bit;
            s = ((s & (half - 1)) << 1) | decisions[t * n_states + s] as usize;
        }
        bits.truncate(steps - m);
        Ok(bits)
    }
}

/// One-shot decode; builds the trellis tables for `code` on every call.
pub fn viterbi_decode(metrics: &[f64], code: &ConvCode) -> Result<Vec<Bit>> {
    ViterbiDecoder::new(code).decode(metrics)
}
