//! Two-permutation block interleaver over one OFDM symbol of coded bits.
//!
//! The first permutation writes row-wise into a 16-column matrix and reads
//! column-wise, pushing adjacent coded bits onto non-adjacent subcarriers.
//! The second rotates bits within each constellation symbol so they
//! alternate between more and less reliable label positions.

use crate::error::{sizing, Error, Result};

const COLUMNS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaverParams {
    ncbps: usize,
    ncpc: usize,
    /// forward[k] = output position of input bit k
    forward: Vec<usize>,
}

impl InterleaverParams {
    /// `ncbps` coded bits per OFDM symbol, `ncpc` coded bits per subcarrier.
    pub fn new(ncbps: usize, ncpc: usize) -> Result<Self> {
        if ncbps == 0 || !ncbps.is_multiple_of(COLUMNS) {
            return Err(Error::Parameter(format!(
                "ncbps = {ncbps} must be a positive multiple of {COLUMNS}"
            )));
        }
        if ncpc == 0 {
            return Err(Error::Parameter("ncpc must be positive".into()));
        }
        let s = (ncpc / 2).max(1);
        let forward = (0..ncbps)
            .map(|k| {
                let m = (ncbps / COLUMNS) * (k % COLUMNS) + k / COLUMNS;
                s * (m / s) + (m + ncbps - (COLUMNS * m) / ncbps) % s
            })
            .collect();
        Ok(InterleaverParams {
            ncbps,
            ncpc,
            forward,
        })
    }

    pub fn ncbps(&self) -> usize {
        self.ncbps
    }

    pub fn ncpc(&self) -> usize {
        self.ncpc
    }

    pub fn columns(&self) -> usize {
        COLUMNS
    }

    /// Output position of input index `k`.
    pub fn index_map(&self) -> &[usize] {
        &self.forward
    }

    fn check<T>(&self, bits: &[T]) -> Result<()> {
        if bits.len() != self.ncbps {
            return Err(sizing(format!(
                "interleaver block has {} entries, expected {}",
                bits.len(),
                self.ncbps
            )));
        }
        Ok(())
    }
}

/// `output[j_k] = input[k]`. Generic so soft metrics go through unchanged.
pub fn interleave<T: Copy + Default>(bits: &[T], params: &InterleaverParams) -> Result<Vec<T>> {
    params.check(bits)?;
    let mut out = vec![T::default(); bits.len()];
    for (&v, &j) in bits.iter().zip(&params.forward) {
        out[j] = v;
    }
    Ok(out)
}

pub fn deinterleave<T: Copy>(bits: &[T], params: &InterleaverParams) -> Result<Vec<T>> {
    params.check(bits)?;
    Ok(params.forward.iter().map(|&j| bits[j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ORDERS: [usize; 4] = [1, 2, 4, 6];

    #[test]
    fn bpsk_first_permutation_by_hand() {
        let p = InterleaverParams::new(192, 1).unwrap();
        // m_k = 12·(k mod 16) + floor(k/16), s = 1
        assert_eq!(p.index_map()[0], 0);
        assert_eq!(p.index_map()[1], 12);
        assert_eq!(p.index_map()[16], 1);
        assert_eq!(p.index_map()[191], 191);
    }

    #[test]
    fn bijective_for_every_order() {
        for ncpc in ORDERS {
            let p = InterleaverParams::new(192 * ncpc, ncpc).unwrap();
            let mut hits = vec![0u32; p.ncbps()];
            for &j in p.index_map() {
                hits[j] += 1;
            }
            assert!(hits.iter().all(|&h| h == 1), "ncpc {ncpc}");
        }
    }

    #[test]
    fn adjacent_bits_separated_in_first_step() {
        for ncpc in ORDERS {
            let ncbps = 192 * ncpc;
            let first = |k: usize| (ncbps / 16) * (k % 16) + k / 16;
            for k in 0..ncbps - 1 {
                if (k + 1) % 16 != 0 {
                    assert!(first(k + 1) - first(k) >= ncbps / 16);
                }
            }
        }
        let p = InterleaverParams::new(192, 1).unwrap();
        for k in 0..191 {
            let d = p.index_map()[k].abs_diff(p.index_map()[k + 1]);
            assert!(d >= 12, "k {k}");
        }
    }

    #[test]
    fn constant_block_is_fixed_point() {
        let p = InterleaverParams::new(768, 4).unwrap();
        let ones = vec![1u8; 768];
        assert_eq!(interleave(&ones, &p).unwrap(), ones);
    }

    #[test]
    fn sizing_errors() {
        let p = InterleaverParams::new(384, 2).unwrap();
        assert!(matches!(interleave(&[0u8; 383], &p), Err(Error::Sizing(_))));
        assert!(matches!(deinterleave(&[0.0; 385], &p), Err(Error::Sizing(_))));
        assert!(InterleaverParams::new(100, 1).is_err());
    }

    proptest! {
        #[test]
        fn inverse_both_ways(order in 0usize..4, seed in proptest::collection::vec(-1e6f64..1e6, 1152)) {
            let ncpc = ORDERS[order];
            let p = InterleaverParams::new(192 * ncpc, ncpc).unwrap();
            let x = &seed[..p.ncbps()];
            prop_assert_eq!(&deinterleave(&interleave(x, &p).unwrap(), &p).unwrap()[..], x);
            prop_assert_eq!(&interleave(&deinterleave(x, &p).unwrap(), &p).unwrap()[..], x);
        }
    }
}
