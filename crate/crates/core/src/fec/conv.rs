use crate::error::{Error, Result};
use crate::Bit;

/// Binary rate-1/2 feed-forward convolutional code.
///
/// Generators are written with the most significant bit acting on the
/// current input, so octal 171 taps the input and delays 1, 2, 3 and 6.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    constraint_length: usize,
    generators: [u32; 2],
}

impl ConvCode {
    pub fn new(constraint_length: usize, g0: u32, g1: u32) -> Result<Self> {
        if !(2..=16).contains(&constraint_length) {
            return Err(Error::Parameter(format!(
                "constraint length {constraint_length} outside 2..=16"
            )));
        }
        let top = 1u32 << (constraint_length - 1);
        for g in [g0, g1] {
            if g >> constraint_length != 0 || g & top == 0 || g & 1 == 0 {
                return Err(Error::Parameter(format!(
                    "generator {g:o} must have its first and last of {constraint_length} taps set"
                )));
            }
        }
        Ok(ConvCode {
            constraint_length,
            generators: [g0, g1],
        })
    }

    /// The 802.16 / 802.11a mother code: K = 7, generators (171, 133) octal.
    pub fn standard() -> Self {
        ConvCode::new(7, 0o171, 0o133).expect("standard code is valid")
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    /// Encoder memory m = K − 1.
    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    pub fn generators(&self) -> [u32; 2] {
        self.generators
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory()
    }

    /// Coded length for an `n_in`-bit message under zero-tail termination.
    pub fn encoded_len(&self, n_in: usize) -> usize {
        2 * (n_in + self.memory())
    }

    /// The two output bits for the register formed by `input` and `state`.
    /// `state` holds the previous m inputs, most recent in the top bit.
    #[inline]
    pub(crate) fn outputs(&self, state: usize, input: Bit) -> (Bit, Bit) {
        let reg = ((input as u32) << self.memory()) | state as u32;
        (
            ((reg & self.generators[0]).count_ones() & 1) as Bit,
            ((reg & self.generators[1]).count_ones() & 1) as Bit,
        )
    }

    #[inline]
    pub(crate) fn next_state(&self, state: usize, input: Bit) -> usize {
        ((input as usize) << (self.memory() - 1)) | (state >> 1)
    }
}

impl Default for ConvCode {
    fn default() -> Self {
        Self::standard()
    }
}

/// Encodes `data` followed by m zero tail bits. Output alternates the two
/// generator outputs per input bit, G0 first.
pub fn conv_encode(data: &[Bit], code: &ConvCode) -> Vec<Bit> {
    let mut out = Vec::with_capacity(code.encoded_len(data.len()));
    let mut state = 0usize;
    let tail = std::iter::repeat_n(0, code.memory());
    for u in data.iter().copied().chain(tail) {
        let (x, y) = code.outputs(state, u);
        out.push(x);
        out.push(y);
        state = code.next_state(state, u);
    }
    out
}
