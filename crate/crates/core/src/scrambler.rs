//! Data randomizer: a 15-stage PRBS generator with feedback polynomial
//! 1 + x^14 + x^15, XORed onto the data.

use crate::error::{Error, Result};
use crate::Bit;
use std::fmt;
use std::str::FromStr;

const STAGES: u32 = 15;
const MASK: u16 = (1 << STAGES) - 1;

/// State of the 15-stage shift register.
///
/// Cell 1 (the input side) is held in bit 14 and cell 15 in bit 0, so the
/// textual form reads cell 1 first. The all-zero state is unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LfsrState(u16);

impl LfsrState {
    /// Downlink initialization vector `100101010000000`.
    pub const DEFAULT: LfsrState = LfsrState(0b100_1010_1000_0000);

    pub fn new(register: u16) -> Result<Self> {
        let r = register & MASK;
        if r == 0 || r != register {
            return Err(Error::Parameter(format!(
                "scrambler register must be a non-zero 15-bit value, got {register:#x}"
            )));
        }
        Ok(LfsrState(r))
    }

    pub fn register(self) -> u16 {
        self.0
    }

    /// Output bit and successor state. The output is cell 14 XOR cell 15 and
    /// is shifted back in at cell 1.
    #[inline]
    pub fn next(self) -> (Bit, LfsrState) {
        let bit = ((self.0 >> 1) ^ self.0) & 1;
        (bit as Bit, LfsrState((self.0 >> 1) | (bit << (STAGES - 1))))
    }
}

impl Default for LfsrState {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for LfsrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..STAGES).rev() {
            write!(f, "{}", (self.0 >> i) & 1)?;
        }
        Ok(())
    }
}

impl FromStr for LfsrState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != STAGES as usize {
            return Err(Error::Parameter(format!(
                "scrambler seed must be 15 binary digits, got {s:?}"
            )));
        }
        let mut reg = 0u16;
        for c in s.chars() {
            reg = (reg << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(Error::Parameter(format!(
                            "scrambler seed must be binary, got {s:?}"
                        )))
                    }
                };
        }
        LfsrState::new(reg)
    }
}

/// Steps the generator once.
pub fn prbs_next(state: LfsrState) -> (Bit, LfsrState) {
    state.next()
}

/// XORs the PRBS started at `seed` onto `data`. Applying it twice with the
/// same seed restores the input, so this is also the derandomizer.
pub fn scramble(data: &[Bit], seed: LfsrState) -> Vec<Bit> {
    let mut out = data.to_vec();
    scramble_in_place(&mut out, seed);
    out
}

pub fn scramble_in_place(data: &mut [Bit], seed: LfsrState) {
    let mut state = seed;
    for b in data.iter_mut() {
        let (p, next) = state.next();
        *b ^= p;
        state = next;
    }
}
