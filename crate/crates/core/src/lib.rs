//! Baseband simulator for an 802.16e-style OFDM physical layer with MIMO
//! spatial multiplexing.
//!
//! The transmit chain is randomizer → (optional Reed–Solomon) → K = 7
//! convolutional code with puncturing → block interleaver → Gray QAM mapper
//! → spatial multiplexer → OFDM modulator. The receiver runs the inverse
//! chain with ZF, MMSE or exhaustive ML detection and a Viterbi decoder.
//! [`sim`] composes the chain and runs seeded, parallel BER sweeps.

pub mod channel;
pub mod error;
pub mod fec;
pub mod interleaver;
pub mod mapping;
pub mod mimo;
pub mod ofdm;
pub mod rng;
pub mod scrambler;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A single binary digit, stored as 0 or 1.
pub type Bit = u8;
