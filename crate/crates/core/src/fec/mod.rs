//! Forward error correction: the K = 7 convolutional mother code, puncturing,
//! soft/hard Viterbi decoding and an outer Reed–Solomon code over GF(2^8).

mod conv;
pub mod gf256;
mod puncture;
mod rs;
mod viterbi;

pub use conv::{conv_encode, ConvCode};
pub use puncture::{depuncture, puncture, CodeRate, PuncturePattern};
pub use rs::{rs_decode, rs_encode, RsCode, RsDecodeError};
pub use viterbi::{hard_metrics, viterbi_decode, ViterbiDecoder};

/// Per-coded-bit soft values. Positive favors bit 0; 0.0 carries no
/// information (erasure).
pub type MetricBlock = Vec<f64>;
