//! End-to-end link simulation: configuration, frame pipeline, BER sweeps
//! and result files.

pub mod config;
pub mod curve;
pub mod frame;
pub mod gain;
pub mod profile;
pub mod report;
pub mod sweep;

pub use config::{CsiMode, MetricMode, SimConfig, SnrGrid};
pub use curve::{BerCurve, BerPoint};
pub use frame::{run_frame, FrameLayout, FrameOutcome, Transceiver};
pub use gain::{snr_at_ber, snr_gain};
pub use profile::BurstProfile;
pub use report::{report, sweep_all, GainRow, SweepAllOptions};
pub use sweep::{run_ber_sweep, Parallelism};
