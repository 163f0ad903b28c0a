use crate::error::{Error, Result};
use crate::fec::CodeRate;
use crate::mapping::Modulation;
use std::fmt;
use std::str::FromStr;

/// Modulation and convolutional code rate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BurstProfile {
    Bpsk12,
    Qpsk12,
    Qpsk34,
    Qam16_12,
    Qam16_34,
    Qam64_23,
    Qam64_34,
}

impl BurstProfile {
    /// All profiles in figure order (a)–(g).
    pub const ALL: [BurstProfile; 7] = [
        BurstProfile::Bpsk12,
        BurstProfile::Qpsk12,
        BurstProfile::Qpsk34,
        BurstProfile::Qam16_12,
        BurstProfile::Qam16_34,
        BurstProfile::Qam64_23,
        BurstProfile::Qam64_34,
    ];

    pub fn modulation(self) -> Modulation {
        match self {
            BurstProfile::Bpsk12 => Modulation::Bpsk,
            BurstProfile::Qpsk12 | BurstProfile::Qpsk34 => Modulation::Qpsk,
            BurstProfile::Qam16_12 | BurstProfile::Qam16_34 => Modulation::Qam16,
            BurstProfile::Qam64_23 | BurstProfile::Qam64_34 => Modulation::Qam64,
        }
    }

    pub fn rate(self) -> CodeRate {
        match self {
            BurstProfile::Bpsk12 | BurstProfile::Qpsk12 | BurstProfile::Qam16_12 => CodeRate::Half,
            BurstProfile::Qam64_23 => CodeRate::TwoThirds,
            BurstProfile::Qpsk34 | BurstProfile::Qam16_34 | BurstProfile::Qam64_34 => {
                CodeRate::ThreeQuarters
            }
        }
    }

    pub fn name(self) -> String {
        format!("{}-{}", self.modulation(), self.rate())
    }

    /// Name usable in file paths (`/` replaced by `_`).
    pub fn file_stem(self) -> String {
        self.name().replace('/', "_")
    }

    /// Published SISO → 2×2 spatial multiplexing SNR improvement in dB,
    /// from the summary table.
    pub fn claimed_gain_table_db(self) -> Option<f64> {
        Some(match self {
            BurstProfile::Bpsk12 => 2.0,
            BurstProfile::Qpsk12 => 3.0,
            BurstProfile::Qpsk34 => 2.0,
            BurstProfile::Qam16_12 => 5.0,
            BurstProfile::Qam16_34 => 2.0,
            BurstProfile::Qam64_23 => 3.0,
            BurstProfile::Qam64_34 => 2.0,
        })
    }

    /// The same improvement as stated in the per-figure captions; differs
    /// from the table for QPSK 1/2.
    pub fn claimed_gain_text_db(self) -> Option<f64> {
        Some(match self {
            BurstProfile::Qpsk12 => 2.0,
            other => return other.claimed_gain_table_db(),
        })
    }
}

impl fmt::Display for BurstProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for BurstProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('_', "/");
        BurstProfile::ALL
            .into_iter()
            .find(|p| p.name() == wanted)
            .ok_or_else(|| Error::Config(format!("unknown burst profile {s:?}")))
    }
}
