//! Simulation configuration and its flat `key = value` text form.

use super::profile::BurstProfile;
use crate::channel::{ChannelKind, Coherence};
use crate::error::{Error, Result};
use crate::fec::CodeRate;
use crate::mimo::{AntennaConfig, Detector};
use crate::ofdm::CpRatio;
use crate::scrambler::LfsrState;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsiMode {
    /// Receiver knows the true channel.
    Perfect,
    /// Least-squares estimate from pilots.
    LsPilot,
}

impl fmt::Display for CsiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CsiMode::Perfect => "perfect",
            CsiMode::LsPilot => "ls_pilot",
        })
    }
}

impl FromStr for CsiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(CsiMode::Perfect),
            "ls_pilot" => Ok(CsiMode::LsPilot),
            other => Err(Error::Config(format!("unknown CSI mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricMode {
    Hard,
    Soft,
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricMode::Hard => "hard",
            MetricMode::Soft => "soft",
        })
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard" => Ok(MetricMode::Hard),
            "soft" => Ok(MetricMode::Soft),
            other => Err(Error::Config(format!("unknown metric mode {other:?}"))),
        }
    }
}

/// Eb/N0 grid in dB, inclusive of `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrGrid {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self> {
        let g = SnrGrid { start, step, stop };
        g.validate()?;
        Ok(g)
    }

    pub fn single(db: f64) -> Self {
        SnrGrid {
            start: db,
            step: 1.0,
            stop: db,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!(
                "SNR grid needs finite bounds and a positive step, got {self}"
            )));
        }
        if self.stop < self.start {
            return Err(Error::Config(format!("SNR grid {self} is empty")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

impl FromStr for SnrGrid {
    type Err = Error;

    /// `start:step:stop`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("SNR grid must be start:step:stop, got {s:?}")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {t:?} in SNR grid")))
        };
        SnrGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// Everything needed to reproduce one BER sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub profile: BurstProfile,
    pub channel: ChannelKind,
    pub coherence: Coherence,
    /// Zero noise; with `channel = awgn` the channel is the identity.
    pub noiseless: bool,
    pub antennas: AntennaConfig,
    pub nfft: usize,
    pub cp_ratio: CpRatio,
    pub csi: CsiMode,
    pub rs_enabled: bool,
    pub rs_t: usize,
    pub metric: MetricMode,
    /// Skip randomizer, FEC and interleaver (closed-form validation mode).
    pub uncoded: bool,
    pub scrambler_seed: LfsrState,
    pub snr: SnrGrid,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    /// Stop the sweep after the first point whose BER falls below this
    /// value (0 disables).
    pub ber_floor: f64,
    pub symbols_per_frame: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            profile: BurstProfile::Qpsk12,
            channel: ChannelKind::Rayleigh,
            coherence: Coherence::Symbol,
            noiseless: false,
            antennas: AntennaConfig {
                nt: 2,
                nr: 2,
                detector: Detector::Zf,
            },
            nfft: 256,
            cp_ratio: CpRatio::Eighth,
            csi: CsiMode::Perfect,
            rs_enabled: false,
            rs_t: 8,
            metric: MetricMode::Soft,
            uncoded: false,
            scrambler_seed: LfsrState::DEFAULT,
            snr: SnrGrid {
                start: 0.0,
                step: 2.0,
                stop: 20.0,
            },
            min_bit_errors: 100,
            max_bits: 10_000_000,
            ber_floor: 0.0,
            symbols_per_frame: 1,
            seed: 1,
        }
    }
}

/// Every recognized key, in manifest order.
pub const CONFIG_KEYS: [&str; 25] = [
    "profile",
    "channel.type",
    "channel.coherence",
    "channel.noiseless",
    "mimo.nt",
    "mimo.nr",
    "mimo.detector",
    "fec.rate",
    "fec.rs_enabled",
    "fec.rs_t",
    "fec.metric",
    "sim.uncoded",
    "ofdm.nfft",
    "ofdm.cp_ratio",
    "ofdm.csi",
    "scrambler.seed",
    "snr.start",
    "snr.step",
    "snr.stop",
    "sim.min_bit_errors",
    "sim.max_bits",
    "sim.ber_floor",
    "sim.symbols_per_frame",
    "sim.seed",
    "sim.version",
];

/// Bumped whenever a change alters simulated results for a fixed config.
pub const RESULTS_VERSION: u32 = 1;

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl SimConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "profile" => {
                self.profile = value.parse()?;
            }
            "channel.type" => self.channel = value.parse()?,
            "channel.coherence" => self.coherence = value.parse()?,
            "channel.noiseless" => self.noiseless = parse_bool(key, value)?,
            "mimo.nt" => self.antennas.nt = parse(key, value)?,
            "mimo.nr" => self.antennas.nr = parse(key, value)?,
            "mimo.detector" => self.antennas.detector = value.parse()?,
            "fec.rate" => {
                let rate: CodeRate = value.parse()?;
                let modulation = self.profile.modulation();
                self.profile = BurstProfile::ALL
                    .into_iter()
                    .find(|p| p.modulation() == modulation && p.rate() == rate)
                    .ok_or_else(|| {
                        Error::Config(format!("no burst profile pairs {modulation} with rate {rate}"))
                    })?;
            }
            "fec.rs_enabled" => self.rs_enabled = parse_bool(key, value)?,
            "fec.rs_t" => self.rs_t = parse(key, value)?,
            "fec.metric" => self.metric = value.parse()?,
            "sim.uncoded" => self.uncoded = parse_bool(key, value)?,
            "ofdm.nfft" => self.nfft = parse(key, value)?,
            "ofdm.cp_ratio" => self.cp_ratio = value.parse()?,
            "ofdm.csi" => self.csi = value.parse()?,
            "scrambler.seed" => self.scrambler_seed = value.parse()?,
            "snr.start" => self.snr.start = parse(key, value)?,
            "snr.step" => self.snr.step = parse(key, value)?,
            "snr.stop" => self.snr.stop = parse(key, value)?,
            "sim.min_bit_errors" => self.min_bit_errors = parse(key, value)?,
            "sim.max_bits" => self.max_bits = parse(key, value)?,
            "sim.ber_floor" => self.ber_floor = parse(key, value)?,
            "sim.symbols_per_frame" => self.symbols_per_frame = parse(key, value)?,
            "sim.seed" => self.seed = parse(key, value)?,
            "sim.version" => {
                let v: u32 = parse(key, value)?;
                if v != RESULTS_VERSION {
                    return Err(Error::Config(format!(
                        "config was written by results version {v}, this build is {RESULTS_VERSION}"
                    )));
                }
            }
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Reads a key = value text (with `#` comments) on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key, value).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "profile" => self.profile.name(),
            "channel.type" => self.channel.to_string(),
            "channel.coherence" => self.coherence.to_string(),
            "channel.noiseless" => self.noiseless.to_string(),
            "mimo.nt" => self.antennas.nt.to_string(),
            "mimo.nr" => self.antennas.nr.to_string(),
            "mimo.detector" => self.antennas.detector.to_string(),
            "fec.rate" => self.profile.rate().to_string(),
            "fec.rs_enabled" => self.rs_enabled.to_string(),
            "fec.rs_t" => self.rs_t.to_string(),
            "fec.metric" => self.metric.to_string(),
            "sim.uncoded" => self.uncoded.to_string(),
            "ofdm.nfft" => self.nfft.to_string(),
            "ofdm.cp_ratio" => self.cp_ratio.to_string(),
            "ofdm.csi" => self.csi.to_string(),
            "scrambler.seed" => self.scrambler_seed.to_string(),
            "snr.start" => self.snr.start.to_string(),
            "snr.step" => self.snr.step.to_string(),
            "snr.stop" => self.snr.stop.to_string(),
            "sim.min_bit_errors" => self.min_bit_errors.to_string(),
            "sim.max_bits" => self.max_bits.to_string(),
            "sim.ber_floor" => self.ber_floor.to_string(),
            "sim.symbols_per_frame" => self.symbols_per_frame.to_string(),
            "sim.seed" => self.seed.to_string(),
            "sim.version" => RESULTS_VERSION.to_string(),
            _ => return None,
        })
    }

    /// Every key with its resolved value, one `key = value` per line.
    pub fn to_text(&self) -> String {
        CONFIG_KEYS
            .iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("known key")))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.antennas.validate()?;
        self.snr.validate()?;
        if self.min_bit_errors < 1 {
            return Err(Error::Config("sim.min_bit_errors must be at least 1".into()));
        }
        if self.symbols_per_frame < 1 {
            return Err(Error::Config("sim.symbols_per_frame must be at least 1".into()));
        }
        if !(self.ber_floor >= 0.0 && self.ber_floor < 1.0) {
            return Err(Error::Config(format!("sim.ber_floor {} outside [0, 1)", self.ber_floor)));
        }
        if self.rs_enabled && self.uncoded {
            return Err(Error::Config("fec.rs_enabled conflicts with sim.uncoded".into()));
        }
        if self.antennas.detector == Detector::Ml {
            let candidates = self
                .profile
                .modulation()
                .order()
                .checked_pow(self.antennas.nt as u32)
                .unwrap_or(usize::MAX);
            if self.antennas.nt > 2 || candidates > crate::mimo::ML_MAX_CANDIDATES {
                return Err(Error::Config(format!(
                    "ML detection of {} over {} antennas exceeds the enumeration bound",
                    self.profile.modulation(),
                    self.antennas.nt
                )));
            }
        }
        // Sizing: the layout owns the remaining checks.
        let layout = super::frame::FrameLayout::new(self)?;
        if self.max_bits < layout.info_bits_per_frame() as u64 {
            return Err(Error::Config(format!(
                "sim.max_bits = {} is less than one frame ({} bits)",
                self.max_bits,
                layout.info_bits_per_frame()
            )));
        }
        Ok(())
    }
}
