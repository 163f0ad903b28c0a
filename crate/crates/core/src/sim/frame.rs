//! One frame through the full transmit, channel and receive chain.

use super::config::{CsiMode, MetricMode, SimConfig};
use crate::channel::{
    identity_matrix, mimo_apply, rayleigh_matrix, ChannelKind, ChannelMatrix, ChannelRealization,
    Coherence, SnrSpec,
};
use crate::error::{sizing, Error, Result};
use crate::fec::{
    conv_encode, depuncture, puncture, ConvCode, PuncturePattern, RsCode, ViterbiDecoder,
};
use crate::interleaver::{deinterleave, interleave, InterleaverParams};
use crate::mapping::{map_bits, Constellation};
use crate::mimo::{sm_multiplex, Detector, LinearDetector, MlDetector};
use crate::ofdm::{ls_channel_estimate, OfdmParams, DATA_CARRIERS, PILOT_CARRIERS};
use crate::rng::{Stage, StreamKey};
use crate::scrambler::scramble;
use crate::{Bit, Complex64};
use rand::Rng;

/// Bit and symbol counts for one frame. Every stage sizes its buffers from
/// here.
///
/// A frame fills `symbols_per_frame` OFDM symbols on each of the `nt`
/// transmit antennas. The coded block is one zero-tailed convolutional
/// codeword, optionally carrying one shortened RS codeword, padded with
/// zeros up to the encoder input length.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLayout {
    bits_per_symbol: usize,
    nt: usize,
    ofdm_symbols: usize,
    coded_bits: usize,
    encoder_input_bits: usize,
    tail_bits: usize,
    info_bits: usize,
    rs: Option<RsCode>,
    uncoded: bool,
}

impl FrameLayout {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let modulation = config.profile.modulation();
        let bits_per_symbol = modulation.bits_per_symbol();
        let nt = config.antennas.nt;
        let ofdm_symbols = config.symbols_per_frame;
        if nt == 0 || ofdm_symbols == 0 {
            return Err(Error::Config("frame needs at least one antenna and one OFDM symbol".into()));
        }
        let coded_bits = DATA_CARRIERS * bits_per_symbol * nt * ofdm_symbols;
        if config.uncoded {
            return Ok(FrameLayout {
                bits_per_symbol,
                nt,
                ofdm_symbols,
                coded_bits,
                encoder_input_bits: coded_bits,
                tail_bits: 0,
                info_bits: coded_bits,
                rs: None,
                uncoded: true,
            });
        }
        let (p, q) = config.profile.rate().ratio();
        if !(coded_bits * p).is_multiple_of(q) {
            return Err(sizing(format!("{coded_bits} coded bits is not a whole number of rate {p}/{q} spans")));
        }
        let encoder_input_bits = coded_bits * p / q;
        let tail_bits = ConvCode::standard().memory();
        let message_bits = encoder_input_bits - tail_bits;
        let (rs, info_bits) = if config.rs_enabled {
            let n = (message_bits / 8).min(255);
            let t = config.rs_t;
            if t == 0 || n <= 2 * t {
                return Err(Error::Config(format!(
                    "RS with t = {t} does not fit a {n}-byte codeword per frame"
                )));
            }
            let code = RsCode::shortened(n, t).map_err(|e| Error::Config(e.to_string()))?;
            let info = code.k() * 8;
            (Some(code), info)
        } else {
            (None, message_bits)
        };
        Ok(FrameLayout {
            bits_per_symbol,
            nt,
            ofdm_symbols,
            coded_bits,
            encoder_input_bits,
            tail_bits,
            info_bits,
            rs,
            uncoded: false,
        })
    }

    /// Information bits carried by one frame.
    pub fn info_bits_per_frame(&self) -> usize {
        self.info_bits
    }

    /// Coded bits after puncturing, i.e. bits handed to the mapper.
    pub fn coded_bits_per_frame(&self) -> usize {
        self.coded_bits
    }

    /// Convolutional encoder input length, tail included.
    pub fn encoder_input_bits(&self) -> usize {
        self.encoder_input_bits
    }

    pub fn tail_bits(&self) -> usize {
        self.tail_bits
    }

    /// Bits of the RS codeword (or of the scrambled message without RS).
    pub fn outer_codeword_bits(&self) -> usize {
        match &self.rs {
            Some(rs) => rs.n() * 8,
            None => self.info_bits,
        }
    }

    /// Zero bits appended after the outer codeword.
    pub fn pad_bits(&self) -> usize {
        self.encoder_input_bits - self.tail_bits - self.outer_codeword_bits()
    }

    /// Information bits over coded bits, including tail, padding and RS
    /// parity.
    pub fn code_rate_total(&self) -> f64 {
        self.info_bits as f64 / self.coded_bits as f64
    }

    pub fn rs_code(&self) -> Option<&RsCode> {
        self.rs.as_ref()
    }

    pub fn is_uncoded(&self) -> bool {
        self.uncoded
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn ofdm_symbols(&self) -> usize {
        self.ofdm_symbols
    }

    /// Coded bits per OFDM symbol per antenna (one interleaver block).
    pub fn interleaver_block(&self) -> usize {
        DATA_CARRIERS * self.bits_per_symbol
    }

    pub fn interleaver_blocks(&self) -> usize {
        self.coded_bits / self.interleaver_block()
    }

    /// Constellation symbols per frame across all antennas.
    pub fn data_symbols(&self) -> usize {
        self.coded_bits / self.bits_per_symbol
    }

    pub fn nt(&self) -> usize {
        self.nt
    }
}

/// Result of one simulated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub tx_bits: Vec<Bit>,
    pub rx_bits: Vec<Bit>,
    /// One entry per channel draw, in transmission order.
    pub channel_log: Vec<ChannelRealization>,
    /// The receiver could not invert the channel; `rx_bits` are all zero.
    pub erased: bool,
}

impl FrameOutcome {
    pub fn bit_errors(&self) -> usize {
        self.tx_bits
            .iter()
            .zip(&self.rx_bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn is_frame_error(&self) -> bool {
        self.erased || self.tx_bits != self.rx_bits
    }
}

/// Precomputed transmitter and receiver for one configuration.
#[derive(Debug, Clone)]
pub struct Transceiver {
    config: SimConfig,
    layout: FrameLayout,
    ofdm: OfdmParams,
    code: ConvCode,
    viterbi: ViterbiDecoder,
    pattern: PuncturePattern,
    interleaver: InterleaverParams,
    constellation: Constellation,
    /// Pilot values per transmit antenna.
    tx_pilots: Vec<Vec<Complex64>>,
}

enum Receiver {
    Linear(LinearDetector),
    Ml(MlDetector),
}

impl Transceiver {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.antennas.validate()?;
        let layout = FrameLayout::new(config)?;
        let ofdm = OfdmParams::new(config.nfft, config.cp_ratio).map_err(|e| Error::Config(e.to_string()))?;
        let code = ConvCode::standard();
        let bps = layout.bits_per_symbol();
        let nt = config.antennas.nt;
        let tx_pilots = (0..nt)
            .map(|a| {
                (0..PILOT_CARRIERS)
                    .map(|p| {
                        if p % nt == a {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Transceiver {
            config: config.clone(),
            viterbi: ViterbiDecoder::new(&code),
            code,
            pattern: PuncturePattern::for_rate(config.profile.rate()),
            interleaver: InterleaverParams::new(layout.interleaver_block(), bps)?,
            constellation: config.profile.modulation().constellation(),
            layout,
            ofdm,
            tx_pilots,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn snr_spec(&self, eb_n0_db: f64) -> SnrSpec {
        SnrSpec {
            eb_n0_db,
            bits_per_symbol: self.layout.bits_per_symbol(),
            code_rate_total: self.layout.code_rate_total(),
            nt: self.config.antennas.nt,
            nfft: self.ofdm.nfft(),
            cp_length: self.ofdm.cp_length(),
        }
    }

    /// Information bits to mapper input bits.
    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        let layout = &self.layout;
        if info.len() != layout.info_bits {
            return Err(sizing(format!(
                "frame carries {} information bits, got {}",
                layout.info_bits,
                info.len()
            )));
        }
        if layout.uncoded {
            return Ok(info.to_vec());
        }
        let scrambled = scramble(info, self.config.scrambler_seed);
        let mut message = match &layout.rs {
            Some(rs) => unpack(&rs.encode(&pack(&scrambled))?),
            None => scrambled,
        };
        message.resize(layout.encoder_input_bits - layout.tail_bits, 0);
        let punctured = puncture(&conv_encode(&message, &self.code), &self.pattern)?;
        debug_assert_eq!(punctured.len(), layout.coded_bits);
        let mut out = Vec::with_capacity(layout.coded_bits);
        for block in punctured.chunks_exact(layout.interleaver_block()) {
            out.extend(interleave(block, &self.interleaver)?);
        }
        Ok(out)
    }

    /// Per-bit metrics (positive favors 0) to recovered information bits.
    pub fn decode(&self, metrics: &[f64]) -> Result<Vec<Bit>> {
        let layout = &self.layout;
        if metrics.len() != layout.coded_bits {
            return Err(sizing(format!(
                "frame has {} coded bits, got {} metrics",
                layout.coded_bits,
                metrics.len()
            )));
        }
        if layout.uncoded {
            return Ok(metrics.iter().map(|&m| (m <= 0.0) as Bit).collect());
        }
        let mut deinterleaved = Vec::with_capacity(metrics.len());
        for block in metrics.chunks_exact(layout.interleaver_block()) {
            deinterleaved.extend(deinterleave(block, &self.interleaver)?);
        }
        let decoded = self.viterbi.decode(&depuncture(&deinterleaved, &self.pattern)?)?;
        let outer = &decoded[..layout.outer_codeword_bits()];
        let scrambled = match &layout.rs {
            Some(rs) => {
                let word = pack(outer);
                let msg = match rs.decode(&word) {
                    Ok((msg, _)) => msg,
                    Err(_) => word[..rs.k()].to_vec(),
                };
                unpack(&msg)
            }
            None => outer.to_vec(),
        };
        Ok(scramble(&scrambled, self.config.scrambler_seed))
    }

    /// Runs trial `trial_index` at Eb/N0 = `eb_n0_db`; `snr_index` keys the
    /// random streams.
    pub fn run_frame(&self, eb_n0_db: f64, snr_index: usize, trial_index: u64) -> Result<FrameOutcome> {
        let cfg = &self.config;
        let layout = &self.layout;
        let (nt, nr) = (cfg.antennas.nt, cfg.antennas.nr);
        let key = |stage| StreamKey::new(cfg.seed, snr_index as u64, trial_index, stage).rng();

        let mut source = key(Stage::Source);
        let tx_bits: Vec<Bit> = (0..layout.info_bits).map(|_| source.random::<bool>() as Bit).collect();
        let symbols = map_bits(&self.encode(&tx_bits)?, &self.constellation)?;
        let streams = sm_multiplex(&symbols, nt)?;

        let snr = self.snr_spec(eb_n0_db);
        let (sample_var, detect_var, reg_var) = if cfg.noiseless {
            (0.0, 1.0, 0.0)
        } else {
            (snr.sample_noise_var(), snr.bin_noise_var(), snr.bin_noise_var())
        };

        let mut fading = key(Stage::Fading);
        let mut noise = key(Stage::Noise);
        let mut channel_log: Vec<ChannelRealization> = Vec::new();
        let mut metrics = vec![0.0; layout.coded_bits];
        let mut erased = false;
        let stride = nt * layout.bits_per_symbol;

        for s in 0..layout.ofdm_symbols {
            if s == 0 || cfg.coherence == Coherence::Symbol {
                let h = match cfg.channel {
                    ChannelKind::Awgn => identity_matrix(nr, nt),
                    ChannelKind::Rayleigh => rayleigh_matrix(nr, nt, &mut fading),
                };
                channel_log.push(ChannelRealization {
                    h,
                    noise_var: sample_var,
                    coherence: match cfg.coherence {
                        Coherence::Symbol => 1,
                        Coherence::Frame => layout.ofdm_symbols,
                    },
                });
            }
            let h = &channel_log.last().expect("drawn above").h;

            let time: Vec<Vec<Complex64>> = streams
                .iter()
                .zip(&self.tx_pilots)
                .map(|(stream, pilots)| {
                    let data = &stream[s * DATA_CARRIERS..(s + 1) * DATA_CARRIERS];
                    self.ofdm.modulate(&self.ofdm.assemble_with_pilots(data, pilots)?)
                })
                .collect::<Result<_>>()?;
            let received = mimo_apply(&time, h, sample_var, &mut noise)?;
            if erased {
                continue;
            }

            let mut data = Vec::with_capacity(nr);
            let mut pilots = Vec::with_capacity(nr);
            for samples in &received {
                let bins = self.ofdm.demodulate(samples)?;
                data.push(self.ofdm.disassemble(&bins)?);
                pilots.push(self.ofdm.pilots(&bins)?);
            }

            let block = &mut metrics[s * DATA_CARRIERS * stride..(s + 1) * DATA_CARRIERS * stride];
            let result = match cfg.csi {
                CsiMode::Perfect => self.receiver(h, reg_var).and_then(|rx| {
                    for (k, out) in block.chunks_exact_mut(stride).enumerate() {
                        let y: Vec<Complex64> = data.iter().map(|d| d[k]).collect();
                        self.detect_into(&rx, &y, detect_var, out)?;
                    }
                    Ok(())
                }),
                CsiMode::LsPilot => {
                    let estimates = (0..nr)
                        .flat_map(|r| (0..nt).map(move |a| (r, a)))
                        .map(|(r, a)| ls_channel_estimate(&pilots[r], &self.tx_pilots[a], &self.ofdm))
                        .collect::<Result<Vec<_>>>()?;
                    block
                        .chunks_exact_mut(stride)
                        .enumerate()
                        .try_for_each(|(k, out)| {
                            let hk = ChannelMatrix::from_fn(nr, nt, |r, a| estimates[r * nt + a][k]);
                            let rx = self.receiver(&hk, reg_var)?;
                            let y: Vec<Complex64> = data.iter().map(|d| d[k]).collect();
                            self.detect_into(&rx, &y, detect_var, out)
                        })
                }
            };
            match result {
                Ok(()) => {}
                Err(Error::SingularChannel(_)) => erased = true,
                Err(e) => return Err(e),
            }
        }

        let rx_bits = if erased {
            vec![0; layout.info_bits]
        } else {
            self.decode(&metrics)?
        };
        Ok(FrameOutcome {
            tx_bits,
            rx_bits,
            channel_log,
            erased,
        })
    }

    fn receiver(&self, h: &ChannelMatrix, reg_var: f64) -> Result<Receiver> {
        let nt = self.config.antennas.nt;
        Ok(match self.config.antennas.detector {
            Detector::Zf => Receiver::Linear(LinearDetector::zf(h)?),
            Detector::Mmse => Receiver::Linear(LinearDetector::mmse(h, nt as f64 * reg_var)?),
            Detector::Ml => {
                let scale = Complex64::new(1.0 / (nt as f64).sqrt(), 0.0);
                Receiver::Ml(MlDetector::new(&h.map(|v| v * scale), &self.constellation)?)
            }
        })
    }

    /// Writes `nt · bits_per_symbol` metrics for one subcarrier.
    fn detect_into(&self, rx: &Receiver, y: &[Complex64], noise_var: f64, out: &mut [f64]) -> Result<()> {
        let hard = self.layout.uncoded || self.config.metric == MetricMode::Hard;
        let c = &self.constellation;
        let bps = c.bits_per_symbol();
        let mut buf = Vec::with_capacity(out.len());
        match rx {
            Receiver::Linear(det) => {
                let nt = self.config.antennas.nt as f64;
                let x = det.apply(y)?;
                for (i, xi) in x.iter().enumerate() {
                    let g = det.stream_gain(i);
                    let z = xi * nt.sqrt() / g;
                    if hard {
                        push_hard(c.nearest(z), bps, &mut buf);
                    } else {
                        let v = det.stream_distortion(i, 1.0 / nt, noise_var);
                        c.llrs_into(z, nt * v / g.norm_sqr(), &mut buf);
                    }
                }
            }
            Receiver::Ml(det) => {
                if hard {
                    for &label in &det.detect(y)?.labels {
                        push_hard(label, bps, &mut buf);
                    }
                } else {
                    det.llrs_into(y, noise_var, &mut buf)?;
                }
            }
        }
        out.copy_from_slice(&buf);
        Ok(())
    }
}

fn push_hard(label: usize, bps: usize, out: &mut Vec<f64>) {
    for j in (0..bps).rev() {
        out.push(if (label >> j) & 1 == 0 { 1.0 } else { -1.0 });
    }
}

/// MSB-first bit packing; `bits.len()` must be a multiple of 8.
fn pack(bits: &[Bit]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|b| b.iter().fold(0u8, |acc, &x| (acc << 1) | x))
        .collect()
}

fn unpack(bytes: &[u8]) -> Vec<Bit> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |j| (b >> j) & 1))
        .collect()
}

/// Convenience wrapper: builds a [`Transceiver`] and runs trial
/// `trial_index` at SNR grid point `snr_index`.
pub fn run_frame(config: &SimConfig, snr_index: usize, trial_index: u64) -> Result<FrameOutcome> {
    let points = config.snr.points();
    let eb_n0_db = *points
        .get(snr_index)
        .ok_or_else(|| Error::Config(format!("SNR index {snr_index} outside a {}-point grid", points.len())))?;
    Transceiver::new(config)?.run_frame(eb_n0_db, snr_index, trial_index)
}
