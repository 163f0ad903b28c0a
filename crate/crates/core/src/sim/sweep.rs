//! Monte Carlo BER sweep over the configured SNR grid.

use super::config::SimConfig;
use super::curve::{BerCurve, BerPoint};
use super::frame::{FrameOutcome, Transceiver};
use crate::error::Result;

/// How trials are scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Worker threads; 0 uses one per available core. Without the
    /// `parallel` feature this runs sequentially.
    Threads(usize),
    #[default]
    Auto,
}

impl Parallelism {
    fn threads(self) -> usize {
        match self {
            Parallelism::Sequential => 1,
            Parallelism::Threads(0) | Parallelism::Auto => {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            }
            Parallelism::Threads(n) => n,
        }
    }
}

/// Trials are scheduled in batches whose sizes depend only on how many
/// trials have already been folded, never on the worker count.
const FIRST_BATCH: u64 = 4;
const MAX_BATCH: u64 = 1024;

/// Per-frame summary kept until the frame is folded into the totals.
#[derive(Debug, Clone)]
struct FrameErrors {
    bits: u64,
    erased: bool,
    /// Sorted error positions within the frame.
    positions: Vec<u32>,
}

impl FrameErrors {
    fn from_outcome(o: &FrameOutcome) -> Self {
        FrameErrors {
            bits: o.tx_bits.len() as u64,
            erased: o.erased,
            positions: o
                .tx_bits
                .iter()
                .zip(&o.rx_bits)
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(i, _)| i as u32)
                .collect(),
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Accumulator {
    bits: u64,
    errors: u64,
    frames: u64,
    frame_errors: u64,
    /// Σ e_i², Σ e_i·n_i, Σ n_i² over frames, for the frame-clustered
    /// variance.
    sum_e2: f64,
    sum_en: f64,
    sum_n2: f64,
}

impl Accumulator {
    /// Folds one frame, truncating it so `bits` never exceeds `max_bits`.
    fn add(&mut self, f: &FrameErrors, max_bits: u64) {
        let n = f.bits.min(max_bits - self.bits);
        let e = f.positions.iter().take_while(|&&p| (p as u64) < n).count() as u64;
        self.bits += n;
        self.errors += e;
        self.frames += 1;
        if e > 0 || f.erased {
            self.frame_errors += 1;
        }
        let (e, n) = (e as f64, n as f64);
        self.sum_e2 += e * e;
        self.sum_en += e * n;
        self.sum_n2 += n * n;
    }

    fn done(&self, min_errors: u64, max_bits: u64) -> bool {
        self.errors >= min_errors || self.bits >= max_bits
    }

    fn point(&self, eb_n0_db: f64) -> BerPoint {
        let ber = self.errors as f64 / self.bits as f64;
        BerPoint {
            eb_n0_db,
            bits_sent: self.bits,
            bit_errors: self.errors,
            ber,
            frames_sent: self.frames,
            frame_errors: self.frame_errors,
            fer: self.frame_errors as f64 / self.frames as f64,
            ci95_halfwidth: ci95_halfwidth(ber, self.bits as f64, self.frames as f64, self.sum_e2, self.sum_en, self.sum_n2),
        }
    }
}

/// 1.96 standard errors, taking the larger of the independent-bit
/// (binomial) variance and the variance of a ratio estimator clustered by
/// frame. Bits in one fading block are correlated, so the binomial form
/// alone understates the spread. The clustered term carries the usual
/// F/(F − 1) small-sample factor; a single frame gets the Bernoulli bound.
fn ci95_halfwidth(p: f64, bits: f64, frames: f64, sum_e2: f64, sum_en: f64, sum_n2: f64) -> f64 {
    let binomial = p * (1.0 - p) / bits;
    let clustered = if frames > 1.0 {
        let ss = (sum_e2 - 2.0 * p * sum_en + p * p * sum_n2).max(0.0);
        frames / (frames - 1.0) * ss / (bits * bits)
    } else {
        p * (1.0 - p)
    };
    1.96 * binomial.max(clustered).sqrt()
}

/// Runs the full sweep. Points are visited in grid order; trials within a
/// point are keyed by index, so the curve is identical for any
/// `parallelism`.
pub fn run_ber_sweep(config: &SimConfig, parallelism: Parallelism) -> Result<BerCurve> {
    config.validate()?;
    let tx = Transceiver::new(config)?;
    let runner = Runner::new(parallelism)?;
    let mut points = Vec::new();
    for (snr_index, eb_n0_db) in config.snr.points().into_iter().enumerate() {
        let point = run_point(&tx, &runner, eb_n0_db, snr_index)?;
        let below_floor = config.ber_floor > 0.0 && point.ber < config.ber_floor;
        points.push(point);
        if below_floor {
            break;
        }
    }
    Ok(BerCurve::new(config.profile.name(), points))
}

/// One SNR point: fold frames in trial order until the stopping rule fires.
pub fn run_point(tx: &Transceiver, runner: &Runner, eb_n0_db: f64, snr_index: usize) -> Result<BerPoint> {
    let cfg = tx.config();
    let (min_errors, max_bits) = (cfg.min_bit_errors, cfg.max_bits);
    let mut acc = Accumulator::default();
    let mut next: u64 = 0;
    let mut batch = FIRST_BATCH;
    'outer: loop {
        let frames = runner.run(next..next + batch, |trial| {
            tx.run_frame(eb_n0_db, snr_index, trial)
                .map(|o| FrameErrors::from_outcome(&o))
        })?;
        for f in &frames {
            acc.add(f, max_bits);
            if acc.done(min_errors, max_bits) {
                break 'outer;
            }
        }
        next += batch;
        batch = (batch * 2).min(MAX_BATCH);
    }
    Ok(acc.point(eb_n0_db))
}

/// Maps trial indices to results, sequentially or on a thread pool, always
/// returning them in index order.
pub struct Runner {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    pub fn new(parallelism: Parallelism) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let threads = parallelism.threads();
            let pool = if threads > 1 {
                Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?,
                )
            } else {
                None
            };
            Ok(Runner { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = parallelism.threads();
            Ok(Runner {})
        }
    }

    pub fn run<T, F>(&self, trials: std::ops::Range<u64>, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            let (start, end) = (trials.start, trials.end);
            return pool.install(|| {
                (0..(end - start) as usize)
                    .into_par_iter()
                    .map(|i| f(start + i as u64))
                    .collect()
            });
        }
        trials.map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelKind;
    use crate::sim::profile::BurstProfile;

    fn quick() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.profile = BurstProfile::Qpsk12;
        cfg.snr = crate::sim::config::SnrGrid::new(0.0, 4.0, 8.0).unwrap();
        cfg.max_bits = 20_000;
        cfg.min_bit_errors = 50;
        cfg
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = quick();
        let a = run_ber_sweep(&cfg, Parallelism::Sequential).unwrap();
        let b = run_ber_sweep(&cfg, Parallelism::Threads(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 3);
    }

    #[test]
    fn noiseless_point_sends_exactly_max_bits() {
        let mut cfg = quick();
        cfg.channel = ChannelKind::Awgn;
        cfg.noiseless = true;
        cfg.snr = crate::sim::config::SnrGrid::single(3.0);
        cfg.max_bits = 12_345;
        let curve = run_ber_sweep(&cfg, Parallelism::Sequential).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].ber, 0.0);
        assert_eq!(curve.points[0].bits_sent, 12_345);
    }

    #[test]
    fn stops_on_error_count() {
        let mut cfg = quick();
        cfg.snr = crate::sim::config::SnrGrid::single(-2.0);
        cfg.max_bits = 10_000_000;
        let p = run_ber_sweep(&cfg, Parallelism::Sequential).unwrap().points[0];
        assert!(p.bit_errors >= cfg.min_bit_errors);
        assert!(p.bits_sent < cfg.max_bits);
        assert!((p.ber - p.bit_errors as f64 / p.bits_sent as f64).abs() < 1e-15);
    }

    #[test]
    fn halfwidth_reduces_to_binomial_for_independent_bits() {
        // one bit per frame: the clustered term is binomial up to F/(F - 1)
        let p = 0.1;
        let n = 1000.0;
        let e = 100.0;
        let w = ci95_halfwidth(p, n, n, e, e, n);
        let expected = 1.96 * (p * (1.0 - p) / (n - 1.0)).sqrt();
        assert!((w - expected).abs() < 1e-12);
        // a single frame cannot estimate its own spread
        assert!((ci95_halfwidth(0.2, 500.0, 1.0, 1e4, 5e4, 2.5e5) - 1.96 * 0.4).abs() < 1e-12);
    }
}
