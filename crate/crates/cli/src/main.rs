use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wimax_phy::channel::ChannelKind;
use wimax_phy::sim::report::{report, sweep_all};
use wimax_phy::sim::{run_ber_sweep, snr_gain, BerCurve, Parallelism, SimConfig, SweepAllOptions};
use wimax_phy::Error;

#[derive(Parser)]
#[command(name = "wimax-sim", version, about = "Monte Carlo BER simulator for an OFDM PHY with MIMO spatial multiplexing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one configuration and write its BER curve.
    Run(RunArgs),
    /// SNR gap of curve A over curve B at a target BER (positive: B is better).
    Gain {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        ber: f64,
    },
    /// Sweep every burst profile as SISO and 2x2 and tabulate the gaps.
    SweepAll(SweepAllArgs),
}

#[derive(Args)]
struct Common {
    /// key = value file applied before any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value overrides, applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads: 1 runs sequentially, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    channel: Option<String>,
    /// `siso` or `NtxNr`, e.g. `2x2`.
    #[arg(long)]
    mimo: Option<String>,
    #[arg(long)]
    detector: Option<String>,
    /// Eb/N0 grid in dB as start:step:stop.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepAllArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "rayleigh")]
    channel: String,
    #[arg(long)]
    detector: Option<String>,
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target BER of the gain table.
    #[arg(long, default_value_t = 1e-3)]
    ber: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn parallelism(workers: usize) -> Parallelism {
    match workers {
        0 => Parallelism::Auto,
        1 => Parallelism::Sequential,
        n => Parallelism::Threads(n),
    }
}

fn parse_mimo(s: &str) -> Result<(usize, usize), Error> {
    if s.eq_ignore_ascii_case("siso") {
        return Ok((1, 1));
    }
    let bad = || Error::Config(format!("--mimo expects siso or NtxNr, got {s:?}"));
    let (nt, nr) = s.to_ascii_lowercase().split_once('x').map(|(a, b)| (a.to_string(), b.to_string())).ok_or_else(bad)?;
    Ok((nt.parse().map_err(|_| bad())?, nr.parse().map_err(|_| bad())?))
}

fn apply_common(cfg: &mut SimConfig, common: &Common) -> Result<(), Error> {
    if let Some(path) = &common.config {
        cfg.apply_text(&std::fs::read_to_string(path)?).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Config(format!("{}:{line}: {msg}", path.display())),
            other => other,
        })?;
    }
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k, v)?;
    }
    Ok(())
}

fn apply_flag(cfg: &mut SimConfig, key: &str, value: &Option<String>) -> Result<(), Error> {
    match value {
        Some(v) => cfg.set(key, v),
        None => Ok(()),
    }
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let mut cfg = SimConfig::default();
    apply_common(&mut cfg, &args.common)?;
    apply_flag(&mut cfg, "profile", &args.profile)?;
    apply_flag(&mut cfg, "channel.type", &args.channel)?;
    apply_flag(&mut cfg, "mimo.detector", &args.detector)?;
    if let Some(m) = &args.mimo {
        let (nt, nr) = parse_mimo(m)?;
        cfg.antennas.nt = nt;
        cfg.antennas.nr = nr;
    }
    if let Some(s) = &args.snr {
        cfg.snr = s.parse()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let curve = run_ber_sweep(&cfg, parallelism(args.common.workers))?;
    report(&curve, &cfg, &args.out)?;
    for p in &curve.points {
        eprintln!(
            "{:>6} dB  ber {:.3e}  ({} errors / {} bits, {} frames)",
            p.eb_n0_db, p.ber, p.bit_errors, p.bits_sent, p.frames_sent
        );
    }
    Ok(())
}

fn gain(a: &Path, b: &Path, ber: f64) -> Result<(), Error> {
    let (ca, cb) = (BerCurve::read(a)?, BerCurve::read(b)?);
    println!("{}", snr_gain(&ca, &cb, ber)?);
    Ok(())
}

fn sweep(args: &SweepAllArgs) -> Result<(), Error> {
    let channel: ChannelKind = args.channel.parse()?;
    let mut options = SweepAllOptions::new(channel);
    options.target_ber = args.ber;
    options.parallelism = parallelism(args.common.workers);
    let cfg = &mut options.base;
    apply_common(cfg, &args.common)?;
    apply_flag(cfg, "mimo.detector", &args.detector)?;
    if let Some(s) = &args.snr {
        cfg.snr = s.parse()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = sweep_all(&options, &args.out_dir)?;
    for row in &out.rows {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.2}"));
        eprintln!(
            "{:<10} measured {:>6} dB  claimed {} dB (text {})",
            row.profile.name(),
            fmt(row.measured_gain_db()),
            fmt(row.claimed_table_db),
            fmt(row.claimed_text_db)
        );
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Unbracketed { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Gain { a, b, ber } => gain(a, b, *ber),
        Command::SweepAll(args) => sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
