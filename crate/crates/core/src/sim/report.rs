//! Result files: curve CSVs, run manifests and the gain table.

use super::config::{SimConfig, SnrGrid};
use super::curve::BerCurve;
use super::gain::snr_at_ber;
use super::profile::BurstProfile;
use super::sweep::{run_ber_sweep, Parallelism};
use crate::channel::ChannelKind;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// `<csv stem>.manifest` beside the CSV.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest")
}

/// Loadable config text describing the run that produced a CSV.
pub fn manifest_text(config: &SimConfig) -> String {
    let mut out = String::from("# resolved configuration; load with --config to reproduce\n");
    out.push_str(&config.to_text());
    out
}

/// Writes the curve CSV and its manifest.
pub fn report(curve: &BerCurve, config: &SimConfig, csv: &Path) -> Result<()> {
    curve.write(csv)?;
    std::fs::write(manifest_path(csv), manifest_text(config))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<SimConfig> {
    SimConfig::from_text(&std::fs::read_to_string(path)?)
}

/// One row of the SISO vs 2×2 comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub profile: BurstProfile,
    pub target_ber: f64,
    pub snr_siso_db: Option<f64>,
    pub snr_mimo_db: Option<f64>,
    pub claimed_table_db: Option<f64>,
    pub claimed_text_db: Option<f64>,
}

impl GainRow {
    pub fn measured_gain_db(&self) -> Option<f64> {
        Some(self.snr_siso_db? - self.snr_mimo_db?)
    }
}

pub const GAINS_HEADER: &str =
    "profile,target_ber,snr_siso_db,snr_mimo_db,measured_gain_db,claimed_table_db,claimed_text_db";

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

pub fn gains_csv(rows: &[GainRow]) -> String {
    let mut out = String::from(GAINS_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.profile.name(),
            r.target_ber,
            cell(r.snr_siso_db),
            cell(r.snr_mimo_db),
            cell(r.measured_gain_db()),
            cell(r.claimed_table_db),
            cell(r.claimed_text_db)
        )
        .expect("writing to a String");
    }
    out
}

/// Settings shared by every curve of a `sweep_all` run.
#[derive(Debug, Clone)]
pub struct SweepAllOptions {
    pub base: SimConfig,
    pub channel: ChannelKind,
    pub target_ber: f64,
    pub parallelism: Parallelism,
}

impl SweepAllOptions {
    /// Eb/N0 0 to 50 dB in 2 dB steps, each curve stopping once BER drops
    /// below 1e-4; gains at BER 1e-3.
    pub fn new(channel: ChannelKind) -> Self {
        let mut base = SimConfig::default();
        base.snr = SnrGrid {
            start: 0.0,
            step: 2.0,
            stop: 50.0,
        };
        base.ber_floor = 1e-4;
        SweepAllOptions {
            base,
            channel,
            target_ber: 1e-3,
            parallelism: Parallelism::Auto,
        }
    }
}

/// Everything `sweep_all` produced.
#[derive(Debug, Clone)]
pub struct SweepAllOutput {
    pub files: Vec<PathBuf>,
    pub rows: Vec<GainRow>,
}

/// Sweeps every profile as SISO and 2×2, writing `<profile>_siso.csv`,
/// `<profile>_2x2.csv` (each with a manifest) and `gains.csv` into
/// `out_dir`. Targets a curve does not bracket are recorded as `n/a`.
pub fn sweep_all(options: &SweepAllOptions, out_dir: &Path) -> Result<SweepAllOutput> {
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for profile in BurstProfile::ALL {
        let mut snr = [None, None];
        for (slot, (nt, suffix)) in [(1, "siso"), (2, "2x2")].into_iter().enumerate() {
            let mut cfg = options.base.clone();
            cfg.profile = profile;
            cfg.channel = options.channel;
            cfg.antennas.nt = nt;
            cfg.antennas.nr = nt;
            let path = out_dir.join(format!("{}_{suffix}.csv", profile.file_stem()));
            let mut curve = run_ber_sweep(&cfg, options.parallelism)?;
            curve.label = path.display().to_string();
            report(&curve, &cfg, &path)?;
            files.push(path);
            snr[slot] = match snr_at_ber(&curve, options.target_ber) {
                Ok(v) => Some(v),
                Err(Error::Unbracketed { .. }) => None,
                Err(e) => return Err(e),
            };
        }
        rows.push(GainRow {
            profile,
            target_ber: options.target_ber,
            snr_siso_db: snr[0],
            snr_mimo_db: snr[1],
            claimed_table_db: profile.claimed_gain_table_db(),
            claimed_text_db: profile.claimed_gain_text_db(),
        });
    }
    let gains = out_dir.join("gains.csv");
    std::fs::write(&gains, gains_csv(&rows))?;
    files.push(gains);
    Ok(SweepAllOutput { files, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gains_table_marks_missing_values() {
        let row = GainRow {
            profile: BurstProfile::Qpsk12,
            target_ber: 1e-3,
            snr_siso_db: Some(20.5),
            snr_mimo_db: None,
            claimed_table_db: Some(3.0),
            claimed_text_db: Some(2.0),
        };
        let text = gains_csv(&[row]);
        assert_eq!(
            text,
            format!("{GAINS_HEADER}\nqpsk-1/2,0.001,20.5,n/a,n/a,3,2\n")
        );
    }

    #[test]
    fn manifest_round_trips_config() {
        let mut cfg = SimConfig::default();
        cfg.seed = 77;
        cfg.profile = BurstProfile::Qam64_23;
        assert_eq!(SimConfig::from_text(&manifest_text(&cfg)).unwrap(), cfg);
    }
}
