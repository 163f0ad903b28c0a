use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wimax-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_args(out: &str) -> Vec<&str> {
    vec![
        "run", "--profile", "qpsk-1/2", "--channel", "awgn", "--mimo", "siso", "--detector", "zf",
        "--snr", "0:2:4", "--seed", "9", "--out", out, "--set", "sim.max_bits=50000",
    ]
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("qpsk.csv");
    let o = sim(&run_args(out.to_str().unwrap()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eb_n0_db,bits_sent,bit_errors,ber,frames_sent,frame_errors,fer,ci95_halfwidth"
    );
    assert_eq!(lines.count(), 3);
    let manifest = std::fs::read_to_string(dir.path().join("qpsk.manifest")).unwrap();
    assert!(manifest.contains("sim.seed = 9"));
    assert!(manifest.contains("mimo.nt = 1"));
    assert!(manifest.contains("sim.max_bits = 50000"));
}

#[test]
fn manifest_replays_identically_with_other_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let mut args = run_args(first.to_str().unwrap());
    args.extend(["--workers", "1"]);
    assert!(sim(&args).status.success());
    let second = dir.path().join("b.csv");
    let manifest = dir.path().join("a.manifest");
    let o = sim(&[
        "run", "--config", manifest.to_str().unwrap(), "--workers", "8", "--out", second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("base.cfg");
    std::fs::write(&cfg, "# base\nsim.seed = 1\nprofile = bpsk-1/2\nsim.max_bits = 20000\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = sim(&[
        "run", "--config", cfg.to_str().unwrap(), "--seed", "42", "--snr", "3:1:3", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("o.manifest")).unwrap();
    assert!(manifest.contains("sim.seed = 42"));
    assert!(manifest.contains("profile = bpsk-1/2"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for bad in [
        vec!["run", "--profile", "8psk-1/2", "--out", out],
        vec!["run", "--mimo", "2x1", "--out", out],
        vec!["run", "--snr", "5:0:10", "--out", out],
        vec!["run", "--mimo", "3x3", "--detector", "ml", "--out", out],
        vec!["run", "--set", "nonsense=1", "--out", out],
        vec!["run", "--bogus-flag"],
    ] {
        let o = sim(&bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!Path::new(out).exists());
}

fn write_curve(path: &Path, points: &[(f64, f64)]) {
    let mut text = String::from("eb_n0_db,bits_sent,bit_errors,ber,frames_sent,frame_errors,fer,ci95_halfwidth\n");
    for (snr, ber) in points {
        text.push_str(&format!("{snr},1000000,{},{ber},100,100,1,0\n", (ber * 1e6) as u64));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn gain_prints_gap_and_flags_unbracketed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_curve(&a, &[(0.0, 1e-1), (4.0, 1e-2), (8.0, 1e-4)]);
    write_curve(&b, &[(-3.0, 1e-1), (1.0, 1e-2), (5.0, 1e-4)]);
    let o = sim(&["gain", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--ber", "1e-3"]);
    assert!(o.status.success());
    let gap: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((gap - 3.0).abs() < 1e-9);

    let o = sim(&["gain", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--ber", "1e-6"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a.csv"));
}

#[test]
fn sweep_all_writes_every_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&[
        "sweep-all", "--channel", "rayleigh", "--out-dir", dir.path().to_str().unwrap(),
        "--snr", "0:10:40", "--set", "sim.max_bits=20000", "--set", "sim.min_bit_errors=20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 15);
    assert!(names.contains(&"64qam-3_4_2x2.csv".to_string()));
    let gains = std::fs::read_to_string(dir.path().join("gains.csv")).unwrap();
    let rows: Vec<&str> = gains.lines().collect();
    assert_eq!(
        rows[0],
        "profile,target_ber,snr_siso_db,snr_mimo_db,measured_gain_db,claimed_table_db,claimed_text_db"
    );
    assert_eq!(rows.len(), 8);
    assert!(rows[2].starts_with("qpsk-1/2,") && rows[2].ends_with(",3,2"));
}
