use divstats::model::{derive, SystemConfig};
use divstats::montecarlo::read_binary;
use std::collections::HashMap;
use std::process::{Command, Output};

fn divstats(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divstats")).args(args).env_remove("DIVSTATS_SEED").output().unwrap()
}

fn record(o: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(r: &HashMap<String, String>, k: &str) -> f64 {
    r[k].parse().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn eval_rayleigh_spot_values() {
    let o = divstats(&["eval", "--m-s", "1", "--m-i", "1", "--n", "1", "--sir-limited", "--z-over-mu", "1", "--fm0", "10", "--fmi", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let r = record(&o);
    assert!((num(&r, "op") - 1.0 / 3.0).abs() < 1e-12);
    assert!((num(&r, "lcr_norm") - 1.0122).abs() < 5e-5);
    assert!((num(&r, "lcr") - 10.0 * num(&r, "lcr_norm")).abs() < 1e-12);
    assert!((num(&r, "afd") * num(&r, "lcr") - num(&r, "op")).abs() < 1e-14);
    assert_eq!(r["regime"], "interference-limited");
}

#[test]
fn eval_zero_threshold() {
    let r = record(&divstats(&["eval", "--inr-db", "10", "--snr-db", "10", "--n", "3", "--z-over-mu", "0"]));
    assert_eq!((num(&r, "op"), num(&r, "lcr")), (0.0, 0.0));
    assert_eq!(r["afd_flag"], "ZeroThreshold");
}

#[test]
fn eval_reports_exact_derived_parameters() {
    let o = divstats(&["eval", "--m-s", "2", "--m-i", "3", "--n", "2", "--omega-s", "0.7", "--omega-i", "0.3", "--sigma2", "0.11", "--z-over-mu", "2"]);
    let r = record(&o);
    let d = derive(&SystemConfig { m_s: 2, m_i: 3, omega_s: 0.7, omega_i: 0.3, sigma2: 0.11, n: 2, f_m0: 1.0, f_mi: 1.0 }).unwrap();
    assert_eq!(num(&r, "mu"), d.mu);
    assert_eq!(num(&r, "c"), d.c);
    assert_eq!(num(&r, "z"), 2.0 * d.mu);
}

#[test]
fn bad_input_exits_2() {
    let missing = divstats(&["eval", "--m-s", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--z-over-mu"));
    assert_eq!(divstats(&["eval", "--m-s", "0", "--z-over-mu", "1"]).status.code(), Some(2));
    assert_eq!(divstats(&["eval", "--z-over-mu", "-1"]).status.code(), Some(2));
    assert_eq!(divstats(&["eval", "--sir-limited", "--awgn-only", "--z-over-mu", "1"]).status.code(), Some(2));
    assert_eq!(divstats(&["sweep", "--grid", "1:2"]).status.code(), Some(2));
    assert_eq!(divstats(&["sweep", "--axis", "n", "--grid", "0.5:2:4"]).status.code(), Some(2));
    assert_eq!(divstats(&["validate", "--fm0", "10", "--rate", "100"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("link.json");
    std::fs::write(&path, r#"{"m_S": 1, "m_I": 1, "omega_S": 4.0, "omega_I": 2.0, "sigma2": 0.0, "n": 5, "f_m0": 10.0, "f_mi": 10.0}"#).unwrap();
    let p = path.to_str().unwrap();
    let r = record(&divstats(&["eval", "--config", p, "--n", "1", "--z-over-mu", "1"]));
    assert_eq!(num(&r, "mu"), 2.0);
    assert!((num(&r, "op") - 1.0 / 3.0).abs() < 1e-12);
    let o = divstats(&["eval", "--config", p, "--z-over-mu", "1"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().next().unwrap().starts_with("# config={"));
    assert!(text.contains("\"n\":5"));
}

#[test]
fn sweep_is_monotone_unimodal_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = out.to_str().unwrap();
    let args = ["sweep", "--m-s", "1", "--snr-db", "10", "--inr-db", "10", "--n", "3", "--fm0", "10", "--out", o];
    assert_eq!(divstats(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(divstats(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);

    let text = String::from_utf8(first).unwrap();
    assert!(text.lines().any(|l| l == "z_over_mu,op,lcr_norm,afd_norm"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 121);
    let col = |k: usize| rows.iter().map(|r| r[k].parse::<f64>().unwrap()).collect::<Vec<_>>();
    let (op, lcr) = (col(1), col(2));
    assert!(op.windows(2).all(|w| w[1] >= w[0]));
    let peak = lcr.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    assert!(peak > 0 && peak < 120);
    assert!(lcr[..=peak].windows(2).all(|w| w[1] >= w[0]) && lcr[peak..].windows(2).all(|w| w[1] <= w[0]));
    let th0 = text.lines().find(|l| l.starts_with("# th0_z_over_mu=")).unwrap();
    assert!(th0.contains(&rows[peak][0]));

    let side = std::fs::read_to_string(dir.path().join("curve.csv.diagnostics.json")).unwrap();
    assert!(side.contains("\"gaps\": []"));
}

#[test]
fn interferer_sweep_fade_duration_grows() {
    let o = divstats(&["sweep", "--axis", "n", "--grid", "1:8:8", "--sir-limited", "--m-s", "2", "--m-i", "2", "--fm0", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(rows.len(), 8);
    let afd: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(afd.windows(2).all(|w| w[1] >= w[0]), "{afd:?}");
}

#[test]
fn simulate_writes_binary_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.bin");
    let o = divstats(&["simulate", "--n", "2", "--fm0", "10", "--fmi", "5", "--duration", "2", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let trace = read_binary(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(trace.len(), 1281);
    assert_eq!(trace.interferers.len(), 2);
    assert_eq!(record(&o)["samples"], "1281");
}

#[test]
fn validate_short_run_is_insufficient() {
    let o = divstats(&["validate", "--m-s", "2", "--fm0", "10", "--duration", "0.3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains("# overall=insufficient"));
}

#[test]
fn validate_is_deterministic_and_seed_comes_from_env() {
    let args = ["validate", "--awgn-only", "--m-s", "2", "--fm0", "10", "--duration", "20", "--seed", "7"];
    let a = divstats(&args);
    let b = divstats(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());

    let env = Command::new(env!("CARGO_BIN_EXE_divstats"))
        .args(&args[..args.len() - 2])
        .env("DIVSTATS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("\"seed\":7"));
}

#[test]
fn validate_noise_limited_passes() {
    let o = divstats(&["validate", "--awgn-only", "--m-s", "2", "--fm0", "10", "--duration", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
