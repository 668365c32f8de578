use std::path::Path;
use std::process::{Command, Output};

use mwdkit::io;

fn mwdkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwdkit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

const WIGNER_GAUSS: &str = r#"{
    "grid": {"dim": 1, "n": 128, "len": 12},
    "matrix": {"preset": "wigner"},
    "signals": [{"kind": "gaussian", "lambda": 1.0}],
    "output": {"format": "csv", "path": "w.csv"}
}"#;

#[test]
fn transform_writes_wigner_of_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", WIGNER_GAUSS);
    let out = mwdkit(&["transform", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read(dir.path().join("w.csv")).unwrap();
    let t = io::read_csv(text.as_slice()).unwrap();
    assert_eq!(t.header, ["x", "omega", "re", "im"]);
    let centre = t.rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!((centre[2] - 2f64.sqrt()).abs() < 1e-8);

    // re-emitting the parsed table reproduces the file
    let mut again = Vec::new();
    t.write(&mut again).unwrap();
    assert_eq!(again, text);

    // identical bytes on a second run
    let out = mwdkit(&["transform", "--config", &cfg, "--out", "w2.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("w2.csv")).unwrap(), text);
}

#[test]
fn transform_bin_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"grid": {"dim": 1, "n": 64, "len": 8}, "matrix": {"preset": "stft"},
            "signals": [{"kind": "chirp", "rate": 0.5}, {"kind": "gaussian"}]}"#,
    );
    let out = mwdkit(&["transform", "--config", &cfg, "--out", "s.pgm", "--format", "pgm"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(dir.path().join("s.pgm")).unwrap();
    let (w, h, px) = io::read_pgm(&bytes).unwrap();
    assert_eq!((w, h, px.len()), (64, 64, 64 * 64));

    let out = mwdkit(&["transform", "--config", &cfg, "--out", "s.bin", "--format", "bin"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(dir.path().join("s.bin")).unwrap();
    let (dims, values) = io::read_bin(&mut bytes.as_slice()).unwrap();
    assert_eq!(dims, vec![64, 64]);
    let mut again = Vec::new();
    io::write_bin(&mut again, &dims, &values).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"grid": {"dim": 1, "n": 64, "len": 8}, "matrix": {"preset": "wigler"},
            "signals": [{"kind": "gaussian"}], "output": {"path": "x.csv"}}"#,
    );
    let out = mwdkit(&["transform", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("matrix.preset"));

    let out = mwdkit(&["transform", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let cfg = write(dir.path(), "q.json", WIGNER_GAUSS);
    let out = mwdkit(&["quantize", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symbol"));
}

#[test]
fn quantize_identity_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "q.json",
        r#"{"grid": {"dim": 1, "n": 128, "len": 12}, "matrix": {"preset": "tau", "tau": 0.25},
            "signals": [{"kind": "gaussian"}], "symbol": {"kind": "constant", "value": 1},
            "output": {"format": "csv", "path": "q.csv"}}"#,
    );
    let out = mwdkit(&["quantize", "--config", &cfg, "--check-adjoint"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let change: f64 = text
        .lines()
        .find(|l| l.starts_with("relative change"))
        .and_then(|l| l.rsplit(' ').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(change < 1e-4, "{text}");
    assert!(text.contains("max |K - K^H|"));
    let t = io::read_csv(std::fs::read(dir.path().join("q.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(t.header, ["t", "re", "im"]);
    assert_eq!(t.rows.len(), 128);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwdkit(&["verify", "gaussian", "--scale", "fast"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = mwdkit(&["verify", "moyal", "--break-det"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let out = mwdkit(&["verify", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = mwdkit(&["verify", "magic", "--seed", "7"], dir.path());
    let b = mwdkit(&["verify", "magic", "--seed", "7", "--threads", "1"], dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn demo_interference_writes_three_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwdkit(&["demo-interference", "--out", "demo"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("M = ")).count(), 3);
    for m in ["0", "0.3", "0.6"] {
        let bytes = std::fs::read(dir.path().join(format!("demo/interference_M{m}.pgm"))).unwrap();
        assert_eq!(&bytes[..2], b"P5");
        let (w, h, px) = io::read_pgm(&bytes).unwrap();
        assert_eq!(px.len(), w * h);
    }
}
