use std::path::Path;
use std::process::{Command, Output};

use robust_coreset::bench::parse_csv_report;
use robust_coreset::io::read_dataset;
use robust_coreset::streaming::Stream;
use robust_coreset::CoresetCheckReport;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-coreset")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_a_readable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    let o = bin(&["gen", "--n", "40", "--k", "2", "--m", "3", "--dataset-seed", "5", "--out", s(&data)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ds = read_dataset(&data).unwrap();
    assert_eq!(ds.points.total_weight(), 40.0);
    // Same seed, same bytes on stdout.
    let again = bin(&["gen", "--n", "40", "--k", "2", "--m", "3", "--dataset-seed", "5"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), std::fs::read_to_string(&data).unwrap());
}

#[test]
fn run_from_config_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[dataset]\nn = 30\n\n[algorithm]\nreduction = \"one\"\nbuilder = \"identity\"\nk = [1, 2]\nm = 1\n\n[verification]\npool_grid = 3\n",
    )
    .unwrap();
    let o = bin(&["run", "--config", s(&cfg), "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_csv_report(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.pass == Some(true) && r.failure.is_empty() && r.seed == 4));
    assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2]);
}

#[test]
fn run_writes_text_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = bin(&["run", "--seed", "1", "--n", "25", "--reduction", "two", "--no-verify", "--format", "text", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("[row]\n"));
    assert!(text.contains("pipeline = \"reduction-two\""));
}

#[test]
fn check_passes_on_identity_and_fails_on_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    assert_eq!(bin(&["gen", "--n", "20", "--out", s(&data)]).status.code(), Some(0));
    let ok = bin(&["check", "--data", s(&data), "--coreset", s(&data), "--k", "2", "--m", "2", "--eps", "0.1", "--pool-grid", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    let rep = CoresetCheckReport::from_record(&String::from_utf8(ok.stdout).unwrap()).unwrap();
    assert_eq!(rep.max_rel_error, 0.0);

    let doubled = dir.path().join("s.txt");
    let text = std::fs::read_to_string(&data).unwrap();
    let lines: Vec<String> = text
        .lines()
        .map(|l| match l.split_once(' ') {
            Some((w, rest)) if !l.starts_with('d') && !l.starts_with('#') => format!("{} {rest}", w.parse::<f64>().unwrap() * 2.0),
            _ => l.to_string(),
        })
        .collect();
    std::fs::write(&doubled, lines.join("\n")).unwrap();
    let bad = bin(&["check", "--data", s(&data), "--coreset", s(&doubled), "--k", "1", "--eps", "0.1", "--pool-grid", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    let rep = CoresetCheckReport::from_record(&String::from_utf8(bad.stdout).unwrap()).unwrap();
    assert!((rep.max_rel_error - 1.0).abs() < 1e-9);
}

#[test]
fn stream_run_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.stream");
    let coreset = dir.path().join("c.txt");
    let o = bin(&["gen", "--stream", "--n", "60", "--k", "2", "--m", "2", "--out", s(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let stream = Stream::parse(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let x = stream.final_multiset().unwrap();
    for reduction in ["one", "two"] {
        let o = bin(&[
            "stream-run", "--stream", s(&trace), "--reduction", reduction, "--k", "2", "--m", "2", "--eps", "0.3", "--samples", "30", "--verify",
            "--pool-grid", "3", "--out", s(&coreset),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let c = read_dataset(&coreset).unwrap();
        assert!(c.points.support_subset_of(&x));
    }
}

#[test]
fn usage_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[algorithm]\nepsilon = 0.1\n").unwrap();
    for args in [
        vec!["run"],
        vec!["run", "--seed", "1", "--config", s(&cfg)],
        vec!["run", "--seed", "1", "--eps", "2"],
        vec!["check", "--data", "/nonexistent", "--coreset", "/nonexistent", "--k", "1", "--eps", "0.1"],
        vec!["frobnicate"],
    ] {
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(4), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = bin(&["run", "--seed", "1", "--config", s(&cfg)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn pipeline_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mr.toml");
    std::fs::write(
        &cfg,
        "[dataset]\nn = 30\n\n[algorithm]\nreduction = \"stream-one\"\nvanilla_stream = \"merge-reduce\"\n\n[verification]\nenabled = false\n",
    )
    .unwrap();
    let o = bin(&["run", "--seed", "0", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_csv_report(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(!rows[0].failure.is_empty());
}
