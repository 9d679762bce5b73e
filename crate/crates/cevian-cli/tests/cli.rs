//! End-to-end tests of the `cevian` binary: every command, determinism of
//! outputs, and round-trips through the library's own readers.

use std::f64::consts::PI;
use std::process::{Command, Output};

use cevian::density::{verify, DensityCertificate};
use cevian::io::{read_cdf_csv, read_histogram_csv, read_triples_csv};
use cevian::simplex::AngleTriple;

const EQUILATERAL: &str = "1.047197551196598,1.047197551196598,1.047197551196598";
const RIGHT_ISOCELES: &str = "0.785398163397448,0.785398163397448,1.570796326794897";

fn cevian_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cevian"))
        .args(args)
        .output()
        .expect("spawn cevian")
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    let out = cevian_cmd(args);
    assert!(
        out.status.success(),
        "cevian {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn subdivide_emits_six_daughters() {
    let bytes = stdout_of(&["subdivide", "--strategy", "incenter", "--start", EQUILATERAL]);
    let (triples, prov) = read_triples_csv(bytes.as_slice()).unwrap();
    assert_eq!(triples.len(), 6);
    let expect = AngleTriple::new(PI / 6.0, PI / 3.0, PI / 2.0).unwrap();
    assert!(triples.iter().all(|t| t.similar(&expect, 1e-9)));
    assert_eq!(prov.strategy.as_deref(), Some("incenter"));
}

#[test]
fn subdivide_json_has_config_echo() {
    let bytes = stdout_of(&[
        "subdivide", "--strategy", "lemoine", "--start", EQUILATERAL, "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(doc["config"]["strategy"], "lemoine");
    assert_eq!(doc["daughters"].as_array().unwrap().len(), 6);
}

#[test]
fn subdivide_rejects_degenerate_input() {
    let out = cevian_cmd(&[
        "subdivide", "--strategy", "incenter",
        "--start", "0,1.570796326794897,1.570796326794896",
    ]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn degrees_flag_matches_radians() {
    let deg = stdout_of(&["subdivide", "--strategy", "incenter", "--start", "60,60,60", "--degrees"]);
    let (triples, _) = read_triples_csv(deg.as_slice()).unwrap();
    let expect = AngleTriple::new(PI / 6.0, PI / 3.0, PI / 2.0).unwrap();
    assert!(triples.iter().all(|t| t.similar(&expect, 1e-9)));
}

#[test]
fn density_certificate_verifies_with_exit_zero() {
    let bytes = stdout_of(&[
        "density", "--start", EQUILATERAL, "--target", RIGHT_ISOCELES, "--epsilon", "0.01",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(doc["verified"], true);
    let cert: DensityCertificate = serde_json::from_value(doc["certificate"].clone()).unwrap();
    assert!(verify(&cert));
    assert!(cert.word.len() <= 43);
    assert!(cert.achieved_error < 0.01);
}

#[test]
fn density_without_early_exit_keeps_the_full_word() {
    let bytes = stdout_of(&[
        "density", "--start", EQUILATERAL, "--target", RIGHT_ISOCELES,
        "--epsilon", "0.01", "--no-early-exit",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let cert: DensityCertificate = serde_json::from_value(doc["certificate"].clone()).unwrap();
    assert_eq!(cert.word.len() as u32, cert.k_bound);
    assert!(verify(&cert));
}

#[test]
fn density_rejects_bad_epsilon() {
    let out = cevian_cmd(&["density", "--start", EQUILATERAL, "--target", EQUILATERAL, "--epsilon", "0"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("epsilon"));
}

#[test]
fn enumerate_counts_and_budget() {
    let bytes = stdout_of(&[
        "enumerate", "--strategy", "incenter", "--start", EQUILATERAL, "--n", "2",
    ]);
    let (triples, prov) = read_triples_csv(bytes.as_slice()).unwrap();
    assert_eq!(triples.len(), 36);
    assert_eq!(prov.n, Some(2));

    let out = cevian_cmd(&[
        "enumerate", "--strategy", "incenter", "--start", EQUILATERAL, "--n", "10",
    ]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn sample_is_byte_deterministic() {
    let args = [
        "sample", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "6", "--m", "100", "--seed", "9",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b, "same config must produce byte-identical output");
    let other_seed = stdout_of(&[
        "sample", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "6", "--m", "100", "--seed", "10",
    ]);
    assert_ne!(a, other_seed);
    let (triples, prov) = read_triples_csv(a.as_slice()).unwrap();
    assert_eq!(triples.len(), 100);
    assert_eq!(prov.generator.as_deref(), Some("chacha12"));
}

#[test]
fn sample_workers_split_reproducibly() {
    let args = [
        "sample", "--strategy", "centroid", "--start", EQUILATERAL,
        "--n", "4", "--m", "90", "--seed", "5", "--workers", "3",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
    let (triples, _) = read_triples_csv(a.as_slice()).unwrap();
    assert_eq!(triples.len(), 90);
}

#[test]
fn hist_csv_round_trips() {
    let bytes = stdout_of(&[
        "hist", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "5", "--m", "500", "--seed", "3", "--bins", "12",
    ]);
    let (grid, prov) = read_histogram_csv(bytes.as_slice()).unwrap();
    assert_eq!(grid.bins_per_side(), 12);
    assert_eq!(grid.total(), 500);
    assert_eq!(prov.seed, Some(3));
    assert_eq!(prov.m, Some(500));
}

#[test]
fn hist_requires_a_seed_unless_exhaustive() {
    let out = cevian_cmd(&[
        "hist", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "3", "--m", "10", "--bins", "4",
    ]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("seed"));

    let bytes = stdout_of(&[
        "hist", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "2", "--bins", "8", "--exhaustive",
    ]);
    let (grid, _) = read_histogram_csv(bytes.as_slice()).unwrap();
    assert_eq!(grid.total(), 36);
}

#[test]
fn hist_pgm_raster() {
    let bytes = stdout_of(&[
        "hist", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "4", "--m", "200", "--seed", "8", "--bins", "10",
        "--format", "pgm", "--pgm-width", "64",
    ]);
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("P2"));
    assert!(text.contains("# seed: 8"));
    let dims: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "P2")
        .take(2)
        .collect();
    assert_eq!(dims[0], "64 55");
    assert_eq!(dims[1], "255");
}

#[test]
fn cdf_respects_the_pi_over_8_bound() {
    let bytes = stdout_of(&["cdf", "--n", "3", "--grid", "512"]);
    let (cdf, prov) = read_cdf_csv(bytes.as_slice()).unwrap();
    assert_eq!(prov.n, Some(3));
    assert_eq!(cdf.thetas.len(), 512);
    // at the largest grid theta below 0.39 < pi/8, the word-123 region is
    // still excluded from the upper count
    let g = cdf.thetas.iter().rposition(|&t| t <= 0.39).unwrap();
    assert!(cdf.upper[g] <= 215.0 / 216.0 + 1e-12);
    assert_eq!(*cdf.upper.last().unwrap(), 1.0);
    for w in 0..cdf.thetas.len() {
        assert!(cdf.lower[w] <= cdf.upper[w] + 1e-15);
    }
}

#[test]
fn selfsim_lists_the_two_classes() {
    let bytes = stdout_of(&["selfsim"]);
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let classes = doc["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 2);
    let golden: Vec<f64> = classes[0]["triple"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((golden[0] - PI / 5.0).abs() < 1e-9);
    assert!((golden[1] - 2.0 * PI / 5.0).abs() < 1e-9);
    assert_eq!(
        classes[0]["self_similar_indices"],
        serde_json::json!([3, 4])
    );
    assert_eq!(classes[1]["self_similar_indices"], serde_json::json!([5]));
    assert!(!doc["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn flatness_reports_a_fraction() {
    let bytes = stdout_of(&[
        "flatness", "--strategy", "incenter", "--start", EQUILATERAL,
        "--n", "5", "--m", "1000", "--delta", "0.35", "--seed", "1",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let f = doc["flat_fraction"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
    assert_eq!(doc["config"]["generator"], "chacha12");
    assert_eq!(doc["config"]["seed"], 1);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cdf.csv");
    let from_stdout = stdout_of(&["cdf", "--n", "2", "--grid", "64"]);
    let out = cevian_cmd(&["cdf", "--n", "2", "--grid", "64", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let from_file = std::fs::read(&path).unwrap();
    assert_eq!(from_stdout, from_file);
}
