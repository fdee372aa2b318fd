//! The `banach-gauge` binary end to end.

use std::path::Path;
use std::process::Command;

use banach_gauge::seqvec::FinVec;
use banach_gauge::tsirelson::{validate_certificate, CertNode, NormCertificate};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bg(args: &[&str]) -> Run {
    bg_env(args, None)
}

fn bg_env(args: &[&str], seed: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_banach-gauge"));
    cmd.args(args).env_remove("BANACH_GAUGE_SEED");
    if let Some(s) = seed {
        cmd.env("BANACH_GAUGE_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    serde_json::from_str(&r.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn without_wall_time(mut v: Value) -> Value {
    v["manifest"].as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn growth_prints_plain_decimals() {
    let r = bg(&["growth", "g", "3", "2"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "2048\n"));
    assert_eq!(bg(&["growth", "g", "4", "2", "--cap", "10^100"]).stdout, "EXCEEDS_CAP\n");
    assert_eq!(bg(&["growth", "alpha", "9"]).stdout, "3\n");
    assert_eq!(bg(&["growth", "alpha-diag", "1000000"]).stdout, "2\n");
    let v: f64 = bg(&["growth", "delta-bound", "4", "--K", "1", "--D", "1"]).stdout.trim().parse().unwrap();
    assert_eq!(v, 2.0);
}

#[test]
fn norm_of_the_flat_pair() {
    let dir = tempfile::tempdir().unwrap();
    let vec = write(dir.path(), "x.json", "[0, 0, 1, 1]");
    let cert = dir.path().join("cert.json");
    let v = json(&bg(&["norm", "--space", "T", "--vec", &vec, "--cert-out", cert.to_str().unwrap()]));
    assert_eq!(v["value"], "1");
    assert_eq!(v["manifest"]["command"], "norm");
    assert_eq!(v["manifest"]["output_digest"].as_str().unwrap().len(), 64);

    let tree: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let root = CertNode::from_json(&tree).unwrap();
    let x = FinVec::from_ratios(&[(3, 1, 1), (4, 1, 1)]);
    let c = NormCertificate { value: banach_gauge::seqvec::rat(1, 1), root };
    assert!(validate_certificate(&c, &x).unwrap());

    let sparse = write(dir.path(), "y.json", r#"{"v": {"3": "1", "4": "1"}}"#);
    let b = json(&bg(&["norm", "--space", "T", "--vec", &sparse, "--brute"]));
    assert_eq!(b["value"], "1");
    let t2 = json(&bg(&["norm", "--space", "T2", "--vec", &vec]));
    assert_eq!(t2["value"], "1");
    let two = write(dir.path(), "z.json", r#"{"v": {"1": "1", "2": "1"}}"#);
    assert_eq!(json(&bg(&["norm", "--space", "T2", "--vec", &two]))["value"], "1");
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["norm", "--nope"][..], &["not-a-command"], &["ratio", "--space", "l1"], &["growth", "g", "1"]] {
        let r = bg(args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.stdout.is_empty(), "{args:?} printed {}", r.stdout);
        assert!(!r.stderr.is_empty());
    }
    let r = bg_env(&["growth", "alpha", "3"], Some("minus one"));
    assert_eq!(r.code, 2);
}

#[test]
fn domain_errors_exit_1_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let big = write(dir.path(), "big.json", &serde_json::to_string(&vec![1; 14]).unwrap());
    let r = bg(&["norm", "--space", "mod", "--vec", &big]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "SupportTooLarge");
    let r = bg(&["norm", "--space", "T", "--vec", "/definitely/missing.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("\"Io\""));
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "f.json", "[[1,0],[0,1],[1,1]]");
    let args = ["ratio", "--space", "l1", "--kind", "cotype", "--mode", "mc", "--vecs", &fam, "--samples", "5000", "--seed", "7"];
    let a = without_wall_time(json(&bg(&args)));
    let b = without_wall_time(json(&bg(&args)));
    assert_eq!(a, b);
    assert_eq!(a["manifest"]["seed"], 7);

    let env = without_wall_time(json(&bg_env(&args, Some("99"))));
    assert_eq!(env["manifest"]["seed"], 99);
    assert_ne!(env["point"], a["point"]);
    let mut direct = args.to_vec();
    let last = direct.len() - 1;
    direct[last] = "99";
    let flag = without_wall_time(json(&bg(&direct)));
    assert_eq!(flag["point"], env["point"]);
}

#[test]
fn exact_ratio_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "f.json", r#"[["sqrt(1/2)", 0, 0, 0], [0, 0, 0, "sqrt(1/2)"]]"#);
    let v = json(&bg(&["ratio", "--space", "T2", "--kind", "cotype", "--vecs", &fam]));
    assert_eq!(v["exact"], "2");
    assert_eq!(v["mode"], "rademacher-exact");
    assert_eq!(v["witness"]["certified"], true);
    assert_eq!(v["ci"][0], v["ci"][1]);
}

#[test]
fn flat_search_feeds_cotype_cert() {
    let dir = tempfile::tempdir().unwrap();
    let r = bg(&["flat-search", "--N", "4"]);
    let v = json(&r);
    assert_eq!(v["theta"], "1/2");
    assert_eq!(v["witness"]["v"]["3"], "1/2");
    let path = write(dir.path(), "fs.json", &r.stdout);
    let c = json(&bg(&["cotype-cert", "--witness", &path, "--cross-check"]));
    assert_eq!(c["ratio"], "2");
    assert_eq!(c["paper_claimed"], 2.0);
    assert_eq!(c["cross_check"]["agrees"], true);
    assert!((c["c2_lower"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn mechanism_csv_has_a_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "f.json", "[[0,0],[1,0],[0,1],[1,1]]");
    let r = bg(&["jl-mechanism", "--space", "l1", "--family", &fam, "--trials", "25", "--seed", "3", "--csv"]);
    assert_eq!(r.code, 0);
    let mut rd = csv::Reader::from_reader(r.stdout.as_bytes());
    let headers = rd.headers().unwrap().clone();
    let holds = headers.iter().position(|h| h == "holds").unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|row| &row[holds] == "true"));
}

#[test]
fn walsh_and_embed_commands() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "f.json", "[[1,2,0],[0,1,5],[3,0,1],[1,1,1]]");
    let w = json(&bg(&["walsh", "--m", "2", "--family", &fam, "--seed", "4"]));
    assert_eq!(w["points"], 9);
    assert_eq!(w["orthogonality"]["holds"], true);
    assert_eq!(bg(&["walsh", "--m", "1", "--family", &fam]).code, 1);

    let pts = write(dir.path(), "p.json", "[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]]");
    let e = json(&bg(&["jl-embed", "--points", &pts, "--eps", "0.5"]));
    assert_eq!(e["attempts"], 0);
    assert_eq!(e["distortion"], 1.0);
    let t = json(&bg(&["jl-embed", "--random", "40", "--dim", "300", "--trials", "5", "--seed", "2"]));
    assert_eq!(t["trials"], 5);
    assert_eq!(t["results"].as_array().unwrap().len(), 5);
}

fn sweep_rows(config: &str) -> (Vec<String>, Vec<csv::StringRecord>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", config);
    let r = bg(&["sweep", "--config", &cfg, "--seed", "11"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rd = csv::Reader::from_reader(r.stdout.as_bytes());
    let headers = rd.headers().unwrap().iter().map(String::from).collect();
    (headers, rd.records().map(Result::unwrap).collect())
}

#[test]
fn sweep_over_flat_search() {
    let (h, rows) = sweep_rows(r#"{"command": "flat-search", "args": {"rounds": 200}, "grid": {"N": [3,4,5,6,7,8]}}"#);
    assert_eq!(rows.len(), 6);
    let col = h.iter().position(|c| c == "theta_f64").unwrap();
    let err = h.iter().position(|c| c == "error").unwrap();
    let theta: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    assert!(theta.windows(2).all(|w| w[1] <= w[0]), "{theta:?}");
    assert!(rows.iter().all(|r| r[err].is_empty()));
}

#[test]
fn sweep_edge_cases() {
    let (h, rows) = sweep_rows(r#"{"command": "flat-search", "grid": {}}"#);
    assert!(rows.is_empty());
    assert_eq!(h, ["cell", "cell_seed", "error"]);

    let (h, rows) = sweep_rows(r#"{"command": "flat-search", "grid": {"N": [4, 40]}}"#);
    let err = h.iter().position(|c| c == "error").unwrap();
    assert!(rows[0][err].is_empty());
    assert!(rows[1][err].starts_with("BadSupportBound"));

    let eps = r#"{"command": "jl-embed", "args": {"random": 60, "dim": 200, "trials": 4}, "grid": {"eps": [0.25, 0.5, 1.0]}}"#;
    let (h, rows) = sweep_rows(eps);
    assert_eq!(rows.len(), 3);
    assert!(h.contains(&"success_rate".to_string()));
    let (_, again) = sweep_rows(eps);
    assert_eq!(rows, again);
}
