use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hardy_core::calkin_probe::tail_norm_ladder;
use hardy_core::classifier::ClassifyOutput;
use hardy_core::hardy_ops::OperatorExpr;
use hardy_core::moebius::Moebius;
use hardy_core::C64;
use hardy_verify::dump;
use serde_json::Value;
use tempfile::TempDir;

fn hardy(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Rows `(i, j, re, im)` of a CSV dump.
fn csv_entries(p: &Path) -> Vec<(usize, usize, f64, f64)> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn jury_defaults_pass_and_report_config() {
    let tmp = TempDir::new().unwrap();
    let o = hardy(tmp.path(), &["verify", "jury"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 3);
    let r = read_json(&tmp.path().join("reports/jury.json"));
    assert_eq!(r["verdict"], "Pass");
    assert_eq!(r["tool"], format!("hardy-verify {}", env!("CARGO_PKG_VERSION")));
    // Defaults are materialized, including sections other suites use.
    assert_eq!(r["config"]["jury"]["tol"], 1e-8);
    assert_eq!(r["config"]["ladder"]["cuts"], serde_json::json!([32, 64, 128, 256]));
    assert!(tmp.path().join("reports/jury.csv").exists());
}

#[test]
fn unreachable_tolerance_fails_with_exit_one() {
    let tmp = TempDir::new().unwrap();
    let o = hardy(tmp.path(), &["verify", "thm22", "--tol", "1e-9"]);
    assert_eq!(code(&o), 1);
    let r = read_json(&tmp.path().join("reports/thm22.json"));
    assert_eq!(r["verdict"], "Fail");
    assert_eq!(r["config"]["ladder"]["tol_c"], 1e-9);
    let last = r["checks"][0]["probe"]["ladder"][3]["value"].as_f64().unwrap();
    assert!(last > 1e-9 && last < 0.05);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&hardy(tmp.path(), &["verify", "unknown"])), 2);
    assert_eq!(code(&hardy(tmp.path(), &["frobnicate"])), 2);
    fs::write(tmp.path().join("typo.json"), r#"{"jury": {"tolerance": 1e-8}}"#).unwrap();
    assert_eq!(code(&hardy(tmp.path(), &["verify", "jury", "--config", "typo.json"])), 2);
    fs::write(tmp.path().join("other.json"), r#"{"suite": "coburn"}"#).unwrap();
    assert_eq!(code(&hardy(tmp.path(), &["verify", "jury", "--config", "other.json"])), 2);
    assert_eq!(code(&hardy(tmp.path(), &["verify", "jury", "--config", "missing.json"])), 2);
    assert_eq!(code(&hardy(tmp.path(), &["dump", "--op", "T[spiral]", "--size", "8"])), 2);
    assert_eq!(code(&hardy(tmp.path(), &["dump", "--op", "C[rho(1,-1)]", "--size", "8"])), 2);
    let threads = Command::new(env!("CARGO_BIN_EXE_hardy"))
        .current_dir(tmp.path())
        .env("HARDY_THREADS", "0")
        .args(["verify", "irreducibility"])
        .output()
        .unwrap();
    assert_eq!(code(&threads), 2);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("small.json"), r#"{"coburn": {"sizes": [32, 64], "points_per_side": 6}}"#).unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "3", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_hardy"))
            .current_dir(tmp.path())
            .env("HARDY_THREADS", threads)
            .args(["verify", "coburn", "--config", "small.json"])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let dir = tmp.path().join("reports");
        runs.push((fs::read(dir.join("coburn.json")).unwrap(), fs::read(dir.join("coburn.csv")).unwrap()));
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn shift_dump_has_subdiagonal_ones() {
    let tmp = TempDir::new().unwrap();
    let o = hardy(tmp.path(), &["dump", "--op", "T[power 1]", "--size", "8", "--format", "csv", "--out", "tz.csv"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(tmp.path().join("tz.csv")).unwrap();
    assert!(text.starts_with("# hardy-verify") && text.lines().next().unwrap().contains("op T[power 1]"));
    let entries = csv_entries(&tmp.path().join("tz.csv"));
    assert_eq!(entries.len(), 64);
    for (i, j, re, im) in entries {
        let want = if i == j + 1 { 1.0 } else { 0.0 };
        assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12, "({i},{j})");
    }
}

#[test]
fn half_scaling_dump_is_diagonal() {
    let tmp = TempDir::new().unwrap();
    let o = hardy(tmp.path(), &["dump", "--op", "C[scale(0.5)]", "--size", "8", "--out", "half.csv"]);
    assert_eq!(code(&o), 0);
    for (i, j, re, im) in csv_entries(&tmp.path().join("half.csv")) {
        let want = if i == j { 0.5f64.powi(i as i32) } else { 0.0 };
        assert!((re - want).abs() < 1e-15 && im.abs() < 1e-15, "({i},{j})");
    }
}

#[test]
fn binary_dump_round_trips_bitwise() {
    let tmp = TempDir::new().unwrap();
    let o = hardy(tmp.path(), &["dump", "--op", "C[rho(1,1)]", "--size", "128", "--format", "bin", "--out", "rho.bin"]);
    assert_eq!(code(&o), 0);
    let path = tmp.path().join("rho.bin");
    let back = dump::read_bin(&path).unwrap();
    let (m, _) = dump::materialize(&"C[rho(1,1)]".parse().unwrap(), 128, 4).unwrap();
    assert_eq!((back.nrows(), back.ncols()), (128, 128));
    for i in 0..128 {
        for j in 0..128 {
            assert_eq!(back[(i, j)].re.to_bits(), m[(i, j)].re.to_bits());
            assert_eq!(back[(i, j)].im.to_bits(), m[(i, j)].im.to_bits());
        }
    }
    let side = read_json(&tmp.path().join("rho.bin.json"));
    assert_eq!(side["op"], "C[rho(1,1)]");
    assert_eq!(side["size"], 128);
}

fn map_json(m: &Moebius<f64>) -> Value {
    serde_json::to_value(m).unwrap()
}

fn classify(tmp: &Path, name: &str, maps: &[Moebius<f64>]) -> Output {
    let input = serde_json::json!({
        "symbol": {"curve": "power 1", "grid_log2": 10},
        "maps": maps.iter().map(map_json).collect::<Vec<_>>(),
    });
    fs::write(tmp.join(format!("{name}.json")), input.to_string()).unwrap();
    hardy(tmp, &["classify", "--input", &format!("{name}.json")])
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn classify_prints_canonical_strings_and_certificates() {
    let tmp = TempDir::new().unwrap();
    let rho = Moebius::parabolic(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let o = classify(tmp.path(), "parabolic", &[rho]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "MinUnit( C_γ(T) ⊕ C0[0,1] )");
    let doc = read_json(&tmp.path().join("parabolic.certificate.json"));
    let out: ClassifyOutput = serde_json::from_value(doc["result"].clone()).unwrap();
    out.certificate.validate(&out.description).unwrap();

    let to_boundary = Moebius::new(c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap();
    let o = classify(tmp.path(), "boundary", &[to_boundary]);
    assert_eq!(stdout(&o).trim(), "D( C(T); γ; η )");

    // Derivatives 2 and 4 at the common fixed point 1: ln 4 = 2 ln 2.
    let dilation = |t: f64| Moebius::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0 - t, 0.0), c(t, 0.0)).unwrap();
    let o = classify(tmp.path(), "dependent", &[dilation(2.0), dilation(4.0)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Unresolved{2,4}"), "{}", stdout(&o));
}

#[test]
fn unsupported_classification_exits_two() {
    let tmp = TempDir::new().unwrap();
    let inner = Moebius::scaling(c(0.5, 0.0)).unwrap();
    let o = classify(tmp.path(), "interior", &[inner]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported configuration"));
}

#[test]
fn plots_are_deterministic_svg() {
    let tmp = TempDir::new().unwrap();
    let rho = Moebius::parabolic(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let cr = OperatorExpr::composition(rho);
    let e = cr.clone().adjoint().mul(cr.clone()).sub(cr.clone().mul(cr.adjoint()));
    let probe = tail_norm_ladder(&e, &[8, 16, 32], 128).unwrap();
    fs::write(tmp.path().join("ladder.json"), serde_json::to_string(&probe).unwrap()).unwrap();
    assert_eq!(code(&hardy(tmp.path(), &["plot", "--report", "ladder.json"])), 0);
    let first = fs::read_to_string(tmp.path().join("ladder.svg")).unwrap();
    assert!(first.starts_with("<svg") && first.contains("<polyline"));
    assert_eq!(code(&hardy(tmp.path(), &["plot", "--report", "ladder.json"])), 0);
    assert_eq!(first, fs::read_to_string(tmp.path().join("ladder.svg")).unwrap());

    // Suite reports: a Fredholm grid plots, an irreducibility suite has nothing to plot.
    fs::write(tmp.path().join("small.json"), r#"{"coburn": {"sizes": [32, 64], "points_per_side": 4}}"#).unwrap();
    assert_eq!(code(&hardy(tmp.path(), &["verify", "coburn", "--config", "small.json"])), 0);
    assert_eq!(code(&hardy(tmp.path(), &["plot", "--report", "reports/coburn.json", "--out", "svg"])), 0);
    let svgs = fs::read_dir(tmp.path().join("svg")).unwrap().count();
    assert_eq!(svgs, 4);
    assert_eq!(code(&hardy(tmp.path(), &["verify", "irreducibility"])), 0);
    assert_eq!(code(&hardy(tmp.path(), &["plot", "--report", "reports/irreducibility.json"])), 2);
}

#[test]
fn all_suites_write_a_summary() {
    let tmp = TempDir::new().unwrap();
    let cfg = r#"{
        "ladder": {"eval_size": 256, "cuts": [16, 32, 64, 128]},
        "jury": {"size": 64, "interior": 32},
        "semigroup": {"draws": 10, "size": 64, "interior": 32},
        "parabolic_spectrum": {"size": 64, "t_points": 5, "a_values": [[1, 0]]},
        "coburn": {"sizes": [32, 64], "points_per_side": 4, "symbols": ["power 1"]},
        "prop52": {"sizes": [64, 128]},
        "irreducibility": {"size": 8}
    }"#;
    fs::write(tmp.path().join("small.json"), cfg).unwrap();
    let o = hardy(tmp.path(), &["verify", "all", "--config", "small.json"]);
    let summary = read_json(&tmp.path().join("reports/all.json"));
    let checks = summary["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 9);
    let all_pass = checks.iter().all(|c| c["verdict"] == "Pass");
    assert_eq!(code(&o), if all_pass { 0 } else { 1 }, "{}", stdout(&o));
    for name in ["jury", "semigroup", "thm22", "covariance", "parabolic-spectrum", "coburn", "prop52", "irreducibility", "essential-normality"] {
        assert!(tmp.path().join(format!("reports/{name}.json")).exists(), "{name}");
    }
}
