use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ctc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctc"))
        .args(args)
        .current_dir(dir)
        .env_remove("CTC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ctc(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn a1_vertices(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("a1.vertices.json");
    ok(dir.path(), &["vertices", "--model", "builtin:a1", "--out", p.to_str().unwrap()]);
    p
}

#[test]
fn reproduce_single_case_prints_value() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["reproduce", "--case", "S1bit-classical-bound"]);
    assert!(out.contains("6 = 6"), "{out}");
}

#[test]
fn unknown_subcommand_and_flag_exit_2() {
    let dir = TempDir::new().unwrap();
    for args in [&["frobnicate"][..], &["vertices", "--bogus"][..]] {
        let out = ctc(dir.path(), args);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn missing_input_file_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = ctc(dir.path(), &["eval", "--inequality", "builtin:S1bit", "--behavior", "absent.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn a1_pipeline_gives_864_facets() {
    let dir = TempDir::new().unwrap();
    let v = a1_vertices(&dir);
    let f = dir.path().join("a1.facets.json");
    ok(dir.path(), &["facets", "--vertices", v.to_str().unwrap(), "--out", f.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(json["inequalities"].as_array().unwrap().len(), 864);
    assert!(dir.path().join("a1.facets.json.manifest.json").exists());
}

#[test]
fn facet_files_do_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let v = a1_vertices(&dir);
    let mut files = Vec::new();
    for t in ["1", "8"] {
        let f = dir.path().join(format!("facets-{t}.json"));
        ok(
            dir.path(),
            &["facets", "--threads", t, "--vertices", v.to_str().unwrap(), "--out", f.to_str().unwrap()],
        );
        files.push(std::fs::read(f).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn tau3_behavior_round_trips_through_eval() {
    let dir = TempDir::new().unwrap();
    let b = dir.path().join("tau3.behavior.json");
    let direct = ok(
        dir.path(),
        &["eval", "--inequality", "builtin:Stau3", "--protocol", "builtin:tau3", "--out", b.to_str().unwrap()],
    );
    let reread = ok(dir.path(), &["eval", "--inequality", "builtin:Stau3", "--behavior", b.to_str().unwrap()]);
    let v: f64 = reread.trim().parse().unwrap();
    assert!((v - (4.0 + 2.0 * 2f64.sqrt())).abs() < 1e-9);
    assert_eq!(direct, reread);
}

#[test]
fn optimize_report_is_a_valid_protocol() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().join("opt.json");
    ok(
        dir.path(),
        &[
            "optimize", "--inequality", "builtin:S1bit", "--class", "bipartite-message", "--restarts", "5",
            "--seed", "7", "--out", o.to_str().unwrap(),
        ],
    );
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&o).unwrap()).unwrap();
    let best = report["best_value"].as_f64().unwrap();
    let v: f64 = ok(dir.path(), &["eval", "--inequality", "builtin:S1bit", "--protocol", o.to_str().unwrap()])
        .trim()
        .parse()
        .unwrap();
    assert!((v - best).abs() < 1e-9);
    assert!(best > 6.0);
}

#[test]
fn membership_separates_quantum_from_uniform() {
    let dir = TempDir::new().unwrap();
    let v = dir.path().join("s1bit.vertices.json");
    ok(dir.path(), &["vertices", "--model", "builtin:s1bit", "--out", v.to_str().unwrap()]);
    let q = dir.path().join("q.behavior.json");
    ok(
        dir.path(),
        &["eval", "--inequality", "builtin:S1bit", "--protocol", "builtin:one-bit-optimized:1", "--out", q.to_str().unwrap()],
    );
    // same scenario, every outcome equally likely
    let mut uniform: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&q).unwrap()).unwrap();
    let n = uniform["values"].as_array().unwrap().len();
    uniform["mode"] = "rational".into();
    uniform["values"] = serde_json::json!(vec!["1/4"; n]);
    let u = dir.path().join("u.behavior.json");
    std::fs::write(&u, uniform.to_string()).unwrap();

    let query = |point: &Path, mode: &str| {
        let out = dir.path().join("m.json");
        ok(
            dir.path(),
            &[
                "membership", "--vertices", v.to_str().unwrap(), "--point", point.to_str().unwrap(), "--mode", mode,
                "--out", out.to_str().unwrap(),
            ],
        );
        serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(out).unwrap()).unwrap()
    };
    for mode in ["exact", "float"] {
        let m = query(&q, mode);
        assert_eq!(m["inside"], false, "{m}");
        assert!(!m["certificate"].is_null());
        assert_eq!(query(&u, mode)["inside"], true);
    }
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let c = dir.path().join("sweep.csv");
    ok(dir.path(), &["sweep", "--points", "5", "--out", c.to_str().unwrap()]);
    let text = std::fs::read_to_string(&c).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kappa,concurrence,S_fixed,S_optimized");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[2] - (4.0 + 2.0 * 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn vertex_cache_is_used() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let run = |out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_ctc"))
            .args(["vertices", "--model", "builtin:s1bit", "--out", out])
            .current_dir(dir.path())
            .env("CTC_CACHE_DIR", &cache)
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let first = run("a.json");
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = run("b.json");
    assert_eq!(first, second);
}
