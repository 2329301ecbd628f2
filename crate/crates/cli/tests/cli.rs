use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use alcove::alcove_markov::spectrum_from_json;
use alcove::fusion::FusionTable;
use alcove::scaling::{parse_trajectory_jsonl, BrownianFit};
use alcove_cli::RunConfig;
use serde_json::Value;

fn alcove(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_alcove"));
    cmd.args(args).env_remove("ALCOVE_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("ALCOVE_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn stdout_json(args: &[&str]) -> Value {
    let out = alcove(args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn su2_fusion_entries() {
    let v = stdout_json(&["fusion", "--family", "A", "--rank", "1", "--level", "2", "--gamma", "1", "--lambda", "1"]);
    let one: Vec<(i64, i64)> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["n"] == 1)
        .map(|e| (e["beta"][0].as_i64().unwrap(), e["coeff"].as_i64().unwrap()))
        .collect();
    assert_eq!(one, vec![(0, 1), (2, 1)]);
}

#[test]
fn zero_steps_give_the_identity_table() {
    let out = alcove(&["fusion", "--family", "A", "--rank", "2", "--level", "2", "--gamma", "1,0", "--n", "0"], None);
    let table = FusionTable::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(table.entries.len(), 6);
    assert!(table.entries.iter().all(|((l, n, b), c)| l == b && *n == 0 && *c == 1u32.into()));
}

#[test]
fn full_su2_table_matches_the_closed_rule() {
    for k in 1..=8i64 {
        for j in 0..=k {
            let out = alcove(
                &["fusion", "--family", "A", "--rank", "1", "--level", &k.to_string(), "--gamma", &j.to_string()],
                None,
            );
            let table = FusionTable::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
            for i in 0..=k {
                for s in 0..=k {
                    let rule = (i - j).abs() <= s && s <= (i + j).min(2 * k - i - j) && (i + j + s) % 2 == 0;
                    let got = table.get(&alcove::Weight::new(vec![i]), 1, &alcove::Weight::new(vec![s]));
                    assert_eq!(got, (rule as u32).into(), "k={k} {i} {j} {s}");
                }
            }
        }
    }
}

#[test]
fn measure_and_spectrum() {
    let v = stdout_json(&["measure", "--family", "A", "--rank", "1", "--level", "2"]);
    let vals: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in vals.iter().zip([0.25, 0.5, 0.25]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(v["lattice_index"], "8");
    let out = alcove(&["spectrum", "--family", "A", "--rank", "1", "--level", "5", "--gamma", "1"], None);
    let spec = spectrum_from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(spec.len(), 6);
    for p in &spec {
        let m = p.sigma[0] as f64;
        // kernel eigenvalue χ_1(σ)/χ_1(0); the Dirichlet one is 1 minus half of χ_1(σ)
        let expect = (std::f64::consts::PI * (m + 1.0) / 7.0).cos() / (std::f64::consts::PI / 7.0).cos();
        assert!((p.eigenvalue.re - expect).abs() < 1e-12);
    }
}

#[test]
fn count_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = alcove(
        &["count", "--family", "B", "--rank", "2", "--level", "2", "--gamma", "1,0", "--n", "4", "--format", "csv"],
        Some(dir.path()),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("count.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,rank,level,lambda,beta,n,exact_count,fusion_count,asymptotic_value,ratio"
    );
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 10);
        assert_eq!(f[6], f[7], "{line}");
    }
}

#[test]
fn simulate_is_reproducible_and_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--family", "A", "--rank", "1", "--gamma", "1", "--n", "400", "--seed", "9"];
    let a = alcove(&[&args[..], &["-o", "a.jsonl"]].concat(), Some(dir.path()));
    let b = alcove(&[&args[..], &["-o", "b.jsonl"]].concat(), Some(dir.path()));
    assert!(a.status.success() && b.status.success());
    let fa = fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(fa, fs::read(dir.path().join("b.jsonl")).unwrap());
    let samples = parse_trajectory_jsonl(std::str::from_utf8(&fa).unwrap()).unwrap();
    assert_eq!(samples.len(), 401);
    let missing = alcove(&args[..args.len() - 2], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn convolve_reports_small_total_variation() {
    let v = stdout_json(&["convolve", "--family", "A", "--rank", "1", "--level", "100", "--gamma", "50", "--xi", "50"]);
    assert!(v["density"]["total_variation"].as_f64().unwrap() < 0.05);
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn fit_round_trips() {
    let out = alcove(&["fit", "--family", "A", "--rank", "1", "--gamma", "1", "--n", "10000"], None);
    let fit = BrownianFit::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(fit.level, 100);
    assert!(fit.residual < 0.05);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"family": "A", "rank": 1, "level": 3, "gamma": [1], "beta": [0], "n": 40}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = stdout_json(&["asymptotics", "--config", c]);
    assert_eq!(v["wrong_residue"], false);
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() < 0.01);
    let v = stdout_json(&["asymptotics", "--config", c, "--n", "41"]);
    assert_eq!(v["wrong_residue"], true);
    assert_eq!(v["exact"], "0");
    let parsed = RunConfig::load(&cfg).unwrap();
    assert_eq!(parsed.level, Some(3));
    fs::write(&cfg, r#"{"family": "A", "colour": 1}"#).unwrap();
    assert_eq!(alcove(&["measure", "--config", c], None).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, ext) in [("kernel", "csv"), ("spectrum", "json"), ("measure", "json"), ("kernel", "json")] {
        let mut bodies = vec![];
        for _ in 0..2 {
            let out = alcove(
                &[cmd, "--family", "C", "--rank", "2", "--level", "2", "--gamma", "1,0", "--format", ext],
                Some(dir.path()),
            );
            assert!(out.status.success());
            bodies.push(fs::read(dir.path().join(format!("{cmd}.{ext}"))).unwrap());
        }
        assert_eq!(bodies[0], bodies[1]);
    }
}

#[test]
fn exit_codes() {
    let bad = alcove(&["fusion", "--family", "A", "--rank", "1", "--level", "2", "--gamma", "3"], None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("alcove constraint"));
    let bad = alcove(&["measure", "--family", "E", "--rank", "6", "--level", "1"], None);
    assert_eq!(bad.status.code(), Some(2));
    let big = alcove(&["fusion", "--family", "A", "--rank", "1", "--level", "1", "--gamma", "1", "--n", "5000000000"], None);
    assert_eq!(big.status.code(), Some(2));
    let heavy = alcove(&["fit", "--family", "A", "--rank", "7", "--gamma", "1,0,0,0,0,0,0", "--n", "10000"], None);
    assert_eq!(heavy.status.code(), Some(3), "{}", String::from_utf8_lossy(&heavy.stderr));
    let ok = alcove(&["verify", "--family", "A", "--rank", "2", "--level", "2"], None);
    assert_eq!(ok.status.code(), Some(0));
    let strict = alcove(&["verify", "--family", "A", "--rank", "2", "--level", "2", "--tolerance", "0"], None);
    assert_eq!(strict.status.code(), Some(4));
}
