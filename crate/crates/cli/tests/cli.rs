use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapecode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_reports_a_distribution() {
    let v = json(&run(&["solve", "--costs", "1,2,3,4", "--hsource", "2", "--f", "1.5"]));
    let probs: Vec<f64> = v["p_hat"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!((v["entropy_h"].as_f64().unwrap() - 2.0 / 1.5).abs() < 1e-9);
    assert!(probs.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn solve_optimal_reports_minimum_total_cost() {
    let v = json(&run(&["solve", "--costs", "1,2,3", "--hsource", "1", "--optimal"]));
    let t = v["t_min"].as_f64().unwrap();
    let f = v["f"].as_f64().unwrap();
    for df in [-0.05, 0.05] {
        let w = json(&run(&[
            "solve", "--costs", "1,2,3", "--hsource", "1", "--f", &(f + df).to_string(),
        ]));
        assert!(w["total_cost"].as_f64().unwrap() >= t - 1e-9);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["solve", "--costs", "1,1", "--hsource", "2", "--f", "1.5"])), 2);
    assert_eq!(code(&run(&["solve", "--costs", "0,1", "--hsource", "1", "--optimal"])), 3);
    assert_eq!(code(&run(&["solve", "--bogus"])), 1);
    assert_eq!(code(&run(&["solve", "--costs", "1,2"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk");
    std::fs::write(&junk, b"not a stream").unwrap();
    let tree = dir.path().join("t.json");
    assert_eq!(code(&run(&["build", "--costs", "1,2", "--k-bits", "3", "--tree", p(&tree)])), 0);
    assert_eq!(code(&run(&["decode", "--input", p(&junk), "--tree", p(&tree)])), 4);
    let missing = dir.path().join("missing");
    assert_eq!(code(&run(&["decode", "--input", p(&missing), "--tree", p(&tree)])), 4);
}

fn round_trip(data: &[u8], costs: &str, k_bits: &str) {
    let dir = tempfile::tempdir().unwrap();
    let (input, shaped, out, tree) = (
        dir.path().join("in"),
        dir.path().join("s"),
        dir.path().join("out"),
        dir.path().join("t.json"),
    );
    std::fs::write(&input, data).unwrap();
    let e = run(&[
        "encode", "--input", p(&input), "--out", p(&shaped), "--tree", p(&tree), "--design",
        "--costs", costs, "--k-bits", k_bits,
    ]);
    assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));
    let d = run(&["decode", "--input", p(&shaped), "--tree", p(&tree), "--out", p(&out)]);
    assert_eq!(code(&d), 0, "{}", String::from_utf8_lossy(&d.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), data);
}

#[test]
fn encode_decode_round_trips() {
    round_trip(b"", "1,2", "4");
    round_trip(b"a", "1,2,3", "8");
    round_trip(b"abracadabra abracadabra abracadabra", "1,1.5,2.5,4", "6");
    let mut r = Xoshiro256PlusPlus::seed_from_u64(11);
    let data: Vec<u8> = (0..4000).map(|_| r.random()).collect();
    round_trip(&data, "1,2,3", "10");
}

#[test]
fn wrong_tree_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (input, shaped, t1, t2) = (
        dir.path().join("in"),
        dir.path().join("s"),
        dir.path().join("t1.json"),
        dir.path().join("t2.json"),
    );
    std::fs::write(&input, b"hello hello hello").unwrap();
    run(&["build", "--costs", "1,2", "--k-bits", "4", "--tree", p(&t1)]);
    run(&["build", "--costs", "1,3", "--k-bits", "4", "--tree", p(&t2)]);
    assert_eq!(code(&run(&["encode", "--input", p(&input), "--out", p(&shaped), "--tree", p(&t1)])), 0);
    let d = run(&["decode", "--input", p(&shaped), "--tree", p(&t2)]);
    assert_eq!(code(&d), 4);
}

#[test]
fn randomized_output_is_deterministic() {
    let args = ["dm-test", "--target", "0.6,0.4", "--K", "16,64", "--seed", "3", "--messages", "3000"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["dm-test", "--target", "0.6,0.4", "--K", "16,64", "--messages", "3000"]);
    assert_eq!(code(&c), 1, "seed is required");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"costs":[1,2,3],"h_source":1.0,"f":1.2}"#).unwrap();
    let from_file = json(&run(&["solve", "--config", p(&cfg)]));
    assert_eq!(from_file["f"].as_f64().unwrap(), 1.2);
    let overridden = json(&run(&["solve", "--config", p(&cfg), "--f", "1.8"]));
    assert_eq!(overridden["f"].as_f64().unwrap(), 1.8);
    std::fs::write(&cfg, r#"{"costs":[1,2,3],"typo":1}"#).unwrap();
    assert_eq!(code(&run(&["solve", "--config", p(&cfg)])), 1);
}

#[test]
fn curve_csv_has_fixed_columns() {
    let o = run(&["curve", "--costs", "1,2", "--hsource", "1", "--grid", "1:2:5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("f,mu,N,entropy_h,avg_cost,total_cost"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn build_histogram_counts_every_leaf() {
    let o = run(&["build", "--costs", "1,2,3", "--K", "50", "--histogram"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let total: usize = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 50);
}

#[test]
fn eval_codebook_file() {
    let dir = tempfile::tempdir().unwrap();
    let cb = dir.path().join("cb.json");
    std::fs::write(
        &cb,
        r#"{"source_alphabet":2,"block_len":1,"output_alphabet":2,"entries":[[0],[1,0]]}"#,
    )
    .unwrap();
    let v = json(&run(&["eval", "--codebook", p(&cb), "--target", "0.5,0.5", "--costs", "1,2"]));
    assert!((v["f"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let ph: Vec<f64> = v["p_hat"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((ph[0] - 2.0 / 3.0).abs() < 1e-12);
}
