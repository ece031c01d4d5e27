use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stmc::discretize::CausalGraph;
use stmc::distances::DistanceBound;
use stmc::harness::ExperimentReport;
use stmc::TimedMetricSpace;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stmc")).args(args).output().expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn sample_writes_space_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = [
        "model", "sample", "--kind", "warped", "--warp", "const:1", "--space", "circle:6.283185", "--window", "0:1",
        "--nt", "32", "--nx", "32", "-o", p(&out),
    ];
    let summary = json_out(&stmc(&args));
    assert_eq!(summary["n"], 1024);
    assert_eq!(summary["tau_range"][0], 0.0);
    let space = TimedMetricSpace::load(&out.join("space.json")).unwrap();
    assert_eq!(space.len(), 1024);
    let graph = CausalGraph::load(&out.join("graph.json")).unwrap();
    assert_eq!(graph.len(), 1024);

    // no silent overwrite; --force allows it and the bytes are identical
    let before = std::fs::read(out.join("space.json")).unwrap();
    assert_eq!(code(&stmc(&args)), 4);
    let mut forced = args.to_vec();
    forced.push("--force");
    json_out(&stmc(&forced));
    assert_eq!(std::fs::read(out.join("space.json")).unwrap(), before);

    // sampled output round-trips through check against its own graph
    let check = json_out(&stmc(&[
        "check", p(&out.join("space.json")), "--graph", p(&out.join("graph.json")), "--eps", "0.02",
    ]));
    assert_eq!(check["reference"], "model");
    assert!(check["agreement"]["fraction"].as_f64().unwrap() >= 0.99);
}

#[test]
fn big_bang_and_region_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let bb = dir.path().join("bb");
    let s = json_out(&stmc(&[
        "model", "sample", "--kind", "warped", "--warp", "linear", "--space", "circle:6.283185", "--window", "0:1",
        "--nt", "12", "--nx", "12", "--augment-bigbang", "-o", p(&bb),
    ]));
    assert_eq!(s["basepoint"], "p_BB");
    assert!(TimedMetricSpace::load(&bb.join("space.json")).unwrap().basepoint().is_some());

    let pp = dir.path().join("pp");
    let s = json_out(&stmc(&[
        "model", "sample", "--kind", "minkowski", "--space", "euclidean:1,-1,1", "--window", "0:1", "--region",
        "past-of-point:1,0", "--nt", "16", "--nx", "16", "-o", p(&pp),
    ]));
    assert!(s["n"].as_u64().unwrap() < 256);
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = p(dir.path());
    for args in [
        vec!["model", "sample", "--kind", "warped", "--warp", "cubic", "--space", "circle:1", "--window", "0:1", "--nt", "4", "--nx", "4", "-o", o],
        vec!["model", "sample", "--kind", "warped", "--warp", "const:1", "--space", "circle:1", "--window", "1:0", "--nt", "4", "--nx", "4", "-o", o],
        vec!["model", "sample", "--kind", "warped", "--warp", "const:1", "--space", "circle:1", "--window", "0:1", "--nt", "4", "--nx", "4", "--unknown", "-o", o],
        vec!["dist", "nope", "a", "b"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&stmc(&args)), 2, "{args:?}");
    }
}

#[test]
fn disconnected_graph_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = stmc(&[
        "model", "sample", "--kind", "warped", "--warp", "const:1", "--space", "circle:6.283185", "--window", "0:1",
        "--nt", "8", "--nx", "8", "--window-cells", "0.05", "-o", p(dir.path()),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn dist_on_fixtures() {
    let (x, y) = (fixture("t_to_x.x.json"), fixture("t_to_x.y.json"));
    let th = json_out(&stmc(&["dist", "tau-h", p(&x), p(&y), "--exact-max-n", "4"]));
    assert_eq!((th["lower"].as_f64(), th["upper"].as_f64()), (Some(1.0), Some(1.0)));
    let tl = json_out(&stmc(&["dist", "timeless", p(&x), p(&y)]));
    assert_eq!((tl["lower"].as_f64(), tl["upper"].as_f64()), (Some(0.0), Some(0.0)));
    let self_gh = json_out(&stmc(&["dist", "gh", p(&x), p(&x)]));
    assert_eq!(self_gh["upper"].as_f64(), Some(0.0));

    // every op runs and its -o file reads back equal to stdout
    let dir = tempfile::tempdir().unwrap();
    for op in ["gh", "kappa-gh", "timeless", "level-sup", "level-lp", "strip-sup", "strip-lp", "tau-h"] {
        let out = dir.path().join(format!("{op}.json"));
        let printed = json_out(&stmc(&["dist", op, p(&x), p(&y), "--p", "2", "-o", p(&out)]));
        let saved = DistanceBound::load(&out).unwrap();
        assert_eq!(serde_json::to_value(&saved).unwrap(), printed, "{op}");
        assert!(saved.lower <= saved.upper, "{op}");
    }
    let norm = json_out(&stmc(&["dist", "level-lp", p(&x), p(&y), "--p", "2", "--bins", "3", "--normalized"]));
    assert!(norm["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().starts_with("normalized")));
    assert_eq!(code(&stmc(&["dist", "gh", p(&x), p(&y), "--normalized"])), 2);
    assert_eq!(code(&stmc(&["dist", "gh", p(&x), p(&y), "--exact-max-n", "9"])), 2);
}

#[test]
fn dist_is_deterministic() {
    let (x, y) = (fixture("flip_t.x.json"), fixture("levels_match.y.json"));
    let a = stmc(&["dist", "tau-h", p(&x), p(&y), "--exact-max-n", "2", "--budget", "300", "--seed", "7"]);
    let b = stmc(&["dist", "tau-h", p(&x), p(&y), "--exact-max-n", "2", "--budget", "300", "--seed", "7"]);
    assert_eq!(json_out(&a), json_out(&b));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_flags_exit_5() {
    let x = fixture("flip_t.x.json");
    assert_eq!(code(&stmc(&["dist", "bb-gh", p(&x), p(&x)])), 5);
    assert_eq!(code(&stmc(&["dist", "fd-hh", p(&x), p(&x)])), 5);
}

#[test]
fn corrupted_input_exits_6() {
    let dir = tempfile::tempdir().unwrap();
    let space = TimedMetricSpace::load(&fixture("flip_t.x.json")).unwrap();
    let n = space.len();
    let mut d = space.dist_matrix().to_vec();
    // symmetric, but breaks the triangle inequality
    d[2] = 10.0;
    d[2 * n] = 10.0;
    let path = dir.path().join("bad.json");
    TimedMetricSpace::new(space.ids().to_vec(), space.taus().to_vec(), d).unwrap().save(&path, false).unwrap();
    assert_eq!(code(&stmc(&["check", p(&path)])), 6);
    assert_eq!(code(&stmc(&["dist", "gh", p(&path), p(&fixture("flip_t.x.json"))])), 6);
}

#[test]
fn exact_fixture_encodes_causality_at_eps_0() {
    let c = json_out(&stmc(&["check", p(&fixture("flip_t.x.json")), "--eps", "0"]));
    assert_eq!(c["agreement"]["fraction"].as_f64(), Some(1.0));
    assert_eq!(c["reference"], "exact");
}

#[test]
fn experiment_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sandwich.yaml");
    std::fs::write(&cfg, "kind: sandwich\ntrials: 10\n").unwrap();
    let out = dir.path().join("report.json");
    let s = json_out(&stmc(&["experiment", p(&cfg), "--seed", "3", "-o", p(&out)]));
    assert_eq!(s["verdict"], "pass");
    let report = ExperimentReport::load(&out).unwrap();
    assert_eq!(report.seed, 3);
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with("param,lower,upper,floor"));
    assert_eq!(code(&stmc(&["experiment", p(&cfg), "-o", p(&out)])), 4);
}

#[test]
fn failing_experiment_exits_7() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("oracle.yaml");
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/oracle_const.yaml")).unwrap();
    // an impossible threshold on a cheap ladder
    let text = text.replace("max_error: 0.1", "max_error: 0.0").replace("[[16, 16], [32, 32], [64, 64]]", "[[8, 8]]");
    std::fs::write(&cfg, text.replace("output: out/oracle_const.json", "")).unwrap();
    let o = stmc(&["experiment", p(&cfg)]);
    assert_eq!(code(&o), 7, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_out_any(&o)["verdict"], "fail");
}

fn json_out_any(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        stmc::harness::ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn threads_flag_and_env() {
    let x = fixture("flip_t.x.json");
    assert!(stmc(&["dist", "gh", p(&x), p(&x), "--threads", "1"]).status.success());
    assert_eq!(code(&stmc(&["dist", "gh", p(&x), p(&x), "--threads", "0"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_stmc"))
        .args(["dist", "gh", p(&x), p(&x)])
        .env("STMC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
