//! The command-line flow in-process: sample a model, check its causal
//! encoding, and bound the distance between two samplings.

use stmc::cli::main_with;

fn main() {
    let dir = std::env::temp_dir().join("stmc-cli-flow");
    let (a, b) = (dir.join("a"), dir.join("b"));
    let sample = |out: &std::path::Path, nt: &str| {
        let args = [
            "stmc", "model", "sample", "--kind", "warped", "--warp", "const:1", "--space", "circle:6.283185",
            "--window", "0:1", "--nt", nt, "--nx", "8", "--force", "-o", out.to_str().unwrap(),
        ];
        assert_eq!(main_with(args), 0);
    };
    sample(&a, "8");
    sample(&b, "9");
    let space = |d: &std::path::Path| d.join("space.json").to_str().unwrap().to_string();
    let graph = a.join("graph.json");
    let code = main_with(["stmc", "check", &space(&a), "--graph", graph.to_str().unwrap(), "--eps", "0.02"]);
    println!("check exit {code}");
    let code = main_with(["stmc", "dist", "tau-h", &space(&a), &space(&b), "--budget", "2000"]);
    println!("dist exit {code}");
}
