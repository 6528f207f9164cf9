use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn momentnet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentnet"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MOMENTNET_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = momentnet(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const QUICK: [&str; 6] = ["--set", "samples=500", "--set", "max_epochs=20", "--set", "hidden=8"];

#[test]
fn constant_one_gives_k4() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["sample", "--graphon", "constant:1", "--n", "4", "--out", "g"], dir.path());
    let text = fs::read_to_string(dir.path().join("g/g_n00004_r000.edges")).unwrap();
    assert_eq!(text, "n 4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    assert!(dir.path().join("g/g_n00004_r000.latents").exists());
    let m = json(&dir.path().join("g/manifest.json"));
    assert_eq!(m["subcommand"], "sample");

    ok(&["census", "--in", "g", "--out", "c.json"], dir.path());
    let c = json(&dir.path().join("c.json"));
    let avg: Vec<f64> = serde_json::from_value(c["average"].clone()).unwrap();
    assert_eq!(avg, vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!(dir.path().join("c.json.manifest.json").exists());
}

#[test]
fn sampling_is_reproducible_and_follows_size_list() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["sample", "--graphon", "4", "--n", "20,25,...,40", "--count", "2", "--seed", "7", "--out", out];
    ok(&args("a"), dir.path());
    ok(&args("b"), dir.path());
    let names: Vec<String> = {
        let mut v: Vec<String> = fs::read_dir(dir.path().join("a"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".edges") || n.ends_with(".latents"))
            .collect();
        v.sort();
        v
    };
    assert_eq!(names.len(), 5 * 2 * 2);
    assert!(names.contains(&"g_n00040_r001.edges".to_string()));
    for n in &names {
        assert_eq!(
            fs::read(dir.path().join("a").join(n)).unwrap(),
            fs::read(dir.path().join("b").join(n)).unwrap(),
            "{n}"
        );
    }
}

#[test]
fn census_output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["sample", "--graphon", "2", "--n", "30", "--count", "20", "--seed", "1", "--out", "g"], dir.path());
    ok(&["--jobs", "1", "census", "--in", "g", "--out", "one.json"], dir.path());
    ok(&["census", "--jobs", "8", "--in", "g", "--out", "eight.json"], dir.path());
    assert_eq!(
        fs::read(dir.path().join("one.json")).unwrap(),
        fs::read(dir.path().join("eight.json")).unwrap()
    );
}

#[test]
fn census_rejects_empty_and_broken_inputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = momentnet(&["census", "--in", "empty", "--out", "c.json"], dir.path());
    assert!(!out.status.success());

    fs::create_dir(dir.path().join("bad")).unwrap();
    fs::write(dir.path().join("bad/x.edges"), "0 1\n1 one\n").unwrap();
    let out = momentnet(&["census", "--in", "bad", "--out", "c.json"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("x.edges"), "{err}");
}

#[test]
fn invalid_graphon_spec_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = momentnet(&["sample", "--graphon", "constant:2", "--n", "10", "--out", "g"], dir.path());
    assert!(!out.status.success());
    let out = momentnet(&["sample", "--graphon", "99", "--n", "10", "--out", "g"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn estimate_is_deterministic_and_dumps_grid() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["sample", "--graphon", "constant:0.3", "--n", "40", "--count", "3", "--out", "g"], dir.path());
    ok(&["census", "--in", "g", "--out", "c.json"], dir.path());
    fs::write(dir.path().join("train.cfg"), "# quick\nlearning_rate = 0.02\n").unwrap();
    for model in ["m1.inr", "m2.inr"] {
        let mut args = vec!["estimate", "--moments", "c.json", "--config", "train.cfg", "--out-model", model];
        args.extend(QUICK);
        args.extend(["--dump-grid", "12"]);
        ok(&args, dir.path());
    }
    assert_eq!(
        fs::read(dir.path().join("m1.inr")).unwrap(),
        fs::read(dir.path().join("m2.inr")).unwrap()
    );
    let grid = fs::read_to_string(dir.path().join("m1.inr.grid.csv")).unwrap();
    assert_eq!(grid.lines().next(), Some("12"));
    assert_eq!(grid.lines().count(), 13);
    let report = json(&dir.path().join("m1.inr.report.json"));
    assert_eq!(report["epochs_run"], 20);
    let manifest = json(&dir.path().join("m1.inr.manifest.json"));
    assert_eq!(manifest["parameters"]["config"]["learning_rate"], 0.02);
}

#[test]
fn estimate_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["sample", "--graphon", "constant:0.3", "--n", "10", "--out", "g"], dir.path());
    ok(&["census", "--in", "g", "--out", "c.json"], dir.path());
    let out = momentnet(
        &["estimate", "--moments", "c.json", "--set", "learning_rate=-1", "--out-model", "m.inr"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(!dir.path().join("m.inr").exists());
}

#[test]
fn mixup_with_no_graphs_still_writes_model_and_target() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["sample", "--graphon", "constant:0.2", "--n", "30", "--count", "4", "--seed", "1", "--out", "a"], dir.path());
    ok(&["sample", "--graphon", "constant:0.8", "--n", "30", "--count", "4", "--seed", "2", "--out", "b"], dir.path());
    let mut args = vec![
        "mixup", "--class-a", "a", "--class-b", "b", "--alpha", "0.5", "--n-sample", "4", "--n-nodes", "20",
        "--n-graphs", "0", "--labels", "0,1", "--out", "mix",
    ];
    args.extend(QUICK);
    ok(&args, dir.path());
    let labels = fs::read_to_string(dir.path().join("mix/labels.tsv")).unwrap();
    assert_eq!(labels, "file\tclass_0\tclass_1\n");
    assert!(dir.path().join("mix/model.inr").exists());
    let m = json(&dir.path().join("mix/manifest.json"));
    assert_eq!(m["subcommand"], "mixup");
    // Sampled classes only approximate 0.032 and 0.128; the mixed wedge
    // density sits near 0.08.
    let p3 = m["details"]["target"][1].as_f64().unwrap();
    assert!((p3 - 0.08).abs() < 0.02, "{p3}");
    assert!(m["details"]["report"]["residuals"].is_array());
}

#[test]
fn eval_of_truth_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "eval", "--graphon", "1", "--truth", "1", "--samples", "2000", "--centrality", "degree", "--out",
            "ev",
        ],
        dir.path(),
    );
    assert!(text.contains("aligned_mse = 0\n"), "{text}");
    assert!(text.contains("linf_vs_monte_carlo = 0\n"), "{text}");
    assert!(dir.path().join("ev/report.txt").exists());
    let csv = fs::read_to_string(dir.path().join("ev/centrality_degree.csv")).unwrap();
    assert!(csv.starts_with("x,value\n"));
    assert_eq!(csv.lines().count(), 101);
    assert!(dir.path().join("ev/centrality_degree_analytic.csv").exists());
}

#[test]
fn eval_theory_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["eval", "--theory", "50,200,2,0.05"], dir.path());
    assert!(text.contains("lemma1_bound = 9.54443444034913"), "{text}");
    let text = ok(&["eval", "--theory", "50,200,3,0.05"], dir.path());
    assert!(text.contains("n_threshold = 118098\n"), "{text}");
    assert!(text.contains("vacuous = true"), "{text}");
}

#[test]
fn eval_needs_something_to_do() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!momentnet(&["eval"], dir.path()).status.success());
    assert!(!momentnet(&["eval", "--truth", "1"], dir.path()).status.success());
    assert!(!momentnet(&["eval", "--theory", "1,2,1,0.5"], dir.path()).status.success());
}
