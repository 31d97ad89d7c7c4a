use std::fs;
use std::path::Path;
use std::process::Command;

use subtour::cli::{run, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE};
use subtour::Schedule;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn subtour(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("subtour").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn generate_solve_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sched = dir.path().join("sched.json");
    let dot = dir.path().join("sched.dot");

    let g = subtour(&["gen", "random", "--n", "25", "--seed", "7", "--slack", "1.5", "--out", path(&inst)]);
    assert_eq!(g.code, EXIT_OK, "{}", g.err);
    assert_eq!(subtour(&["check", path(&inst)]).code, EXIT_OK);

    let s = subtour(&["solve", path(&inst), "--epsilon", "0.5", "--out", path(&sched), "--dot", path(&dot)]);
    assert_eq!(s.code, EXIT_OK, "{}", s.err);
    let report = json(&s.out);
    assert_eq!(report["guarantees_ok"], true);

    let e = subtour(&["eval", path(&inst), path(&sched)]);
    assert_eq!(e.code, EXIT_OK, "{}", e.err);
    let eval = json(&e.out);
    assert_eq!(eval["valid"], true);
    assert_eq!(eval["delay"], report["delay"]);
    assert_eq!(eval["cost"], report["cost"]);

    let schedule = Schedule::from_json(&fs::read_to_string(&sched).unwrap()).unwrap();
    let arcs = fs::read_to_string(&dot).unwrap().lines().filter(|l| l.contains("->")).count();
    assert_eq!(arcs, schedule.len() - 1);
}

#[test]
fn slack_flag_quarters_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    subtour(&["gen", "random", "--n", "6", "--out", path(&inst)]);
    let s = subtour(&["solve", path(&inst), "--slack", "2"]);
    assert_eq!(s.code, EXIT_OK);
    assert_eq!(json(&s.out)["epsilon"], 0.5);
}

#[test]
fn deadline_below_item_count_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    // every item needs at least one delivery time unit, so n - 1 is never enough
    subtour(&["gen", "random", "--n", "5", "--deadline", "4", "--out", path(&inst)]);
    let c = subtour(&["check", path(&inst)]);
    assert_eq!(c.code, EXIT_INFEASIBLE);
    assert_eq!(json(&c.out)["feasible"], false);

    let s = subtour(&["solve", path(&inst), "--epsilon", "1"]);
    assert_eq!(s.code, EXIT_INFEASIBLE);
    assert_eq!(json(&s.out)["feasible"], false);
    assert!(s.err.contains("error"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"items\": [").unwrap();
    let inst = dir.path().join("inst.json");
    subtour(&["gen", "random", "--n", "3", "--out", path(&inst)]);

    for args in [
        vec!["check", path(&bad)],
        vec!["check", "/nonexistent/instance.json"],
        vec!["solve", path(&inst)],
        vec!["solve", path(&inst), "--epsilon", "-1"],
        vec!["solve", path(&inst), "--epsilon", "0.5", "--slack", "2"],
        vec!["bench", "--epsilons", "0.5,0"],
        vec!["gen", "tight", "--k", "1", "--epsilon", "0.5"],
        vec!["frobnicate"],
    ] {
        let o = subtour(&args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}");
        assert!(!o.err.is_empty(), "{args:?}");
    }
    assert_eq!(subtour(&["--help"]).code, EXIT_OK);
}

#[test]
fn eval_rejects_improper_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sched = dir.path().join("sched.json");
    subtour(&["gen", "figure1", "--schedule", path(&sched), "--out", path(&inst)]);
    assert_eq!(subtour(&["eval", path(&inst), path(&sched)]).code, EXIT_OK);

    // demoting an item leaf to a hand-over point leaves the item uncovered
    let mut s: serde_json::Value = json(&fs::read_to_string(&sched).unwrap());
    let verts = s["vertices"].as_array_mut().unwrap();
    let leaf = verts
        .iter_mut()
        .find(|v| v["kind"] == "item" && v["children"].as_array().is_some_and(|c| c.is_empty()))
        .unwrap()
        .as_object_mut()
        .unwrap();
    leaf.insert("kind".into(), "aux".into());
    leaf.remove("item_id");
    fs::write(&sched, serde_json::to_string(&s).unwrap()).unwrap();
    let e = subtour(&["eval", path(&inst), path(&sched)]);
    assert_eq!(e.code, EXIT_USAGE);
    assert_eq!(json(&e.out)["valid"], false);
}

#[test]
fn oracles_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.json");
    let big = dir.path().join("big.json");
    subtour(&["gen", "steiner", "--n", "2", "--epsilon", "0.25", "--out", path(&small)]);
    subtour(&["gen", "random", "--n", "12", "--out", path(&big)]);

    let b = subtour(&["bounds", path(&small)]);
    assert_eq!(b.code, EXIT_OK);
    assert!(json(&b.out)["mst"].as_f64().unwrap() > 0.0);

    let o = subtour(&["oracle", path(&small), "--kind", "cost"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    assert!(json(&o.out)["search_space_size"].as_u64().unwrap() > 0);
    assert_eq!(subtour(&["oracle", path(&small)]).code, EXIT_OK);
    assert_eq!(subtour(&["oracle", path(&big)]).code, EXIT_USAGE);
}

#[test]
fn gen_spec_matches_direct_generation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"family": "tight", "k": 4, "epsilon": 0.5, "delta": 1, "sigma": 2, "deadline": {"slack": 1.5}}"#)
        .unwrap();
    let a = subtour(&["gen", "spec", path(&spec)]);
    assert_eq!(a.code, EXIT_OK, "{}", a.err);
    let b = subtour(&["gen", "tight", "--k", "4", "--epsilon", "0.5", "--sigma", "2", "--slack", "1.5"]);
    assert_eq!(a.out, b.out);
}

#[test]
fn empty_bench_corpus_prints_only_header_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = subtour(&["bench", path(dir.path())]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let lines: Vec<&str> = o.out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("instance,epsilon,n,deadline,status"));
    assert!(lines[1].starts_with("summary,"));
}

#[test]
fn bench_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    subtour(&["gen", "figure1", "--out", path(&dir.path().join("figure1.json"))]);
    fs::write(dir.path().join("spider.json"), r#"{"family": "tight", "k": 3, "epsilon": 0.5}"#).unwrap();
    fs::write(dir.path().join("broken.json"), "not json").unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();

    let strip = |csv: &str| -> Vec<String> {
        csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
    };
    let args = ["bench", path(dir.path()), "--random", "3", "--seed", "11", "--epsilons", "0.5,1"];
    let a = subtour(&args);
    let b = subtour(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.err);
    assert_eq!(strip(&a.out), strip(&b.out));
    // header, (3 files + 3 random) x 2 eps, summary
    assert_eq!(a.out.lines().count(), 1 + 12 + 1);
    assert!(a.err.contains("skipping broken"));
    assert!(a.out.lines().any(|l| l.starts_with("broken,") && l.contains("error")));
    assert!(a.out.lines().last().unwrap().contains("12 runs, 2 failed, 0 violated"));
}

#[test]
fn binary_exit_status_follows_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    subtour(&["gen", "random", "--n", "4", "--deadline", "3", "--out", path(&inst)]);
    let bin = env!("CARGO_BIN_EXE_subtour");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["check", path(&inst)]), Some(EXIT_INFEASIBLE));
    assert_eq!(status(&["check", "/nonexistent.json"]), Some(EXIT_USAGE));
    assert_eq!(status(&["--version"]), Some(EXIT_OK));
}
