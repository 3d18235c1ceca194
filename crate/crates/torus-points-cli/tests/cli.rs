//! End-to-end tests for the `torus-points` binary: the documented example
//! invocations, exit codes, configuration handling, and output determinism.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torus-points"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

/// Runs the binary and parses its single-object JSON output.
fn run_json(args: &[&str]) -> serde_json::Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "args {args:?} failed: {stderr}");
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).expect("stdout is JSON");
    assert_eq!(v["schema"], "torus-points/1");
    v
}

#[test]
fn lat_primitive_example() {
    let v = run_json(&["lat", "primitive", "--basis", "[[2,4]]"]);
    assert_eq!(v["primitive"], false);
    let v = run_json(&["lat", "primitive", "--basis", "[[1,2]]"]);
    assert_eq!(v["primitive"], true);
}

#[test]
fn deps_primitive_dependent_example() {
    let v = run_json(&["deps", "primitive-dependent", "--point", "(-1, 2)"]);
    assert_eq!(v["dependent"], true);
    assert_eq!(v["primitive"], false);
    assert_eq!(v["relation"], serde_json::json!(["2", "0"]));
}

#[test]
fn sieve_example_finds_the_torsion_pair() {
    let v = run_json(&["sieve", "--variety", "x+y-1", "--codim", "1", "--bound", "1"]);
    let displays: Vec<&str> =
        v["points"].as_array().unwrap().iter().map(|p| p["display"].as_str().unwrap()).collect();
    assert!(displays.contains(&"(zeta(6,1), zeta(6,5))"), "points: {displays:?}");
    assert!(displays.contains(&"(zeta(6,5), zeta(6,1))"));
    assert!(displays.contains(&"(1/2, 1/2)"));
    assert_eq!(v["max_height"], "0.693147180560");
}

#[test]
fn parse_errors_exit_2() {
    let (code, _, stderr) = run(&["lat", "primitive", "--basis", "[[oops"]);
    assert_eq!(code, 2, "stderr: {stderr}");
    let (code, _, _) = run(&["deps", "dependent", "--point", "(0, 1)"]);
    assert_eq!(code, 3); // zero is rejected by the model, not the parser
    let (code, _, _) = run(&["deps", "dependent", "--point", "(("]);
    assert_eq!(code, 2);
    // missing required bound: flag or config
    let (code, _, stderr) = run(&["sieve", "--variety", "x+y-1", "--codim", "1"]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn domain_errors_exit_3() {
    let (code, _, stderr) = run(&["witness", "--point", "(2, 3)", "--codim", "3", "--bound", "2"]);
    assert_eq!(code, 3, "stderr: {stderr}");
    // the periodic-curve intersection refuses Chebyshev-conjugate maps
    let (code, _, stderr) = run(&[
        "dyn",
        "intersect",
        "--curve",
        "x+y-1",
        "--map",
        "2x^2-1",
        "--deg-bound",
        "2",
    ]);
    assert_eq!(code, 3, "stderr: {stderr}");
    // a prime beyond the trial-division bound cannot enter the model
    let (code, _, stderr) =
        run(&["deps", "dependent", "--point", "(1000003, 2)", "--trial-bound", "1000"]);
    assert_eq!(code, 3, "stderr: {stderr}");
}

#[test]
fn output_is_deterministic_across_workers() {
    let args = ["sieve", "--variety", "x+y-1", "--codim", "1", "--bound", "2"];
    let (c1, first, _) = run(&args);
    assert_eq!(c1, 0);
    let mut one_worker = vec!["--workers", "1"];
    one_worker.extend_from_slice(&args);
    let mut three_workers = vec!["--workers", "3"];
    three_workers.extend_from_slice(&args);
    let (c2, with_one, _) = run(&one_worker);
    let (c3, with_three, _) = run(&three_workers);
    assert_eq!(c2, 0);
    assert_eq!(c3, 0);
    assert_eq!(first, with_one);
    assert_eq!(first, with_three);
}

#[test]
fn config_file_supplies_bounds_and_flags_override() {
    let path = std::env::temp_dir().join(format!("torus-points-test-{}.conf", std::process::id()));
    std::fs::write(&path, "# test config\nbound = 1\nheight_bound = 0.7\n").unwrap();
    let config = path.to_str().unwrap();

    // `bound` and `height_bound` come from the file; all sieve heights are
    // at most log 2 < 0.7.
    let v = run_json(&["sieve", "--variety", "x+y-1", "--codim", "1", "--config", config]);
    assert_eq!(v["height_bound"], "0.700000000000");
    assert_eq!(v["height_bound_ok"], true);
    assert_eq!(v["subgroups_scanned"], 5);

    // a flag overrides the file
    let v = run_json(&[
        "sieve",
        "--variety",
        "x+y-1",
        "--codim",
        "1",
        "--config",
        config,
        "--height-bound",
        "0.05",
    ]);
    assert_eq!(v["height_bound"], "0.0500000000000");
    assert_eq!(v["height_bound_ok"], false);

    let (code, _, stderr) = {
        std::fs::write(&path, "no_such_key = 1\n").unwrap();
        run(&["lat", "gram", "--basis", "[[1]]", "--config", config])
    };
    assert_eq!(code, 2, "stderr: {stderr}");

    std::fs::remove_file(&path).ok();
}

#[test]
fn subgroup_stream_is_json_lines() {
    let (code, stdout, _) = run(&["grp", "enum", "--ambient", "2", "--codim", "1", "--bound", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines.len() >= 5, "got {} subgroups", lines.len());
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).expect("each line is JSON");
        assert_eq!(v["schema"], "torus-points/1");
        assert_eq!(v["ambient"], 2);
    }
    // connected filtering strictly shrinks the bound-2 stream (it drops the
    // disconnected x^2 = 1 and friends)
    let all = ["grp", "enum", "--ambient", "2", "--codim", "1", "--bound", "2"];
    let mut connected_args = all.to_vec();
    connected_args.push("--connected");
    let (code, everything, _) = run(&all);
    assert_eq!(code, 0);
    let (code, connected, _) = run(&connected_args);
    assert_eq!(code, 0);
    assert!(connected.lines().count() < everything.lines().count());
}

#[test]
fn dynamics_subcommands() {
    let v = run_json(&["dyn", "classify", "--map", "x^3"]);
    assert_eq!(v["class"], "monomial");
    let v = run_json(&["dyn", "classify", "--map", "2x^2-1"]);
    assert_eq!(v["class"], "chebyshev");
    let v = run_json(&["dyn", "classify", "--map", "x^2+1"]);
    assert_eq!(v["class"], "neither");

    let v = run_json(&["dyn", "commute", "--map", "x^2-2", "--deg-bound", "3"]);
    let found: Vec<&str> =
        v["commuting"].as_array().unwrap().iter().map(|g| g.as_str().unwrap()).collect();
    assert_eq!(found, ["x", "x^2 - 2", "x^3 - 3*x"]);

    let v = run_json(&["dyn", "height", "--map", "x^2-1", "--at", "-1", "--target-err", "1e-9"]);
    let value: f64 = v["value"].as_str().unwrap().parse().unwrap();
    assert!(value <= 1e-9);
    assert!(v["iterations"].as_u64().unwrap() <= 40);
    assert!(v["error_bound"].as_str().is_some());

    let v = run_json(&["dyn", "periodic", "--map", "x^2-1", "--at", "0"]);
    assert_eq!(v["preperiodic"], true);
    assert_eq!(v["period"], 2);
}

#[test]
fn gamma_sieve_subcommand() {
    let v = run_json(&[
        "sieve",
        "gamma",
        "--variety",
        "x+y-1",
        "--codim",
        "1",
        "--bound",
        "1",
        "--gamma",
        "2;",
        "--gamma-bound",
        "1",
    ]);
    let displays: Vec<&str> =
        v["points"].as_array().unwrap().iter().map(|p| p["display"].as_str().unwrap()).collect();
    assert!(displays.contains(&"(1/3, 2/3)"), "points: {displays:?}");
    assert!(v["gamma_exponent_bound"].as_i64().is_some());
}

#[test]
fn coset_and_character_subcommands() {
    let v = run_json(&["sieve", "coset", "--curve", "2t, 3t"]);
    assert_eq!(v["contained"], true);
    assert_eq!(v["character"], serde_json::json!(["1", "-1"]));
    assert_eq!(v["constant"], "2/3");

    let v = run_json(&["sieve", "coset", "--curve", "t, 1-t"]);
    assert_eq!(v["contained"], false);

    let v = run_json(&["sieve", "characters", "--curve", "(t, 1-t)"]);
    let kinds: Vec<&str> = v["findings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.len(), 3);
    assert!(kinds.iter().all(|k| *k == "point-pair"));
}
