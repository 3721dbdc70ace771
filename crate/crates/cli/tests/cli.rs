use std::path::Path;
use std::process::{Command, Output};

fn glab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(args)
        .output()
        .expect("spawn glab")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = p(dir, name);
    let mut full = vec!["dict", "gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let out = glab(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn gen_writes_dictionary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "d.bin",
        &[
            "--kind",
            "perturbed-identity",
            "--n",
            "300",
            "--eps",
            "1e-4",
            "--seed",
            "6",
        ],
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{d}.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "dict gen");
    assert_eq!(manifest["seed"], 6);
    assert!(manifest["duration_seconds"].is_number());
    assert_eq!(manifest["outputs"][0], d.as_str());

    let out = glab(&["dict", "coherence", &d]);
    assert_eq!(out.status.code(), Some(0));
    let mu = stdout_json(&out)["mu"].as_f64().unwrap();
    let lib = glab_core::io::read_dictionary(Path::new(&d))
        .unwrap()
        .coherence()
        .unwrap();
    assert_eq!(mu, lib);
    assert!(mu <= 4e-4);

    let info = stdout_json(&glab(&["dict", "info", &d]));
    assert_eq!(info["m"], 300);
    assert_eq!(info["N"], 300);
    assert!(info["max_norm_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn csv_and_binary_dictionaries_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(
        dir.path(),
        "a.bin",
        &["--kind", "gaussian", "--m", "5", "--n", "9", "--seed", "3"],
    );
    let b = gen(
        dir.path(),
        "b.csv",
        &["--kind", "gaussian", "--m", "5", "--n", "9", "--seed", "3"],
    );
    let da = glab_core::io::read_dictionary(Path::new(&a)).unwrap();
    let db = glab_core::io::read_dictionary(Path::new(&b)).unwrap();
    assert_eq!(da.atoms(), db.atoms());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec![
            "dict", "gen", "--kind", "gaussian", "--m", "0", "--n", "4", "--seed", "1", "-o",
            "x.bin",
        ],
        vec![
            "dict", "gen", "--kind", "gaussian", "--m", "4", "--seed", "1", "-o", "x.bin",
        ],
        vec![
            "dict", "gen", "--kind", "gaussian", "--m", "4", "--n", "4", "-o", "x.bin",
        ],
        vec!["rip", "--dict", "x.bin"],
        vec!["rip", "--dict", "x.bin", "--sampled", "2"],
        vec![
            "certify", "tropp", "--dict", "x.bin", "--n", "2", "--trials", "3",
        ],
        vec!["frobnicate"],
    ] {
        let out = glab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_errors_exit_one_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "d.bin",
        &[
            "--kind", "gaussian", "--m", "10", "--n", "40", "--seed", "1",
        ],
    );
    let out = glab(&["rip", "--dict", &d, "--exact", "6", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "EnumerationBudgetExceeded");
    assert!(err["message"].as_str().unwrap().contains("3838380"));

    let out = glab(&[
        "certify", "tropp", "--dict", &d, "--n", "3", "--trials", "3", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "HypothesisUnmet");

    let out = glab(&["dict", "info", &p(dir.path(), "missing.bin")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rip_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "d.bin",
        &["--kind", "gaussian", "--m", "6", "--n", "10", "--seed", "2"],
    );
    let exact = stdout_json(&glab(&["rip", "--dict", &d, "--exact", "3"]));
    assert_eq!(exact["kind"], "exact");
    assert_eq!(exact["subsets_examined"], 120);
    let sampled = stdout_json(&glab(&[
        "rip",
        "--dict",
        &d,
        "--sampled",
        "3",
        "--trials",
        "30",
        "--seed",
        "1",
    ]));
    let bound = stdout_json(&glab(&["rip", "--dict", &d, "--bound", "3"]));
    let v = |j: &serde_json::Value| j["value"].as_f64().unwrap();
    assert!(v(&sampled) <= v(&exact) && v(&exact) <= v(&bound) + 1e-12);
}

#[test]
fn run_and_oracle_on_orthonormal_dictionary() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "q.bin",
        &["--kind", "orthonormal", "--m", "6", "--seed", "4"],
    );
    let f = p(dir.path(), "f.csv");
    std::fs::write(&f, "3\n-1\n0.5\n2\n0\n-0.25\n").unwrap();
    let residual = p(dir.path(), "r.csv");
    let out = glab(&[
        "run",
        "--algo",
        "omp",
        "--steps",
        "2",
        "--dict",
        &d,
        "--target",
        &f,
        "--residual-out",
        &residual,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let trace = stdout_json(&out);
    assert_eq!(trace["selected"].as_array().unwrap().len(), 2);
    assert!(Path::new(&format!("{residual}.manifest.json")).exists());
    let r = glab_core::io::read_vector(Path::new(&residual)).unwrap();

    let oracle = stdout_json(&glab(&[
        "oracle",
        "--dict",
        &d,
        "--target",
        &f,
        "--n",
        "2",
        "--exhaustive",
    ]));
    let sigma = oracle["sigma"].as_f64().unwrap();
    assert!((r.norm() - sigma).abs() < 1e-12 * 4.0);

    let pga = glab(&[
        "run", "--algo", "pga", "--steps", "3", "--dict", &d, "--target", &f,
    ]);
    assert_eq!(pga.status.code(), Some(0));
    let womp = glab(&[
        "run", "--algo", "womp", "--kappa", "1.5", "--steps", "3", "--dict", &d, "--target", &f,
    ]);
    assert_eq!(womp.status.code(), Some(2));
}

#[test]
fn certify_reports_and_skips() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "d.bin",
        &[
            "--kind",
            "perturbed-identity",
            "--n",
            "120",
            "--eps",
            "1e-4",
            "--seed",
            "6",
        ],
    );
    for sub in ["instance-opt", "postprocess"] {
        let out = glab(&[
            "certify", sub, "--dict", &d, "--n", "1", "--trials", "4", "--seed", "3",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let rep = stdout_json(&out);
        assert_eq!(rep["passed"], true);
        assert_eq!(rep["skipped"], 0);
        assert_eq!(rep["instances_run"], 4);
    }
    // A n = 208 steps exceed N = 120: a numerical error, not a skip
    let out = glab(&[
        "certify",
        "instance-opt",
        "--dict",
        &d,
        "--n",
        "2",
        "--trials",
        "2",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // 104 μ > 1/6: the hypothesis is not certified
    let coarse = gen(
        dir.path(),
        "c.bin",
        &[
            "--kind",
            "perturbed-identity",
            "--n",
            "60",
            "--eps",
            "1e-3",
            "--seed",
            "6",
        ],
    );
    let out = glab(&[
        "certify",
        "instance-opt",
        "--dict",
        &coarse,
        "--n",
        "1",
        "--trials",
        "4",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(
        (rep["skipped"].as_u64(), rep["instances_run"].as_u64()),
        (Some(4), Some(0))
    );

    let g = gen(
        dir.path(),
        "g.bin",
        &["--kind", "gaussian", "--m", "8", "--n", "12", "--seed", "5"],
    );
    let out = glab(&[
        "certify",
        "prop-iterate",
        "--dict",
        &g,
        "--n",
        "2",
        "--steps",
        "4",
        "--trials",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["skipped"], 3);
    assert_eq!(rep["passed"], true);

    let out = glab(&[
        "certify",
        "lemma-decay",
        "--dict",
        &g,
        "--n",
        "1",
        "--steps",
        "2",
        "--trials",
        "6",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], true);
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = p(dir.path(), "sweep.csv");
    let args = [
        "certify",
        "sweep",
        "--ensemble",
        "orthonormal",
        "--m",
        "6",
        "--n-max",
        "6",
        "--trials",
        "3",
        "--seed",
        "2",
        "-o",
        &out_path,
    ];
    assert_eq!(glab(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("m,N,n,trials,success_fraction,mean_ratio,max_ratio")
    );
    for line in lines {
        assert_eq!(line.split(',').nth(4), Some("1.0"), "{line}");
    }
    assert!(Path::new(&format!("{out_path}.manifest.json")).exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(
        dir.path(),
        "d.bin",
        &["--kind", "union-of-bases", "--m", "8", "--seed", "7"],
    );
    let again = gen(
        dir.path(),
        "e.bin",
        &["--kind", "union-of-bases", "--m", "8", "--seed", "7"],
    );
    assert_eq!(std::fs::read(&d).unwrap(), std::fs::read(&again).unwrap());
    for args in [
        vec!["rip", "--dict", &d, "--exact", "2", "--workers", "1"],
        vec!["rip", "--dict", &d, "--exact", "2", "--workers", "3"],
        vec![
            "certify", "tropp", "--dict", &d, "--n", "1", "--trials", "5", "--seed", "9",
        ],
    ] {
        let first = glab(&args);
        let second = glab(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
    let w1 = glab(&["rip", "--dict", &d, "--exact", "2", "--workers", "1"]).stdout;
    let w3 = glab(&["rip", "--dict", &d, "--exact", "2", "--workers", "3"]).stdout;
    assert_eq!(w1, w3);
}
