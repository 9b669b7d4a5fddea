use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn inputs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../inputs")
}

fn holofol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holofol")).args(args).output().expect("binary runs")
}

fn run(cmd: &str, input: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    holofol(&args)
}

/// Data rows of a CSV output, header comments and the column line removed.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_linear_saddle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("analyze", &inputs().join("linear_saddle.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sing = rows(&dir.path().join("singularities.csv"));
    let affine: Vec<_> = sing.iter().filter(|r| r[0] == "affine").collect();
    assert_eq!(affine.len(), 1);
    let r = affine[0];
    assert!(num(&r[9]).abs() < 1e-12 && (num(&r[10]) - 2.0).abs() < 1e-12);
    assert_eq!(&r[11..15], &["1", "1", "1", "1"]);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("affine singularities: 1\n"));
    assert!(report.contains("tangency degree equals n on all lines: yes"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("analysis.json")).unwrap()).unwrap();
    assert_eq!(json["header"]["seed"], 0);
    assert_eq!(json["data"]["membership"]["x"], true);
}

#[test]
fn analyze_degree_two_instance_has_three_points_at_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("analyze", &inputs().join("generic_x2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sing = rows(&dir.path().join("singularities.csv"));
    assert_eq!(sing.iter().filter(|r| r[0].starts_with("infinity")).count(), 3);
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 1,\n  \"P\": [}").unwrap();
    let o = run("analyze", &bad, &dir.path().join("o1"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column"), "{}", stderr(&o));

    let o = run("analyze", &inputs().join("common_factor.json"), &dir.path().join("o2"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("common factor"));

    let nonhom = dir.path().join("nonhom.json");
    fs::write(
        &nonhom,
        r#"{"n":2,"P":[{"i":0,"j":1,"re":"1"}],"Q":[{"i":1,"j":0,"re":"1"}],"g":[{"i":2,"j":0,"re":"1"},{"i":1,"j":0,"re":"1"}]}"#,
    )
    .unwrap();
    let o = run("analyze", &nonhom, &dir.path().join("o3"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("non-homogeneous g"));

    let o = run("growth", &bad, &dir.path().join("o4"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run("track", &inputs().join("generic_x2.json"), &dir.path().join("o5"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn holonomy_requires_invariant_line_at_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(
        &f,
        r#"{"n":2,"P":[{"i":0,"j":1,"re":"1"}],"Q":[{"i":1,"j":0,"re":"1"}],"g":[{"i":2,"j":0,"re":"1"},{"i":0,"j":2,"re":"1"}]}"#,
    )
    .unwrap();
    let o = run("holonomy", &f, &dir.path().join("o"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn holonomy_linear_multiplier_and_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("holonomy", &inputs().join("linear_saddle.json"), dir.path(), &["--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = rows(&dir.path().join("generators.csv"));
    assert_eq!(g.len(), 1);
    assert!(num(&g[0][10]) < 1e-4);
    let cov = rows(&dir.path().join("coverage.csv"));
    assert_eq!(cov[0][0], "0");
    // budget 0 counts the four starting points only
    let c0 = num(&cov[0][2]);
    assert!(c0 > 0.0 && c0 < 0.05);
    let c: Vec<f64> = cov.iter().map(|r| num(&r[2])).collect();
    assert!(c.windows(2).all(|w| w[0] <= w[1]));
    let svg = fs::read_to_string(dir.path().join("coverage.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("config_sha256"));

    let o = run(
        "holonomy",
        &inputs().join("linear_saddle.json"),
        &dir.path().join("loops"),
        &["--loops", inputs().join("loops_linear.json").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = rows(&dir.path().join("loops/generators.csv"));
    assert_eq!(g[0][3], "0.5");
    assert!(num(&g[0][10]) < 1e-4);
}

#[test]
fn track_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("track", &inputs().join("linear_family.json"), &dir.path().join("lin"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in rows(&dir.path().join("lin/track_1.csv")) {
        assert_eq!((num(&r[2]), num(&r[3])), (0.0, 0.0));
    }

    let o = run("track", &inputs().join("family.json"), &dir.path().join("fam"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = rows(&dir.path().join("fam/summary.csv"));
    assert_eq!(summary.len(), 3);
    for r in &summary {
        assert!(num(&r[4]) <= 1e-8, "{r:?}");
        assert!(num(&r[3]) <= 1e-10);
    }

    let o = run("track", &inputs().join("unverified_family.json"), &dir.path().join("bad"), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn track_step_halving_keeps_residuals_small() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(inputs().join("family.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut worst = Vec::new();
    for steps in [10, 20, 40] {
        for t in doc["tracks"].as_array_mut().unwrap() {
            t["steps"] = steps.into();
        }
        let f = dir.path().join(format!("f{steps}.json"));
        fs::write(&f, doc.to_string()).unwrap();
        let out = dir.path().join(format!("o{steps}"));
        let o = run("track", &f, &out, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        worst.push(rows(&out.join("summary.csv")).iter().map(|r| num(&r[3])).fold(0.0, f64::max));
    }
    assert!(worst.iter().all(|&w| w <= 1e-10), "{worst:?}");
}

#[test]
fn growth_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("growth", &inputs().join("abelian2.json"), &dir.path().join("ab"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = rows(&dir.path().join("ab/growth.csv"));
    assert_eq!(g[2], ["2", "13", "8"]);
    let series = fs::read_to_string(dir.path().join("ab/derived_series.txt")).unwrap();
    assert!(series.contains("level 1: 0 generators, trivial"));
    assert!(!dir.path().join("ab/limit.json").exists());

    let o = run("growth", &inputs().join("tangent_pair.json"), &dir.path().join("tp"), &["--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tp/limit.json")).unwrap()).unwrap();
    assert!(json["data"]["error"].is_null());
    assert_eq!(json["data"]["estimate"]["pairs"].as_array().unwrap().len(), 20);
    assert!(rows(&dir.path().join("tp/additivity.csv")).len() == 60);

    let o = run("growth", &inputs().join("free_pair.json"), &dir.path().join("b"), &["--budget", "100"]);
    assert_eq!(o.status.code(), Some(5));
    let g: Vec<String> = rows(&dir.path().join("b/growth.csv")).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(g, ["1", "5", "17", "53"]);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &[&str]); 4] = [
        ("analyze", "generic_x2.json", &[]),
        ("holonomy", "generic_x2.json", &["--svg", "--max-len", "3"]),
        ("track", "dense_pair.json", &["--budget", "20000"]),
        ("growth", "tangent_pair.json", &["--n-max", "5", "--svg"]),
    ];
    for (cmd, input, extra) in cases {
        let mut snaps = Vec::new();
        for threads in ["1", "4", "1"] {
            let out = dir.path().join(format!("{cmd}-{threads}-{}", snaps.len()));
            let mut args = extra.to_vec();
            args.extend(["--threads", threads, "--seed", "3"]);
            let o = run(cmd, &inputs().join(input), &out, &args);
            assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
            snaps.push(snapshot(&out));
        }
        assert_eq!(snaps[0], snaps[1], "{cmd}");
        assert_eq!(snaps[0], snaps[2], "{cmd}");
    }
}

#[test]
fn header_records_seed_and_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let input = inputs().join("abelian2.json");
    let header = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        assert_eq!(run("growth", &input, &out, extra).status.code(), Some(0));
        let text = fs::read_to_string(out.join("growth.csv")).unwrap();
        text.lines().take_while(|l| l.starts_with('#')).map(str::to_string).collect::<Vec<_>>()
    };
    let a = header("a", &[]);
    let b = header("b", &["--threads", "2"]);
    let c = header("c", &["--seed", "9"]);
    assert!(a[0].starts_with("# holofol "));
    assert!(a.iter().any(|l| l == "# seed: 0"));
    assert_eq!(a, b);
    let hash = |h: &[String]| h.iter().find(|l| l.starts_with("# config_sha256:")).cloned().unwrap();
    assert_ne!(hash(&a), hash(&c));
    assert!(c.iter().any(|l| l == "# seed: 9"));
}
