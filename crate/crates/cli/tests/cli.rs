use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cmj(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmj")).current_dir(dir).args(args).output().expect("spawn cmj")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Every file under `dir` except the manifest, as (relative path, bytes).
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "manifest.json" {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn unknown_family_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cmj(tmp.path(), &["grow", "--fitness", "nope", "--out-dir", "x"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("unknown fitness family"));
}

#[test]
fn missing_family_and_bad_flag_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&cmj(tmp.path(), &["grow", "--out-dir", "x"])), 2);
    assert_eq!(code(&cmj(tmp.path(), &["grow", "--no-such-flag", "1"])), 2);
}

#[test]
fn numeric_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cmj(
        tmp.path(),
        &["criterion", "iyer", "--fitness", "geometric", "--g", "unit", "--nmax", "5000", "--out-dir", "x"],
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "[run]\nn = 10\nbogus = 1\n[extra]\nx = 1\n").unwrap();
    let o = cmj(tmp.path(), &["grow", "--config", "c.toml", "--fitness", "case_i", "--sigma", "3"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("run.bogus") && err.contains("[extra]"), "{err}");
}

#[test]
fn bad_thread_count_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cmj"))
        .current_dir(tmp.path())
        .env("CMJ_THREADS", "zero")
        .args(["criterion", "closed-form", "--example", "i", "--sigma", "3", "--kappa", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn non_empty_out_dir_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["grow", "--fitness", "case_i", "--sigma", "3", "--n", "200", "--out-dir", "g"];
    assert_eq!(code(&cmj(tmp.path(), &args)), 0);
    let o = cmj(tmp.path(), &args);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--force"));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&cmj(tmp.path(), &forced)), 0);
}

#[test]
fn outputs_are_byte_identical_apart_from_manifest() {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for tmp in &runs {
        let o = cmj(
            tmp.path(),
            &[
                "grow",
                "--fitness",
                "case_i",
                "--sigma",
                "2",
                "--n",
                "3000",
                "--replicas",
                "4",
                "--seed",
                "7",
                "--out-dir",
                "out",
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (a, b) = (snapshot(&runs[0].path().join("out")), snapshot(&runs[1].path().join("out")));
    assert!(a.len() >= 6);
    assert!(a == b, "outputs differ between identical runs");
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(runs[0].path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "grow");
    assert!(manifest["files"].as_array().unwrap().iter().any(|f| f == "trees/tree_0003.csv"));
}

#[test]
fn flags_override_file_values() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("c.toml"),
        "[run]\nn = 100\nreplicas = 2\n[fitness]\nfamily = \"case_i\"\nsigma = 3\n[output]\nout_dir = \"o\"\n",
    )
    .unwrap();
    let o = cmj(tmp.path(), &["grow", "--config", "c.toml", "--n", "250"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stats: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("o/stats.json")).unwrap()).unwrap();
    assert_eq!(stats["config"]["run.n"], 250);
    assert_eq!(stats["config"]["run.replicas"], 2);
    assert_eq!(stats["replicas"].as_array().unwrap().len(), 2);
    assert_eq!(stats["replicas"][0]["stats"]["n"], 250);
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn phase_scan_cell_matches_direct_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let common = ["--fitness", "case_i", "--sigma", "3", "--kappa", "1", "--nmax", "10000"];
    let o = cmj(tmp.path(), &[&["phase-scan", "--example", "i", "--out-dir", "scan"], &common[2..]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = cmj(tmp.path(), &[&["criterion", "star", "--out-dir", "star"], &common[..]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let grid = csv_rows(&tmp.path().join("scan/grid.csv"));
    let col = |name: &str| grid[0].iter().position(|c| c == name).unwrap();
    assert_eq!(grid.len(), 2);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("star/star.json")).unwrap()).unwrap();
    assert_eq!(grid[1][col("star")], report["report"]["verdict"].as_str().unwrap());
    let direct = report["report"]["summary"]["fitted_exponent"].as_f64().unwrap();
    let scanned: f64 = grid[1][col("star_exponent")].parse().unwrap();
    assert_eq!(scanned, direct);
}

#[test]
fn closed_form_splits_on_the_critical_line() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cmj(
        tmp.path(),
        &[
            "phase-scan",
            "--example",
            "iii",
            "--sigma",
            "1.5:3:0.5",
            "--kappa",
            "0.5:2:0.5",
            "--nmax",
            "1000",
            "--out-dir",
            "s",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let grid = csv_rows(&tmp.path().join("s/grid.csv"));
    let col = |name: &str| grid[0].iter().position(|c| c == name).unwrap();
    assert_eq!(grid.len(), 1 + 16);
    for row in &grid[1..] {
        let sigma: f64 = row[col("sigma")].parse().unwrap();
        let kappa: f64 = row[col("kappa")].parse().unwrap();
        let q = (sigma - 1.0) * kappa;
        let want = if (q - 1.0).abs() < 1e-9 {
            "boundary"
        } else if q > 1.0 {
            "star"
        } else {
            "path"
        };
        assert_eq!(row[col("closed_form")], want, "σ={sigma} κ={kappa}");
    }
}

#[test]
fn scan_errors_do_not_abort_the_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cmj(
        tmp.path(),
        &[
            "phase-scan",
            "--example",
            "iv",
            "--sigma",
            "3",
            "--kappa",
            "1",
            "--alpha",
            "0.4:0.9:0.5",
            "--nmax",
            "1000",
            "--out-dir",
            "s",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("s/grid.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains("ERROR"));
    assert!(!rows[2].contains("ERROR"), "{}", rows[2]);
}

#[test]
fn formats_restrict_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cmj(
        tmp.path(),
        &[
            "criterion",
            "closed-form",
            "--example",
            "ii",
            "--nu",
            "0.5",
            "--gamma",
            "3",
            "--formats",
            "json",
            "--out-dir",
            "c",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(tmp.path().join("c/closed_form.json").exists());
    assert!(!tmp.path().join("c/closed_form.csv").exists());
    let doc: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("c/closed_form.json")).unwrap()).unwrap();
    assert_eq!(doc["report"]["verdict"], "star");
}
