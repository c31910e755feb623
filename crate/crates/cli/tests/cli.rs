use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermatch"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

// Two triangles sharing vertex 3; the optimum takes {1,2} and {3,4}.
const HGR: &str = "6 5 1\n10 1 2\n9 2 3\n8 1 3\n7 3 4\n6 4 5\n5 3 5\n";

#[test]
fn solve_writes_report_records_and_lp() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tri.hgr");
    fs::write(&input, HGR).unwrap();
    let report = dir.path().join("report.json");
    let records = dir.path().join("records.jsonl");
    let lp = dir.path().join("kernel.lp");
    for reductions in ["all", "none"] {
        let out = run(&[
            "solve",
            "--input",
            path(&input),
            "--reductions",
            reductions,
            "--ls",
            "ils",
            "--omit-timings",
            "--report",
            path(&report),
            "--records",
            path(&records),
            "--export-lp",
            path(&lp),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rec = &report["records"][0];
    assert_eq!(rec["instance"], "tri");
    assert_eq!(rec["best_weight"], 17);
    assert_eq!(rec["feasible"], true);
    assert!(rec.get("seconds").is_none());

    let lines: Vec<serde_json::Value> = fs::read_to_string(&records)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["best_weight"], lines[1]["best_weight"]);

    let lp = fs::read_to_string(&lp).unwrap();
    assert!(lp.starts_with("Maximize"));
    assert!(lp.contains("10 x0"));
    assert!(lp.trim_end().ends_with("End"));
}

#[test]
fn solve_is_reproducible_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tri.hgr");
    fs::write(&input, HGR).unwrap();
    let reports: Vec<String> = (0..2)
        .map(|i| {
            let report = dir.path().join(format!("r{i}.json"));
            let out = run(&[
                "solve",
                "--input",
                path(&input),
                "--weights",
                "uniform:1:50",
                "--b",
                "rand",
                "--seed",
                "7",
                "--ls",
                "ils",
                "--reps",
                "3",
                "--omit-timings",
                "--report",
                path(&report),
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            fs::read_to_string(report).unwrap()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn bad_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.hgr");
    assert!(!run(&["solve", "--input", path(&missing)]).status.success());

    let bad = dir.path().join("bad.hgr");
    fs::write(&bad, "2 1 1\n5 1 9\n").unwrap();
    let out = run(&["solve", "--input", path(&bad)]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());

    let input = dir.path().join("tri.hgr");
    fs::write(&input, HGR).unwrap();
    assert!(!run(&["solve", "--input", path(&input), "--reductions", "bogus"]).status.success());
    assert!(!run(&["solve", "--input", path(&input), "--b", "const:0"]).status.success());
    assert!(!run(&["solve", "--input", path(&input), "--ls", "ils", "--ils-k", "0"]).status.success());
}

#[test]
fn quality_and_time_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    fs::write(
        &records,
        concat!(
            r#"{"instance":"i","algorithm":"A","weight":100,"seconds":1.0}"#,
            "\n",
            r#"{"instance":"i","algorithm":"B","weight":90,"seconds":2.0}"#,
            "\n\n",
        ),
    )
    .unwrap();
    let out_q = dir.path().join("q.csv");
    let out = run(&["profile", "--mode", "quality", "--records", path(&records), "--out", path(&out_q), "--grid", "0.9,0.95"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read_to_string(&out_q).unwrap(),
        "algorithm,tau,fraction\nA,0.9,1\nA,0.95,1\nB,0.9,1\nB,0.95,0\n"
    );

    let out_t = dir.path().join("t.csv");
    let out = run(&["profile", "--mode", "time", "--records", path(&records), "--out", path(&out_t)]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&out_t).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(csv.contains("B,1,0\n"));
    assert!(csv.lines().last().unwrap().starts_with("B,64"));
    assert!(csv.lines().last().unwrap().ends_with(",1"));
}

#[test]
fn profile_rejects_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let line = r#"{"instance":"i","algorithm":"A","weight":1}"#;
    fs::write(&records, format!("{line}\n{line}\n")).unwrap();
    let out = run(&["profile", "--mode", "quality", "--records", path(&records), "--out", path(&dir.path().join("q.csv"))]);
    assert!(!out.status.success());
}

#[test]
fn effectiveness_summarizes_classes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tri.hgr");
    fs::write(&input, HGR).unwrap();
    let records = dir.path().join("records.jsonl");
    for class in ["dense", "sparse"] {
        let out = run(&[
            "solve",
            "--input",
            path(&input),
            "--class",
            class,
            "--omit-timings",
            "--records",
            path(&records),
        ]);
        assert!(out.status.success());
    }
    let summary = dir.path().join("summary.json");
    let out = run(&["effectiveness", "--records", path(&records), "--out", path(&summary)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["class"], "dense");
    assert_eq!(v[0]["edges_before"], 6.0);
}
