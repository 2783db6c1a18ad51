use std::path::Path;
use std::process::{Command, Output};

const EXE: &str = env!("CARGO_BIN_EXE_rsma-mec");

fn run(args: &[&str]) -> Output {
    Command::new(EXE).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["analytic"]).status.code(), Some(0));
    assert_eq!(run(&["simulate", "--trials", "100"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--scheme", ""]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.toml", "bandwith_hz = 1e6\n");
    assert_eq!(run(&["sweep", "--config", &bad]).status.code(), Some(2));
    let lopsided = write(dir.path(), "lop.toml", "task_a_bits = 2000\ntask_b_bits = 16000\n");
    assert_eq!(run(&["optimize", "--config", &lopsided]).status.code(), Some(3));
    assert_eq!(run(&["analytic", "--config", &lopsided]).status.code(), Some(3));
    // a partly infeasible sweep still succeeds
    let partial = write(
        dir.path(),
        "part.toml",
        "task_a_bits = 20000\nschemes = [\"analytic\"]\n",
    );
    let out = run(&["sweep", "--config", &partial]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible at task_b_bits = 1000"));
    assert_eq!(
        run(&["analytic", "--output", "/nonexistent-dir/out.csv"]).status.code(),
        Some(1)
    );
}

#[test]
fn optimize_reports_the_plan() {
    let out = run(&["optimize", "--grid", "20"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert!((v["plan"]["eta_a"].as_f64().unwrap() - 52.0 / 70.0).abs() < 1e-12);
    assert!(v["grid"]["ps_total"].as_f64().unwrap() <= v["ps"]["ps_total"].as_f64().unwrap() + 1e-6);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "sweep",
            "--sweep",
            "power",
            "--trials",
            "20000",
            "--seed",
            "5",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sweep_csv_loads_as_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fig.toml",
        "task_a_bits = 20000\nsweep = \"task_length\"\ntrials = 20000\nseed = 3\n\
         schemes = [\"RSMA\", \"NOMA_PU_first\", \"NOMA_SU_first\", \"analytic\"]\n",
    );
    let out = dir.path().join("fig.csv");
    assert!(run(&["sweep", "--config", &cfg, "--output", out.to_str().unwrap()])
        .status
        .success());

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&out).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.len(), 15);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut series: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let scheme = rec[col("scheme")].to_string();
        let ps = if scheme == "analytic" {
            &rec[col("ps_analytic")]
        } else {
            &rec[col("ps_mean")]
        };
        series
            .entry(scheme)
            .or_default()
            .push((rec[col("sweep_value")].parse().unwrap(), ps.parse().unwrap()));
    }
    assert_eq!(series.len(), 4);
    assert!(series["RSMA"][10].1 >= series["NOMA_PU_first"][10].1);
    for pts in series.values() {
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0].0, 1000.0);
        assert!(pts[0].1.is_nan());
        assert!((0.0..=1.0).contains(&pts[10].1));
    }

    // the header line is enough to re-run the experiment
    let text = std::fs::read_to_string(&out).unwrap();
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    let cfg = &header["config"];
    assert_eq!(cfg["seed"], 3);
    assert_eq!(cfg["trials"], 20000);
    assert_eq!(cfg["sweep_values"].as_array().unwrap().len(), 11);
    assert_eq!(header["infeasible"].as_array().unwrap().len(), 3);
}

#[test]
fn latency_study_runs_from_the_command_line() {
    let out = run(&[
        "sweep",
        "--sweep",
        "latency_study",
        "--scheme",
        "analytic",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8 + 9);
    assert!(rows.iter().all(|r| r["ps_analytic"].as_f64().is_some()));
}
