use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_accel-bench");

fn bench(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Column `name` of a tab-separated schedule table, keyed by k.
fn column(table: &str, name: &str) -> Vec<(i64, Option<f64>)> {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let j = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[j].parse().ok())
        })
        .collect()
}

/// Final `gmap_sq` per method from the long CSV.
fn final_gmap(runs_csv: &str) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for line in runs_csv.lines().skip(1) {
        // method labels may be quoted and contain commas
        let (method, rest) = if let Some(stripped) = line.strip_prefix('"') {
            let end = stripped.find('"').unwrap();
            (stripped[..end].to_string(), &stripped[end + 2..])
        } else {
            let i = line.find(',').unwrap();
            (line[..i].to_string(), &line[i + 1..])
        };
        let gmap: f64 = rest.split(',').nth(3).unwrap().parse().unwrap();
        match out.iter_mut().find(|e| e.0 == method) {
            Some(e) => e.1 = gmap,
            None => out.push((method, gmap)),
        }
    }
    out
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const LASSO: &str = r#"
methods = ["ista", "fista", "fpgm_m", "fista_g", "composed(fista,fista_g)"]
horizons = [100]
metrics = ["gmap_sq", "F_gap"]
out = "out"
fstar_budget = 5000

[instance]
kind = "lasso"
seed = 0
"#;

#[test]
fn dump_fista_g_one_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["dump-schedule", "fista_g", "--K", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let phi = column(&stdout(&o), "phi");
    assert_eq!(phi.iter().map(|r| r.0).collect::<Vec<_>>(), vec![-1, 0, 1, 2]);
    let phi0 = phi.iter().find(|r| r.0 == 0).unwrap().1.unwrap();
    assert!((phi0 - (2.0 + 3f64.sqrt())).abs() < 1e-14, "{phi0}");
}

#[test]
fn dump_ogm_g_theta() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["dump-schedule", "ogm_g", "--K", "2"], dir.path());
    let theta = column(&stdout(&o), "theta");
    // backward recursion from θ_K = 1
    let t1 = (1.0 + 5f64.sqrt()) / 2.0;
    let t0 = (1.0 + (1.0 + 8.0 * t1 * t1).sqrt()) / 2.0;
    assert!((theta[0].1.unwrap() - t0).abs() < 1e-14);
    assert!((theta[0].1.unwrap() - 2.842).abs() < 1e-3);
}

#[test]
fn dump_fgm_forward_theta() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["dump-schedule", "fgm", "--K", "3"], dir.path());
    let theta = column(&stdout(&o), "theta");
    let mut t = 1.0f64;
    for k in 0..=3 {
        let got = theta.iter().find(|r| r.0 == k).unwrap().1.unwrap();
        assert!((got - t).abs() < 1e-14, "k={k}: {got} vs {t}");
        t = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
    }
}

#[test]
fn dump_rejects_unknown_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["dump-schedule", "nope", "--K", "3"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn lasso_run_orders_methods() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "lasso.toml", LASSO);
    let o = bench(&["run", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in ["runs.csv", "plot_gmap_sq_K100.svg", "plot_F_gap_K100.svg", "fpgm_m_m_50_K100.csv", "composed_fista_fista_g_K100.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let finals = final_gmap(&fs::read_to_string(out.join("runs.csv")).unwrap());
    assert_eq!(finals.len(), 5);
    let composed = finals.iter().find(|e| e.0.starts_with("composed")).unwrap().1;
    for (m, g) in &finals {
        assert!(m.starts_with("composed") || composed < *g, "{m}: {g} <= composed {composed}");
    }
    let svg = fs::read_to_string(out.join("plot_gmap_sq_K100.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 5);
}

#[test]
fn smoke_run_k1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "smoke.toml",
        "methods = [\"ista\", \"fista\", \"fista_g\"]\nhorizons = [5]\n[instance]\nkind = \"lasso\"\n",
    );
    let o = bench(&["run", "--config", &cfg, "--K", "1", "--out", "smoke"], dir.path());
    assert_eq!(code(&o), 0);
    for m in ["ista", "fista", "fista_g"] {
        let csv = fs::read_to_string(dir.path().join(format!("smoke/{m}_K1.csv"))).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "k,F,gmap_sq,subgrad_sq,dist_to_opt_sq");
        assert_eq!(rows.len(), 3, "{m}: header, k=0 and k=1");
    }
}

#[test]
fn nuclear_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "nuc.json",
        r#"{"instance": {"kind": "nuclear_sym", "seed": 1}, "methods": ["fista", "fista_g"], "horizons": [20], "out": "nuc"}"#,
    );
    let o = bench(&["run", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let finals = final_gmap(&fs::read_to_string(dir.path().join("nuc/runs.csv")).unwrap());
    assert!(finals.iter().all(|e| e.1.is_finite() && e.1 > 0.0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "lasso.toml", LASSO);
    for out in ["a", "b"] {
        assert_eq!(code(&bench(&["run", "--config", &cfg, "--K", "30", "--out", out], dir.path())), 0);
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for n in names {
        let a = fs::read(dir.path().join("a").join(&n)).unwrap();
        let b = fs::read(dir.path().join("b").join(&n)).unwrap();
        assert!(a == b, "{n:?} differs");
    }
}

#[test]
fn failing_method_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    // ogm needs g = 0, so it cannot run on the lasso instance
    let cfg = write_config(
        dir.path(),
        "mixed.toml",
        "methods = [\"fista\", \"ogm\"]\nhorizons = [10]\nout = \"mixed\"\n[instance]\nkind = \"lasso\"\n",
    );
    let o = bench(&["run", "--config", &cfg], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL ogm"));
    assert!(dir.path().join("mixed/fista_K10.csv").exists());
    assert!(!dir.path().join("mixed/ogm_K10.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "methods = [\"fista\"]\nhorizons = [10,\n");
    let o = bench(&["run", "--config", &bad], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let unknown = write_config(dir.path(), "unknown.toml", "methods = [\"fista\", \"magic\"]\nhorizons = [10]\n[instance]\nkind = \"lasso\"\n");
    let o = bench(&["run", "--config", &unknown], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("methods[1]"));
}

#[test]
fn verify_lyapunov_selection() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["verify", "--suite", "lyapunov", "--families", "fista_g,ogm_g", "--seeds", "5"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: 10 reports, 0 failed"));
}

#[test]
fn verify_rate_bound_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["verify", "--suite", "rates", "--bound", "fista_g", "--K", "50", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 5);
    for r in reports {
        assert_eq!(r["pass"], true);
        assert!(r["worst"].as_f64().unwrap() < 0.0, "the bound holds with room to spare");
        assert_eq!(r["details"]["horizon"], 50.0);
    }
}

#[test]
fn verify_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "--suite", "nonsense"],
        vec!["verify", "--suite", "lyapunov", "--families", "not_a_family"],
        vec!["verify", "--suite", "lyapunov", "--families", "ista"],
        vec!["verify", "--suite", "rates", "--bound", "nope"],
    ] {
        let o = bench(&args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn generated_instance_replays() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["gen-instance", "--kind", "lasso", "--seed", "4", "--out", "inst.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let from_file = write_config(dir.path(), "file.toml", "instance_file = \"inst.json\"\nmethods = [\"fista_g\"]\nhorizons = [15]\nout = \"f\"\n");
    let inline = write_config(dir.path(), "inline.toml", "methods = [\"fista_g\"]\nhorizons = [15]\nout = \"i\"\n[instance]\nkind = \"lasso\"\nseed = 4\n");
    for cfg in [&from_file, &inline] {
        assert_eq!(code(&bench(&["run", "--config", cfg], dir.path())), 0);
    }
    let a = fs::read(dir.path().join("f/fista_g_K15.csv")).unwrap();
    let b = fs::read(dir.path().join("i/fista_g_K15.csv")).unwrap();
    assert!(a == b);
    assert_eq!(code(&bench(&["gen-instance", "--kind", "bogus"], dir.path())), 2);
}
