use std::fs;
use std::path::{Path, PathBuf};

use accel_core::diagnostics::Reference;
use accel_core::instances::{estimate_fstar, randn_vec, rng_for};
use accel_core::methods::{run, RunTrace, CSV_HEADER};
use accel_core::Vector;
use rayon::prelude::*;

use crate::config::{resolve_method, slug, BenchConfig, Metric};
use crate::svg::{log_plot, Series};
use crate::CliError;

pub struct MethodRun {
    pub method: String,
    /// Horizon requested in the config (a composed run uses K/2 per phase).
    pub horizon: usize,
    pub outcome: Result<RunTrace<f64>, String>,
}

pub struct RunSummary {
    pub runs: Vec<MethodRun>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = (&MethodRun, &str)> {
        self.runs.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (r, e.as_str())))
    }
}

fn write(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    files.push(path.to_path_buf());
    Ok(())
}

fn metric_value(m: Metric, r: &accel_core::Record<f64>, fstar: Option<f64>) -> Option<f64> {
    match m {
        Metric::FGap => fstar.map(|f| r.value - f),
        Metric::GmapSq => Some(r.gmap_sq),
        Metric::SubgradSq => Some(r.subgrad_sq),
        Metric::DistSq => r.dist_sq,
    }
}

/// Runs every (method, horizon) pair and writes CSVs and plots under `cfg.out`.
///
/// A method that fails (setup mismatch, divergence) is reported in the
/// summary; the others still run and are written.
pub fn cmd_run(cfg: &BenchConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let inst = cfg.instance()?;
    let p = &inst.problem;
    let n = match (&inst.a, &inst.x_true) {
        (Some(a), _) => a.cols(),
        (None, Some(x)) => x.len(),
        (None, None) => p.optimum().and_then(|o| o.point.as_ref()).map(|x| x.len()).unwrap_or(0),
    };
    if n == 0 {
        return Err(CliError::Usage("instance: cannot infer the dimension".into()));
    }
    let x0 = match cfg.x0_seed {
        Some(s) => randn_vec(&mut rng_for(s), n),
        None => Vector::zeros(n),
    };
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Usage(format!("{}: {e}", cfg.out.display())))?;

    let fstar = if cfg.metrics.contains(&Metric::FGap) {
        match Reference::exact(p) {
            Some(r) => Some(r.value),
            None => Some(
                estimate_fstar(p, &x0, cfg.fstar_budget)
                    .map_err(|e| CliError::Usage(format!("F* estimate: {e}")))?
                    .value,
            ),
        }
    } else {
        None
    };

    let jobs: Vec<(usize, &String)> = cfg.horizons.iter().flat_map(|&k| cfg.methods.iter().map(move |m| (k, m))).collect();
    let runs: Vec<MethodRun> = jobs
        .par_iter()
        .map(|&(k, text)| {
            let resolved = resolve_method(text, k, cfg.split_composed);
            let method = resolved.as_ref().map(|(s, _)| s.to_string()).unwrap_or_else(|_| text.clone());
            let outcome = resolved.and_then(|(spec, kk)| run(&spec, p, &x0, kk)).map_err(|e| e.to_string());
            MethodRun { method, horizon: k, outcome }
        })
        .collect();

    let mut files = Vec::new();
    let mut long = format!("method,horizon,{CSV_HEADER}\n");
    for r in &runs {
        if let Ok(t) = &r.outcome {
            let path = cfg.out.join(format!("{}_K{}.csv", slug(&r.method), r.horizon));
            write(&path, &t.to_csv(), &mut files)?;
            long.push_str(&t.to_csv_rows_long());
        }
    }
    write(&cfg.out.join("runs.csv"), &long, &mut files)?;

    for &k in &cfg.horizons {
        for &m in &cfg.metrics {
            let series: Vec<Series> = runs
                .iter()
                .filter(|r| r.horizon == k)
                .filter_map(|r| r.outcome.as_ref().ok().map(|t| (r, t)))
                .map(|(r, t)| Series {
                    label: r.method.clone(),
                    points: t.records.iter().filter_map(|rec| metric_value(m, rec, fstar).map(|v| (rec.k as f64, v))).collect(),
                })
                .collect();
            let svg = log_plot(&format!("{} at K = {k}", m.axis_label()), "iteration k", m.axis_label(), &series);
            write(&cfg.out.join(format!("plot_{}_K{k}.svg", m.name())), &svg, &mut files)?;
        }
    }
    Ok(RunSummary { runs, files })
}
