use std::path::PathBuf;
use std::process::ExitCode;

use accel_bench::config::{load_instance, BenchConfig};
use accel_bench::run::cmd_run;
use accel_bench::schedule::cmd_dump_schedule;
use accel_bench::verify::{cmd_verify, summarize, Suite, VerifyOptions};
use accel_bench::{CliError, EXIT_FAILURE, EXIT_USAGE};
use accel_core::diagnostics::RateClaim;
use accel_core::instances::{generate, InstanceConfig, InstanceFile, InstanceKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "accel-bench", version, about = "Run, verify and tabulate accelerated first-order methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the methods of a config file and write CSV tables and SVG plots.
    Run(RunArgs),
    /// Check Lyapunov, structure, rate, lemma and form-equivalence claims on seeded instances.
    Verify(VerifyArgs),
    /// Print the per-k coefficient table of a method.
    DumpSchedule(DumpArgs),
    /// Generate an instance and write it as JSON.
    GenInstance(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the instance seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the config's horizons with this single K.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (comma separated); all when omitted.
    #[arg(long)]
    suite: Option<String>,
    /// Methods to check, in method syntax; each suite's defaults when omitted.
    #[arg(long)]
    families: Option<String>,
    /// Rate bounds for the `rates` suite (comma separated); all when omitted.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "K", default_value_t = 50)]
    k: usize,
    /// Problem dimension.
    #[arg(long, default_value_t = 20)]
    dim: usize,
    /// Sample pairs per lemma.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Write every report as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    /// Method in method syntax, e.g. `fista_g` or `proximal_item[lambda=1]`.
    method: String,
    #[arg(long = "K")]
    k: usize,
    /// Condition number for the strongly convex smooth families.
    #[arg(long, default_value_t = 10.0)]
    kappa: f64,
    /// Strong convexity of g for the proximal-point families.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// lasso, nuclear_sym, quadratic_smooth, strongly_convex_quadratic or prox_only_quadratic_l1.
    #[arg(long, required_unless_present = "config")]
    kind: Option<String>,
    /// Instance config (TOML, or JSON by extension); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity of the planted solution.
    #[arg(long = "sparsity")]
    sparsity: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    /// Use the target L instead of recomputing it from A.
    #[arg(long)]
    fixed_l: bool,
    /// Nuclear kind: no √2 scaling of off-diagonal entries.
    #[arg(long)]
    unscaled: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Splits on commas outside brackets and parentheses.
fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn do_run(a: RunArgs) -> Result<bool, CliError> {
    let mut cfg = BenchConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        match &mut cfg.instance {
            Some(i) => i.seed = seed,
            None => return Err(usage("--seed needs an `instance` section, not an instance file")),
        }
    }
    if let Some(k) = a.k {
        cfg.horizons = vec![k];
    }
    if let Some(out) = a.out {
        cfg.out = out;
    }
    let summary = cmd_run(&cfg)?;
    for r in &summary.runs {
        match &r.outcome {
            Ok(t) => println!(
                "ok   {} K={}: final F={:.6e} gmap_sq={:.3e} ({:.3}s)",
                r.method,
                r.horizon,
                t.last().value,
                t.last().gmap_sq,
                t.wall_time.as_secs_f64()
            ),
            Err(e) => println!("FAIL {} K={}: {e}", r.method, r.horizon),
        }
    }
    println!("wrote {} files to {}", summary.files.len(), cfg.out.display());
    let clean = summary.failures().next().is_none();
    Ok(clean)
}

fn do_verify(a: VerifyArgs) -> Result<bool, CliError> {
    let mut opts = VerifyOptions { seeds: a.seeds, first_seed: a.seed, horizon: a.k, dim: a.dim, samples: a.samples, ..Default::default() };
    if let Some(s) = &a.suite {
        opts.suites = split_list(s).iter().map(|x| x.parse()).collect::<Result<Vec<Suite>, _>>()?;
    }
    opts.families = a.families.as_deref().map(split_list);
    if let Some(b) = &a.bound {
        opts.bounds = split_list(b).iter().map(|x| x.parse::<RateClaim>().map_err(usage)).collect::<Result<_, _>>()?;
    }
    let reports = cmd_verify(&opts)?;
    for line in summarize(&reports) {
        println!("{line}");
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("verify: {} reports, {failed} failed", reports.len());
    if let Some(p) = &a.out {
        let json = serde_json::to_string_pretty(&reports).map_err(usage)?;
        write_or_print(Some(p), &json)?;
    }
    Ok(failed == 0)
}

fn do_dump(a: DumpArgs) -> Result<bool, CliError> {
    let table = cmd_dump_schedule(&a.method, a.k, a.kappa, a.mu)?;
    write_or_print(a.out.as_ref(), &table)?;
    Ok(true)
}

fn do_gen(a: GenArgs) -> Result<bool, CliError> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            if p.extension().is_some_and(|e| e == "json") {
                serde_json::from_str::<InstanceConfig>(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
            } else {
                toml::from_str::<InstanceConfig>(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
            }
        }
        None => InstanceConfig::new(InstanceKind::Lasso, 0),
    };
    if let Some(k) = &a.kind {
        cfg.kind = serde_json::from_value(serde_json::Value::String(k.clone())).map_err(|_| usage(format!("unknown instance kind `{k}`")))?;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    cfg.m = a.m.or(cfg.m);
    cfg.n = a.n.or(cfg.n);
    cfg.k = a.sparsity.or(cfg.k);
    cfg.lambda = a.lambda.or(cfg.lambda);
    cfg.kappa = a.kappa.or(cfg.kappa);
    cfg.mu = a.mu.or(cfg.mu);
    cfg.noise = a.noise.or(cfg.noise);
    cfg.fixed_l |= a.fixed_l;
    cfg.unscaled |= a.unscaled;
    let inst = generate::<f64>(&cfg).map_err(usage)?;
    let text = InstanceFile::from_instance(&inst).to_json();
    write_or_print(a.out.as_ref(), &(text + "\n"))?;
    if let Some(p) = &a.out {
        // read back so a broken file is caught here rather than by `run`
        load_instance(p)?;
        eprintln!("wrote {} (L = {:.6e})", p.display(), inst.problem.smoothness());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => do_run(a),
        Command::Verify(a) => do_verify(a),
        Command::DumpSchedule(a) => do_dump(a),
        Command::GenInstance(a) => do_gen(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::split_list;

    #[test]
    fn split_keeps_bracketed_commas() {
        assert_eq!(
            split_list("fista, g_guler_g[lambda=0.7,tau=theta],composed(fista,fista_g)"),
            vec!["fista", "g_guler_g[lambda=0.7,tau=theta]", "composed(fista,fista_g)"]
        );
    }
}
