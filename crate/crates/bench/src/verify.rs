use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use accel_core::diagnostics::{
    check_collinear, check_coplanar, check_form_equivalence, check_inequality_lemmas, check_lyapunov, check_parallel,
    check_rate_bound, DiagnosticReport, RateClaim, Reference, COPLANAR_TOL, LEMMA_TOL, SLACK, STRUCTURE_TOL,
};
use accel_core::functions::L1Norm;
use accel_core::instances::{
    estimate_fstar, make_prox_only_quadratic_l1, make_smooth_quadratic, make_strongly_convex_quadratic, randn_vec,
    random_quadratic, rng_for,
};
use accel_core::methods::{run, Family, Form, MethodSpec, Requirement};
use accel_core::{CompositeProblem, Error, Vector};
use rayon::prelude::*;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Lyapunov,
    Parallel,
    Collinear,
    Coplanar,
    Rates,
    Lemmas,
    Equivalence,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Self::Lyapunov, Self::Parallel, Self::Collinear, Self::Coplanar, Self::Rates, Self::Lemmas, Self::Equivalence];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lyapunov => "lyapunov",
            Self::Parallel => "parallel",
            Self::Collinear => "collinear",
            Self::Coplanar => "coplanar",
            Self::Rates => "rates",
            Self::Lemmas => "lemmas",
            Self::Equivalence => "equivalence",
        }
    }

    /// Methods checked when `--families` is not given.
    pub fn default_families(self) -> &'static [&'static str] {
        const PARALLEL: &[&str] = &[
            "fgm",
            "ogm",
            "ogm_g",
            "fista",
            "fista_g",
            "guler1[lambda=0.7]",
            "guler2[lambda=0.7]",
            "guler_g[lambda=0.7]",
            "g_guler_g[lambda=0.7]",
        ];
        match self {
            Self::Lyapunov => &[
                "ogm_g",
                "g_fgm_g",
                "fista_g",
                "g_fista_g",
                "guler_g[lambda=0.7]",
                "g_guler_g[lambda=0.7]",
                "proximal_tmm[lambda=0.7]",
                "proximal_item[lambda=0.7]",
            ],
            Self::Parallel | Self::Coplanar => PARALLEL,
            Self::Collinear => &[
                "sc_fgm",
                "sc_ogm",
                "tmm",
                "item",
                "nonstationary_sc_fgm",
                "geometric_descent",
                "proximal_tmm[lambda=0.7]",
                "proximal_item[lambda=0.7]",
            ],
            Self::Equivalence => &[
                "fista",
                "fista_g",
                "g_fista_g",
                "fgm",
                "ogm",
                "ogm_g",
                "fgm_g",
                "g_fgm_g",
                "guler1[lambda=0.7]",
                "guler2[lambda=0.7]",
                "guler_g[lambda=0.7]",
                "g_guler_g[lambda=0.7]",
                "proximal_tmm[lambda=0.7]",
                "proximal_item[lambda=0.7]",
                "sc_fgm",
                "sc_ogm",
                "tmm",
                "item",
                "nonstationary_sc_fgm",
            ],
            Self::Rates | Self::Lemmas => &[],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite `{s}` (expected one of: {})", suite_names())))
    }
}

fn suite_names() -> String {
    Suite::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suites: Vec<Suite>,
    /// Overrides the per-suite defaults.
    pub families: Option<Vec<String>>,
    /// Rate claims; all of them when empty.
    pub bounds: Vec<RateClaim>,
    pub seeds: u64,
    pub first_seed: u64,
    pub horizon: usize,
    pub dim: usize,
    pub samples: usize,
    pub fstar_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            families: None,
            bounds: Vec::new(),
            seeds: 5,
            first_seed: 0,
            horizon: 50,
            dim: 20,
            samples: 1000,
            fstar_budget: 20_000,
        }
    }
}

/// Seeded test problem matching what `spec` needs.
pub fn testbed(spec: &MethodSpec<f64>, seed: u64, n: usize) -> accel_core::Result<CompositeProblem<f64>> {
    if let Family::Composed(first, _) = &spec.family {
        return testbed(first, seed, n);
    }
    match spec.family.requirement() {
        Requirement::ProxGrad => {
            let q = random_quadratic::<f64>(n, 0.0, 1.0, seed, false)?;
            Ok(CompositeProblem::new(Arc::new(q), Arc::new(L1Norm { weight: 0.1 })))
        }
        Requirement::SmoothOnly if spec.family.needs_strong_convexity() => make_strongly_convex_quadratic(n, 10.0, seed),
        Requirement::SmoothOnly => make_smooth_quadratic(n, 0.0, 1.0, seed),
        Requirement::ProximalPointOnly => make_prox_only_quadratic_l1(n, 0.5, 0.1, seed),
    }
}

fn start(seed: u64, n: usize) -> Vector<f64> {
    randn_vec(&mut rng_for(10_000 + seed), n)
}

/// Setup and applicability errors are the caller's; anything else is a
/// failed check.
fn classify(suite: String, e: Error) -> Result<DiagnosticReport, CliError> {
    match e {
        Error::Unsupported(_) | Error::SetupMismatch { .. } | Error::InvalidParameter { .. } | Error::InvalidHorizon(_) => {
            Err(CliError::Usage(format!("{suite}: {e}")))
        }
        other => Ok(DiagnosticReport::from_residuals(format!("{suite} ({other})"), [(0, f64::INFINITY)], 0.0)),
    }
}

struct Job {
    suite: Suite,
    method: Option<String>,
    claim: Option<RateClaim>,
    seed: u64,
}

fn parse(m: &str) -> Result<MethodSpec<f64>, CliError> {
    MethodSpec::parse(m).map_err(|e| CliError::Usage(format!("family `{m}`: {e}")))
}

fn jobs(opts: &VerifyOptions) -> Result<Vec<Job>, CliError> {
    let seeds = opts.first_seed..opts.first_seed + opts.seeds;
    let mut out = Vec::new();
    for &suite in &opts.suites {
        let methods: Vec<String> = match &opts.families {
            Some(f) => f.clone(),
            None => suite.default_families().iter().map(|s| s.to_string()).collect(),
        };
        for m in &methods {
            parse(m)?;
        }
        match suite {
            Suite::Lemmas => out.extend(seeds.clone().map(|seed| Job { suite, method: None, claim: None, seed })),
            Suite::Rates => {
                let claims = if opts.bounds.is_empty() { RateClaim::ALL.to_vec() } else { opts.bounds.clone() };
                for claim in claims {
                    let covered: Vec<String> = match &opts.families {
                        None => vec![claim.default_method().to_string()],
                        Some(f) => f.iter().filter(|m| parse(m).map(|s| claim.covers(&s)).unwrap_or(false)).cloned().collect(),
                    };
                    // with --bound, a family list that misses the claim is a usage error
                    if covered.is_empty() && !opts.bounds.is_empty() {
                        return Err(CliError::Usage(format!("no selected family is covered by bound `{claim}`")));
                    }
                    for m in covered {
                        out.extend(seeds.clone().map(|seed| Job { suite, method: Some(m.clone()), claim: Some(claim), seed }));
                    }
                }
            }
            _ => {
                for m in &methods {
                    out.extend(seeds.clone().map(|seed| Job { suite, method: Some(m.clone()), claim: None, seed }));
                }
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("nothing to verify for this selection".into()));
    }
    Ok(out)
}

fn reference(p: &CompositeProblem<f64>, x0: &Vector<f64>, budget: usize) -> accel_core::Result<Reference<f64>> {
    match Reference::exact(p) {
        Some(r) => Ok(r),
        None => estimate_fstar(p, x0, budget).map(|e| Reference::from_estimate(&e)),
    }
}

fn execute(job: &Job, opts: &VerifyOptions) -> Result<Vec<DiagnosticReport>, CliError> {
    let n = opts.dim;
    let k = opts.horizon;
    let x0 = start(job.seed, n);
    let tag = |name: &str| format!("{}:{name}:seed={}", job.suite, job.seed);
    if job.suite == Suite::Lemmas {
        let spec = parse("fista")?;
        let p = testbed(&spec, job.seed, n).map_err(|e| CliError::Usage(e.to_string()))?;
        return check_inequality_lemmas(&p, &x0, opts.samples, job.seed, LEMMA_TOL)
            .map_err(|e| CliError::Usage(format!("lemmas: {e}")));
    }
    let text = job.method.as_deref().expect("method jobs carry a method");
    let mut spec = parse(text)?;
    let p = testbed(&spec, job.seed, n).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = match job.suite {
        Suite::Lyapunov => run(&spec, &p, &x0, k).and_then(|t| check_lyapunov(&spec, &t, &p, Reference::exact(&p).as_ref(), false, SLACK)),
        Suite::Parallel | Suite::Coplanar | Suite::Collinear => {
            if spec.family.has_auxiliary_form() {
                spec = spec.with_form(Form::Auxiliary);
            }
            run(&spec, &p, &x0, k).and_then(|t| match job.suite {
                Suite::Parallel => check_parallel(&t, STRUCTURE_TOL),
                Suite::Coplanar => check_coplanar(&t, COPLANAR_TOL),
                _ => check_collinear(&t, STRUCTURE_TOL),
            })
        }
        Suite::Equivalence => check_form_equivalence(&spec, &p, &x0, k, COPLANAR_TOL),
        Suite::Rates => {
            let claim = job.claim.expect("rate jobs carry a claim");
            reference(&p, &x0, opts.fstar_budget)
                .and_then(|r| run(&spec, &p, &x0, k).and_then(|t| check_rate_bound(claim, &spec, &t, &p, &r, SLACK)))
        }
        Suite::Lemmas => unreachable!(),
    };
    match result {
        Ok(mut r) => {
            r.suite = format!("{}:seed={}", r.suite, job.seed);
            Ok(vec![r])
        }
        Err(e) => classify(tag(text), e).map(|r| vec![r]),
    }
}

/// Runs the selected suites; usage errors (unknown names, a family the suite
/// does not apply to) abort, check failures are returned as failing reports.
pub fn cmd_verify(opts: &VerifyOptions) -> Result<Vec<DiagnosticReport>, CliError> {
    if opts.horizon == 0 {
        return Err(CliError::Usage("K must be at least 1".into()));
    }
    if opts.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let jobs = jobs(opts)?;
    let results: Vec<Result<Vec<DiagnosticReport>, CliError>> = jobs.par_iter().map(|j| execute(j, opts)).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// One line per suite and method, aggregated over seeds.
pub fn summarize(reports: &[DiagnosticReport]) -> Vec<String> {
    let mut groups: Vec<(String, Vec<&DiagnosticReport>)> = Vec::new();
    for r in reports {
        let key = r.suite.split(":seed=").next().unwrap_or(&r.suite).to_string();
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            let pass = rs.iter().all(|r| r.pass);
            let worst = rs.iter().map(|r| r.worst).fold(f64::NEG_INFINITY, f64::max);
            let mut line = format!("{} {key}: {} runs, worst residual {worst:.3e} (tol {:.1e})", if pass { "PASS" } else { "FAIL" }, rs.len(), rs[0].tolerance);
            if let Some(f) = rs.iter().find(|r| !r.pass) {
                line.push_str(&format!("; first failure: {f}"));
            }
            line
        })
        .collect()
}
