use std::sync::Arc;

use accel_core::functions::L1Norm;
use accel_core::instances::{make_prox_only_quadratic_l1, make_smooth_quadratic, make_strongly_convex_quadratic, random_quadratic};
use accel_core::methods::{plan_for, Family, MethodSpec, Requirement};
use accel_core::CompositeProblem;

use crate::CliError;

/// Problem the coefficients are computed against: L = 1 (L = κ with μ = 1
/// for the strongly convex smooth families, μ = `mu` for proximal-point ones).
fn canonical(spec: &MethodSpec<f64>, kappa: f64, mu: f64) -> accel_core::Result<CompositeProblem<f64>> {
    if let Family::Composed(first, _) = &spec.family {
        return canonical(first, kappa, mu);
    }
    match spec.family.requirement() {
        Requirement::ProxGrad => {
            let f = random_quadratic::<f64>(2, 1.0, 1.0, 0, false)?;
            Ok(CompositeProblem::new(Arc::new(f), Arc::new(L1Norm { weight: 0.1 })))
        }
        Requirement::SmoothOnly if spec.family.needs_strong_convexity() => make_strongly_convex_quadratic(2, kappa, 0),
        Requirement::SmoothOnly => make_smooth_quadratic(2, 1.0, 1.0, 0),
        Requirement::ProximalPointOnly => make_prox_only_quadratic_l1(2, mu, 0.1, 0),
    }
}

/// Tab-separated coefficient table of `method` at horizon `k`.
pub fn cmd_dump_schedule(method: &str, k: usize, kappa: f64, mu: f64) -> Result<String, CliError> {
    let usage = |e: accel_core::Error| CliError::Usage(format!("{method}: {e}"));
    let spec = MethodSpec::<f64>::parse(method).map_err(usage)?;
    if matches!(spec.family, Family::Composed(..)) {
        return Err(CliError::Usage("dump-schedule takes a single family; dump each phase separately".into()));
    }
    let p = canonical(&spec, kappa, mu).map_err(usage)?;
    let plan = plan_for(&spec, &p, k).map_err(usage)?;
    Ok(plan.table().to_text())
}
