use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::methods::{run, Form, MethodSpec};
use crate::problem::CompositeProblem;
use crate::scalar::Real;

use super::DiagnosticReport;

/// Runs `spec` in both forms from `x0` and compares the iterates.
///
/// Residual at k is `‖x^m_k − x^a_k‖ / max(1, ‖x₀‖, ‖x^m_k‖)`.
pub fn check_form_equivalence<T: Real>(
    spec: &MethodSpec<T>,
    p: &CompositeProblem<T>,
    x0: &Vector<T>,
    k_max: usize,
    tol: f64,
) -> Result<DiagnosticReport> {
    if !spec.family.has_auxiliary_form() {
        return Err(Error::Unsupported(format!("{} has a single form", spec.family.name())));
    }
    let mom = run(&spec.clone().with_form(Form::Momentum), p, x0, k_max)?;
    let aux = run(&spec.clone().with_form(Form::Auxiliary), p, x0, k_max)?;
    let base = T::one().max(x0.norm());
    let pairs = mom.records.iter().zip(&aux.records).map(|(m, a)| {
        let denom = base.max(m.x.norm());
        (m.k, (m.x.dist_sq(&a.x).sqrt() / denom).to_f64_lossy())
    });
    let mut report = DiagnosticReport::from_residuals(format!("form_equivalence:{}", spec.family.name()), pairs, tol);
    if mom.records.len() != aux.records.len() {
        report.pass = false;
    }
    Ok(report)
}
