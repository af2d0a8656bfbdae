//! Numerical certificates on concrete traces: Lyapunov monotonicity,
//! geometric structure, rate bounds and the elementary inequalities.
//!
//! Every check returns a [`DiagnosticReport`]; residuals are signed and a
//! check passes when the worst one is at most the tolerance.

mod equivalence;
mod geometry;
mod lemmas;
mod lyapunov;
mod rates;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::instances::FstarEstimate;
use crate::linalg::Vector;
use crate::problem::CompositeProblem;
use crate::scalar::Real;

pub use equivalence::check_form_equivalence;
pub use geometry::{check_collinear, check_coplanar, check_parallel, DEGENERATE_REL};
pub use lemmas::{check_inequality_lemmas, Lemma};
pub use lyapunov::{check_lyapunov, lyapunov_sequence, LyapunovKind, ROUNDING_FACTOR};
pub use rates::{check_rate_bound, RateClaim};

/// Default relative slack for Lyapunov and rate checks.
pub const SLACK: f64 = 1e-8;
/// Default normalized tolerance for parallel/collinear residuals.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Default relative tolerance for coplanarity and form equivalence.
pub const COPLANAR_TOL: f64 = 1e-8;
/// Default relative slack for the inequality lemmas.
pub const LEMMA_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticReport {
    pub suite: String,
    /// Signed residuals; index `i` refers to `indices[i]`.
    pub residuals: Vec<f64>,
    pub indices: Vec<usize>,
    pub worst: f64,
    pub worst_index: Option<usize>,
    /// First index whose residual exceeds the tolerance.
    pub first_violation: Option<usize>,
    pub tolerance: f64,
    pub pass: bool,
    /// Extra recorded quantities (e.g. empirical contraction factors).
    pub details: BTreeMap<String, f64>,
}

impl DiagnosticReport {
    /// Builds a report from `(index, residual)` pairs. Non-finite residuals fail.
    pub fn from_residuals(suite: impl Into<String>, pairs: impl IntoIterator<Item = (usize, f64)>, tolerance: f64) -> Self {
        let (indices, residuals): (Vec<usize>, Vec<f64>) = pairs.into_iter().unzip();
        let mut worst = f64::NEG_INFINITY;
        let mut worst_index = None;
        let mut first_violation = None;
        for (&i, &r) in indices.iter().zip(&residuals) {
            let bad = !r.is_finite() || r > tolerance;
            if bad && first_violation.is_none() {
                first_violation = Some(i);
            }
            let key = if r.is_finite() { r } else { f64::INFINITY };
            if worst_index.is_none() || key > worst {
                worst = key;
                worst_index = Some(i);
            }
        }
        if worst_index.is_none() {
            worst = 0.0;
        }
        Self {
            suite: suite.into(),
            residuals,
            indices,
            worst,
            worst_index,
            first_violation,
            tolerance,
            pass: first_violation.is_none(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    /// Merges reports; the result passes only if all of them pass.
    /// Residuals are normalized by each report's tolerance.
    pub fn combine(suite: impl Into<String>, reports: &[DiagnosticReport]) -> Self {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for r in reports {
            let tol = if r.tolerance > 0.0 { r.tolerance } else { 1.0 };
            for (i, v) in r.residuals.iter().enumerate() {
                pairs.push((offset + i, v / tol));
            }
            offset += r.residuals.len();
        }
        let mut out = Self::from_residuals(suite, pairs, 1.0);
        for r in reports {
            out.details.insert(format!("{}.worst", r.suite), r.worst);
            out.details.insert(format!("{}.pass", r.suite), if r.pass { 1.0 } else { 0.0 });
        }
        out.pass = reports.iter().all(|r| r.pass);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is serializable")
    }
}

impl fmt::Display for DiagnosticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst {:.3e} (tol {:.1e}, {} residuals)",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.worst,
            self.tolerance,
            self.residuals.len()
        )?;
        if let Some(k) = self.first_violation {
            write!(f, ", first violation at {k}")?;
        }
        for (k, v) in &self.details {
            write!(f, ", {k}={v:.6e}")?;
        }
        Ok(())
    }
}

/// Optimal value (and point) a check compares against. `gap` bounds
/// `value − F*` when the value is only an estimate.
#[derive(Clone, Debug)]
pub struct Reference<T> {
    pub value: T,
    pub point: Option<Vector<T>>,
    pub gap: T,
}

impl<T: Real> Reference<T> {
    /// Exact optimum stored on the problem, if any.
    pub fn exact(p: &CompositeProblem<T>) -> Option<Self> {
        p.optimum().map(|o| Self { value: o.value, point: o.point.clone(), gap: T::zero() })
    }

    pub fn from_estimate(est: &FstarEstimate<T>) -> Self {
        Self { value: est.value, point: Some(est.point.clone()), gap: est.gap }
    }

    /// Lower bound on F*.
    pub fn lower(&self) -> T {
        self.value - self.gap
    }
}

/// Residuals `U_{k+1} − factor·U_k` normalized by `scale`.
///
/// With `decay = None` the factor is 1. The largest observed ratio
/// `U_{k+1}/U_k` is recorded as `empirical_factor`.
pub fn check_monotone<T: Real>(suite: &str, u: &[T], decay: Option<T>, scale: T, tol: f64) -> DiagnosticReport {
    let factor = decay.unwrap_or_else(T::one);
    let scale = scale.max(T::min_positive_value());
    let pairs = u.windows(2).enumerate().map(|(k, w)| (k, ((w[1] - factor * w[0]) / scale).to_f64_lossy()));
    let mut report = DiagnosticReport::from_residuals(suite, pairs, tol);
    let ratio = u
        .windows(2)
        .filter(|w| w[0] > T::zero())
        .map(|w| (w[1] / w[0]).to_f64_lossy())
        .fold(f64::NEG_INFINITY, f64::max);
    if ratio.is_finite() {
        report = report.with_detail("empirical_factor", ratio);
    }
    if decay.is_some() {
        report = report.with_detail("decay", factor.to_f64_lossy());
    }
    report
}
