use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::{plan_for, Family, MethodSpec, PlanSchedule, RunTrace, StepKind};
use crate::problem::CompositeProblem;
use crate::scalar::Real;

use super::{DiagnosticReport, Reference};

/// A worst-case rate statement that can be checked on a finished trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClaim {
    /// `4‖∇̃_L F(x_K)‖² ≤ 264L/(K+2)²·(F(x₀) − F*)`
    FistaG,
    /// `4‖∇̃_L F(x_{2K})‖² ≤ 528L²/(K+2)⁴·‖x₀ − x*‖²`
    FistaPlusFistaG,
    /// `‖∇̃_{1/λ} g(x_K)‖² ≤ 4/(λ(K+2)²)·(g(x₀) − g*)`
    GulerG,
    /// `‖∇̃_{1/λ} g(x_{2K})‖² ≤ 4/(λ²(K+2)⁴)·‖x₀ − x*‖²`
    GulerPlusGulerG,
    /// `‖z_k − x*‖² ≤ (2/μ)(1−√q)^{2k}(g(x₀) − g*)`
    ProximalTmm,
    /// `‖z_k − x*‖² ≤ ρ^k/(ρ^k + q)·‖z₀ − x*‖²`, ρ = (1−√q)², k ≥ 1
    ProximalItem,
    /// `‖∇f(x_K)‖² ≤ 2L/θ₀²·(f(x₀) − f*)`
    OgmG,
    /// `‖∇̃_L F(x_K)‖² ≤ 2Lτ₀(F(x₀) − F*)`
    GFistaG,
    /// `‖∇f(x_K)‖² ≤ 2Lτ₀(f(x₀) − f*)`
    GFgmG,
    /// `‖∇f(x_K)‖² ≤ 66L/(K+2)²·(f(x₀) − f*)`
    FgmG,
    /// `‖∇̃_{1/λ} g(x_K)‖² ≤ τ₀/λ·(g(x₀) − g*)`
    GGulerG,
}

impl RateClaim {
    pub const ALL: [RateClaim; 11] = [
        Self::FistaG,
        Self::FistaPlusFistaG,
        Self::GulerG,
        Self::GulerPlusGulerG,
        Self::ProximalTmm,
        Self::ProximalItem,
        Self::OgmG,
        Self::GFistaG,
        Self::GFgmG,
        Self::FgmG,
        Self::GGulerG,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FistaG => "fista_g",
            Self::FistaPlusFistaG => "fista_plus_fista_g",
            Self::GulerG => "guler_g",
            Self::GulerPlusGulerG => "guler_plus_guler_g",
            Self::ProximalTmm => "proximal_tmm",
            Self::ProximalItem => "proximal_item",
            Self::OgmG => "ogm_g",
            Self::GFistaG => "g_fista_g",
            Self::GFgmG => "g_fgm_g",
            Self::FgmG => "fgm_g",
            Self::GGulerG => "g_guler_g",
        }
    }

    /// Method the claim is about, in the `MethodSpec` syntax.
    pub fn default_method(self) -> &'static str {
        match self {
            Self::FistaPlusFistaG => "composed(fista,fista_g)",
            Self::GulerPlusGulerG => "composed(guler2[lambda=1],guler_g[lambda=1])",
            Self::GulerG => "guler_g[lambda=1]",
            Self::GGulerG => "g_guler_g[lambda=1]",
            Self::ProximalTmm => "proximal_tmm[lambda=1]",
            Self::ProximalItem => "proximal_item[lambda=1]",
            other => other.name(),
        }
    }

    /// Whether the claim speaks about `spec`'s method.
    pub fn covers<T: Real>(self, spec: &MethodSpec<T>) -> bool {
        self.accepts(&spec.family)
    }

    fn accepts<T: Real>(self, family: &Family<T>) -> bool {
        match (self, family) {
            (Self::FistaPlusFistaG, Family::Composed(a, b)) => {
                matches!(a.family, Family::Fista) && matches!(b.family, Family::FistaG)
            }
            (Self::GulerPlusGulerG, Family::Composed(a, b)) => {
                matches!(a.family, Family::Guler2 { .. }) && matches!(b.family, Family::GulerG { .. })
            }
            (Self::FistaG, Family::FistaG)
            | (Self::GulerG, Family::GulerG { .. })
            | (Self::ProximalTmm, Family::ProximalTmm { .. })
            | (Self::ProximalItem, Family::ProximalItem { .. })
            | (Self::OgmG, Family::OgmG)
            | (Self::GFistaG, Family::GFistaG(_) | Family::FistaG)
            | (Self::GFgmG, Family::GFgmG(_) | Family::FgmG)
            | (Self::FgmG, Family::FgmG)
            | (Self::GGulerG, Family::GGulerG { .. } | Family::GulerG { .. }) => true,
            _ => false,
        }
    }
}

impl fmt::Display for RateClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RateClaim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown rate claim `{s}`")))
    }
}

fn need_point<T: Real>(reference: &Reference<T>) -> Result<&crate::linalg::Vector<T>> {
    reference.point.as_ref().ok_or_else(|| Error::Unsupported("this bound needs a minimizer x*".into()))
}

/// Checks `claim` on `trace` (produced by `spec` on `p`).
///
/// The optimal value enters through its lower bound `value − gap`, so an
/// estimated F* only loosens the right-hand side. Residuals are
/// `(lhs − rhs)/scale` with `scale = max(1, |F(x₀)|, ‖x₀‖²)`.
pub fn check_rate_bound<T: Real>(
    claim: RateClaim,
    spec: &MethodSpec<T>,
    trace: &RunTrace<T>,
    p: &CompositeProblem<T>,
    reference: &Reference<T>,
    tol: f64,
) -> Result<DiagnosticReport> {
    if !claim.accepts(&spec.family) {
        return Err(Error::Unsupported(format!("rate claim {claim} does not cover {spec}")));
    }
    let k_max = trace.horizon;
    let recs = &trace.records;
    let x0 = &recs[0].x;
    let scale = p.tolerance_scale(x0);
    let last = trace.last();
    let l = p.smoothness();
    let kp2 = T::from_usize_lossy(k_max + 2);
    let f_gap = p.value(x0) - reference.lower();
    let lambda = |step: StepKind<T>| match step {
        StepKind::ProxPoint { lambda } => Ok(lambda),
        _ => Err(Error::Unsupported("proximal-point step expected".into())),
    };
    let single = |lhs: T, rhs: T| vec![(recs.len() - 1, ((lhs - rhs) / scale).to_f64_lossy())];

    let pairs = match claim {
        RateClaim::FistaG => single(T::lit(4.0) * last.gmap_sq, T::lit(264.0) * l / (kp2 * kp2) * f_gap),
        RateClaim::FgmG => single(last.gmap_sq, T::lit(66.0) * l / (kp2 * kp2) * f_gap),
        RateClaim::FistaPlusFistaG => {
            let d2 = x0.dist_sq(need_point(reference)?);
            single(T::lit(4.0) * last.gmap_sq, T::lit(528.0) * l * l / kp2.powi(4) * d2)
        }
        RateClaim::GulerG => {
            let lam = lambda(trace.step)?;
            single(last.gmap_sq, T::lit(4.0) / (lam * kp2 * kp2) * f_gap)
        }
        RateClaim::GulerPlusGulerG => {
            let lam = lambda(trace.step)?;
            let d2 = x0.dist_sq(need_point(reference)?);
            single(last.gmap_sq, T::lit(4.0) / (lam * lam * kp2.powi(4)) * d2)
        }
        RateClaim::OgmG => {
            let plan = plan_for(spec, p, k_max)?;
            let t0 = match plan.schedule() {
                PlanSchedule::Theta(th) => th.theta(0),
                _ => return Err(Error::Unsupported("OGM-G plan without θ schedule".into())),
            };
            single(last.gmap_sq, T::lit(2.0) * l / (t0 * t0) * f_gap)
        }
        RateClaim::GFistaG | RateClaim::GFgmG | RateClaim::GGulerG => {
            let plan = plan_for(spec, p, k_max)?;
            let tau0 = match plan.schedule() {
                PlanSchedule::PhiTau(s) => s.tau(0),
                PlanSchedule::Theta(th) => T::one() / (th.theta(0) * th.theta(0)),
                _ => return Err(Error::Unsupported("plan without φ/τ schedule".into())),
            };
            match claim {
                RateClaim::GGulerG => single(last.gmap_sq, tau0 / lambda(trace.step)? * f_gap),
                _ => single(last.gmap_sq, T::lit(2.0) * l * tau0 * f_gap),
            }
        }
        RateClaim::ProximalTmm | RateClaim::ProximalItem => {
            let plan = plan_for(spec, p, k_max)?;
            let sc = plan.strong_convexity().expect("strongly convex plan");
            let xs = need_point(reference)?;
            let rho = (T::one() - sc.q.sqrt()).powi(2);
            let z0_d2 = recs[0].z.as_ref().unwrap_or(x0).dist_sq(xs);
            let mut out = Vec::with_capacity(recs.len());
            for r in recs {
                let z = r.z.as_ref().ok_or_else(|| Error::Unsupported("trace lacks z_k".into()))?;
                let lhs = z.dist_sq(xs);
                let rk = rho.powi(r.k as i32);
                let rhs = match claim {
                    RateClaim::ProximalTmm => T::lit(2.0) / sc.mu * rk * f_gap,
                    // the k = 0 case would read ‖z₀−x*‖² ≤ ‖z₀−x*‖²/(1+q)
                    _ if r.k == 0 => continue,
                    _ => rk / (rk + sc.q) * z0_d2,
                };
                out.push((r.k, ((lhs - rhs) / scale).to_f64_lossy()));
            }
            out
        }
    };
    Ok(DiagnosticReport::from_residuals(format!("rate:{claim}:{}", trace.method), pairs, tol)
        .with_detail("horizon", k_max as f64)
        .with_detail("reference_gap", reference.gap.to_f64_lossy()))
}
