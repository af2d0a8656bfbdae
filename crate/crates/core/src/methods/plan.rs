//! Per-family coefficient tables shared by both forms.
//!
//! Momentum form: `x_{k+1} = y_k + a_k(y_k − y_{k−1}) + b_k(y_k − x_k)`.
//! Auxiliary form: `x_k = c_k y_{k−1} + (1−c_k) z_k` and either
//! `z_{k+1} = z_k − d_k D_k` (parallel) or `z_{k+1} = e_k p_k + (1−e_k) z_k`
//! (collinear), where `y` is the advanced point, `D_k = x_k − y_k` and
//! `p_k = x_k − D_k/q` is the strongly convex pivot.

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Setup};
use crate::scalar::Real;
use crate::schedules::{
    build_item_schedule, build_ns_sc_fgm_schedule, build_phi_fistag, build_phi_tau_custom, build_theta, kappa,
    phi_tau_from_theta, q_proximal, ItemSchedule, ItemVariant, NsScFgmSchedule, PhiTauSchedule, ScheduleTable,
    SlackFactor, ThetaSchedule, ThetaVariant,
};

use super::spec::{Family, PhiTauRecipe, Requirement};

/// The elementary step producing the advanced point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepKind<T> {
    /// `x⁺ = x − ∇f(x)/L`
    Gradient { l: T },
    /// `x⊕ = Prox_{g/L}(x − ∇f(x)/L)`
    ProxGrad { l: T },
    /// `x∘ = Prox_{λg}(x)`
    ProxPoint { lambda: T },
}

impl<T: Real> StepKind<T> {
    /// `D = s·G`.
    pub fn step_size(&self) -> T {
        match *self {
            Self::Gradient { l } | Self::ProxGrad { l } => T::one() / l,
            Self::ProxPoint { lambda } => lambda,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ZRule<T> {
    /// `d_0..d_{K−1}`
    Parallel(Vec<T>),
    /// `e_0..e_{K−1}` and `1/q` for the pivot.
    Collinear { weights: Vec<T>, inv_q: T },
}

#[derive(Clone, Debug)]
pub enum PlanSchedule<T> {
    None,
    Theta(ThetaSchedule<T>),
    PhiTau(PhiTauSchedule<T>),
    Item(ItemSchedule<T>),
    NsScFgm(NsScFgmSchedule<T>),
}

/// Strong convexity data of a strongly convex family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrongConvexity<T> {
    pub mu: T,
    /// 1/κ for smooth families, λμ/(λμ+1) for proximal ones.
    pub q: T,
}

#[derive(Clone, Debug)]
pub struct MethodPlan<T> {
    pub(crate) name: &'static str,
    pub(crate) horizon: usize,
    pub(crate) step: StepKind<T>,
    pub(crate) momentum: Vec<(T, T)>,
    pub(crate) anchor: Option<Vec<T>>,
    pub(crate) z_rule: Option<ZRule<T>>,
    pub(crate) schedule: PlanSchedule<T>,
    pub(crate) strong: Option<StrongConvexity<T>>,
}

impl<T: Real> MethodPlan<T> {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn step(&self) -> StepKind<T> {
        self.step
    }

    pub fn momentum(&self, k: usize) -> (T, T) {
        self.momentum[k]
    }

    pub fn anchor(&self, k: usize) -> Option<T> {
        self.anchor.as_ref().map(|c| c[k])
    }

    pub fn z_rule(&self) -> Option<&ZRule<T>> {
        self.z_rule.as_ref()
    }

    pub fn schedule(&self) -> &PlanSchedule<T> {
        &self.schedule
    }

    pub fn strong_convexity(&self) -> Option<StrongConvexity<T>> {
        self.strong
    }

    pub fn has_auxiliary_form(&self) -> bool {
        self.anchor.is_some() && self.z_rule.is_some()
    }

    /// Coefficients a, b, c, d/e per index, followed by the family schedule.
    pub fn table(&self) -> ScheduleTable {
        let k_max = self.horizon;
        let mut columns: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        match &self.z_rule {
            Some(ZRule::Parallel(_)) => columns.push("d".into()),
            Some(ZRule::Collinear { .. }) => columns.push("e".into()),
            None => {}
        }
        let rows = (0..=k_max)
            .map(|k| {
                let mut row = vec![None, None, None];
                if k < k_max {
                    row[0] = Some(self.momentum[k].0.to_f64_lossy());
                    row[1] = Some(self.momentum[k].1.to_f64_lossy());
                }
                row[2] = self.anchor(k).map(|c| c.to_f64_lossy());
                match &self.z_rule {
                    Some(ZRule::Parallel(d)) => row.push((k < k_max).then(|| d[k].to_f64_lossy())),
                    Some(ZRule::Collinear { weights, .. }) => row.push((k < k_max).then(|| weights[k].to_f64_lossy())),
                    None => {}
                }
                (k as isize, row)
            })
            .collect();
        let base = ScheduleTable { columns, rows };
        match &self.schedule {
            PlanSchedule::None => base,
            PlanSchedule::Theta(s) => base.join(s.table()),
            PlanSchedule::PhiTau(s) => base.join(s.table()),
            PlanSchedule::Item(s) => base.join(s.table()),
            PlanSchedule::NsScFgm(s) => base.join(s.table()),
        }
    }
}

fn mismatch(family: &str, reason: impl Into<String>) -> Error {
    Error::SetupMismatch { family: family.to_string(), reason: reason.into() }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::InvalidParameter { name, value: v.to_f64_lossy(), reason: "must be positive and finite" });
    }
    Ok(())
}

/// Checks `family` against `p` and returns the step it will use.
pub fn check_setup<T: Real>(family: &Family<T>, p: &CompositeProblem<T>) -> Result<StepKind<T>> {
    let name = family.name();
    let setup = p.setup();
    let step = match family.requirement() {
        Requirement::ProxGrad => {
            positive("L", p.smoothness())?;
            StepKind::ProxGrad { l: p.smoothness() }
        }
        Requirement::SmoothOnly => {
            if setup != Setup::SmoothConvex {
                return Err(mismatch(name, "smooth-only family needs g = 0"));
            }
            positive("L", p.smoothness())?;
            StepKind::Gradient { l: p.smoothness() }
        }
        Requirement::ProximalPointOnly => {
            if !p.f().is_zero() {
                return Err(mismatch(name, "proximal-point family needs f = 0"));
            }
            let lambda = family.lambda().expect("proximal-point families carry lambda");
            positive("lambda", lambda)?;
            StepKind::ProxPoint { lambda }
        }
    };
    if family.needs_strong_convexity() {
        let mu = match step {
            StepKind::ProxPoint { .. } => p.g().strong_convexity(),
            _ => p.f().strong_convexity(),
        };
        if !(mu > T::zero()) {
            return Err(mismatch(name, "strongly convex family needs mu > 0"));
        }
    }
    Ok(step)
}

fn phi_tau_for<T: Real>(recipe: &PhiTauRecipe<T>, k_max: usize, slack: SlackFactor, name: &str) -> Result<PhiTauSchedule<T>> {
    let sched = match recipe {
        PhiTauRecipe::FistaG => build_phi_fistag(k_max)?,
        PhiTauRecipe::Theta => phi_tau_from_theta(&build_theta(ThetaVariant::GulergBackward, k_max)?)?,
        PhiTauRecipe::Constant => build_phi_tau_custom(k_max, &vec![T::one(); k_max + 1], slack)?,
        PhiTauRecipe::Explicit(s) => {
            if s.horizon() != k_max {
                return Err(Error::HorizonMismatch { built: s.horizon(), requested: k_max });
            }
            s.clone()
        }
    };
    // the ½-slack families cannot take a schedule that only satisfies the factor-one bound
    if slack == SlackFactor::Half {
        for k in 0..k_max {
            let lhs = sched.z_coefficient(k) * (sched.tau(k + 1) - sched.tau(k));
            let rhs = T::lit(0.5) * sched.tau(k + 1);
            if lhs - rhs > T::lit(crate::schedules::PHI_TAU_TOL) * T::one().max(rhs) {
                return Err(mismatch(name, format!("phi/tau schedule violates the slack condition at k={k}")));
            }
        }
    }
    Ok(sched)
}

/// Momentum and auxiliary coefficients of the φ/τ families.
fn phi_tau_coefficients<T: Real>(s: &PhiTauSchedule<T>) -> (Vec<(T, T)>, Vec<T>, Vec<T>) {
    let k_max = s.horizon();
    let phi = |k: usize| s.phi(k as isize);
    let phi_ext = |k: usize| if k > k_max + 1 { T::zero() } else { phi(k) };
    let momentum = (0..k_max)
        .map(|k| {
            let (p0, p1, p2) = (phi(k), phi(k + 1), phi_ext(k + 2));
            let a = (p1 - p2) / (p0 - p1);
            let d = s.z_coefficient(k);
            let b = (p1 - p2) / p1 * (d - p0 / (p0 - p1));
            (a, b)
        })
        .collect();
    let anchor = (0..=k_max).map(|k| phi(k + 1) / phi(k)).collect();
    let d = (0..k_max).map(|k| s.z_coefficient(k)).collect();
    (momentum, anchor, d)
}

/// Builds the coefficient plan of a non-composed, non-geometric family.
pub fn build_plan<T: Real>(family: &Family<T>, p: &CompositeProblem<T>, k_max: usize) -> Result<MethodPlan<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    let step = check_setup(family, p)?;
    let name = family.name();
    let one = T::one();
    let two = T::lit(2.0);
    let mut plan = MethodPlan {
        name,
        horizon: k_max,
        step,
        momentum: Vec::new(),
        anchor: None,
        z_rule: None,
        schedule: PlanSchedule::None,
        strong: None,
    };
    let l = p.smoothness();
    let strong = |lambda: Option<T>| -> Result<StrongConvexity<T>> {
        match lambda {
            Some(lam) => {
                let mu = p.g().strong_convexity();
                Ok(StrongConvexity { mu, q: q_proximal(lam, mu)? })
            }
            None => {
                let mu = p.f().strong_convexity();
                Ok(StrongConvexity { mu, q: one / kappa(l, mu)? })
            }
        }
    };
    match family {
        Family::Ista => {
            plan.momentum = vec![(T::zero(), T::zero()); k_max];
        }
        Family::FpgmM { m } => {
            let th = build_theta::<T>(ThetaVariant::FgmForward, (*m).max(1))?;
            plan.momentum = (0..k_max)
                .map(|k| {
                    if k < *m {
                        let k = k as isize;
                        ((th.theta(k) - one) / th.theta(k + 1), T::zero())
                    } else {
                        (T::zero(), T::zero())
                    }
                })
                .collect();
            plan.schedule = PlanSchedule::Theta(th);
        }
        Family::Fista | Family::Fgm | Family::Guler1 { .. } | Family::Ogm | Family::Guler2 { .. } => {
            let ogm_like = matches!(family, Family::Ogm | Family::Guler2 { .. });
            let variant = if matches!(family, Family::Ogm) { ThetaVariant::OgmForwardWithLast } else { ThetaVariant::FgmForward };
            let th = build_theta::<T>(variant, k_max)?;
            let t = |k: usize| th.theta(k as isize);
            plan.momentum = (0..k_max)
                .map(|k| {
                    let a = (t(k) - one) / t(k + 1);
                    let b = if ogm_like { t(k) / t(k + 1) } else { T::zero() };
                    (a, b)
                })
                .collect();
            plan.anchor = Some((0..=k_max).map(|k| (t(k) - one) / t(k)).collect());
            let factor = if ogm_like { two } else { one };
            plan.z_rule = Some(ZRule::Parallel((0..k_max).map(|k| factor * t(k)).collect()));
            plan.schedule = PlanSchedule::Theta(th);
        }
        Family::OgmG | Family::GulerG { .. } => {
            let variant =
                if matches!(family, Family::OgmG) { ThetaVariant::OgmgBackward } else { ThetaVariant::GulergBackward };
            let th = build_theta::<T>(variant, k_max)?;
            let t = |k: usize| th.theta(k as isize);
            plan.momentum = (0..k_max)
                .map(|k| {
                    let (t0, t1) = (t(k), t(k + 1));
                    let a = (t0 - one) * (two * t1 - one) / (t0 * (two * t0 - one));
                    let b = (two * t1 - one) / (two * t0 - one);
                    (a, b)
                })
                .collect();
            plan.anchor = Some((0..=k_max).map(|k| (t(k + 1) / t(k)).powi(4)).collect());
            let mut d: Vec<T> = (0..k_max).map(t).collect();
            if matches!(family, Family::OgmG) {
                d[0] = (t(0) + one) / two;
            }
            plan.z_rule = Some(ZRule::Parallel(d));
            plan.schedule = PlanSchedule::Theta(th);
        }
        Family::FistaG | Family::FgmG => {
            let s = build_phi_fistag::<T>(k_max)?;
            let (momentum, anchor, d) = phi_tau_coefficients(&s);
            // FISTA-G's own z-step is φ_k/(φ_k−φ_{k+1}) and its correction term vanishes
            let d_fistag: Vec<T> = (0..k_max)
                .map(|k| s.phi(k as isize) / (s.phi(k as isize) - s.phi(k as isize + 1)))
                .collect();
            debug_assert!(d.iter().zip(&d_fistag).all(|(x, y)| (*x - *y).abs() <= T::lit(1e-8) * y.abs().max(one)));
            plan.momentum = momentum.into_iter().map(|(a, _)| (a, T::zero())).collect();
            plan.anchor = Some(anchor);
            plan.z_rule = Some(ZRule::Parallel(d_fistag));
            plan.schedule = PlanSchedule::PhiTau(s);
        }
        Family::GFistaG(recipe) | Family::GFgmG(recipe) | Family::GGulerG { schedule: recipe, .. } => {
            let slack = if matches!(family, Family::GFistaG(_)) { SlackFactor::Half } else { SlackFactor::One };
            let s = phi_tau_for(recipe, k_max, slack, name)?;
            let (momentum, anchor, d) = phi_tau_coefficients(&s);
            plan.momentum = momentum;
            plan.anchor = Some(anchor);
            plan.z_rule = Some(ZRule::Parallel(d));
            plan.schedule = PlanSchedule::PhiTau(s);
        }
        Family::ScFgm => {
            let sc = strong(None)?;
            let sk = (one / sc.q).sqrt();
            plan.momentum = vec![((sk - one) / (sk + one), T::zero()); k_max];
            plan.anchor = Some(vec![sk / (sk + one); k_max + 1]);
            plan.z_rule = Some(ZRule::Collinear { weights: vec![one / sk; k_max], inv_q: one / sc.q });
            plan.strong = Some(sc);
        }
        Family::ScOgm => {
            let sc = strong(None)?;
            let kap = one / sc.q;
            let s = (T::lit(8.0) * kap + one).sqrt();
            let m = (kap - one) / (s + two + kap);
            plan.momentum = vec![(m, m); k_max];
            // stationary solution of the collinear/momentum correspondence for a = b = m
            let c = (s + one + two * kap) / (two * (s + two + kap));
            plan.anchor = Some(vec![c; k_max + 1]);
            let e = (s + T::lit(3.0)) / (s + one + two * kap);
            plan.z_rule = Some(ZRule::Collinear { weights: vec![e; k_max], inv_q: kap });
            plan.strong = Some(sc);
        }
        Family::Tmm | Family::ProximalTmm { .. } => {
            let sc = strong(family.lambda())?;
            let r = sc.q.sqrt();
            plan.momentum = vec![((one - r) * (one - r) / (one + r), one - r); k_max];
            plan.anchor = Some(vec![(one - r) / (one + r); k_max + 1]);
            plan.z_rule = Some(ZRule::Collinear { weights: vec![r; k_max], inv_q: one / sc.q });
            plan.strong = Some(sc);
        }
        Family::Item { start } | Family::ProximalItem { start, .. } => {
            let sc = strong(family.lambda())?;
            let s = match family {
                Family::Item { .. } => build_item_schedule(ItemVariant::ItemSmooth, k_max, one / sc.q, *start)?,
                _ => build_item_schedule(ItemVariant::ProximalItem, k_max, sc.q, *start)?,
            };
            plan.momentum = (0..k_max).map(|k| (s.alpha(k), s.beta(k))).collect();
            plan.anchor = Some((0..=k_max).map(|k| s.gamma(k)).collect());
            plan.z_rule =
                Some(ZRule::Collinear { weights: (0..k_max).map(|k| sc.q * s.delta(k)).collect(), inv_q: one / sc.q });
            plan.schedule = PlanSchedule::Item(s);
            plan.strong = Some(sc);
        }
        Family::NonstationaryScFgm => {
            let sc = strong(None)?;
            let s = build_ns_sc_fgm_schedule(k_max, one / sc.q)?;
            plan.momentum = (0..k_max).map(|k| (s.alpha(k), T::zero())).collect();
            plan.anchor = Some((0..=k_max).map(|k| one - s.gamma(k)).collect());
            plan.z_rule =
                Some(ZRule::Collinear { weights: (0..k_max).map(|k| sc.q * s.delta(k)).collect(), inv_q: one / sc.q });
            plan.schedule = PlanSchedule::NsScFgm(s);
            plan.strong = Some(sc);
        }
        Family::GeometricDescent | Family::Composed(..) => {
            return Err(Error::Unsupported(format!("{name} has no coefficient plan")));
        }
    }
    Ok(plan)
}
