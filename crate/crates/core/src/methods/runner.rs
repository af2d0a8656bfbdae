use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problem::{prox_grad_step, prox_point_step, witness_from_step, CompositeProblem};
use crate::scalar::Real;

use super::plan::{build_plan, check_setup, MethodPlan, StepKind, ZRule};
use super::spec::{Family, Form, MethodSpec};
use super::trace::{Record, RunTrace};

/// Iterates with a larger norm abort the run.
pub const DIVERGENCE_NORM: f64 = 1e12;

fn guard<T: Real>(k: usize, v: &Vector<T>, what: &str) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Divergence { k, reason: format!("non-finite {what}") });
    }
    if v.norm() > T::lit(DIVERGENCE_NORM) {
        return Err(Error::Divergence { k, reason: format!("{what} norm exceeds 1e12") });
    }
    Ok(())
}

/// `(advanced point, gradient mapping)` at x.
pub fn advance<T: Real>(p: &CompositeProblem<T>, step: StepKind<T>, x: &Vector<T>) -> Result<(Vector<T>, Vector<T>)> {
    match step {
        StepKind::Gradient { l } => {
            let g = p.f().gradient(x);
            if !g.is_finite() {
                return Err(Error::OracleFailure("non-finite gradient".into()));
            }
            Ok((x.axpy(-T::one() / l, &g), g))
        }
        StepKind::ProxGrad { .. } => prox_grad_step(p, x),
        StepKind::ProxPoint { lambda } => prox_point_step(p.g(), lambda, x),
    }
}

struct Emit<'a, T: Real> {
    p: &'a CompositeProblem<T>,
    step: StepKind<T>,
}

impl<T: Real> Emit<'_, T> {
    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        k: usize,
        x: &Vector<T>,
        y: &Vector<T>,
        gmap: Vector<T>,
        z: Option<Vector<T>>,
        pivot: Option<Vector<T>>,
        radius_sq: Option<T>,
    ) -> Record<T> {
        let witness = match self.step {
            StepKind::Gradient { .. } => self.p.f().gradient(y),
            _ => witness_from_step(self.p, x, y, &gmap),
        };
        Record {
            k,
            x: x.clone(),
            advanced: y.clone(),
            z,
            pivot,
            f_x: self.p.f().value(x),
            value: self.p.value(y),
            gmap_sq: gmap.norm_sq(),
            subgrad_sq: witness.norm_sq(),
            dist_sq: self.p.optimum().and_then(|o| o.point.as_ref()).map(|xs| x.dist_sq(xs)),
            grad_map: gmap,
            radius_sq,
        }
    }
}

fn pivot_of<T: Real>(plan: &MethodPlan<T>, x: &Vector<T>, d: &Vector<T>) -> Option<Vector<T>> {
    match plan.z_rule() {
        Some(ZRule::Collinear { inv_q, .. }) => Some(x.axpy(-*inv_q, d)),
        _ => None,
    }
}

/// Runs a prebuilt plan, handing each record to `observer`.
pub fn run_plan<T: Real>(
    plan: &MethodPlan<T>,
    form: Form,
    p: &CompositeProblem<T>,
    x0: &Vector<T>,
    observer: &mut dyn FnMut(Record<T>) -> Result<()>,
) -> Result<()> {
    guard(0, x0, "starting point")?;
    let k_max = plan.horizon();
    let emit = Emit { p, step: plan.step() };
    match form {
        Form::Momentum => {
            let mut x = x0.clone();
            let mut y_prev = x0.clone();
            for k in 0..=k_max {
                let (y, gmap) = advance(p, plan.step(), &x)?;
                let d = &x - &y;
                let z = plan.anchor(k).and_then(|c| {
                    let w = T::one() - c;
                    (w != T::zero()).then(|| x.lin_comb(T::one() / w, &y_prev, -c / w))
                });
                let pivot = pivot_of(plan, &x, &d);
                let (a, b) = if k < k_max { plan.momentum(k) } else { (T::zero(), T::zero()) };
                let next = (k < k_max).then(|| {
                    let mut n = y.clone();
                    n = n.axpy(a, &(&y - &y_prev));
                    n.axpy(b, &(&y - &x))
                });
                observer(emit.record(k, &x, &y, gmap, z, pivot, None))?;
                if let Some(n) = next {
                    guard(k + 1, &n, "iterate")?;
                    y_prev = y;
                    x = n;
                }
            }
        }
        Form::Auxiliary => {
            if !plan.has_auxiliary_form() {
                return Err(Error::Unsupported(format!("{} has no auxiliary form", plan.name())));
            }
            let rule = plan.z_rule().expect("checked above");
            let mut z = x0.clone();
            let mut y_prev = x0.clone();
            for k in 0..=k_max {
                let c = plan.anchor(k).expect("checked above");
                let x = y_prev.lin_comb(c, &z, T::one() - c);
                guard(k, &x, "iterate")?;
                let (y, gmap) = advance(p, plan.step(), &x)?;
                let d = &x - &y;
                let pivot = pivot_of(plan, &x, &d);
                let z_next = (k < k_max).then(|| match rule {
                    ZRule::Parallel(dk) => z.axpy(-dk[k], &d),
                    ZRule::Collinear { weights, .. } => {
                        let e = weights[k];
                        pivot.as_ref().expect("collinear plans have pivots").lin_comb(e, &z, T::one() - e)
                    }
                });
                observer(emit.record(k, &x, &y, gmap, Some(z), pivot, None))?;
                match z_next {
                    Some(zn) => {
                        guard(k + 1, &zn, "auxiliary iterate")?;
                        z = zn;
                        y_prev = y;
                    }
                    None => break,
                }
            }
        }
    }
    Ok(())
}

/// Geometric descent on a strongly convex quadratic with exact line search.
fn run_geometric<T: Real>(
    p: &CompositeProblem<T>,
    x0: &Vector<T>,
    k_max: usize,
    observer: &mut dyn FnMut(Record<T>) -> Result<()>,
) -> Result<()> {
    let f = p.f();
    if !f.is_quadratic() {
        return Err(Error::Unsupported("geometric descent needs a quadratic f for exact line search".into()));
    }
    guard(0, x0, "starting point")?;
    let l = p.smoothness();
    let mu = f.strong_convexity();
    let one = T::one();
    let shrink = one - mu / l;
    let step = StepKind::Gradient { l };
    let emit = Emit { p, step };
    let inv_mu2 = one / (mu * mu);

    let mut x = x0.clone();
    let mut g = f.gradient(&x);
    let mut z = x.axpy(-one / mu, &g);
    let mut r2 = shrink * g.norm_sq() * inv_mu2;
    for k in 0..=k_max {
        let y = x.axpy(-one / l, &g);
        let pivot = x.axpy(-one / mu, &g);
        observer(emit.record(k, &x, &y, g.clone(), Some(z.clone()), Some(pivot), Some(r2)))?;
        if k == k_max {
            break;
        }
        // exact line search on the segment z → y; φ' is affine for quadratics
        let dir = &y - &z;
        let s0 = f.gradient(&z).dot(&dir);
        let s1 = f.gradient(&y).dot(&dir);
        let t = if s0 - s1 > T::zero() { s0 / (s0 - s1) } else { one };
        x = z.axpy(t, &dir);
        guard(k + 1, &x, "iterate")?;
        g = f.gradient(&x);
        let gn2 = g.norm_sq() * inv_mu2;
        if gn2 == T::zero() {
            z = x.clone();
            r2 = T::zero();
            continue;
        }
        let pc = x.axpy(-one / mu, &g);
        let rb2 = shrink * gn2;
        if gn2 < r2 / T::lit(2.0) {
            z = pc;
            r2 = rb2;
        } else {
            let ra2 = (r2 - gn2 * mu / l).max(T::zero());
            let d2 = z.dist_sq(&pc);
            let t = if d2 > T::zero() { (d2 + ra2 - rb2) / (T::lit(2.0) * d2) } else { -one };
            if t >= T::zero() && t <= one && ra2 - t * t * d2 >= T::zero() {
                z = z.lin_comb(one - t, &pc, t);
                r2 = ra2 - t * t * d2;
            } else if ra2 <= rb2 {
                r2 = ra2;
            } else {
                z = pc;
                r2 = rb2;
            }
        }
        guard(k + 1, &z, "ball center")?;
    }
    Ok(())
}

/// Builds the plan a spec would use on `p` for horizon K.
pub fn plan_for<T: Real>(spec: &MethodSpec<T>, p: &CompositeProblem<T>, k_max: usize) -> Result<MethodPlan<T>> {
    build_plan(&spec.family, p, k_max)
}

fn drive<T: Real>(
    spec: &MethodSpec<T>,
    p: &CompositeProblem<T>,
    x0: &Vector<T>,
    k_max: usize,
    observer: &mut dyn FnMut(Record<T>) -> Result<()>,
) -> Result<(StepKind<T>, Vec<usize>)> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    match &spec.family {
        Family::Composed(first, second) => {
            let mut handoff = None;
            let (step, mut starts) = drive(first, p, x0, k_max, &mut |r: Record<T>| {
                if r.k == k_max {
                    handoff = Some(r.advanced.clone());
                }
                observer(r)
            })?;
            let start = handoff.expect("first phase reaches K");
            let offset = starts.len();
            let (_, inner) = drive(second, p, &start, k_max, &mut |mut r: Record<T>| {
                if r.k == 0 {
                    return Ok(());
                }
                r.k += k_max * offset;
                observer(r)
            })?;
            starts.extend(inner.into_iter().map(|s| s + k_max * offset));
            Ok((step, starts))
        }
        Family::GeometricDescent => {
            let step = check_setup(&spec.family, p)?;
            if spec.form == Form::Auxiliary {
                return Err(Error::Unsupported("geometric_descent has a single form".into()));
            }
            run_geometric(p, x0, k_max, observer)?;
            Ok((step, vec![0]))
        }
        family => {
            let plan = build_plan(family, p, k_max)?;
            run_plan(&plan, spec.form, p, x0, observer)?;
            Ok((plan.step(), vec![0]))
        }
    }
}

/// Streams records to `observer` without storing them.
pub fn run_observed<T: Real>(
    spec: &MethodSpec<T>,
    p: &CompositeProblem<T>,
    x0: &Vector<T>,
    k_max: usize,
    observer: &mut dyn FnMut(Record<T>) -> Result<()>,
) -> Result<StepKind<T>> {
    drive(spec, p, x0, k_max, observer).map(|(s, _)| s)
}

pub fn run<T: Real>(spec: &MethodSpec<T>, p: &CompositeProblem<T>, x0: &Vector<T>, k_max: usize) -> Result<RunTrace<T>> {
    let started = Instant::now();
    let mut records = Vec::with_capacity(k_max + 1);
    let (step, phase_starts) = drive(spec, p, x0, k_max, &mut |r| {
        records.push(r);
        Ok(())
    })?;
    Ok(RunTrace {
        method: spec.to_string(),
        form: spec.form,
        horizon: k_max,
        step,
        records,
        phase_starts,
        wall_time: started.elapsed(),
    })
}
