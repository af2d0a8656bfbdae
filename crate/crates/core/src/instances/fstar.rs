use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::problem::CompositeProblem;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct FstarEstimate<T> {
    /// Best `F(x⊕)` seen; never below F*.
    pub value: T,
    /// Certified bound on `value − F*` (`+inf` when no certificate exists).
    pub gap: T,
    pub point: Vector<T>,
    pub iterations: usize,
}

/// FISTA from `x0` for at most `budget` iterations.
///
/// For `v ∈ ∂F(y)`, `F(y) − F* ≤ ‖v‖·‖y − x*‖`. The distance is bounded by
/// `‖v‖/μ` under strong convexity, otherwise by `‖y‖ + R` where `R` bounds
/// `‖x*‖` on the sublevel set `g ≤ F_best − inf f`.
pub fn estimate_fstar<T: Real>(p: &CompositeProblem<T>, x0: &Vector<T>, budget: usize) -> Result<FstarEstimate<T>> {
    if budget < 1000 {
        return Err(Error::InvalidParameter { name: "budget", value: budget as f64, reason: "need at least 1000 iterations" });
    }
    let l = p.smoothness();
    if !(l > T::zero()) {
        return Err(Error::InvalidParameter { name: "L", value: l.to_f64_lossy(), reason: "must be positive" });
    }
    let f = p.f();
    let g = p.g();
    let inv_l = T::one() / l;
    let mu = f.strong_convexity() + g.strong_convexity();
    let f_lb = f.lower_bound();
    let stop = T::lit(100.0) * T::epsilon();

    let mut x = x0.clone();
    let mut y_prev = x0.clone();
    let mut theta = T::one();
    let mut best = FstarEstimate { value: T::infinity(), gap: T::infinity(), point: x0.clone(), iterations: 0 };
    for it in 0..budget {
        let gx = f.gradient(&x);
        let y = g.prox(inv_l, &x.axpy(-inv_l, &gx))?;
        if !y.is_finite() {
            return Err(Error::Divergence { k: it, reason: "non-finite iterate in reference run".into() });
        }
        let gmap = (&x - &y).scale(l);
        let v = &(&gmap - &gx) + &f.gradient(&y);
        let fy = p.value(&y);
        if fy < best.value {
            best.value = fy;
            best.point = y.clone();
        }
        let vn = v.norm();
        let radius = if mu > T::zero() {
            Some(vn / mu)
        } else {
            f_lb.and_then(|lb| g.norm_bound(best.value - lb)).map(|r| y.norm() + r)
        };
        if let Some(r) = radius {
            best.gap = best.gap.min(vn * r);
        }
        best.iterations = it + 1;
        if best.gap <= stop * T::one().max(best.value.abs()) {
            break;
        }
        let theta_next = (T::one() + (T::one() + T::lit(4.0) * theta * theta).sqrt()) / T::lit(2.0);
        x = y.axpy((theta - T::one()) / theta_next, &(&y - &y_prev));
        y_prev = y;
        theta = theta_next;
    }
    Ok(best)
}
