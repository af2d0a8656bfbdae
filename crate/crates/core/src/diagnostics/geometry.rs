use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::methods::RunTrace;
use crate::scalar::Real;

use super::DiagnosticReport;

/// Vectors shorter than this times `max(1, ‖x_k‖)` count as degenerate:
/// below it, rounding in the iterates dominates the geometry.
pub const DEGENERATE_REL: f64 = 1e-6;

fn floor<T: Real>(x: &Vector<T>) -> T {
    T::lit(DEGENERATE_REL) * T::one().max(x.norm())
}

/// Component of `v` orthogonal to `u`.
fn reject<T: Real>(v: &Vector<T>, u: &Vector<T>) -> Vector<T> {
    let uu = u.norm_sq();
    if uu == T::zero() {
        return v.clone();
    }
    v.axpy(-v.dot(u) / uu, u)
}

fn z_of<T: Real>(trace: &RunTrace<T>, k: usize) -> Result<&Vector<T>> {
    trace.records[k].z.as_ref().ok_or_else(|| Error::Unsupported("trace has no auxiliary iterates".into()))
}

/// `x_k⁺ − x_k` against `z_{k+1} − z_k`; residual
/// `(‖u‖‖v‖ − |⟨u,v⟩|)/(‖u‖‖v‖)`, zero vectors pass.
pub fn check_parallel<T: Real>(trace: &RunTrace<T>, tol: f64) -> Result<DiagnosticReport> {
    let mut pairs = Vec::new();
    for k in 0..trace.records.len().saturating_sub(1) {
        let r = &trace.records[k];
        let u = &r.advanced - &r.x;
        let v = z_of(trace, k + 1)? - z_of(trace, k)?;
        let (nu, nv) = (u.norm(), v.norm());
        let eps = floor(&r.x);
        let res = if nu <= eps || nv <= eps { T::zero() } else { (nu * nv - u.dot(&v).abs()) / (nu * nv) };
        pairs.push((k, res.to_f64_lossy()));
    }
    Ok(DiagnosticReport::from_residuals(format!("parallel:{}", trace.method), pairs, tol))
}

/// Collinearity of `z_k`, `z_{k+1}` and the pivot `x^{++}`: norm of the
/// part of `pivot − z_k` orthogonal to `z_{k+1} − z_k`, relative to
/// `‖pivot − z_k‖`.
///
/// Geometric descent moves its center toward the pivot of the *next*
/// iterate, so its pivot is taken from record k+1.
pub fn check_collinear<T: Real>(trace: &RunTrace<T>, tol: f64) -> Result<DiagnosticReport> {
    let lag = usize::from(trace.method.starts_with("geometric_descent"));
    let mut pairs = Vec::new();
    for k in 0..trace.records.len().saturating_sub(1) {
        let pivot = trace.records[k + lag].pivot.as_ref().ok_or_else(|| {
            Error::Unsupported("collinear structure needs mu > 0 (trace has no pivot x^{++})".into())
        })?;
        let (z0, z1) = (z_of(trace, k)?, z_of(trace, k + 1)?);
        let w = pivot - z0;
        let v = z1 - z0;
        let eps = floor(&trace.records[k].x);
        let res = if w.norm() <= eps || v.norm() <= eps { T::zero() } else { reject(&w, &v).norm() / w.norm() };
        pairs.push((k, res.to_f64_lossy()));
    }
    Ok(DiagnosticReport::from_residuals(format!("collinear:{}", trace.method), pairs, tol))
}

/// Distance of a point set from its best 2-D affine fit through `origin`,
/// relative to the set's spread: greedy Gram-Schmidt picks the two longest
/// directions, the residual is the largest remaining component.
fn plane_residual<T: Real>(origin: &Vector<T>, pts: &[&Vector<T>]) -> T {
    let mut vs: Vec<Vector<T>> = pts.iter().map(|p| *p - origin).collect();
    let spread = vs.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let eps = floor(origin);
    if spread <= eps {
        return T::zero();
    }
    for _ in 0..2 {
        let (i, n) = vs.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, T::zero()), |a, b| if b.1 > a.1 { b } else { a });
        if n <= eps {
            return T::zero();
        }
        let e = vs.swap_remove(i).scale(T::one() / n);
        for v in vs.iter_mut() {
            // two passes keep the projection accurate
            for _ in 0..2 {
                let c = v.dot(&e);
                *v = v.axpy(-c, &e);
            }
        }
    }
    vs.iter().map(|v| v.norm()).fold(T::zero(), T::max) / spread
}

/// `{x_{k−1}⁺, x_k, x_k⁺, x_{k+1}, z_k, z_{k+1}}` lie near a 2-D plane.
pub fn check_coplanar<T: Real>(trace: &RunTrace<T>, tol: f64) -> Result<DiagnosticReport> {
    let recs = &trace.records;
    let mut pairs = Vec::new();
    for k in 0..recs.len().saturating_sub(1) {
        let prev = if k == 0 { &recs[0].x } else { &recs[k - 1].advanced };
        let pts = [prev, &recs[k].advanced, &recs[k + 1].x, z_of(trace, k)?, z_of(trace, k + 1)?];
        pairs.push((k, plane_residual(&recs[k].x, &pts).to_f64_lossy()));
    }
    Ok(DiagnosticReport::from_residuals(format!("coplanar:{}", trace.method), pairs, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_residual_detects_third_direction() {
        let o = Vector::<f64>::from_f64(&[0.0, 0.0, 0.0]);
        let a = Vector::<f64>::from_f64(&[1.0, 0.0, 0.0]);
        let b = Vector::from_f64(&[0.0, 2.0, 0.0]);
        let c = Vector::from_f64(&[3.0, -1.0, 0.0]);
        assert!(plane_residual(&o, &[&a, &b, &c]) < 1e-15);
        let d = Vector::from_f64(&[0.0, 0.0, 0.5]);
        assert!((plane_residual(&o, &[&a, &b, &c, &d]) - 0.5 / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reject_is_orthogonal() {
        let u = Vector::<f64>::from_f64(&[1.0, 1.0]);
        let v = Vector::from_f64(&[2.0, 0.0]);
        let r = reject(&v, &u);
        assert!(r.dot(&u).abs() < 1e-15);
    }
}
