//! Composite problems `F = f + g` and the elementary steps.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functions::Zero;
use crate::linalg::Vector;
use crate::oracle::{ProxOracle, SmoothOracle};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setup {
    /// `g ≡ 0`
    SmoothConvex,
    /// `f ≡ 0`
    ProximalPoint,
    ProxGrad,
}

/// Known optimal value and, optionally, a minimizer.
#[derive(Clone, Debug)]
pub struct Optimum<T> {
    pub value: T,
    pub point: Option<Vector<T>>,
}

#[derive(Clone, Debug)]
pub struct CompositeProblem<T: Real> {
    f: Arc<dyn SmoothOracle<T>>,
    g: Arc<dyn ProxOracle<T>>,
    l: T,
    optimum: Option<Optimum<T>>,
}

impl<T: Real> CompositeProblem<T> {
    pub fn new(f: Arc<dyn SmoothOracle<T>>, g: Arc<dyn ProxOracle<T>>) -> Self {
        let l = f.smoothness();
        Self { f, g, l, optimum: None }
    }

    pub fn smooth(f: Arc<dyn SmoothOracle<T>>) -> Self {
        Self::new(f, Arc::new(Zero))
    }

    pub fn proximal_point(g: Arc<dyn ProxOracle<T>>) -> Self {
        Self::new(Arc::new(Zero), g)
    }

    /// Overrides the smoothness constant used by prox-grad steps.
    pub fn with_smoothness(mut self, l: T) -> Self {
        self.l = l;
        self
    }

    pub fn with_optimum(mut self, value: T, point: Option<Vector<T>>) -> Self {
        self.optimum = Some(Optimum { value, point });
        self
    }

    pub fn f(&self) -> &dyn SmoothOracle<T> {
        self.f.as_ref()
    }

    pub fn g(&self) -> &dyn ProxOracle<T> {
        self.g.as_ref()
    }

    pub fn smoothness(&self) -> T {
        self.l
    }

    pub fn optimum(&self) -> Option<&Optimum<T>> {
        self.optimum.as_ref()
    }

    pub fn setup(&self) -> Setup {
        match (self.f.is_zero(), self.g.is_zero()) {
            (_, true) => Setup::SmoothConvex,
            (true, false) => Setup::ProximalPoint,
            (false, false) => Setup::ProxGrad,
        }
    }

    pub fn value(&self, x: &Vector<T>) -> T {
        self.f.value(x) + self.g.value(x)
    }

    /// Scale used by the tolerance policy: `max(1, |F(x)|, ‖x‖²)`.
    pub fn tolerance_scale(&self, x: &Vector<T>) -> T {
        let fx = self.value(x).abs();
        let fx = if fx.is_finite() { fx } else { T::one() };
        T::one().max(fx).max(x.norm_sq())
    }
}

/// `x − step·∇f(x)`.
pub fn grad_step<T: Real>(f: &dyn SmoothOracle<T>, x: &Vector<T>, step: T) -> Result<Vector<T>> {
    if !(step > T::zero()) {
        return Err(Error::InvalidParameter { name: "step", value: step.to_f64_lossy(), reason: "must be positive" });
    }
    let grad = f.gradient(x);
    if !grad.is_finite() {
        return Err(Error::OracleFailure("non-finite gradient".into()));
    }
    Ok(x.axpy(-step, &grad))
}

/// `(Prox_{λg}(x), (x − Prox_{λg}(x))/λ)`.
pub fn prox_point_step<T: Real>(g: &dyn ProxOracle<T>, lambda: T, x: &Vector<T>) -> Result<(Vector<T>, Vector<T>)> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda.to_f64_lossy(), reason: "must be positive" });
    }
    let xc = g.prox(lambda, x)?;
    if !xc.is_finite() {
        return Err(Error::OracleFailure("non-finite prox output".into()));
    }
    let gmap = (x - &xc).scale(T::one() / lambda);
    Ok((xc, gmap))
}

/// `(x⊕, L(x − x⊕))` with `x⊕ = Prox_{g/L}(x − ∇f(x)/L)`.
pub fn prox_grad_step<T: Real>(p: &CompositeProblem<T>, x: &Vector<T>) -> Result<(Vector<T>, Vector<T>)> {
    let l = p.smoothness();
    if !(l > T::zero()) {
        return Err(Error::InvalidParameter { name: "L", value: l.to_f64_lossy(), reason: "must be positive" });
    }
    let inv_l = T::one() / l;
    let forward = grad_step(p.f(), x, inv_l)?;
    let xo = p.g().prox(inv_l, &forward)?;
    if !xo.is_finite() {
        return Err(Error::OracleFailure("non-finite prox output".into()));
    }
    let gmap = (x - &xo).scale(l);
    Ok((xo, gmap))
}

/// `v = ∇̃_L F(x) − ∇f(x) + ∇f(x⊕) ∈ ∂F(x⊕)`.
pub fn composite_subgradient_witness<T: Real>(p: &CompositeProblem<T>, x: &Vector<T>) -> Result<Vector<T>> {
    let (xo, gmap) = prox_grad_step(p, x)?;
    Ok(witness_from_step(p, x, &xo, &gmap))
}

pub(crate) fn witness_from_step<T: Real>(
    p: &CompositeProblem<T>,
    x: &Vector<T>,
    x_adv: &Vector<T>,
    gmap: &Vector<T>,
) -> Vector<T> {
    if p.f().is_zero() {
        return gmap.clone();
    }
    &(gmap - &p.f().gradient(x)) + &p.f().gradient(x_adv)
}
