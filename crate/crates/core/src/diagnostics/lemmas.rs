use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{randn_vec, rng_for};
use crate::linalg::Vector;
use crate::problem::{prox_grad_step, witness_from_step, CompositeProblem};
use crate::scalar::Real;

use super::DiagnosticReport;

/// The elementary inequalities behind every Lyapunov argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `‖∇f(x) − ∇f(y)‖ ≤ L‖x − y‖`
    Lipschitz,
    /// `f(y) ≤ f(x) + ⟨∇f(x), y−x⟩ + (L/2)‖x−y‖²`
    Descent,
    /// `f(x) − f(y) + ⟨∇f(x), y−x⟩ + ‖∇f(x)−∇f(y)‖²/2L ≤ 0`
    Cocoercivity,
    /// `f(x) + ⟨∇f(x), y−x⟩ + (μ_f/2)‖x−y‖² ≤ f(y)`
    SmoothStrongConvexity,
    /// `g(x⊕) + ⟨u, y−x⊕⟩ + (μ_g/2)‖x⊕−y‖² ≤ g(y)`, `u = ∇̃_L F(x) − ∇f(x) ∈ ∂g(x⊕)`
    ProxSubgradient,
    /// `‖v‖ ≤ 2‖∇̃_L F(x)‖` for the witness `v ∈ ∂F(x⊕)`
    WitnessBound,
    /// `‖∇̃_L F(x)‖²/2L ≤ F(x) − F(x⊕)`
    SufficientDecrease,
    /// `‖∇̃_L F(y)‖²/2L − ⟨y−x, ∇̃_L F(y)⟩ ≤ F(x) − F(y⊕)`
    ProxGradCocoercivity,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Self::Lipschitz,
        Self::Descent,
        Self::Cocoercivity,
        Self::SmoothStrongConvexity,
        Self::ProxSubgradient,
        Self::WitnessBound,
        Self::SufficientDecrease,
        Self::ProxGradCocoercivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lipschitz => "lipschitz",
            Self::Descent => "descent",
            Self::Cocoercivity => "cocoercivity",
            Self::SmoothStrongConvexity => "smooth_strong_convexity",
            Self::ProxSubgradient => "prox_subgradient",
            Self::WitnessBound => "witness_bound",
            Self::SufficientDecrease => "sufficient_decrease",
            Self::ProxGradCocoercivity => "prox_grad_cocoercivity",
        }
    }

    /// Involves `f` only, so it is skipped when `f ≡ 0`.
    fn smooth_only(self) -> bool {
        matches!(self, Self::Lipschitz | Self::Descent | Self::Cocoercivity | Self::SmoothStrongConvexity)
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `lhs ≤ rhs` as a residual relative to the size of the terms involved.
/// An infinite right-hand side is satisfied.
fn rel<T: Real>(lhs: T, rhs: T, terms: &[T]) -> f64 {
    if rhs == T::infinity() {
        return 0.0;
    }
    let size = terms.iter().fold(T::one(), |a, t| a + t.abs());
    ((lhs - rhs) / size).to_f64_lossy()
}

struct Point<T: Real> {
    x: Vector<T>,
    f: T,
    grad: Vector<T>,
    big_f: T,
    adv: Vector<T>,
    gmap: Vector<T>,
}

fn point<T: Real>(p: &CompositeProblem<T>, x: Vector<T>) -> Result<Point<T>> {
    let (adv, gmap) = prox_grad_step(p, &x)?;
    Ok(Point { f: p.f().value(&x), grad: p.f().gradient(&x), big_f: p.value(&x), adv, gmap, x })
}

fn residual<T: Real>(lemma: Lemma, p: &CompositeProblem<T>, a: &Point<T>, b: &Point<T>) -> f64 {
    let l = p.smoothness();
    let two = T::lit(2.0);
    let d = &b.x - &a.x;
    match lemma {
        Lemma::Lipschitz => {
            let lhs = a.grad.dist_sq(&b.grad).sqrt();
            let rhs = l * d.norm();
            rel(lhs, rhs, &[lhs, rhs])
        }
        Lemma::Descent => {
            let (ip, q) = (a.grad.dot(&d), l / two * d.norm_sq());
            rel(b.f, a.f + ip + q, &[b.f, a.f, ip, q])
        }
        Lemma::Cocoercivity => {
            let (ip, q) = (a.grad.dot(&d), a.grad.dist_sq(&b.grad) / (two * l));
            rel(a.f - b.f + ip + q, T::zero(), &[a.f, b.f, ip, q])
        }
        Lemma::SmoothStrongConvexity => {
            let mu = p.f().strong_convexity();
            let (ip, q) = (a.grad.dot(&d), mu / two * d.norm_sq());
            rel(a.f + ip + q, b.f, &[a.f, ip, q, b.f])
        }
        Lemma::ProxSubgradient => {
            let mu = p.g().strong_convexity();
            let u = &a.gmap - &a.grad;
            let g_adv = p.g().value(&a.adv);
            let g_y = p.g().value(&b.x);
            let e = &b.x - &a.adv;
            let (ip, q) = (u.dot(&e), mu / two * e.norm_sq());
            rel(g_adv + ip + q, g_y, &[g_adv, ip, q, g_y])
        }
        Lemma::WitnessBound => {
            let v = witness_from_step(p, &a.x, &a.adv, &a.gmap);
            let (lhs, rhs) = (v.norm(), two * a.gmap.norm());
            rel(lhs, rhs, &[lhs, rhs])
        }
        Lemma::SufficientDecrease => {
            let lhs = a.gmap.norm_sq() / (two * l);
            let f_adv = p.value(&a.adv);
            rel(lhs, a.big_f - f_adv, &[lhs, a.big_f, f_adv])
        }
        Lemma::ProxGradCocoercivity => {
            // b plays y, a plays x
            let q = b.gmap.norm_sq() / (two * l);
            let ip = (&b.x - &a.x).dot(&b.gmap);
            let f_adv = p.value(&b.adv);
            rel(q - ip, a.big_f - f_adv, &[q, ip, a.big_f, f_adv])
        }
    }
}

/// Tests every applicable lemma on `samples` random pairs around `center`.
///
/// Points are `center + σ·N(0, I)` with σ log-uniform over
/// `[1e-3, 10]·max(1, ‖center‖)`. Residuals are `(lhs − rhs)/(1 + Σ|terms|)`.
/// Returns one report per lemma; lemmas about `f` are skipped when `f ≡ 0`.
pub fn check_inequality_lemmas<T: Real>(
    p: &CompositeProblem<T>,
    center: &Vector<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<DiagnosticReport>> {
    let l = p.smoothness();
    if !(l > T::zero()) || !l.is_finite() {
        return Err(Error::InvalidParameter { name: "L", value: l.to_f64_lossy(), reason: "must be positive and finite" });
    }
    let lemmas: Vec<Lemma> = Lemma::ALL.into_iter().filter(|m| !(m.smooth_only() && p.f().is_zero())).collect();
    let mut rng = rng_for(seed);
    let base = T::one().max(center.norm()).to_f64_lossy();
    let n = center.len();
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> Vector<T> {
        let sigma = base * 10f64.powf(rng.gen_range(-3.0..1.0));
        center.axpy(T::lit(sigma), &randn_vec::<T>(rng, n))
    };
    let mut pairs: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(samples); lemmas.len()];
    for i in 0..samples {
        let a = point(p, sample(&mut rng))?;
        let b = point(p, sample(&mut rng))?;
        for (j, &lemma) in lemmas.iter().enumerate() {
            pairs[j].push((i, residual(lemma, p, &a, &b)));
        }
    }
    Ok(lemmas
        .into_iter()
        .zip(pairs)
        .map(|(lemma, pr)| {
            DiagnosticReport::from_residuals(format!("lemma:{lemma}"), pr, tol).with_detail("samples", samples as f64)
        })
        .collect())
}
