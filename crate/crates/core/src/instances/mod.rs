//! Seeded problem generators: the two compressed-sensing instances and
//! synthetic quadratics with known optima.

mod fstar;
mod io;
mod nuclear;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{L1Norm, LeastSquares, Quadratic, QuadraticL1};
use crate::linalg::{Matrix, Vector};
use crate::problem::CompositeProblem;
use crate::scalar::Real;

pub use fstar::{estimate_fstar, FstarEstimate};
pub use io::{InstanceFile, INSTANCE_FORMAT};
pub use nuclear::{half_vec_len, NuclearNormSym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Lasso,
    NuclearSym,
    QuadraticSmooth,
    StronglyConvexQuadratic,
    ProxOnlyQuadraticL1,
}

/// Unset fields take the per-kind defaults, see [`InstanceConfig::resolved`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub kind: InstanceKind,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Sparsity of `x_true`.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Strong convexity (quadratic kinds).
    #[serde(default)]
    pub mu: Option<f64>,
    /// Condition number (quadratic kinds).
    #[serde(default)]
    pub kappa: Option<f64>,
    /// Target σ_max² for the compressed-sensing kinds.
    #[serde(default)]
    pub l_target: Option<f64>,
    #[serde(default)]
    pub noise: Option<f64>,
    /// Use `l_target` as L instead of the recomputed 2σ_max(A)².
    #[serde(default)]
    pub fixed_l: bool,
    /// Nuclear kind: store off-diagonal entries without the √2 factor.
    #[serde(default)]
    pub unscaled: bool,
}

impl InstanceConfig {
    pub fn new(kind: InstanceKind, seed: u64) -> Self {
        Self {
            kind,
            m: None,
            n: None,
            k: None,
            lambda: None,
            seed,
            mu: None,
            kappa: None,
            l_target: None,
            noise: None,
            fixed_l: false,
            unscaled: false,
        }
    }

    pub fn lasso(seed: u64) -> Self {
        Self::new(InstanceKind::Lasso, seed)
    }

    pub fn nuclear(seed: u64) -> Self {
        Self::new(InstanceKind::NuclearSym, seed)
    }

    /// Fills every unset field with the kind's default.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let (m, n, k, lambda, l_target) = match self.kind {
            InstanceKind::Lasso => (60, 100, 20, 0.1, 324.0),
            InstanceKind::NuclearSym => (60, 20, 20, 0.1, 400.0),
            _ => (0, 20, 0, 0.1, 1.0),
        };
        c.m.get_or_insert(m);
        c.n.get_or_insert(n);
        c.k.get_or_insert(k);
        c.lambda.get_or_insert(lambda);
        c.l_target.get_or_insert(l_target);
        c.noise.get_or_insert(0.01);
        match self.kind {
            InstanceKind::StronglyConvexQuadratic => {
                c.mu.get_or_insert(1.0);
                c.kappa.get_or_insert(10.0);
            }
            InstanceKind::QuadraticSmooth => {
                c.mu.get_or_insert(0.0);
            }
            InstanceKind::ProxOnlyQuadraticL1 => {
                c.mu.get_or_insert(1.0);
            }
            _ => {}
        }
        c
    }
}

/// A generated instance with its data, when the kind has any.
#[derive(Clone, Debug)]
pub struct Instance<T: Real> {
    pub config: InstanceConfig,
    pub problem: CompositeProblem<T>,
    pub a: Option<Matrix<T>>,
    pub b: Option<Vector<T>>,
    pub x_true: Option<Vector<T>>,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn_vec<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vector<T> {
    Vector::from_vec((0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect())
}

pub fn randn_mat<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<T> {
    let data = (0..rows * cols).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect();
    Matrix::from_row_major(rows, cols, data).expect("shape matches")
}

pub fn random_orthogonal<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Result<Matrix<T>> {
    randn_mat::<T>(rng, n, n).qr_q()
}

/// `(A, b, x_true, L)`.
type SensingData<T> = (Matrix<T>, Vector<T>, Vector<T>, T);

fn compressed_sensing_data<T: Real>(cfg: &InstanceConfig, n: usize) -> Result<SensingData<T>> {
    let m = cfg.m.expect("resolved");
    let k = cfg.k.expect("resolved");
    let l_target = cfg.l_target.expect("resolved");
    if k > n {
        return Err(Error::InvalidParameter { name: "k", value: k as f64, reason: "sparsity exceeds dimension" });
    }
    if m > n || m < 3 {
        return Err(Error::InvalidParameter { name: "m", value: m as f64, reason: "need 3 <= m <= n" });
    }
    let mut rng = rng_for(cfg.seed);
    let mut x_true = vec![T::zero(); n];
    for v in x_true.iter_mut().take(k) {
        *v = T::lit(rng.sample::<f64, _>(StandardNormal));
    }
    x_true.shuffle(&mut rng);
    let x_true = Vector::from_vec(x_true);
    let u = random_orthogonal::<T>(&mut rng, m)?;
    let v = random_orthogonal::<T>(&mut rng, n)?;
    let mut sigma: Vec<T> = (0..m).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)).abs()).collect();
    let top = T::lit(l_target.sqrt());
    for s in sigma.iter_mut().skip(m - 3) {
        *s = top;
    }
    // A = U Σ Vᵀ with Σ m×n diagonal
    let a = Matrix::from_fn(m, n, |i, j| (0..m).map(|r| u[(i, r)] * sigma[r] * v[(j, r)]).sum());
    let noise = T::lit(cfg.noise.expect("resolved"));
    let b = a.matvec(&x_true).axpy(noise, &randn_vec(&mut rng, m));
    Ok((a, b, x_true, T::lit(l_target)))
}

/// `‖Ax − b‖² + λ‖x‖₁` with the seeded synthetic data.
pub fn gen_lasso<T: Real>(cfg: &InstanceConfig) -> Result<Instance<T>> {
    let cfg = cfg.resolved();
    let n = cfg.n.expect("resolved");
    let (a, b, x_true, l_target) = compressed_sensing_data::<T>(&cfg, n)?;
    let lambda = T::lit(cfg.lambda.expect("resolved"));
    let problem = lasso_problem(&a, &b, lambda, cfg.fixed_l.then_some(l_target))?;
    Ok(Instance { config: cfg, problem, a: Some(a), b: Some(b), x_true: Some(x_true) })
}

pub(crate) fn lasso_problem<T: Real>(
    a: &Matrix<T>,
    b: &Vector<T>,
    lambda: T,
    l_override: Option<T>,
) -> Result<CompositeProblem<T>> {
    let f = LeastSquares::new(a.clone(), b.clone())?;
    let p = CompositeProblem::new(Arc::new(f), Arc::new(L1Norm { weight: lambda }));
    Ok(match l_override {
        Some(l) => p.with_smoothness(l),
        None => p,
    })
}

/// `‖Ax − b‖² + λ‖S(x)‖_nuc` over half-vectors of symmetric n×n matrices.
pub fn gen_nuclear_sym<T: Real>(cfg: &InstanceConfig) -> Result<Instance<T>> {
    let cfg = cfg.resolved();
    let order = cfg.n.expect("resolved");
    let (a, b, x_true, l_target) = compressed_sensing_data::<T>(&cfg, half_vec_len(order))?;
    let lambda = T::lit(cfg.lambda.expect("resolved"));
    let problem = nuclear_problem(&a, &b, order, lambda, !cfg.unscaled, cfg.fixed_l.then_some(l_target))?;
    Ok(Instance { config: cfg, problem, a: Some(a), b: Some(b), x_true: Some(x_true) })
}

pub(crate) fn nuclear_problem<T: Real>(
    a: &Matrix<T>,
    b: &Vector<T>,
    order: usize,
    lambda: T,
    scaled: bool,
    l_override: Option<T>,
) -> Result<CompositeProblem<T>> {
    let f = LeastSquares::new(a.clone(), b.clone())?;
    let p = CompositeProblem::new(Arc::new(f), Arc::new(NuclearNormSym::new(order, lambda, scaled)));
    Ok(match l_override {
        Some(l) => p.with_smoothness(l),
        None => p,
    })
}

/// Spectrum with exact endpoints `lo` and `hi`, interior uniform.
pub fn spectrum<T: Real>(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<T> {
    (0..n)
        .map(|i| {
            let v = match i {
                0 => lo,
                1 => hi,
                _ => rng.gen_range(lo..=hi),
            };
            T::lit(v)
        })
        .collect()
}

/// `½(x−c)ᵀH(x−c)` with spectrum in `[lo, hi]` (both attained), random
/// basis and center; minimum value 0 at c.
pub fn random_quadratic<T: Real>(n: usize, lo: f64, hi: f64, seed: u64, centered: bool) -> Result<Quadratic<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", value: n as f64, reason: "need n >= 2" });
    }
    let mut rng = rng_for(seed);
    let eig = spectrum(&mut rng, n, lo, hi);
    let basis = random_orthogonal(&mut rng, n)?;
    let center = if centered { Vector::zeros(n) } else { randn_vec(&mut rng, n) };
    Quadratic::new(eig, basis, center, T::zero())
}

/// Smooth strongly convex quadratic with spectrum [1, κ] and x* = 0.
pub fn make_strongly_convex_quadratic<T: Real>(n: usize, kappa: f64, seed: u64) -> Result<CompositeProblem<T>> {
    if !(kappa >= 1.0) {
        return Err(Error::InvalidParameter { name: "kappa", value: kappa, reason: "must be >= 1" });
    }
    let q = random_quadratic::<T>(n, 1.0, kappa, seed, true)?;
    Ok(CompositeProblem::smooth(Arc::new(q)).with_optimum(T::zero(), Some(Vector::zeros(n))))
}

/// Proximal-point problem with `g` a quadratic of spectrum `[lo, hi]`.
pub fn make_proximal_quadratic<T: Real>(n: usize, lo: f64, hi: f64, seed: u64) -> Result<CompositeProblem<T>> {
    let q = random_quadratic::<T>(n, lo, hi, seed, false)?;
    let c = q.center().clone();
    Ok(CompositeProblem::proximal_point(Arc::new(q)).with_optimum(T::zero(), Some(c)))
}

/// Smooth convex quadratic with spectrum `[lo, hi]` and known minimizer.
pub fn make_smooth_quadratic<T: Real>(n: usize, lo: f64, hi: f64, seed: u64) -> Result<CompositeProblem<T>> {
    let q = random_quadratic::<T>(n, lo, hi, seed, false)?;
    let c = q.center().clone();
    Ok(CompositeProblem::smooth(Arc::new(q)).with_optimum(T::zero(), Some(c)))
}

/// `f = 0`, `g = (μ/2)‖x − c‖² + λ‖x‖₁` with closed-form minimizer.
pub fn make_prox_only_quadratic_l1<T: Real>(n: usize, mu: f64, lambda: f64, seed: u64) -> Result<CompositeProblem<T>> {
    let mut rng = rng_for(seed);
    let g = QuadraticL1 { mu: T::lit(mu), center: randn_vec(&mut rng, n), weight: T::lit(lambda) };
    let xs = g.minimizer();
    let gs = crate::oracle::ProxOracle::value(&g, &xs);
    Ok(CompositeProblem::proximal_point(Arc::new(g)).with_optimum(gs, Some(xs)))
}

/// Builds the instance described by `cfg`.
pub fn generate<T: Real>(cfg: &InstanceConfig) -> Result<Instance<T>> {
    let r = cfg.resolved();
    let n = r.n.expect("resolved");
    let bare = |problem| Instance { config: r.clone(), problem, a: None, b: None, x_true: None };
    match r.kind {
        InstanceKind::Lasso => gen_lasso(cfg),
        InstanceKind::NuclearSym => gen_nuclear_sym(cfg),
        InstanceKind::QuadraticSmooth => {
            let hi = r.l_target.expect("resolved");
            Ok(bare(make_smooth_quadratic(n, r.mu.expect("resolved"), hi, r.seed)?))
        }
        InstanceKind::StronglyConvexQuadratic => {
            let mu = r.mu.expect("resolved");
            let kappa = r.kappa.expect("resolved");
            let q = random_quadratic::<T>(n, mu, mu * kappa, r.seed, true)?;
            Ok(bare(CompositeProblem::smooth(Arc::new(q)).with_optimum(T::zero(), Some(Vector::zeros(n)))))
        }
        InstanceKind::ProxOnlyQuadraticL1 => Ok(bare(make_prox_only_quadratic_l1(
            n,
            r.mu.expect("resolved"),
            r.lambda.expect("resolved"),
            r.seed,
        )?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_is_deterministic() {
        let a = gen_lasso::<f64>(&InstanceConfig::lasso(7)).unwrap();
        let b = gen_lasso::<f64>(&InstanceConfig::lasso(7)).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
        let c = gen_lasso::<f64>(&InstanceConfig::lasso(8)).unwrap();
        assert_ne!(a.b, c.b);
    }

    #[test]
    fn lasso_sparsity_and_shapes() {
        let inst = gen_lasso::<f64>(&InstanceConfig::lasso(1)).unwrap();
        let x = inst.x_true.unwrap();
        assert_eq!(x.len(), 100);
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 20);
        assert_eq!(inst.a.unwrap().rows(), 60);
    }

    #[test]
    fn rejects_oversized_sparsity() {
        let mut cfg = InstanceConfig::lasso(1);
        cfg.k = Some(101);
        assert!(gen_lasso::<f64>(&cfg).is_err());
    }

    #[test]
    fn quadratic_endpoints_exact() {
        let q = random_quadratic::<f64>(6, 1.0, 100.0, 3, true).unwrap();
        let e = q.eigvals();
        assert!(e.contains(&1.0) && e.contains(&100.0));
    }
}
