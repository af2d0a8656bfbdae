//! Concrete oracles: zero, quadratics, least squares, ℓ1 and friends.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::oracle::{ProxOracle, SmoothOracle};
use crate::scalar::Real;

/// The zero function, usable as either half of a composite problem.
#[derive(Clone, Copy, Debug, Default)]
pub struct Zero;

impl<T: Real> SmoothOracle<T> for Zero {
    fn value(&self, _x: &Vector<T>) -> T {
        T::zero()
    }
    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        Vector::zeros(x.len())
    }
    fn smoothness(&self) -> T {
        T::zero()
    }
    fn is_zero(&self) -> bool {
        true
    }
    fn is_quadratic(&self) -> bool {
        true
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
}

impl<T: Real> ProxOracle<T> for Zero {
    fn value(&self, _x: &Vector<T>) -> T {
        T::zero()
    }
    fn prox(&self, _c: T, x: &Vector<T>) -> Result<Vector<T>> {
        Ok(x.clone())
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `½ (x−c)ᵀ H (x−c) + offset` with `H = Q diag(λ) Qᵀ`, λ ≥ 0.
#[derive(Clone, Debug)]
pub struct Quadratic<T> {
    eigvals: Vec<T>,
    basis: Matrix<T>,
    hessian: Matrix<T>,
    center: Vector<T>,
    offset: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(eigvals: Vec<T>, basis: Matrix<T>, center: Vector<T>, offset: T) -> Result<Self> {
        let n = eigvals.len();
        if basis.rows() != n || basis.cols() != n || center.len() != n {
            return Err(Error::Format("quadratic: inconsistent dimensions".into()));
        }
        if eigvals.iter().any(|&l| !(l >= T::zero()) || !l.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eigenvalue",
                value: f64::NAN,
                reason: "must be finite and nonnegative",
            });
        }
        let hessian = basis.matmul(&Matrix::diagonal(&eigvals)).matmul(&basis.transpose());
        // symmetrize away rounding
        let hessian = Matrix::from_fn(n, n, |i, j| (hessian[(i, j)] + hessian[(j, i)]) / T::lit(2.0));
        Ok(Self { eigvals, basis, hessian, center, offset })
    }

    /// `(μ/2)‖x − c‖² + offset`.
    pub fn isotropic(mu: T, center: Vector<T>, offset: T) -> Self {
        let n = center.len();
        Self::new(vec![mu; n], Matrix::identity(n), center, offset).expect("valid isotropic quadratic")
    }

    pub fn center(&self) -> &Vector<T> {
        &self.center
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn eigvals(&self) -> &[T] {
        &self.eigvals
    }

    pub fn hessian(&self) -> &Matrix<T> {
        &self.hessian
    }

    fn max_eig(&self) -> T {
        self.eigvals.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    fn min_eig(&self) -> T {
        self.eigvals.iter().fold(T::infinity(), |m, &v| m.min(v))
    }
}

impl<T: Real> SmoothOracle<T> for Quadratic<T> {
    fn value(&self, x: &Vector<T>) -> T {
        let d = x - &self.center;
        T::lit(0.5) * d.dot(&self.hessian.matvec(&d)) + self.offset
    }
    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        self.hessian.matvec(&(x - &self.center))
    }
    fn smoothness(&self) -> T {
        self.max_eig()
    }
    fn strong_convexity(&self) -> T {
        self.min_eig()
    }
    fn is_quadratic(&self) -> bool {
        true
    }
    fn lower_bound(&self) -> Option<T> {
        Some(self.offset)
    }
}

impl<T: Real> ProxOracle<T> for Quadratic<T> {
    fn value(&self, x: &Vector<T>) -> T {
        SmoothOracle::value(self, x)
    }
    fn prox(&self, c: T, x: &Vector<T>) -> Result<Vector<T>> {
        // y = center + Q (I + cΛ)^{-1} Qᵀ (x − center)
        let w = self.basis.matvec_t(&(x - &self.center));
        let w = Vector::from_vec(
            w.iter().zip(&self.eigvals).map(|(&wi, &l)| wi / (T::one() + c * l)).collect(),
        );
        Ok(&self.center + &self.basis.matvec(&w))
    }
    fn strong_convexity(&self) -> T {
        self.min_eig()
    }
    fn norm_bound(&self, level: T) -> Option<T> {
        let mu = self.min_eig();
        if mu > T::zero() {
            let excess = (level - self.offset).max(T::zero());
            Some(self.center.norm() + (T::lit(2.0) * excess / mu).sqrt())
        } else {
            None
        }
    }
}

/// `‖A x − b‖²` (no ½ factor), with `L = 2 σ_max(A)²`.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    a: Matrix<T>,
    b: Vector<T>,
    l: T,
}

impl<T: Real> LeastSquares<T> {
    pub fn new(a: Matrix<T>, b: Vector<T>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Format("least squares: A rows != len(b)".into()));
        }
        let l = T::lit(2.0) * sigma_max_sq(&a)?;
        Ok(Self { a, b, l })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn rhs(&self) -> &Vector<T> {
        &self.b
    }

    pub fn residual(&self, x: &Vector<T>) -> Vector<T> {
        &self.a.matvec(x) - &self.b
    }
}

/// Largest eigenvalue of `AAᵀ` or `AᵀA`, whichever is smaller.
pub fn sigma_max_sq<T: Real>(a: &Matrix<T>) -> Result<T> {
    let gram = if a.rows() <= a.cols() {
        a.matmul(&a.transpose())
    } else {
        a.transpose().matmul(a)
    };
    let (vals, _) = gram.symmetric_eigen()?;
    Ok(vals.last().copied().unwrap_or(T::zero()).max(T::zero()))
}

impl<T: Real> SmoothOracle<T> for LeastSquares<T> {
    fn value(&self, x: &Vector<T>) -> T {
        self.residual(x).norm_sq()
    }
    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        self.a.matvec_t(&self.residual(x)).scale(T::lit(2.0))
    }
    fn smoothness(&self) -> T {
        self.l
    }
    fn is_quadratic(&self) -> bool {
        true
    }
    fn lower_bound(&self) -> Option<T> {
        Some(T::zero())
    }
}

pub fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

/// `weight · ‖x‖₁`.
#[derive(Clone, Copy, Debug)]
pub struct L1Norm<T> {
    pub weight: T,
}

impl<T: Real> ProxOracle<T> for L1Norm<T> {
    fn value(&self, x: &Vector<T>) -> T {
        self.weight * x.l1_norm()
    }
    fn prox(&self, c: T, x: &Vector<T>) -> Result<Vector<T>> {
        let t = c * self.weight;
        Ok(x.map(|v| soft_threshold(v, t)))
    }
    fn is_zero(&self) -> bool {
        self.weight == T::zero()
    }
    fn norm_bound(&self, level: T) -> Option<T> {
        (self.weight > T::zero()).then(|| level.max(T::zero()) / self.weight)
    }
}

/// `(μ/2)‖x − c‖² + weight·‖x‖₁`; minimizer `soft(c, weight/μ)`.
#[derive(Clone, Debug)]
pub struct QuadraticL1<T> {
    pub mu: T,
    pub center: Vector<T>,
    pub weight: T,
}

impl<T: Real> QuadraticL1<T> {
    pub fn minimizer(&self) -> Vector<T> {
        let t = self.weight / self.mu;
        self.center.map(|v| soft_threshold(v, t))
    }
}

impl<T: Real> ProxOracle<T> for QuadraticL1<T> {
    fn value(&self, x: &Vector<T>) -> T {
        T::lit(0.5) * self.mu * x.dist_sq(&self.center) + self.weight * x.l1_norm()
    }
    fn prox(&self, c: T, x: &Vector<T>) -> Result<Vector<T>> {
        let denom = T::one() + c * self.mu;
        let t = c * self.weight / denom;
        let w = x.lin_comb(T::one() / denom, &self.center, c * self.mu / denom);
        Ok(w.map(|v| soft_threshold(v, t)))
    }
    fn strong_convexity(&self) -> T {
        self.mu
    }
    fn norm_bound(&self, level: T) -> Option<T> {
        (self.weight > T::zero()).then(|| level.max(T::zero()) / self.weight)
    }
}

/// Indicator of the box `[lo, hi]ⁿ`; `+inf` outside.
#[derive(Clone, Copy, Debug)]
pub struct BoxIndicator<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ProxOracle<T> for BoxIndicator<T> {
    fn value(&self, x: &Vector<T>) -> T {
        if x.iter().all(|&v| v >= self.lo && v <= self.hi) {
            T::zero()
        } else {
            T::infinity()
        }
    }
    fn prox(&self, _c: T, x: &Vector<T>) -> Result<Vector<T>> {
        Ok(x.map(|v| v.max(self.lo).min(self.hi)))
    }
    fn norm_bound(&self, level: T) -> Option<T> {
        level.is_finite().then(|| self.lo.abs().max(self.hi.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_prox_is_soft_threshold() {
        let g = L1Norm { weight: 1.0f64 };
        let y = g.prox(0.1, &Vector::from_f64(&[0.5, -0.05, -2.0])).unwrap();
        assert!((y[0] - 0.4).abs() < 1e-15);
        assert_eq!(y[1], 0.0);
        assert!((y[2] + 1.9).abs() < 1e-15);
    }

    #[test]
    fn quadratic_prox_closed_form() {
        // prox(x) = (x + λμc)/(1 + λμ)
        let g = Quadratic::isotropic(1.0f64, Vector::from_f64(&[2.0]), 0.0);
        let y = ProxOracle::prox(&g, 1.0, &Vector::from_f64(&[0.0])).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_l1_prox_matches_subgradient_condition() {
        let g = QuadraticL1 { mu: 2.0f64, center: Vector::from_f64(&[1.0, -0.1, 0.3]), weight: 0.5 };
        let x = Vector::from_f64(&[0.7, 0.2, -1.0]);
        let c = 0.3;
        let y = g.prox(c, &x).unwrap();
        // (x − y)/c − μ(y − center) ∈ weight·∂‖y‖₁
        for i in 0..3 {
            let u = (x[i] - y[i]) / c - 2.0 * (y[i] - g.center[i]);
            if y[i] != 0.0 {
                assert!((u - 0.5 * y[i].signum()).abs() < 1e-12);
            } else {
                assert!(u.abs() <= 0.5 + 1e-12);
            }
        }
        assert!(g.prox(1.0, &g.minimizer()).unwrap().dist_sq(&g.minimizer()) < 1e-28);
    }

    #[test]
    fn least_squares_smoothness() {
        let a = Matrix::<f64>::diagonal(&[3.0, 1.0]);
        let f = LeastSquares::new(a, Vector::from_f64(&[1.0, 1.0])).unwrap();
        assert!((f.smoothness() - 18.0).abs() < 1e-12);
        let g = f.gradient(&Vector::from_f64(&[0.0, 0.0]));
        assert_eq!(g.as_slice(), &[-6.0, -2.0]);
    }

    #[test]
    fn box_indicator_is_extended_valued() {
        let g = BoxIndicator { lo: -1.0f64, hi: 1.0 };
        assert_eq!(g.value(&Vector::from_f64(&[2.0])), f64::INFINITY);
        assert_eq!(g.prox(1.0, &Vector::from_f64(&[2.0])).unwrap()[0], 1.0);
    }
}
