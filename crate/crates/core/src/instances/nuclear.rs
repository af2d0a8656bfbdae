use crate::error::{Error, Result};
use crate::functions::soft_threshold;
use crate::linalg::{Matrix, Vector};
use crate::oracle::ProxOracle;
use crate::scalar::Real;

/// `weight · ‖S‖_nuc` for the symmetric matrix `S` encoded by a half-vector
/// (upper triangle, row-major).
///
/// In the scaled encoding off-diagonal entries carry a factor √2, so the
/// Euclidean geometry of half-vectors is the Frobenius geometry of matrices
/// and the prox is an eigenvalue soft-threshold. The unscaled encoding
/// stores entries as-is; its prox is solved iteratively.
#[derive(Clone, Debug)]
pub struct NuclearNormSym<T> {
    n: usize,
    weight: T,
    scaled: bool,
}

pub fn half_vec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl<T: Real> NuclearNormSym<T> {
    pub fn new(n: usize, weight: T, scaled: bool) -> Self {
        Self { n, weight, scaled }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    fn off_diag_factor(&self) -> T {
        if self.scaled {
            T::lit(std::f64::consts::SQRT_2)
        } else {
            T::one()
        }
    }

    pub fn to_matrix(&self, x: &Vector<T>) -> Result<Matrix<T>> {
        let n = self.n;
        if x.len() != half_vec_len(n) {
            return Err(Error::Format(format!("half-vector length {} != {}", x.len(), half_vec_len(n))));
        }
        let s = self.off_diag_factor();
        let mut m = Matrix::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                let v = if i == j { x[idx] } else { x[idx] / s };
                m[(i, j)] = v;
                m[(j, i)] = v;
                idx += 1;
            }
        }
        Ok(m)
    }

    pub fn from_matrix(&self, m: &Matrix<T>) -> Vector<T> {
        let n = self.n;
        let s = self.off_diag_factor();
        let mut out = Vec::with_capacity(half_vec_len(n));
        for i in 0..n {
            for j in i..n {
                let v = (m[(i, j)] + m[(j, i)]) / T::lit(2.0);
                out.push(if i == j { v } else { v * s });
            }
        }
        Vector::from_vec(out)
    }

    /// Soft-thresholds the eigenvalues of a symmetric matrix.
    fn shrink(m: &Matrix<T>, t: T) -> Result<Matrix<T>> {
        let (vals, vecs) = m.symmetric_eigen()?;
        let shrunk: Vec<T> = vals.iter().map(|&v| soft_threshold(v, t)).collect();
        Ok(vecs.matmul(&Matrix::diagonal(&shrunk)).matmul(&vecs.transpose()))
    }

    fn prox_scaled(&self, c: T, x: &Vector<T>) -> Result<Vector<T>> {
        let scaled = Self::new(self.n, self.weight, true);
        let m = scaled.to_matrix(x)?;
        Ok(scaled.from_matrix(&Self::shrink(&m, c * self.weight)?))
    }

    /// Unscaled prox: in scaled coordinates s = Dx the problem is
    /// `c·h(s) + ½(s−w)ᵀD⁻²(s−w)` with w = Dv, whose smooth part has
    /// spectrum {½, 1}. Solved by accelerated prox-grad with step 1.
    fn prox_unscaled(&self, c: T, v: &Vector<T>) -> Result<Vector<T>> {
        let n = self.n;
        let root2 = T::lit(std::f64::consts::SQRT_2);
        let mut dinv2 = Vec::with_capacity(half_vec_len(n));
        for i in 0..n {
            for j in i..n {
                dinv2.push(if i == j { T::one() } else { T::lit(0.5) });
            }
        }
        let scale = |x: &Vector<T>, up: bool| -> Vector<T> {
            let mut idx = 0;
            let mut out = x.clone();
            for i in 0..n {
                for j in i..n {
                    if i != j {
                        out[idx] = if up { x[idx] * root2 } else { x[idx] / root2 };
                    }
                    idx += 1;
                }
            }
            out
        };
        let w = scale(v, true);
        let momentum = (root2 - T::one()) / (root2 + T::one());
        let mut s = w.clone();
        let mut y = w.clone();
        for _ in 0..500 {
            let grad = Vector::from_vec(
                y.iter().zip(w.iter()).zip(&dinv2).map(|((&yi, &wi), &d)| d * (yi - wi)).collect(),
            );
            let next = self.prox_scaled(c, &(&y - &grad))?;
            let change = next.dist_sq(&s).sqrt();
            let s_prev = std::mem::replace(&mut s, next);
            y = s.axpy(momentum, &(&s - &s_prev));
            if change <= T::epsilon() * T::one().max(s.norm()) {
                break;
            }
        }
        Ok(scale(&s, false))
    }
}

impl<T: Real> ProxOracle<T> for NuclearNormSym<T> {
    fn value(&self, x: &Vector<T>) -> T {
        match self.to_matrix(x).and_then(|m| m.symmetric_eigen()) {
            Ok((vals, _)) => self.weight * vals.iter().map(|v| v.abs()).sum::<T>(),
            Err(_) => T::nan(),
        }
    }

    fn prox(&self, c: T, x: &Vector<T>) -> Result<Vector<T>> {
        if self.scaled {
            self.prox_scaled(c, x)
        } else {
            self.prox_unscaled(c, x)
        }
    }

    fn is_zero(&self) -> bool {
        self.weight == T::zero()
    }

    fn norm_bound(&self, level: T) -> Option<T> {
        // ‖x‖ ≤ ‖S‖_F ≤ ‖S‖_nuc in both encodings
        (self.weight > T::zero()).then(|| level.max(T::zero()) / self.weight)
    }
}
