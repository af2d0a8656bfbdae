use std::fmt::Debug;

use crate::error::Result;
use crate::linalg::Vector;
use crate::scalar::Real;

/// First-order access to an L-smooth convex function.
pub trait SmoothOracle<T: Real>: Debug + Send + Sync {
    fn value(&self, x: &Vector<T>) -> T;

    fn gradient(&self, x: &Vector<T>) -> Vector<T>;

    /// Lipschitz constant of the gradient.
    fn smoothness(&self) -> T;

    fn strong_convexity(&self) -> T {
        T::zero()
    }

    /// True only for the identically zero function.
    fn is_zero(&self) -> bool {
        false
    }

    /// True when the function is quadratic, so exact line searches along
    /// a segment can be done from two gradient evaluations.
    fn is_quadratic(&self) -> bool {
        false
    }

    /// A known global lower bound, if any.
    fn lower_bound(&self) -> Option<T> {
        None
    }
}

/// Value and proximal access to a closed convex proper function.
pub trait ProxOracle<T: Real>: Debug + Send + Sync {
    /// May return `+inf` outside the domain.
    fn value(&self, x: &Vector<T>) -> T;

    /// `Prox_{c g}(x)`.
    fn prox(&self, c: T, x: &Vector<T>) -> Result<Vector<T>>;

    fn strong_convexity(&self) -> T {
        T::zero()
    }

    fn is_zero(&self) -> bool {
        false
    }

    /// Upper bound on `‖x‖` over the sublevel set `{g(x) <= level}`.
    fn norm_bound(&self, _level: T) -> Option<T> {
        None
    }
}
