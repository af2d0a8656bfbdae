use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::theta::{ThetaSchedule, ThetaVariant};
use super::ScheduleTable;

/// Right-hand factor of the slack condition
/// `(τ_kφ_k − τ_{k+1}φ_{k+1})(τ_{k+1} − τ_k) ≤ c·τ_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackFactor {
    Half,
    One,
}

impl SlackFactor {
    pub fn value<T: Real>(self) -> T {
        match self {
            Self::Half => T::lit(0.5),
            Self::One => T::one(),
        }
    }
}

/// φ₋₁..φ_{K+1} (φ₋₁ only for FISTA-G) and τ₀..τ_K.
#[derive(Clone, Debug)]
pub struct PhiTauSchedule<T> {
    horizon: usize,
    phi_prev: Option<T>,
    phi: Vec<T>,
    tau: Vec<T>,
    slack: SlackFactor,
}

/// Default tolerance for the coupling and slack residuals.
pub const PHI_TAU_TOL: f64 = 1e-10;

pub fn build_phi_fistag<T: Real>(k_max: usize) -> Result<PhiTauSchedule<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    // full[i] = φ_{i−1}, i = 0..K+2
    let mut full = vec![T::zero(); k_max + 3];
    full[k_max + 1] = T::one();
    for i in (0..=k_max).rev() {
        let a = full[i + 1];
        let b = full[i + 2];
        let num = b * b - a * b + T::lit(2.0) * a * a + (a - b) * (b * b + T::lit(3.0) * a * a).sqrt();
        let den = a + b;
        assert!(den > T::zero(), "φ recursion denominator vanished");
        full[i] = num / den;
    }
    let tau = (0..=k_max)
        .map(|k| {
            let pm = full[k];
            let pk = full[k + 1];
            T::lit(2.0) * pm / ((pm - pk) * (pm - pk))
        })
        .collect();
    let sched = PhiTauSchedule {
        horizon: k_max,
        phi_prev: Some(full[0]),
        phi: full[1..].to_vec(),
        tau,
        slack: SlackFactor::Half,
    };
    sched.validate(T::lit(PHI_TAU_TOL))?;
    Ok(sched)
}

pub fn build_phi_tau_custom<T: Real>(k_max: usize, tau: &[T], slack: SlackFactor) -> Result<PhiTauSchedule<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    if tau.len() != k_max + 1 {
        return Err(Error::HorizonMismatch { built: tau.len().saturating_sub(1), requested: k_max });
    }
    if (tau[k_max] - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::ConstraintViolation {
            index: k_max,
            constraint: "tau_K = 1",
            residual: (tau[k_max] - T::one()).to_f64_lossy(),
        });
    }
    for k in 0..=k_max {
        if !(tau[k] > T::zero()) || !tau[k].is_finite() {
            return Err(Error::ConstraintViolation { index: k, constraint: "tau positive", residual: tau[k].to_f64_lossy() });
        }
        if k < k_max && tau[k + 1] < tau[k] {
            return Err(Error::ConstraintViolation {
                index: k,
                constraint: "tau nondecreasing",
                residual: (tau[k] - tau[k + 1]).to_f64_lossy(),
            });
        }
    }
    let c: T = slack.value();
    let mut phi = vec![T::zero(); k_max + 2];
    phi[k_max] = T::one();
    for k in (0..k_max).rev() {
        let delta = tau[k + 1] - tau[k];
        if delta > T::zero() {
            let binding = (c * tau[k + 1] / delta - T::one()) / delta;
            let scale = T::one().max(phi[k + 1].abs());
            if (binding - phi[k + 1]).abs() <= T::lit(PHI_TAU_TOL) * scale {
                phi[k + 1] = binding;
            }
        }
        phi[k] = (phi[k + 1] * (T::lit(2.0) * tau[k + 1] - tau[k]) + T::one()) / tau[k];
    }
    let sched = PhiTauSchedule { horizon: k_max, phi_prev: None, phi, tau: tau.to_vec(), slack };
    sched.validate(T::lit(PHI_TAU_TOL))?;
    Ok(sched)
}

/// τ_k = θ_k⁻², φ_k = θ_k⁴ from a `GulergBackward` θ schedule.
pub fn phi_tau_from_theta<T: Real>(theta: &ThetaSchedule<T>) -> Result<PhiTauSchedule<T>> {
    if theta.variant() != ThetaVariant::GulergBackward {
        return Err(Error::Unsupported("θ-instantiated φ/τ needs the gulerg_backward θ sequence".into()));
    }
    let k_max = theta.horizon();
    let phi = (0..=k_max as isize + 1).map(|k| theta.theta(k).powi(4)).collect();
    let tau = (0..=k_max as isize).map(|k| theta.theta(k).powi(-2)).collect();
    let sched = PhiTauSchedule { horizon: k_max, phi_prev: None, phi, tau, slack: SlackFactor::One };
    sched.validate(T::lit(PHI_TAU_TOL))?;
    Ok(sched)
}

impl<T: Real> PhiTauSchedule<T> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn slack_factor(&self) -> SlackFactor {
        self.slack
    }

    /// φ_k for k in −1..=K+1; φ₋₁ only exists for the FISTA-G schedule.
    pub fn phi(&self, k: isize) -> T {
        if k == -1 {
            return self.phi_prev.expect("φ₋₁ is only defined for the FISTA-G schedule");
        }
        self.phi[k as usize]
    }

    pub fn phi_prev(&self) -> Option<T> {
        self.phi_prev
    }

    pub fn tau(&self, k: usize) -> T {
        self.tau[k]
    }

    pub fn taus(&self) -> &[T] {
        &self.tau
    }

    /// `τ_kφ_k − τ_{k+1}φ_{k+1}` for k < K.
    pub fn z_coefficient(&self, k: usize) -> T {
        self.tau[k] * self.phi[k] - self.tau[k + 1] * self.phi[k + 1]
    }

    /// Coupling identity residual, relative to `max(1, τ_kφ_k)`.
    pub fn coupling_residual(&self, k: usize) -> T {
        let lhs = self.z_coefficient(k);
        let rhs = self.phi[k + 1] * (self.tau[k + 1] - self.tau[k]) + T::one();
        (lhs - rhs).abs() / T::one().max((self.tau[k] * self.phi[k]).abs())
    }

    /// Slack condition residual (positive means violated), relative to
    /// `max(1, c·τ_{k+1})`.
    pub fn slack_residual(&self, k: usize) -> T {
        let c: T = self.slack.value();
        let lhs = self.z_coefficient(k) * (self.tau[k + 1] - self.tau[k]);
        (lhs - c * self.tau[k + 1]) / T::one().max(c * self.tau[k + 1])
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let k_max = self.horizon;
        let viol = |index, constraint, residual: T| Error::ConstraintViolation {
            index,
            constraint,
            residual: residual.to_f64_lossy(),
        };
        if self.phi[k_max + 1] != T::zero() {
            return Err(viol(k_max + 1, "phi_{K+1} = 0", self.phi[k_max + 1]));
        }
        if (self.phi[k_max] - T::one()).abs() > tol {
            return Err(viol(k_max, "phi_K = 1", self.phi[k_max] - T::one()));
        }
        if (self.tau[k_max] - T::one()).abs() > tol {
            return Err(viol(k_max, "tau_K = 1", self.tau[k_max] - T::one()));
        }
        for k in 0..k_max {
            let r = self.coupling_residual(k);
            if !(r <= tol) {
                return Err(viol(k, "coupling identity", r));
            }
            let s = self.slack_residual(k);
            if !(s <= tol) {
                return Err(viol(k, "slack condition", s));
            }
            if self.tau[k] < T::zero() || self.tau[k + 1] < self.tau[k] {
                return Err(viol(k, "tau nondecreasing and nonnegative", self.tau[k] - self.tau[k + 1]));
            }
            if !(self.phi[k] > self.phi[k + 1]) {
                return Err(viol(k, "phi decreasing", self.phi[k + 1] - self.phi[k]));
            }
        }
        Ok(())
    }

    pub fn table(&self) -> ScheduleTable {
        let k_max = self.horizon as isize;
        let mut rows = Vec::new();
        if let Some(p) = self.phi_prev {
            rows.push((-1, vec![Some(p.to_f64_lossy()), None]));
        }
        for k in 0..=k_max + 1 {
            let tau = (k <= k_max).then(|| self.tau[k as usize].to_f64_lossy());
            rows.push((k, vec![Some(self.phi(k).to_f64_lossy()), tau]));
        }
        ScheduleTable { columns: vec!["phi".into(), "tau".into()], rows }
    }
}
