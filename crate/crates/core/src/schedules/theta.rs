use crate::error::{Error, Result};
use crate::scalar::Real;

use super::ScheduleTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaVariant {
    /// θ₀ = 1, θ_{k+1} = (1+√(1+4θ_k²))/2; stored from θ₋₁ = 0.
    FgmForward,
    /// As `FgmForward` but θ_K = (1+√(1+8θ_{K−1}²))/2.
    OgmForwardWithLast,
    /// θ_{K+1} = 0, θ_K = 1, backward recursion, θ₀ = (1+√(1+8θ₁²))/2.
    OgmgBackward,
    /// θ_{K+1} = 0, backward recursion down to θ₀.
    GulergBackward,
}

impl ThetaVariant {
    pub fn is_backward(self) -> bool {
        matches!(self, Self::OgmgBackward | Self::GulergBackward)
    }
}

#[derive(Clone, Debug)]
pub struct ThetaSchedule<T> {
    variant: ThetaVariant,
    horizon: usize,
    first_index: isize,
    theta: Vec<T>,
}

fn step4<T: Real>(t: T) -> T {
    (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) / T::lit(2.0)
}

fn step8<T: Real>(t: T) -> T {
    (T::one() + (T::one() + T::lit(8.0) * t * t).sqrt()) / T::lit(2.0)
}

pub fn build_theta<T: Real>(variant: ThetaVariant, k_max: usize) -> Result<ThetaSchedule<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    let (first_index, theta) = match variant {
        ThetaVariant::FgmForward | ThetaVariant::OgmForwardWithLast => {
            let mut th = vec![T::zero(), T::one()];
            for k in 1..=k_max {
                let prev = th[k];
                let next = if k == k_max && variant == ThetaVariant::OgmForwardWithLast {
                    step8(prev)
                } else {
                    step4(prev)
                };
                th.push(next);
            }
            (-1, th)
        }
        ThetaVariant::OgmgBackward | ThetaVariant::GulergBackward => {
            let mut th = vec![T::zero(); k_max + 2];
            th[k_max] = T::one();
            for k in (0..k_max).rev() {
                th[k] = if k == 0 && variant == ThetaVariant::OgmgBackward {
                    step8(th[1])
                } else {
                    step4(th[k + 1])
                };
            }
            (0, th)
        }
    };
    Ok(ThetaSchedule { variant, horizon: k_max, first_index, theta })
}

impl<T: Real> ThetaSchedule<T> {
    pub fn variant(&self) -> ThetaVariant {
        self.variant
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Index range covered, inclusive.
    pub fn index_range(&self) -> (isize, isize) {
        (self.first_index, self.first_index + self.theta.len() as isize - 1)
    }

    /// θ_k. Panics outside [`index_range`](Self::index_range).
    pub fn theta(&self, k: isize) -> T {
        let i = k - self.first_index;
        assert!(i >= 0 && (i as usize) < self.theta.len(), "theta index {k} out of range");
        self.theta[i as usize]
    }

    pub fn table(&self) -> ScheduleTable {
        let (lo, hi) = self.index_range();
        ScheduleTable {
            columns: vec!["theta".into()],
            rows: (lo..=hi).map(|k| (k, vec![Some(self.theta(k).to_f64_lossy())])).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_first_values() {
        let s = build_theta::<f64>(ThetaVariant::FgmForward, 3).unwrap();
        assert_eq!(s.theta(-1), 0.0);
        assert_eq!(s.theta(0), 1.0);
        assert!((s.theta(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ogmg_backward_k2() {
        let s = build_theta::<f64>(ThetaVariant::OgmgBackward, 2).unwrap();
        let t1 = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(s.theta(2), 1.0);
        assert!((s.theta(1) - t1).abs() < 1e-15);
        let t0 = (1.0 + (1.0 + 8.0 * t1 * t1).sqrt()) / 2.0;
        assert!((s.theta(0) - t0).abs() < 1e-15);
        assert!((s.theta(0) - 2.842235679).abs() < 1e-9);
        assert_eq!(s.theta(3), 0.0);
    }

    #[test]
    fn ogm_last_step_uses_factor_eight() {
        let a = build_theta::<f64>(ThetaVariant::FgmForward, 4).unwrap();
        let b = build_theta::<f64>(ThetaVariant::OgmForwardWithLast, 4).unwrap();
        for k in -1..4 {
            assert_eq!(a.theta(k), b.theta(k));
        }
        let t3 = a.theta(3);
        assert!((b.theta(4) - (1.0 + (1.0 + 8.0 * t3 * t3).sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn gulerg_ends_at_one() {
        let s = build_theta::<f64>(ThetaVariant::GulergBackward, 5).unwrap();
        assert_eq!(s.theta(6), 0.0);
        assert_eq!(s.theta(5), 1.0);
        for k in 0..5 {
            assert!(s.theta(k) > s.theta(k + 1));
        }
    }

    #[test]
    fn zero_horizon_rejected() {
        assert_eq!(build_theta::<f64>(ThetaVariant::FgmForward, 0).unwrap_err(), Error::InvalidHorizon(0));
    }
}
