use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::ScheduleTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemVariant {
    /// parameter κ, q = κ⁻¹
    ItemSmooth,
    /// parameter q = λμ/(λμ+1)
    ProximalItem,
}

/// How A₁ is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStart {
    /// A₁ from the recursion with A₀ = 0, i.e. 4/(1−q)².
    #[default]
    Recursion,
    /// Alternative start A₁ = 1/(1−q). No rate guarantee, and the two forms differ.
    Table,
}

#[derive(Clone, Debug)]
pub struct ItemSchedule<T> {
    variant: ItemVariant,
    start: ItemStart,
    horizon: usize,
    q: T,
    a: Vec<T>,
    gamma: Vec<T>,
    delta: Vec<T>,
}

fn item_next<T: Real>(a: T, q: T) -> T {
    let one = T::one();
    // the root is split so (1+A)(1+qA) cannot overflow before A does
    ((one + q) * a + T::lit(2.0) * (one + (one + a).sqrt() * (one + q * a).sqrt())) / ((one - q) * (one - q))
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::InvalidParameter { name: "q", value: q.to_f64_lossy(), reason: "must lie in (0, 1)" });
    }
    Ok(())
}

/// `kappa_or_q` is κ for `ItemSmooth` and q for `ProximalItem`.
pub fn build_item_schedule<T: Real>(
    variant: ItemVariant,
    k_max: usize,
    kappa_or_q: T,
    start: ItemStart,
) -> Result<ItemSchedule<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    let q = match variant {
        ItemVariant::ItemSmooth => T::one() / kappa_or_q,
        ItemVariant::ProximalItem => kappa_or_q,
    };
    check_q(q)?;
    let one = T::one();
    let mut a = vec![T::zero(); k_max + 2];
    for k in 0..=k_max {
        a[k + 1] = if k == 0 && start == ItemStart::Table { one / (one - q) } else { item_next(a[k], q) };
    }
    let gamma = (0..=k_max).map(|k| a[k] / ((one - q) * a[k + 1])).collect();
    let delta = (0..=k_max)
        .map(|k| ((one - q) * (one - q) * a[k + 1] - (one + q) * a[k]) / (T::lit(2.0) * (one + q + q * a[k])))
        .collect();
    Ok(ItemSchedule { variant, start, horizon: k_max, q, a, gamma, delta })
}

impl<T: Real> ItemSchedule<T> {
    pub fn variant(&self) -> ItemVariant {
        self.variant
    }

    pub fn start(&self) -> ItemStart {
        self.start
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn a(&self, k: usize) -> T {
        self.a[k]
    }

    pub fn gamma(&self, k: usize) -> T {
        self.gamma[k]
    }

    pub fn delta(&self, k: usize) -> T {
        self.delta[k]
    }

    /// Momentum coefficient α_k, k < K. The A_{k+1} term enters with a minus
    /// sign; with a plus the momentum and auxiliary forms disagree.
    pub fn alpha(&self, k: usize) -> T {
        let (q, one, two) = (self.q, T::one(), T::lit(2.0));
        let (r0, s, r2) = self.ratios(k);
        let num = (two * (one + q) * s + q * (T::lit(3.0) + q) * r0 - (one - q) * (one - q) * q) * ((one - q) * r2 - one) * r0;
        let den = two * (one - q) * ((one + q) * s + q * r0) * ((one - q) - r0) * r2;
        num / den
    }

    /// Correction coefficient β_k, k < K.
    pub fn beta(&self, k: usize) -> T {
        let (q, one, two) = (self.q, T::one(), T::lit(2.0));
        let (r0, s, r2) = self.ratios(k);
        let num = (q * r0 * r0 + two * (one - q) * s + (one - q) * q * r0) * ((one - q) * r2 - one);
        let den = two * ((one + q) * s + q * r0) * ((one - q) - r0) * r2;
        num / den
    }

    /// `(A_k/A_{k+1}, 1/A_{k+1}, A_{k+2}/A_{k+1})`; α and β are written in
    /// these so the cubic products of A cancel before they can overflow.
    fn ratios(&self, k: usize) -> (T, T, T) {
        let (a0, a1, a2) = (self.a[k], self.a[k + 1], self.a[k + 2]);
        (a0 / a1, T::one() / a1, a2 / a1)
    }

    pub fn table(&self) -> ScheduleTable {
        let rows = (0..=self.horizon + 1)
            .map(|k| {
                let inner = k <= self.horizon;
                (
                    k as isize,
                    vec![
                        Some(self.a[k].to_f64_lossy()),
                        inner.then(|| self.gamma[k].to_f64_lossy()),
                        inner.then(|| self.delta[k].to_f64_lossy()),
                    ],
                )
            })
            .collect();
        ScheduleTable { columns: vec!["A".into(), "gamma".into(), "delta".into()], rows }
    }
}

/// Non-stationary SC-FGM: A₀ = 0,
/// A_{k+1} = (2A_k + 1 + √(4A_k + 4qA_k² + 1)) / (2(1−q)).
#[derive(Clone, Debug)]
pub struct NsScFgmSchedule<T> {
    horizon: usize,
    q: T,
    a: Vec<T>,
}

pub fn build_ns_sc_fgm_schedule<T: Real>(k_max: usize, kappa: T) -> Result<NsScFgmSchedule<T>> {
    if k_max < 1 {
        return Err(Error::InvalidHorizon(k_max));
    }
    let q = T::one() / kappa;
    check_q(q)?;
    let (one, two, four) = (T::one(), T::lit(2.0), T::lit(4.0));
    let mut a = vec![T::zero(); k_max + 2];
    for k in 0..=k_max {
        let ak = a[k];
        a[k + 1] = (two * ak + one + (four * ak + four * q * ak * ak + one).sqrt()) / (two * (one - q));
    }
    Ok(NsScFgmSchedule { horizon: k_max, q, a })
}

impl<T: Real> NsScFgmSchedule<T> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn a(&self, k: usize) -> T {
        self.a[k]
    }

    /// Weight on z_k in x_k = (1−γ_k)x_{k−1}⁺ + γ_k z_k.
    pub fn gamma(&self, k: usize) -> T {
        let (q, two) = (self.q, T::lit(2.0));
        let (a0, a1) = (self.a[k], self.a[k + 1]);
        (a1 - a0) * (T::one() + q * a0) / (a1 + two * q * a0 * a1 - q * a0 * a0)
    }

    pub fn delta(&self, k: usize) -> T {
        (self.a[k + 1] - self.a[k]) / (T::one() + self.q * self.a[k + 1])
    }

    pub fn alpha(&self, k: usize) -> T {
        let (q, one, two) = (self.q, T::one(), T::lit(2.0));
        let (a0, a1, a2) = (self.a[k], self.a[k + 1], self.a[k + 2]);
        let (r0, s, r2) = (a0 / a1, one / a1, a2 / a1);
        (r2 - one) * ((one - q) - r0 - s) / (r2 * (two * q + s) - q)
    }

    pub fn table(&self) -> ScheduleTable {
        let rows = (0..=self.horizon + 1)
            .map(|k| {
                let inner = k <= self.horizon;
                (
                    k as isize,
                    vec![
                        Some(self.a[k].to_f64_lossy()),
                        inner.then(|| self.gamma(k).to_f64_lossy()),
                        inner.then(|| self.delta(k).to_f64_lossy()),
                    ],
                )
            })
            .collect();
        ScheduleTable { columns: vec!["A".into(), "gamma".into(), "delta".into()], rows }
    }
}
