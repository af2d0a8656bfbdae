//! Coefficient sequences. Everything is materialized up front because the
//! fixed-horizon families are defined by backward recursions.

mod item;
mod phi_tau;
mod theta;

pub use item::{build_item_schedule, build_ns_sc_fgm_schedule, ItemSchedule, ItemStart, ItemVariant, NsScFgmSchedule};
pub use phi_tau::{
    build_phi_fistag, build_phi_tau_custom, phi_tau_from_theta, PhiTauSchedule, SlackFactor, PHI_TAU_TOL,
};
pub use theta::{build_theta, ThetaSchedule, ThetaVariant};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// κ = L/μ.
pub fn kappa<T: Real>(l: T, mu: T) -> Result<T> {
    if !(mu > T::zero()) || !(l >= mu) {
        return Err(Error::InvalidParameter { name: "mu", value: mu.to_f64_lossy(), reason: "need 0 < mu <= L" });
    }
    Ok(l / mu)
}

/// q = λμ/(λμ+1).
pub fn q_proximal<T: Real>(lambda: T, mu: T) -> Result<T> {
    if !(lambda > T::zero()) || !(mu > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "lambda*mu",
            value: (lambda * mu).to_f64_lossy(),
            reason: "need lambda > 0 and mu > 0",
        });
    }
    Ok(lambda * mu / (lambda * mu + T::one()))
}

/// Per-index table of named columns; `None` marks an undefined entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScheduleTable {
    pub columns: Vec<String>,
    pub rows: Vec<(isize, Vec<Option<f64>>)>,
}

impl ScheduleTable {
    /// Merges another table by index; columns are appended.
    pub fn join(mut self, other: ScheduleTable) -> ScheduleTable {
        let width = self.columns.len();
        let extra = other.columns.len();
        self.columns.extend(other.columns);
        for row in &mut self.rows {
            row.1.resize(width + extra, None);
        }
        for (k, vals) in other.rows {
            match self.rows.iter_mut().find(|r| r.0 == k) {
                Some(row) => {
                    for (i, v) in vals.into_iter().enumerate() {
                        row.1[width + i] = v;
                    }
                }
                None => {
                    let mut row = vec![None; width];
                    row.extend(vals);
                    self.rows.push((k, row));
                }
            }
        }
        self.rows.sort_by_key(|r| r.0);
        self
    }

    /// Whitespace-separated text, one row per index, `-` for undefined.
    pub fn to_text(&self) -> String {
        let mut out = String::from("k");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (k, vals) in &self.rows {
            out.push_str(&k.to_string());
            for v in vals {
                out.push('\t');
                match v {
                    Some(x) => out.push_str(&format!("{x:.17e}")),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_definition() {
        assert_eq!(q_proximal(1.0f64, 1.0).unwrap(), 0.5);
        assert!(q_proximal(0.0f64, 1.0).is_err());
    }

    #[test]
    fn table_join_aligns_rows() {
        let a = ScheduleTable { columns: vec!["a".into()], rows: vec![(0, vec![Some(1.0)]), (1, vec![Some(2.0)])] };
        let b = ScheduleTable { columns: vec!["b".into()], rows: vec![(1, vec![Some(3.0)]), (2, vec![Some(4.0)])] };
        let j = a.join(b);
        assert_eq!(j.rows[0].1, vec![Some(1.0), None]);
        assert_eq!(j.rows[1].1, vec![Some(2.0), Some(3.0)]);
        assert_eq!(j.rows[2].1, vec![None, Some(4.0)]);
    }
}
