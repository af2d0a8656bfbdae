use std::fmt::Write as _;
use std::time::Duration;

use crate::linalg::Vector;
use crate::scalar::Real;

use super::plan::StepKind;
use super::spec::Form;

#[derive(Clone, Debug)]
pub struct Record<T> {
    pub k: usize,
    pub x: Vector<T>,
    /// x_k⁺, x_k∘ or x_k⊕ depending on the step.
    pub advanced: Vector<T>,
    /// Present whenever the form defines it (and reconstructed in momentum form).
    pub z: Option<Vector<T>>,
    /// Strongly convex pivot `x_k − D_k/q` for collinear families.
    pub pivot: Option<Vector<T>>,
    /// Gradient mapping at x_k (∇f, ∇̃_L F or ∇̃_{1/λ} g).
    pub grad_map: Vector<T>,
    /// f(x_k); g is never evaluated off prox outputs.
    pub f_x: T,
    /// F at the advanced point.
    pub value: T,
    pub gmap_sq: T,
    /// ‖v‖² for the witness v ∈ ∂F(advanced point).
    pub subgrad_sq: T,
    pub dist_sq: Option<T>,
    /// Ball radius² (geometric descent only).
    pub radius_sq: Option<T>,
}

#[derive(Clone, Debug)]
pub struct RunTrace<T> {
    pub method: String,
    pub form: Form,
    pub horizon: usize,
    pub step: StepKind<T>,
    pub records: Vec<Record<T>>,
    /// Index of the first record of each phase (one entry unless composed).
    pub phase_starts: Vec<usize>,
    pub wall_time: Duration,
}

pub const CSV_HEADER: &str = "k,F,gmap_sq,subgrad_sq,dist_to_opt_sq";

impl<T: Real> RunTrace<T> {
    pub fn last(&self) -> &Record<T> {
        self.records.last().expect("trace is never empty")
    }

    pub fn xs(&self) -> Vec<&Vector<T>> {
        self.records.iter().map(|r| &r.x).collect()
    }

    /// Final value `F(y_K)` used by the Lyapunov functions.
    pub fn final_value(&self) -> T {
        self.last().value
    }

    fn csv_row(r: &Record<T>, out: &mut String) {
        let dist = r.dist_sq.map(|d| format!("{:e}", d.to_f64_lossy())).unwrap_or_default();
        let _ = write!(
            out,
            "{},{:e},{:e},{:e},{}",
            r.k,
            r.value.to_f64_lossy(),
            r.gmap_sq.to_f64_lossy(),
            r.subgrad_sq.to_f64_lossy(),
            dist
        );
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            Self::csv_row(r, &mut out);
            out.push('\n');
        }
        out
    }

    /// Rows prefixed with `method,horizon`, no header.
    pub fn to_csv_rows_long(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = write!(out, "{},{},", csv_escape(&self.method), self.horizon);
            Self::csv_row(r, &mut out);
            out.push('\n');
        }
        out
    }
}

pub fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
