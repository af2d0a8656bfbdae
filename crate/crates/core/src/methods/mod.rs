//! Fixed-horizon runners for every method family.

mod plan;
mod runner;
mod spec;
mod trace;

pub use plan::{build_plan, check_setup, MethodPlan, PlanSchedule, StepKind, StrongConvexity, ZRule};
pub use runner::{advance, plan_for, run, run_observed, run_plan, DIVERGENCE_NORM};
pub use spec::{Family, Form, MethodSpec, PhiTauRecipe, Requirement};
pub use trace::{csv_escape, Record, RunTrace, CSV_HEADER};
