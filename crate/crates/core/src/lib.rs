// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functions;
pub mod instances;
pub mod linalg;
pub mod methods;
pub mod oracle;
pub mod problem;
pub mod scalar;
pub mod schedules;
pub mod diagnostics;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use methods::{run, Family, Form, MethodSpec, Record, RunTrace};
pub use problem::CompositeProblem;
pub use scalar::Real;

/// Double-precision aliases, the default working precision.
pub type VectorF64 = Vector<f64>;
pub type MatrixF64 = Matrix<f64>;
pub type ProblemF64 = CompositeProblem<f64>;
pub type SpecF64 = MethodSpec<f64>;
pub type TraceF64 = RunTrace<f64>;

/// Single-precision aliases.
pub type VectorF32 = Vector<f32>;
pub type MatrixF32 = Matrix<f32>;
pub type ProblemF32 = CompositeProblem<f32>;
pub type SpecF32 = MethodSpec<f32>;
pub type TraceF32 = RunTrace<f32>;
