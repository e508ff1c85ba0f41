//! Exact exponential sums of rotation symmetric, trapezoid and elementary
//! symmetric polynomials over Galois fields, and the integer linear
//! recurrences they satisfy.

pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod funcalg;
pub mod galois;
pub mod harness;
pub mod numtheory;
pub mod oracle;
pub mod recurrence;
pub mod transfer;

pub use cyclotomic::{root_power, CycInt};
pub use error::{Error, Result};
pub use galois::{make_field, FieldElement, FieldSpec};
pub use funcalg::{instantiate, parse, FunctionExpr, InstantiatedFunction, MonomialPattern};
