//! Schrödinger potentials reducible to the triconfluent Heun equation: coordinate
//! maps, effective potentials, series and polynomial solutions, recurrence
//! asymptotics, superpotentials, closed-form special solutions and a numerical
//! oracle to check them against.

// `!(x < tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod oracle;
pub mod params;
pub mod potential;
pub mod qes;
pub mod recurrence;
pub mod roots;
pub mod series;
pub mod special;
pub mod sum;
pub mod susy;
pub mod validation;

pub use error::{Error, Result};
pub use params::{classify, CaseTag, CoordinateMap, HeunSixParams, InversionMode};
pub use series::CanonicalParams;
