//! Two qubits under collective spontaneous emission, and the quantum
//! correlations they carry.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: density matrices, X states, the R-picture and local filters.
//! - [`dynamics`]: the collective-damping master equation, integrated
//!   numerically (RK4) and in closed form for X states.
//! - [`correlations`]: concurrence, CHSH, F₃-steering and teleportation
//!   measures.
//! - [`filtering`]: local filtering, the Bell-diagonal normal form and the
//!   hidden measures it reveals.
//! - [`experiment`]: parameter scans, birth-time detection and the dataset
//!   writers used by the CLI.
//!
//! Time is always dimensionless, `tau = Gamma * t`.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod filtering;
pub mod io;
mod linalg;
pub mod qstate;

pub use error::{Error, Result};
pub use linalg::{Mat2, Mat4, C64};
