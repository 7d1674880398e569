//! PolyDot coded multi-party computation: computes `Y = A^T B` over a prime
//! field with `N` workers such that no `z` colluding workers learn anything
//! about `A` or `B`.
//!
//! The crate has three layers:
//!
//! * exact arithmetic: [`field`], [`matrix`], [`blockmatrix`];
//! * the combinatorics of the scheme: exponent sets in [`powersets`] and
//!   closed-form worker counts in [`counts`], cross-checked by [`verify`];
//! * a full in-process protocol simulation in [`shares`] and [`protocol`],
//!   including a rank-based privacy auditor.
//!
//! [`cli`] wraps all of it behind the `polydot` binary.

pub mod blockmatrix;
pub mod cli;
pub mod counts;
pub mod error;
pub mod field;
pub mod matrix;
pub mod powersets;
pub mod protocol;
pub mod rng;
pub mod shares;
pub mod verify;

pub use counts::{
    best_scheme, n_entangled, n_gcsa, n_polydot, n_ssmm, Region, Scheme, WorkerCountReport,
};
pub use error::{Error, Result};
pub use field::{EvaluationPoints, FieldElement, FieldModulus, MERSENNE_61};
pub use matrix::Matrix;
pub use powersets::{support_h, ExponentSet, SchemeParams};
pub use protocol::{audit_privacy, run_protocol, AuditReport, ProtocolConfig, Transcript};
