//! Numerical toolkit for the extremal entire functions of prescribed
//! exponential type attached to shifted truncated exponentials, to
//! measure-subordinated truncated targets (truncated logarithm, truncated
//! shifted powers), and to their odd counterparts.
//!
//! The crate evaluates the best L¹ approximation, the extremal minorant and
//! the extremal majorant, reproduces their closed-form L¹ errors, and
//! verifies the structural inequalities numerically: sign certificates on
//! grids, node interpolation checks, quadrature of the L¹ error against the
//! closed forms, and exponential-type estimation on the imaginary axis.

pub mod base;
pub mod error;
pub mod numerics;
pub mod special;

pub mod approximants;
pub mod oracle;
pub mod subordination;

pub mod odd;
pub mod verification;

pub use base::{ApproxKind, BaseParams};
pub use error::{Error, Result};
pub use numerics::{QuadResult, SumResult};
