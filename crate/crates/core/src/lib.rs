//! Exact F-pure thresholds, test ideals and F-jumping numbers of diagonal
//! hypersurfaces `u_1 x_1^{d_1} + ... + u_n x_n^{d_n}` over `F_p`.
//!
//! [`invariants`] evaluates the closed forms; [`frobenius`] recomputes the
//! same objects from the definitions so the two can be checked against
//! each other.

pub mod basep;
pub mod error;
pub mod frobenius;
pub mod invariants;
pub mod ratio_serde;

/// Exact rationals throughout; nothing is ever rounded to a float.
pub type Rational = num_rational::BigRational;

pub use basep::Prime;
pub use error::{Error, Result};
pub use invariants::DiagonalForm;
