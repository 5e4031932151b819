//! Rigid analytic trivializations of Drinfeld modules over `F_q[t]`,
//! computed with exact finite-field arithmetic and tracked truncations.
//!
//! Module map:
//! - [`field`], [`laurent`]: `F_{q^M}` and truncated series in `theta^{-1/e}`.
//! - [`tate`]: power series in `t`, twists, evaluation at `t = theta`, matrices.
//! - [`drinfeld`]: the module, exp/log, generating functions, `B_n`, `L_phi`.
//! - [`newton`]: Newton polygon, division sequences, strict bases, `xi_j`.
//! - [`rat`]: `Theta`, `B`, the contraction `F`, the product `Pi` and periods.
//! - [`expr`]: coefficient expression language.

pub mod drinfeld;
pub mod error;
pub mod expr;
pub mod field;
pub mod laurent;
pub mod newton;
pub mod rat;
pub mod tate;

pub use error::{Error, Result};
pub use field::{FfElem, FieldParams, FiniteField};
pub use laurent::{Ctx, Laurent};

/// Exact rationals used for degrees, slopes and intercepts.
pub type Q = num_rational::Ratio<i64>;
