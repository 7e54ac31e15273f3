//! Exact polynomial algebra and its numerical views.

pub mod field;
pub mod infimum;
pub mod linear;
pub mod parse;
pub mod polynomial;

pub use field::{ComposedField, PolyField, ScalarField};
pub use infimum::{infimum_estimate, InfimumEstimate};
pub use linear::{apply_linear_change, to_star_form, ChangeSummary, LinearChange, StarForm};
pub use parse::{parse, parse_with_vars, rational};
pub use polynomial::{Monomial, Polynomial};
