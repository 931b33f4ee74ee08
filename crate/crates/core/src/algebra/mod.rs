//! Prime-field arithmetic and sparse multilinear polynomials.
//!
//! [`SparseMultilinearPoly`] is the semantic ground truth for the rest of the
//! crate: formulas expand into it, ROABPs and hitting sets are checked
//! against its evaluations.

mod field;
mod monomial;
mod poly;

pub use field::{is_prime, next_prime, Field, MERSENNE_61};
pub use monomial::Monomial;
pub use poly::SparseMultilinearPoly;
