pub mod algebra;
pub mod error;
pub mod formula;
pub mod hashing;
pub mod hitting;
pub mod lowerbound;
pub mod oracle;
pub mod reduce;
pub mod roabp;
pub mod selftest;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/hitting-sets.md")]
    mod hitting_sets {}
    #[doc = include_str!("../../../book/src/roabp.md")]
    mod roabp {}
    #[doc = include_str!("../../../book/src/hashing.md")]
    mod hashing {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/lower-bounds.md")]
    mod lower_bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
