//! Support reductions: derivatives and restrictions that shrink the
//! variable sets of bottom factors, and rewriting of regular formulas as
//! depth-4 formulas.

mod regular;
mod support;

pub use regular::{regular_to_depth4, squeeze, Depth4Reduced, ReducedCase};
pub use support::{
    depth4_step_bound, reduce_depth3, reduce_depth4, Action, Depth3Reduction, Depth4Reduction,
    ReductionTrace, Step,
};

#[cfg(test)]
mod tests;
