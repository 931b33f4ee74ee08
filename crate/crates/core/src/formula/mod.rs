//! Formula IR for multilinear ΣΠΣ, ΣΠΣΠ and regular formulas.
//!
//! All three kinds share one text grammar (see [`parse`]) and expand into
//! [`SparseMultilinearPoly`]. Construction validates multilinearity: the
//! factors of every product gate live on pairwise-disjoint variable sets.
//!
//! The size measure |Φ| used throughout the crate is the total sparsity of
//! the bottom factors, where a factor that is exactly a bare variable `x_i`
//! counts zero. With this measure [`make_simple`] never increases size.

mod depth3;
mod depth4;
mod linear;
mod parse;
mod regular;
mod simple;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use depth3::Depth3Formula;
pub use depth4::Depth4Formula;
pub use linear::LinearForm;
pub use parse::{parse, parse_poly};
pub use regular::{RegularFormula, RegularNode};
pub use simple::{dividing_variables, is_simple, make_simple};

use crate::algebra::{Field, SparseMultilinearPoly};
use crate::error::{Error, Result};

/// Default cap on the number of terms any expansion may produce.
pub const DEFAULT_TERM_CAP: usize = 1 << 20;

/// Which of the three formula families a formula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaClass {
    Depth3,
    Depth4,
    Regular,
}

impl FormulaClass {
    /// The short tag used in headers and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            FormulaClass::Depth3 => "d3",
            FormulaClass::Depth4 => "d4",
            FormulaClass::Regular => "regular",
        }
    }
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FormulaClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d3" | "depth3" | "sps" => Ok(FormulaClass::Depth3),
            "d4" | "depth4" | "spsp" => Ok(FormulaClass::Depth4),
            "regular" | "reg" => Ok(FormulaClass::Regular),
            other => Err(Error::Class(format!("unknown formula class `{other}`"))),
        }
    }
}

/// A parsed formula of any supported class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Depth3(Depth3Formula),
    Depth4(Depth4Formula),
    Regular(RegularFormula),
}

impl Formula {
    pub fn class(&self) -> FormulaClass {
        match self {
            Formula::Depth3(_) => FormulaClass::Depth3,
            Formula::Depth4(_) => FormulaClass::Depth4,
            Formula::Regular(_) => FormulaClass::Regular,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Formula::Depth3(f) => f.n(),
            Formula::Depth4(f) => f.n(),
            Formula::Regular(f) => f.n(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Formula::Depth3(f) => f.field(),
            Formula::Depth4(f) => f.field(),
            Formula::Regular(f) => f.field(),
        }
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        match self {
            Formula::Depth3(f) => f.eval(point),
            Formula::Depth4(f) => f.eval(point),
            Formula::Regular(f) => f.eval(point),
        }
    }

    pub fn expand(&self, cap: usize) -> Result<SparseMultilinearPoly> {
        match self {
            Formula::Depth3(f) => f.expand(cap),
            Formula::Depth4(f) => f.expand(cap),
            Formula::Regular(f) => f.expand(cap),
        }
    }

    /// The same formula viewed in `n` variables (`n` at least the largest
    /// index used).
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Ok(match self {
            Formula::Depth3(f) => Formula::Depth3(f.with_n(n)?),
            Formula::Depth4(f) => Formula::Depth4(f.with_n(n)?),
            Formula::Regular(f) => Formula::Regular(f.with_n(n)?),
        })
    }

    pub fn as_depth3(&self) -> Result<&Depth3Formula> {
        match self {
            Formula::Depth3(f) => Ok(f),
            other => Err(Error::Class(format!(
                "expected a d3 formula, got {}",
                other.class()
            ))),
        }
    }

    /// A depth-4 view: depth-3 formulas convert losslessly, regular
    /// formulas are rejected (use the reduce module for those).
    pub fn to_depth4(&self) -> Result<Depth4Formula> {
        match self {
            Formula::Depth3(f) => f.to_depth4(),
            Formula::Depth4(f) => Ok(f.clone()),
            Formula::Regular(_) => Err(Error::Class(
                "regular formulas need regular_to_depth4 before depth-4 processing".into(),
            )),
        }
    }

    pub fn as_regular(&self) -> Result<&RegularFormula> {
        match self {
            Formula::Regular(f) => Ok(f),
            other => Err(Error::Class(format!(
                "expected a regular formula, got {}",
                other.class()
            ))),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Depth3(x) => x.fmt(f),
            Formula::Depth4(x) => x.fmt(f),
            Formula::Regular(x) => x.fmt(f),
        }
    }
}

impl From<Depth3Formula> for Formula {
    fn from(f: Depth3Formula) -> Self {
        Formula::Depth3(f)
    }
}

impl From<Depth4Formula> for Formula {
    fn from(f: Depth4Formula) -> Self {
        Formula::Depth4(f)
    }
}

impl From<RegularFormula> for Formula {
    fn from(f: RegularFormula) -> Self {
        Formula::Regular(f)
    }
}

pub(crate) fn check_disjoint_sets<I>(gate: usize, sets: I) -> Result<()>
where
    I: IntoIterator<Item = BTreeSet<usize>>,
{
    let mut seen = BTreeSet::new();
    for set in sets {
        for x in set {
            if !seen.insert(x) {
                return Err(Error::Multilinearity {
                    gate,
                    detail: format!("x{} occurs in two factors", x + 1),
                });
            }
        }
    }
    Ok(())
}
