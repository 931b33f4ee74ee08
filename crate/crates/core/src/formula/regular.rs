use std::collections::BTreeSet;
use std::fmt;

use super::check_disjoint_sets;
use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::{Error, Result};

/// A node of a regular formula: alternating sum and product layers ending
/// in leaves of the form `c·x_i` or `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegularNode {
    Sum(Vec<RegularNode>),
    Product(Vec<RegularNode>),
    Leaf { var: Option<usize>, coeff: u64 },
}

impl RegularNode {
    pub fn leaf(field: Field, var: Option<usize>, coeff: u64) -> Self {
        RegularNode::Leaf {
            var,
            coeff: field.reduce(coeff),
        }
    }

    pub fn children(&self) -> &[RegularNode] {
        match self {
            RegularNode::Sum(c) | RegularNode::Product(c) => c,
            RegularNode::Leaf { .. } => &[],
        }
    }

    /// Syntactic variable set: every variable on a leaf with nonzero
    /// coefficient below this node.
    pub fn var_set(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            RegularNode::Leaf {
                var: Some(v),
                coeff,
            } if *coeff != 0 => {
                out.insert(*v);
            }
            RegularNode::Leaf { .. } => {}
            RegularNode::Sum(c) | RegularNode::Product(c) => {
                c.iter().for_each(|ch| ch.collect_vars(out));
            }
        }
    }

    pub fn eval(&self, field: &Field, point: &[u64]) -> u64 {
        match self {
            RegularNode::Leaf { var, coeff } => match var {
                Some(v) => field.mul(*coeff, field.reduce(point[*v])),
                None => *coeff,
            },
            RegularNode::Sum(c) => c
                .iter()
                .fold(0, |a, ch| field.add(a, ch.eval(field, point))),
            RegularNode::Product(c) => c
                .iter()
                .fold(1, |a, ch| field.mul(a, ch.eval(field, point))),
        }
    }

    pub fn expand(&self, field: Field, n: usize, cap: usize) -> Result<SparseMultilinearPoly> {
        match self {
            RegularNode::Leaf { var, coeff } => {
                let m = var.map_or_else(Monomial::one, Monomial::var);
                SparseMultilinearPoly::from_terms(field, n, [(m, *coeff)])
            }
            RegularNode::Sum(c) => {
                let mut acc = SparseMultilinearPoly::zero(field, n);
                for ch in c {
                    acc = acc.add(&ch.expand(field, n, cap)?)?;
                    if acc.sparsity() > cap {
                        return Err(Error::TermCap { cap });
                    }
                }
                Ok(acc)
            }
            RegularNode::Product(c) => {
                let mut acc = SparseMultilinearPoly::constant(field, n, 1);
                for ch in c {
                    acc = acc.mul_capped(&ch.expand(field, n, cap)?, cap)?;
                }
                Ok(acc)
            }
        }
    }

    fn count_nodes(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(RegularNode::count_nodes)
            .sum::<usize>()
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            RegularNode::Leaf { var, .. } => *var,
            _ => self
                .children()
                .iter()
                .filter_map(RegularNode::max_var)
                .max(),
        }
    }

    fn write(&self, field: &Field, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularNode::Leaf { var, coeff } => match (var, field.to_signed(*coeff)) {
                (Some(v), 1) => write!(f, "x{}", v + 1),
                (Some(v), c) => write!(f, "{c}*x{}", v + 1),
                (None, c) => write!(f, "{c}"),
            },
            RegularNode::Sum(c) => {
                for (i, ch) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    ch.write(field, f)?;
                }
                Ok(())
            }
            RegularNode::Product(c) => {
                for (i, ch) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "(")?;
                    ch.write(field, f)?;
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A multilinear regular formula with fan-in profile
/// `(a_1, p_1, …, a_d, p_d, a_{d+1})`.
///
/// Every sum node on layer `2i−1` has exactly `a_i` children and every
/// product node on layer `2i` has exactly `p_i` children; the sums on the
/// last layer have leaves as children. Multilinearity is enforced
/// syntactically: the children of a product node use disjoint variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegularFormula {
    field: Field,
    n: usize,
    profile: Vec<usize>,
    root: RegularNode,
}

impl RegularFormula {
    /// Validates the tree and infers its profile.
    pub fn new(field: Field, n: usize, root: RegularNode) -> Result<Self> {
        let mut profile = Vec::new();
        let mut layer = vec![&root];
        loop {
            let sum_layer = profile.len() % 2 == 0;
            let mut fanin = None;
            let mut next = Vec::new();
            let mut leaves = 0;
            for node in &layer {
                let children = match (node, sum_layer) {
                    (RegularNode::Sum(c), true) | (RegularNode::Product(c), false) => c,
                    _ => {
                        return Err(Error::Class(format!(
                            "layer {} must consist of {} gates",
                            profile.len() + 1,
                            if sum_layer { "sum" } else { "product" }
                        )))
                    }
                };
                if children.is_empty() {
                    return Err(Error::Class(format!(
                        "gate on layer {} has no children",
                        profile.len() + 1
                    )));
                }
                if *fanin.get_or_insert(children.len()) != children.len() {
                    return Err(Error::Class(format!(
                        "fan-in on layer {} is not uniform",
                        profile.len() + 1
                    )));
                }
                for ch in children {
                    if matches!(ch, RegularNode::Leaf { .. }) {
                        leaves += 1;
                    }
                    next.push(ch);
                }
            }
            profile.push(fanin.unwrap_or(0));
            if leaves > 0 {
                if leaves != next.len() || !sum_layer {
                    return Err(Error::Class(
                        "leaves must all hang off the last sum layer".into(),
                    ));
                }
                break;
            }
            layer = next;
        }
        if profile.len() < 3 {
            return Err(Error::Class(
                "a regular formula needs at least one product layer".into(),
            ));
        }
        if let Some(v) = root.max_var() {
            if v >= n {
                return Err(Error::VariableOutOfRange { index: v, n });
            }
        }
        check_products(&root, &mut 0)?;
        Ok(Self {
            field,
            n,
            profile,
            root,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn root(&self) -> &RegularNode {
        &self.root
    }

    /// Number of product layers d.
    pub fn depth(&self) -> usize {
        self.profile.len() / 2
    }

    /// Formal degree ∏ p_i.
    pub fn formal_degree(&self) -> usize {
        self.profile.iter().skip(1).step_by(2).product()
    }

    /// Size S: the number of gates and leaves.
    pub fn size(&self) -> usize {
        self.root.count_nodes()
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.field, n, self.root.clone())
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: point.len(),
            });
        }
        Ok(self.root.eval(&self.field, point))
    }

    pub fn expand(&self, cap: usize) -> Result<SparseMultilinearPoly> {
        self.root.expand(self.field, self.n, cap)
    }
}

fn check_products(node: &RegularNode, counter: &mut usize) -> Result<()> {
    if let RegularNode::Product(children) = node {
        let gate = *counter;
        *counter += 1;
        check_disjoint_sets(gate, children.iter().map(RegularNode::var_set))?;
    }
    for ch in node.children() {
        check_products(ch, counter)?;
    }
    Ok(())
}

impl fmt::Display for RegularFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# class: regular")?;
        writeln!(f, "# n: {}", self.n)?;
        self.root.write(&self.field, f)?;
        writeln!(f)
    }
}
