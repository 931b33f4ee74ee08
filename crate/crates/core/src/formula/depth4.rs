use std::fmt;

use super::check_disjoint_sets;
use super::depth3::check_disjoint_index_sets;
use crate::algebra::{Field, SparseMultilinearPoly};
use crate::error::{Error, Result};

/// A multilinear ΣΠΣΠ formula `Σ_i Π_j f_{i,j}` whose bottom factors are
/// sparse multilinear polynomials on pairwise-disjoint variable sets.
///
/// Gates with a zero factor are dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Depth4Formula {
    field: Field,
    n: usize,
    gates: Vec<Vec<SparseMultilinearPoly>>,
}

impl Depth4Formula {
    pub fn new(field: Field, n: usize, gates: Vec<Vec<SparseMultilinearPoly>>) -> Result<Self> {
        let mut kept = Vec::with_capacity(gates.len());
        for (g, gate) in gates.into_iter().enumerate() {
            if gate.is_empty() {
                return Err(Error::Multilinearity {
                    gate: g,
                    detail: "product gate has no factors".into(),
                });
            }
            let mut normalized = Vec::with_capacity(gate.len());
            for factor in gate {
                field.ensure_same(&factor.field())?;
                normalized.push(if factor.n() == n {
                    factor
                } else {
                    factor.with_n(n)?
                });
            }
            check_disjoint_sets(g, normalized.iter().map(|p| p.var_set()))?;
            if normalized.iter().any(SparseMultilinearPoly::is_zero) {
                continue;
            }
            kept.push(normalized);
        }
        Ok(Self {
            field,
            n,
            gates: kept,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Vec<SparseMultilinearPoly>] {
        &self.gates
    }

    pub fn top_fanin(&self) -> usize {
        self.gates.len()
    }

    /// Size measure |Φ|: total sparsity of the bottom factors, where a
    /// factor that is exactly a bare variable `x_i` costs nothing (it is an
    /// input wired straight into its product gate).
    pub fn size(&self) -> usize {
        self.gates
            .iter()
            .flatten()
            .filter(|p| p.as_bare_var().is_none())
            .map(SparseMultilinearPoly::sparsity)
            .sum()
    }

    /// Largest factor sparsity `s` and largest per-gate count `k` of
    /// factors on more than one variable.
    pub fn sparsity_profile(&self) -> (usize, usize) {
        let s = self
            .gates
            .iter()
            .flatten()
            .map(SparseMultilinearPoly::sparsity)
            .max()
            .unwrap_or(0);
        let k = self
            .gates
            .iter()
            .map(|g| g.iter().filter(|p| p.var_set().len() > 1).count())
            .max()
            .unwrap_or(0);
        (s, k)
    }

    /// Distance from the (M, τ)-restricted class: total sparsity of the
    /// factors on more than `tau` variables.
    pub fn delta_far(&self, tau: usize) -> usize {
        self.gates
            .iter()
            .flatten()
            .filter(|p| p.var_set().len() > tau)
            .map(SparseMultilinearPoly::sparsity)
            .sum()
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.field, n, self.gates.clone())
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        let f = &self.field;
        let mut acc = 0;
        for gate in &self.gates {
            let mut prod = 1;
            for factor in gate {
                prod = f.mul(prod, factor.eval(point)?);
            }
            acc = f.add(acc, prod);
        }
        if self.gates.is_empty() && point.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: point.len(),
            });
        }
        Ok(acc)
    }

    /// The polynomial computed, expanded with at most `cap` terms in any
    /// intermediate product.
    pub fn expand(&self, cap: usize) -> Result<SparseMultilinearPoly> {
        let mut total = SparseMultilinearPoly::zero(self.field, self.n);
        for gate in &self.gates {
            let mut prod = SparseMultilinearPoly::constant(self.field, self.n, 1);
            for factor in gate {
                prod = prod.mul_capped(factor, cap)?;
            }
            total = total.add(&prod)?;
            if total.sparsity() > cap {
                return Err(Error::TermCap { cap });
            }
        }
        Ok(total)
    }

    /// A formula for `∂_A f |_{B=0}` with top fan-in at most that of `self`.
    pub fn derive_restrict(&self, a: &[usize], b: &[usize]) -> Result<Self> {
        check_disjoint_index_sets(a, b, self.n)?;
        let mut gates = Vec::new();
        for gate in &self.gates {
            let mut covered = 0;
            let mut new_gate = Vec::with_capacity(gate.len());
            for factor in gate {
                let vars = factor.var_set();
                let local: Vec<usize> = a.iter().copied().filter(|x| vars.contains(x)).collect();
                covered += local.len();
                new_gate.push(factor.derivative(&local).zero_out(b));
            }
            if covered == a.len() {
                gates.push(new_gate);
            }
        }
        Self::new(self.field, self.n, gates)
    }
}

impl fmt::Display for Depth4Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# class: d4")?;
        writeln!(f, "# n: {}", self.n)?;
        if self.gates.is_empty() {
            return writeln!(f, "(0)");
        }
        for (i, gate) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            for (j, factor) in gate.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "({factor})")?;
            }
        }
        writeln!(f)
    }
}
