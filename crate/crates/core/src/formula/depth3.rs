use std::collections::BTreeSet;
use std::fmt;

use super::{check_disjoint_sets, Depth4Formula, LinearForm};
use crate::algebra::{Field, SparseMultilinearPoly};
use crate::error::{Error, Result};

/// A multilinear ΣΠΣ formula `Σ_i Π_j ℓ_{i,j}`.
///
/// Within a gate the linear forms have pairwise-disjoint supports. Gates
/// containing an identically-zero form are dropped on construction, so an
/// empty gate list is the canonical zero formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Depth3Formula {
    field: Field,
    n: usize,
    gates: Vec<Vec<LinearForm>>,
}

impl Depth3Formula {
    pub fn new(field: Field, n: usize, gates: Vec<Vec<LinearForm>>) -> Result<Self> {
        let mut kept = Vec::with_capacity(gates.len());
        for (g, gate) in gates.into_iter().enumerate() {
            if gate.is_empty() {
                return Err(Error::Multilinearity {
                    gate: g,
                    detail: "product gate has no factors".into(),
                });
            }
            for form in &gate {
                if let Some(v) = form.max_var() {
                    if v >= n {
                        return Err(Error::VariableOutOfRange { index: v, n });
                    }
                }
            }
            check_disjoint_sets(g, gate.iter().map(|l| l.support().collect::<BTreeSet<_>>()))?;
            if gate.iter().any(LinearForm::is_zero) {
                continue;
            }
            kept.push(gate);
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

    pub fn gates(&self) -> &[Vec<LinearForm>] {
        &self.gates
    }

    /// Top fan-in M.
    pub fn top_fanin(&self) -> usize {
        self.gates.len()
    }

    /// Size measure |Φ|: total sparsity of all forms that are not a bare
    /// variable `x_i`.
    pub fn size(&self) -> usize {
        self.gates
            .iter()
            .flatten()
            .filter(|l| {
                !(l.constant() == 0 && l.support_len() == 1 && l.coeffs().all(|(_, c)| c == 1))
            })
            .map(LinearForm::sparsity)
            .sum()
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.field, n, self.gates.clone())
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: point.len(),
            });
        }
        let f = &self.field;
        Ok(self.gates.iter().fold(0, |acc, gate| {
            let prod = gate.iter().fold(1, |p, l| f.mul(p, l.eval(f, point)));
            f.add(acc, prod)
        }))
    }

    pub fn expand(&self, cap: usize) -> Result<SparseMultilinearPoly> {
        self.to_depth4()?.expand(cap)
    }

    pub fn to_depth4(&self) -> Result<Depth4Formula> {
        let gates = self
            .gates
            .iter()
            .map(|gate| {
                gate.iter()
                    .map(|l| l.to_poly(self.field, self.n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Depth4Formula::new(self.field, self.n, gates)
    }

    /// A formula for `∂_A f |_{B=0}`.
    ///
    /// Each form containing a variable of `A` is replaced by that variable's
    /// coefficient; gates that miss a variable of `A` (or contain a form with
    /// two of them) vanish. Variables of `B` are then zeroed inside the forms.
    pub fn derive_restrict(&self, a: &[usize], b: &[usize]) -> Result<Self> {
        check_disjoint_index_sets(a, b, self.n)?;
        let mut gates = Vec::new();
        'gate: for gate in &self.gates {
            let mut seen = 0;
            let mut new_gate = Vec::with_capacity(gate.len());
            for form in gate {
                let hits: Vec<usize> = a.iter().copied().filter(|&x| form.contains(x)).collect();
                match hits.len() {
                    0 => new_gate.push(form.zero_out(b)),
                    1 => {
                        seen += 1;
                        new_gate.push(LinearForm::constant_form(self.field, form.coeff(hits[0])));
                    }
                    _ => continue 'gate,
                }
            }
            if seen == a.len() {
                gates.push(new_gate);
            }
        }
        Self::new(self.field, self.n, gates)
    }
}

pub(crate) fn check_disjoint_index_sets(a: &[usize], b: &[usize], n: usize) -> Result<()> {
    for &i in a.iter().chain(b) {
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, n });
        }
    }
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::Precondition(format!(
            "derived and zeroed sets overlap at x{}",
            x + 1
        )));
    }
    Ok(())
}

impl fmt::Display for Depth3Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# class: d3")?;
        writeln!(f, "# n: {}", self.n)?;
        if self.gates.is_empty() {
            return writeln!(f, "(0)");
        }
        for (i, gate) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            for (j, form) in gate.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "(")?;
                form.write(&self.field, f)?;
                write!(f, ")")?;
            }
        }
        writeln!(f)
    }
}
