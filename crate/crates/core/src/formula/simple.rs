use std::collections::BTreeSet;

use super::Depth4Formula;
use crate::algebra::SparseMultilinearPoly;
use crate::error::Result;

/// Variables dividing the polynomial computed by `phi`.
///
/// Uses the expansion when it fits within `cap` terms (the boolean is then
/// `true`); otherwise falls back to the syntactic sufficient condition that
/// every gate has a factor divisible by the variable.
pub fn dividing_variables(phi: &Depth4Formula, cap: usize) -> (BTreeSet<usize>, bool) {
    match phi.expand(cap) {
        Ok(f) => {
            let star = f.var_star();
            (f.var_set().difference(&star).copied().collect(), true)
        }
        Err(_) => {
            let mut out = BTreeSet::new();
            let candidates: BTreeSet<usize> = phi
                .gates()
                .iter()
                .flatten()
                .flat_map(|p| p.var_set())
                .collect();
            for x in candidates {
                if !phi.gates().is_empty()
                    && phi
                        .gates()
                        .iter()
                        .all(|g| g.iter().any(|p| p.divisible_by(x)))
                {
                    out.insert(x);
                }
            }
            (out, false)
        }
    }
}

/// Whether every gate carries each variable of `dividing` as a standalone
/// factor `x`.
pub fn is_simple(phi: &Depth4Formula, dividing: &BTreeSet<usize>) -> bool {
    dividing.iter().all(|&x| {
        phi.gates()
            .iter()
            .all(|g| g.iter().any(|p| p.as_bare_var() == Some(x)))
    })
}

/// An equivalent simple formula of no larger size.
///
/// For each variable `x` dividing the output polynomial (in increasing
/// index order), the factor of each gate that mentions `x` is replaced by
/// the bare factor `x` followed by its derivative `∂_x f_{i,j}`; gates that
/// do not mention `x` contribute nothing and are dropped.
pub fn make_simple(phi: &Depth4Formula, cap: usize) -> Result<Depth4Formula> {
    let (dividing, _) = dividing_variables(phi, cap);
    let mut current = phi.clone();
    for x in dividing {
        let field = current.field();
        let n = current.n();
        let mut gates = Vec::with_capacity(current.top_fanin());
        for gate in current.gates() {
            let Some(j) = gate.iter().position(|p| p.var_set().contains(&x)) else {
                continue;
            };
            let g = gate[j].derivative(&[x]);
            let mut new_gate = Vec::with_capacity(gate.len() + 1);
            new_gate.extend_from_slice(&gate[..j]);
            new_gate.push(SparseMultilinearPoly::var(field, n, x)?);
            if g.as_constant() != Some(1) {
                new_gate.push(g);
            }
            new_gate.extend_from_slice(&gate[j + 1..]);
            gates.push(new_gate);
        }
        current = Depth4Formula::new(field, n, gates)?;
    }
    Ok(current)
}
