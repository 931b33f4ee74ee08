use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{make_simple, Depth3Formula, Depth4Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Derive,
    Restrict,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Derive => "derive",
            Action::Restrict => "restrict",
        })
    }
}

/// One elimination step: the variable chosen, what was done with it, and
/// the progress measure (bad-form count for depth 3, Δ for depth 4)
/// before and after.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub var: usize,
    pub action: Action,
    pub before: usize,
    pub after: usize,
    /// Σ_{g∈F_x} ‖g|_{x=0}‖ and Σ_{g∈F_x} ‖∂_x g‖ (depth 4 only).
    pub split: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReductionTrace {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub steps: Vec<Step>,
    /// Whether every step was checked against the expanded polynomial.
    /// When an expansion exceeds the term cap the procedure runs on
    /// syntactic variable sets only and this is `false`.
    pub certified: bool,
    pub notes: Vec<String>,
}

impl ReductionTrace {
    /// Measures along the trace: the initial value, then the value after
    /// each step.
    pub fn measures(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.steps.first().map(|s| s.before).into_iter().collect();
        out.extend(self.steps.iter().map(|s| s.after));
        out
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: &[usize]| {
            v.iter()
                .map(|x| format!("x{}", x + 1))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(f, "A = {{{}}}", names(&self.a))?;
        writeln!(f, "B = {{{}}}", names(&self.b))?;
        writeln!(f, "certified = {}", self.certified)?;
        for (i, s) in self.steps.iter().enumerate() {
            write!(
                f,
                "step {}: {} x{}  measure {} -> {}",
                i + 1,
                s.action,
                s.var + 1,
                s.before,
                s.after
            )?;
            if let Some((zero, der)) = s.split {
                write!(f, "  (restricted {zero}, derived {der})")?;
            }
            writeln!(f)?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Depth3Reduction {
    pub formula: Depth3Formula,
    pub trace: ReductionTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Depth4Reduction {
    pub formula: Depth4Formula,
    pub trace: ReductionTrace,
    /// Size |Φ| of the simple formula the procedure started from.
    pub simple_size: usize,
    /// Δ of the simple formula the procedure started from.
    pub initial_delta: usize,
}

fn var_set_d3(phi: &Depth3Formula, cap: usize) -> (BTreeSet<usize>, bool, bool) {
    match phi.expand(cap) {
        Ok(f) => (f.var_set(), true, f.is_zero()),
        Err(_) => (
            phi.gates()
                .iter()
                .flatten()
                .flat_map(|l| l.support())
                .collect(),
            false,
            false,
        ),
    }
}

fn bad_forms(phi: &Depth3Formula, vars: &BTreeSet<usize>, tau: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (g, gate) in phi.gates().iter().enumerate() {
        for (j, l) in gate.iter().enumerate() {
            if l.support().filter(|x| vars.contains(x)).count() as f64 > tau {
                out.push((g, j));
            }
        }
    }
    out
}

/// Derives variables of a depth-3 formula until no linear form meets
/// `var(f)` in more than `tau` variables.
///
/// Each step picks the variable of `var(f)` lying in the most bad forms
/// (lowest index on ties) and replaces every form containing it by its
/// coefficient. The result computes `∂_A f` with `A = trace.a`.
pub fn reduce_depth3(phi: &Depth3Formula, tau: f64, cap: usize) -> Result<Depth3Reduction> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    let mut trace = ReductionTrace {
        certified: true,
        ..ReductionTrace::default()
    };
    let mut current = phi.clone();
    let mut a: Vec<usize> = Vec::new();
    loop {
        let (vars, certified, zero) = var_set_d3(&current, cap);
        if zero {
            return Err(Error::ZeroPolynomial(if a.is_empty() {
                "support reduction needs a nonzero input".into()
            } else {
                "a derivative vanished, which the reduction must never produce".into()
            }));
        }
        if !certified && trace.certified {
            trace.certified = false;
            trace.notes.push(
                "expansion exceeded the term cap; var(f) is the union of form supports".into(),
            );
        }
        let bad = bad_forms(&current, &vars, tau);
        if bad.is_empty() {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        for &x in &vars {
            let count = bad
                .iter()
                .filter(|&&(g, j)| current.gates()[g][j].contains(x))
                .count();
            if count > 0 && best.map_or(true, |(_, c)| count > c) {
                best = Some((x, count));
            }
        }
        let (x, _) = best.ok_or_else(|| Error::Internal("bad forms without variables".into()))?;
        a.push(x);
        a.sort_unstable();
        let next = phi.derive_restrict(&a, &[])?;
        let (next_vars, _, _) = var_set_d3(&next, cap);
        let after = bad_forms(&next, &next_vars, tau).len();
        trace.steps.push(Step {
            var: x,
            action: Action::Derive,
            before: bad.len(),
            after,
            split: None,
        });
        current = next;
    }
    trace.a = a;
    Ok(Depth3Reduction {
        formula: current,
        trace,
    })
}

/// Zeroes every variable of the formula that does not occur in the
/// polynomial it computes; the polynomial is unchanged.
fn clean(phi: &Depth4Formula, f_vars: &BTreeSet<usize>) -> Result<Depth4Formula> {
    let absent: Vec<usize> = phi
        .gates()
        .iter()
        .flatten()
        .flat_map(|p| p.var_set())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|x| !f_vars.contains(x))
        .collect();
    if absent.is_empty() {
        return Ok(phi.clone());
    }
    phi.derive_restrict(&[], &absent)
}

struct Normalized {
    formula: Depth4Formula,
    var_star: Option<BTreeSet<usize>>,
}

fn normalize(phi: &Depth4Formula, cap: usize) -> Result<Normalized> {
    let simple = make_simple(phi, cap)?;
    match simple.expand(cap) {
        Ok(f) => {
            if f.is_zero() {
                return Err(Error::ZeroPolynomial(
                    "support reduction needs a nonzero input".into(),
                ));
            }
            Ok(Normalized {
                formula: clean(&simple, &f.var_set())?,
                var_star: Some(f.var_star()),
            })
        }
        Err(_) => Ok(Normalized {
            formula: simple,
            var_star: None,
        }),
    }
}

/// Derives or zeroes variables of a depth-4 formula until every bottom
/// factor has at most `tau` variables.
///
/// The formula is made simple (and variables absent from the polynomial
/// are zeroed) before every step. Each step picks the variable maximizing
/// `Σ_{g∈F_x} ‖g‖` over the bad factors `F_x` containing it (lowest index
/// on ties) and derives when `Σ_{g∈F_x} ‖g|_{x=0}‖ > Δτ/2n`, otherwise
/// zeroes it. The result computes `∂_A f|_{B=0}`.
pub fn reduce_depth4(phi: &Depth4Formula, tau: usize, cap: usize) -> Result<Depth4Reduction> {
    if tau == 0 {
        return Err(Error::Parameter("tau must be at least 1".into()));
    }
    let n = phi.n().max(1) as f64;
    let mut trace = ReductionTrace {
        certified: true,
        ..ReductionTrace::default()
    };
    let start = normalize(phi, cap)?;
    let simple_size = start.formula.size();
    let initial_delta = start.formula.delta_far(tau);
    let mut current = start;
    let (mut a, mut b): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    loop {
        if current.var_star.is_none() && trace.certified {
            trace.certified = false;
            trace
                .notes
                .push("expansion exceeded the term cap; steps are not certified".into());
        }
        let phi_k = &current.formula;
        let delta = phi_k.delta_far(tau);
        if delta == 0 {
            break;
        }
        let bad: Vec<_> = phi_k
            .gates()
            .iter()
            .flatten()
            .filter(|p| p.var_set().len() > tau)
            .collect();
        let candidates: BTreeSet<usize> = bad.iter().flat_map(|p| p.var_set()).collect();
        let mut best: Option<(usize, usize)> = None;
        for &x in &candidates {
            let weight: usize = bad
                .iter()
                .filter(|p| p.var_set().contains(&x))
                .map(|p| p.sparsity())
                .sum();
            if best.map_or(true, |(_, w)| weight > w) {
                best = Some((x, weight));
            }
        }
        let (x, _) = best.ok_or_else(|| Error::Internal("bad factors without variables".into()))?;
        if let Some(star) = &current.var_star {
            if !star.contains(&x) {
                return Err(Error::Internal(format!(
                    "x{} lies in a bad factor but not in var*(f); the formula is not simple",
                    x + 1
                )));
            }
        }
        let (zero_part, der_part) =
            bad.iter()
                .filter(|p| p.var_set().contains(&x))
                .fold((0, 0), |(z, d), p| {
                    (
                        z + p.zero_out(&[x]).sparsity(),
                        d + p.derivative(&[x]).sparsity(),
                    )
                });
        let action = if zero_part as f64 > delta as f64 * tau as f64 / (2.0 * n) {
            Action::Derive
        } else {
            Action::Restrict
        };
        let next = match action {
            Action::Derive => {
                a.push(x);
                phi_k.derive_restrict(&[x], &[])?
            }
            Action::Restrict => {
                b.push(x);
                phi_k.derive_restrict(&[], &[x])?
            }
        };
        current = normalize(&next, cap).map_err(|e| match e {
            Error::ZeroPolynomial(_) => Error::Internal(format!(
                "{action} on x{} produced the zero polynomial",
                x + 1
            )),
            other => other,
        })?;
        trace.steps.push(Step {
            var: x,
            action,
            before: delta,
            after: current.formula.delta_far(tau),
            split: Some((zero_part, der_part)),
        });
        if trace.steps.len() > phi.n() {
            return Err(Error::Internal(
                "reduction did not terminate within n steps".into(),
            ));
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    trace.a = a;
    trace.b = b;
    Ok(Depth4Reduction {
        formula: current.formula,
        trace,
        simple_size,
        initial_delta,
    })
}

/// Bound `(2n/τ)·log₂|Φ|` on `|A ⊔ B|`, with `|Φ|` floored at 2 so that a
/// formula with a single bad monomial still allows its one step.
pub fn depth4_step_bound(n: usize, tau: usize, size: usize) -> f64 {
    2.0 * n as f64 / tau as f64 * (size.max(2) as f64).log2()
}
