use crate::algebra::SparseMultilinearPoly;
use crate::error::{Error, Result};
use crate::formula::{Depth4Formula, RegularFormula, RegularNode};

/// Expands the top `levels` sum-product layers below a sum node into a sum
/// of products of the sum nodes `2·levels` layers further down.
fn flatten(node: &RegularNode, levels: usize) -> Vec<Vec<&RegularNode>> {
    if levels == 0 {
        return vec![vec![node]];
    }
    let mut out = Vec::new();
    for product in node.children() {
        let mut acc: Vec<Vec<&RegularNode>> = vec![Vec::new()];
        for sum in product.children() {
            let options = flatten(sum, levels - 1);
            acc = acc
                .iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut g = prefix.clone();
                        g.extend(o.iter().copied());
                        g
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
    out
}

/// Number of gates `∏_{i≤levels} a_i^{π_{i−1}}` produced by `flatten`, as
/// a base-2 logarithm.
fn log2_gate_count(profile: &[usize], levels: usize) -> f64 {
    let mut log = 0.0;
    let mut pi = 1.0;
    for i in 0..levels {
        log += pi * (profile[2 * i] as f64).log2();
        pi *= profile[2 * i + 1] as f64;
    }
    log
}

fn check_gate_budget(profile: &[usize], levels: usize, cap: usize) -> Result<()> {
    let log = log2_gate_count(profile, levels);
    if log > (cap as f64).log2() {
        return Err(Error::Budget {
            what: "gates after opening the top layers".into(),
            needed: log.exp2(),
            budget: cap as f64,
        });
    }
    Ok(())
}

/// Opens the top two layers of a formula with profile
/// `(a_1, p_1, a_2, p_2, a_3)`, giving an equivalent formula with profile
/// `(a_1·a_2^{p_1}, p_1·p_2, a_3)`.
pub fn squeeze(psi: &RegularFormula, cap: usize) -> Result<RegularFormula> {
    let profile = psi.profile();
    if profile.len() != 5 {
        return Err(Error::Precondition(format!(
            "squeezing needs a profile with 5 entries, got {}",
            profile.len()
        )));
    }
    check_gate_budget(profile, 2, cap)?;
    let gates = flatten(psi.root(), 2)
        .into_iter()
        .map(|g| RegularNode::Product(g.into_iter().cloned().collect()))
        .collect();
    RegularFormula::new(psi.field(), psi.n(), RegularNode::Sum(gates))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReducedCase {
    /// Formal degree at most `n^{1−(1/c)^d}`: the whole polynomial as one
    /// factor.
    SmallDegree,
    /// `p_1 > n^{(1/c)^d}`: one gate per top product, each factor a
    /// layer-2 subformula expanded.
    LargeP1,
    /// The top `t+1` layers opened.
    Split { t: usize, alpha: f64 },
}

impl ReducedCase {
    pub fn tag(&self) -> &'static str {
        match self {
            ReducedCase::SmallDegree => "small-degree",
            ReducedCase::LargeP1 => "large-p1",
            ReducedCase::Split { .. } => "split",
        }
    }
}

/// A depth-4 formula computing the same polynomial as a regular formula,
/// together with the bookkeeping of the case that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Depth4Reduced {
    pub case: ReducedCase,
    pub formula: Depth4Formula,
    /// Size S of the source formula.
    pub source_size: usize,
    /// log₂ of the top fan-in bound M.
    pub log2_top_fanin: f64,
    /// Whether `M ≤ S^{n^α}` holds (always true outside the split case).
    pub fanin_within_bound: bool,
}

fn expand_all(
    nodes: &[&RegularNode],
    psi: &RegularFormula,
    cap: usize,
) -> Result<Vec<SparseMultilinearPoly>> {
    nodes
        .iter()
        .map(|node| node.expand(psi.field(), psi.n(), cap))
        .collect()
}

/// Rewrites a regular formula of depth `d ≥ 2` as a depth-4 formula,
/// choosing the case from the product fan-ins `p_i` against `n` and `c`.
pub fn regular_to_depth4(psi: &RegularFormula, c: f64, cap: usize) -> Result<Depth4Reduced> {
    let d = psi.depth();
    if d < 2 {
        return Err(Error::Precondition(format!("needs depth d ≥ 2, got {d}")));
    }
    if c.is_nan() || c < 3.0 {
        return Err(Error::Precondition(format!("needs c ≥ 3, got {c}")));
    }
    let profile = psi.profile();
    let n = psi.n().max(2) as f64;
    let p = |i: usize| profile[2 * i - 1] as f64;
    let threshold = |e: f64| n.powf(c.recip().powi(e as i32));
    let field = psi.field();
    let s = psi.size();
    let log2_s = (s as f64).log2();

    if psi.formal_degree() as f64 <= n.powf(1.0 - c.recip().powi(d as i32)) {
        let f = psi.expand(cap)?;
        let formula = Depth4Formula::new(field, psi.n(), vec![vec![f]])?;
        return Ok(Depth4Reduced {
            case: ReducedCase::SmallDegree,
            formula,
            source_size: s,
            log2_top_fanin: log2_s,
            fanin_within_bound: true,
        });
    }
    if p(1) > threshold(d as f64) {
        let gates = flatten(psi.root(), 1)
            .into_iter()
            .map(|g| expand_all(&g, psi, cap))
            .collect::<Result<Vec<_>>>()?;
        let formula = Depth4Formula::new(field, psi.n(), gates)?;
        return Ok(Depth4Reduced {
            case: ReducedCase::LargeP1,
            formula,
            source_size: s,
            log2_top_fanin: (profile[0] as f64).log2(),
            fanin_within_bound: true,
        });
    }
    let u = (2..=d)
        .find(|&u| p(u) > threshold((d + 1 - u) as f64))
        .ok_or_else(|| {
            Error::Internal(
                "no layer separates the product fan-ins; the degree bound is wrong".into(),
            )
        })?;
    let t = u - 1;
    let alpha = c.recip().powi((d - t) as i32) / (c - 1.0);
    let levels = t + 1;
    check_gate_budget(profile, levels, cap)?;
    let log2_m = log2_gate_count(profile, levels);
    let gates = flatten(psi.root(), levels)
        .into_iter()
        .map(|g| expand_all(&g, psi, cap))
        .collect::<Result<Vec<_>>>()?;
    let formula = Depth4Formula::new(field, psi.n(), gates)?;
    Ok(Depth4Reduced {
        case: ReducedCase::Split { t, alpha },
        formula,
        source_size: s,
        log2_top_fanin: log2_m,
        fanin_within_bound: log2_m <= n.powf(alpha) * log2_s + 1e-9,
    })
}
