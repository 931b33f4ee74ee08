//! Exhaustive PIT over small grids and seeded random formula generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::{Error, Result};
use crate::formula::{
    parse, Depth3Formula, Depth4Formula, Formula, FormulaClass, LinearForm, RegularFormula,
    RegularNode,
};
use crate::hashing::{HashFn, PartitionFamily};
use crate::hitting::{PitOutcome, Verdict};

/// Default cap on grid evaluations.
pub const DEFAULT_GRID_BUDGET: usize = 1 << 24;

fn grid_point(mut index: usize, n: usize, base: usize) -> Vec<u64> {
    let mut p = vec![0u64; n];
    for slot in p.iter_mut().rev() {
        *slot = (index % base) as u64;
        index /= base;
    }
    p
}

/// Exact PIT for polynomials of individual degree at most `d`: evaluates
/// `f` on all of `{0, …, d}^n` and reports the lexicographically first
/// nonzero point.
pub fn grid_pit<F>(f: F, n: usize, d: usize, budget: usize) -> Result<PitOutcome>
where
    F: Fn(&[u64]) -> Result<u64> + Sync,
{
    let base = d + 1;
    let total = (base as f64).powi(n as i32);
    if total > budget as f64 {
        return Err(Error::Budget {
            what: format!("grid {{0..{d}}}^{n}"),
            needed: total,
            budget: budget as f64,
        });
    }
    let total = total as usize;
    let hit = (0..total)
        .into_par_iter()
        .by_exponential_blocks()
        .find_first(|&i| !matches!(f(&grid_point(i, n, base)), Ok(0)));
    match hit {
        None => Ok(PitOutcome {
            verdict: Verdict::ZeroOnH,
            evals: total,
        }),
        Some(i) => {
            let witness = grid_point(i, n, base);
            let value = f(&witness)?;
            Ok(PitOutcome {
                verdict: Verdict::Nonzero { witness, value },
                evals: i + 1,
            })
        }
    }
}

/// Shape of randomly generated formulas.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    /// ΣΠΣ with top fan-in in `1..=top_fanin`.
    Depth3 { n: usize, top_fanin: usize },
    /// ΣΠΣΠ with top fan-in in `1..=top_fanin` and bottom factors with at
    /// most `max_sparsity` monomials on at most `max_factor_vars`
    /// variables.
    Depth4 {
        n: usize,
        top_fanin: usize,
        max_sparsity: usize,
        max_factor_vars: usize,
    },
    /// A complete regular formula with the given fan-in profile.
    Regular { n: usize, profile: Vec<usize> },
}

impl GenSpec {
    pub fn n(&self) -> usize {
        match self {
            GenSpec::Depth3 { n, .. } | GenSpec::Depth4 { n, .. } | GenSpec::Regular { n, .. } => {
                *n
            }
        }
    }

    pub fn class(&self) -> FormulaClass {
        match self {
            GenSpec::Depth3 { .. } => FormulaClass::Depth3,
            GenSpec::Depth4 { .. } => FormulaClass::Depth4,
            GenSpec::Regular { .. } => FormulaClass::Regular,
        }
    }
}

fn small_coeff(field: &Field, rng: &mut ChaCha8Rng) -> u64 {
    let v: i128 = rng.gen_range(1..=4);
    if rng.gen_bool(0.3) {
        field.from_i128(-v)
    } else {
        field.from_i128(v)
    }
}

/// Splits a random subset of `vars` into at most `parts` disjoint blocks.
fn random_blocks(vars: &[usize], parts: usize, keep: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); parts];
    for &v in vars {
        if rng.gen_bool(keep) {
            blocks[rng.gen_range(0..parts)].push(v);
        }
    }
    blocks
}

fn gen_depth3_gate(field: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<LinearForm> {
    let all: Vec<usize> = (0..n).collect();
    let parts = rng.gen_range(1..=n.clamp(1, 3));
    random_blocks(&all, parts, 0.8, rng)
        .into_iter()
        .map(|block| {
            let coeffs: Vec<(usize, u64)> = block
                .iter()
                .map(|&v| (v, small_coeff(field, rng)))
                .collect();
            let constant = if coeffs.is_empty() || rng.gen_bool(0.5) {
                small_coeff(field, rng)
            } else {
                0
            };
            LinearForm::new(*field, coeffs, constant)
        })
        .collect()
}

fn gen_sparse(
    field: &Field,
    n: usize,
    vars: &[usize],
    max_sparsity: usize,
    rng: &mut ChaCha8Rng,
) -> SparseMultilinearPoly {
    let target = rng.gen_range(1..=max_sparsity.max(1));
    let mut terms = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..4 * target {
        if terms.len() == target {
            break;
        }
        let m =
            Monomial::new(vars.iter().copied().filter(|_| rng.gen_bool(0.5))).expect("distinct");
        if seen.insert(m.clone()) {
            terms.push((m, small_coeff(field, rng)));
        }
    }
    SparseMultilinearPoly::from_terms(*field, n, terms).expect("in range")
}

fn gen_depth4_gate(
    field: &Field,
    n: usize,
    max_sparsity: usize,
    max_factor_vars: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SparseMultilinearPoly> {
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let parts = rng.gen_range(1..=n.clamp(1, 3));
    random_blocks(&vars, parts, 0.8, rng)
        .into_iter()
        .map(|mut block| {
            block.truncate(max_factor_vars.max(1));
            block.sort_unstable();
            gen_sparse(field, n, &block, max_sparsity, rng)
        })
        .filter(|p| !p.is_zero())
        .collect()
}

fn gen_regular_node(
    field: &Field,
    profile: &[usize],
    vars: &[usize],
    rng: &mut ChaCha8Rng,
) -> RegularNode {
    let (a, rest) = (profile[0], &profile[1..]);
    let children = (0..a)
        .map(|_| {
            if rest.is_empty() {
                let var = if !vars.is_empty() && rng.gen_bool(0.85) {
                    Some(vars[rng.gen_range(0..vars.len())])
                } else {
                    None
                };
                RegularNode::leaf(*field, var, small_coeff(field, rng))
            } else {
                let blocks = random_blocks(vars, rest[0], 0.9, rng);
                RegularNode::Product(
                    blocks
                        .iter()
                        .map(|b| gen_regular_node(field, &rest[1..], b, rng))
                        .collect(),
                )
            }
        })
        .collect();
    RegularNode::Sum(children)
}

/// A random multilinear formula of the requested shape, determined by
/// `seed`.
pub fn gen_formula(field: Field, spec: &GenSpec, seed: u64) -> Result<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GenSpec::Depth3 { n, top_fanin } => {
            let m = rng.gen_range(1..=(*top_fanin).max(1));
            let gates = (0..m)
                .map(|_| gen_depth3_gate(&field, *n, &mut rng))
                .collect();
            Ok(Depth3Formula::new(field, *n, gates)?.into())
        }
        GenSpec::Depth4 {
            n,
            top_fanin,
            max_sparsity,
            max_factor_vars,
        } => {
            let m = rng.gen_range(1..=(*top_fanin).max(1));
            let gates = (0..m)
                .map(|_| gen_depth4_gate(&field, *n, *max_sparsity, *max_factor_vars, &mut rng))
                .filter(|g| !g.is_empty())
                .collect();
            Ok(Depth4Formula::new(field, *n, gates)?.into())
        }
        GenSpec::Regular { n, profile } => {
            if profile.len() < 3 || profile.len() % 2 == 0 || profile.contains(&0) {
                return Err(Error::Parameter(format!(
                    "a regular profile needs an odd length of at least 3 and positive entries, got {profile:?}"
                )));
            }
            let vars: Vec<usize> = (0..*n).collect();
            let root = gen_regular_node(&field, profile, &vars, &mut rng);
            Ok(RegularFormula::new(field, *n, root)?.into())
        }
    }
}

/// `node` with its polynomial negated: the first factor of every product
/// is negated, down to the leaves.
fn negate(field: &Field, node: &RegularNode) -> RegularNode {
    match node {
        RegularNode::Leaf { var, coeff } => RegularNode::Leaf {
            var: *var,
            coeff: field.neg(*coeff),
        },
        RegularNode::Sum(c) => RegularNode::Sum(c.iter().map(|ch| negate(field, ch)).collect()),
        RegularNode::Product(c) => {
            let mut c = c.clone();
            if let Some(first) = c.first_mut() {
                *first = negate(field, first);
            }
            RegularNode::Product(c)
        }
    }
}

/// A regular formula computing zero: its top sum pairs every product
/// with its negation. Needs `profile[0]` to be even.
pub fn regular_cancelling(
    field: Field,
    n: usize,
    profile: &[usize],
    seed: u64,
) -> Result<RegularFormula> {
    if profile[0] % 2 != 0 {
        return Err(Error::Parameter(
            "top fan-in must be even to pair products".into(),
        ));
    }
    let mut half = profile.to_vec();
    half[0] /= 2;
    let base = gen_formula(field, &GenSpec::Regular { n, profile: half }, seed)?;
    let root = base.as_regular()?.root();
    let mut children = Vec::new();
    for ch in root.children() {
        children.push(ch.clone());
        let RegularNode::Product(factors) = ch else {
            unreachable!("regular layer 2 is a product layer")
        };
        let mut factors = factors.clone();
        factors[0] = negate(&field, &factors[0]);
        children.push(RegularNode::Product(factors));
    }
    RegularFormula::new(field, n, RegularNode::Sum(children))
}

/// Hand-written formulas that stress specific code paths: cancellation
/// across gates, variables dividing the polynomial, and wide linear forms.
pub fn adversarial(field: Field, class: FormulaClass, n: usize) -> Result<Vec<Formula>> {
    let wide: String = (1..=n)
        .map(|i| format!("x{i}"))
        .collect::<Vec<_>>()
        .join(" + ");
    let header = format!("# class: {}\n# n: {n}\n", class.tag());
    let texts: Vec<(usize, String)> = match class {
        FormulaClass::Depth3 => vec![
            (3, "(x1 + x2)*(x3) + (-1*x1 + -1*x2)*(x3)".into()),
            (1, format!("({wide})")),
            (1, format!("({wide} + 1)*(2) + (x1 + 5)")),
            (3, "(x1 + x2)*(x3) + (x3)*(x2 + 3)".into()),
        ],
        FormulaClass::Depth4 => vec![
            (4, "(x1*x2 + x3)*(x4) + (-1*x1*x2 + -1*x3)*(x4)".into()),
            (5, "(x1*x2 + x3)*(x4) + (x5)*(x4)".into()),
            (5, "(x1*x2*x3 + 1)*(x4*x5) + (x1*x4 + 2)".into()),
            (1, format!("({wide})*(1 + 1)")),
        ],
        FormulaClass::Regular => {
            let zero = regular_cancelling(field, n, &[2, 2, 2, 2, 1], 7)?;
            return Ok(vec![zero.into()]);
        }
    };
    texts
        .iter()
        .filter(|(min_n, _)| n >= *min_n)
        .map(|(_, t)| parse(field, &format!("{header}{t}")))
        .collect()
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub formula: Formula,
    pub expansion: SparseMultilinearPoly,
    pub is_zero: bool,
    pub seed: Option<u64>,
}

/// A reproducible collection of formulas with their expansions.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub seed: u64,
    pub spec: GenSpec,
    pub items: Vec<CorpusItem>,
}

impl Corpus {
    /// `count` generated formulas (item `i` uses seed `seed + i`), plus the
    /// adversarial items for the class when `with_adversarial` is set.
    pub fn generate(
        field: Field,
        spec: GenSpec,
        seed: u64,
        count: usize,
        with_adversarial: bool,
        cap: usize,
    ) -> Result<Self> {
        let mut items: Vec<CorpusItem> = (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i);
                let formula = gen_formula(field, &spec, s)?;
                let expansion = formula.expand(cap)?;
                Ok(CorpusItem {
                    is_zero: expansion.is_zero(),
                    formula,
                    expansion,
                    seed: Some(s),
                })
            })
            .collect::<Result<_>>()?;
        if with_adversarial {
            for formula in adversarial(field, spec.class(), spec.n())? {
                let expansion = formula.expand(cap)?;
                items.push(CorpusItem {
                    is_zero: expansion.is_zero(),
                    formula,
                    expansion,
                    seed: None,
                });
            }
        }
        Ok(Self { seed, spec, items })
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &CorpusItem> {
        self.items.iter().filter(|i| !i.is_zero)
    }
}

/// Hash conditions checked by listing every preimage `h^{-1}(j)` and
/// intersecting it with every set, independently of
/// [`crate::hashing::check_hash_conditions`].
pub fn hash_conditions_direct(h: &HashFn, parts: &PartitionFamily, k: usize, n: usize) -> bool {
    let threshold = k as f64 * (n.max(1) as f64).log2();
    let m = h.m();
    let preimages: Vec<Vec<usize>> = (1..=m)
        .map(|j| (1..=n).filter(|&x| h.eval(x) == j).collect())
        .collect();
    for partition in parts.parts() {
        for pre in &preimages {
            let mut colliding = 0;
            for set in partition {
                let hits = pre.iter().filter(|&&x| set.contains(&(x - 1))).count();
                if hits > k {
                    return false;
                }
                if hits >= 2 {
                    colliding += 1;
                }
            }
            if colliding as f64 > threshold {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::DEFAULT_TERM_CAP;

    fn fp() -> Field {
        Field::default()
    }

    #[test]
    fn grid_pit_examples() {
        let field = fp();
        let zero = parse(field, "# n: 3\n(x1*x2) + (-1*x1*x2)").unwrap();
        let out = grid_pit(|p| zero.eval(p), 3, 1, DEFAULT_GRID_BUDGET).unwrap();
        assert_eq!(out.verdict, Verdict::ZeroOnH);
        assert_eq!(out.evals, 8);

        let f1 = parse(field, "(x1 + x2)*(x3) + (x4)").unwrap();
        let out = grid_pit(|p| f1.eval(p), 4, 1, DEFAULT_GRID_BUDGET).unwrap();
        assert_eq!(
            out.verdict,
            Verdict::Nonzero {
                witness: vec![0, 0, 0, 1],
                value: 1
            }
        );
        assert_eq!(out.evals, 2);
        assert!(matches!(
            grid_pit(|_| Ok(0), 30, 1, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let specs = [
            GenSpec::Depth3 { n: 6, top_fanin: 4 },
            GenSpec::Depth4 {
                n: 6,
                top_fanin: 3,
                max_sparsity: 4,
                max_factor_vars: 6,
            },
            GenSpec::Regular {
                n: 8,
                profile: vec![2, 2, 2, 2, 1],
            },
        ];
        for spec in &specs {
            for seed in 0..30 {
                let a = gen_formula(fp(), spec, seed).unwrap();
                let b = gen_formula(fp(), spec, seed).unwrap();
                assert_eq!(a, b);
                assert_eq!(a.class(), spec.class());
                let text = a.to_string();
                let back = parse(fp(), &text).unwrap();
                assert_eq!(
                    back.expand(DEFAULT_TERM_CAP).unwrap(),
                    a.expand(DEFAULT_TERM_CAP).unwrap(),
                    "{text}"
                );
            }
        }
    }

    #[test]
    fn regular_single_leaf() {
        let f = gen_formula(
            fp(),
            &GenSpec::Regular {
                n: 3,
                profile: vec![1, 1, 1],
            },
            5,
        )
        .unwrap();
        assert_eq!(f.as_regular().unwrap().size(), 4);
        assert!(f.expand(DEFAULT_TERM_CAP).unwrap().degree() <= 1);
    }

    #[test]
    fn cancelling_regular_is_zero() {
        for seed in 0..10 {
            let f = regular_cancelling(fp(), 8, &[2, 2, 2, 2, 1], seed).unwrap();
            assert_eq!(f.profile(), &[2, 2, 2, 2, 1]);
            assert!(f.expand(DEFAULT_TERM_CAP).unwrap().is_zero());
        }
    }

    #[test]
    fn adversarial_items_parse() {
        for class in [
            FormulaClass::Depth3,
            FormulaClass::Depth4,
            FormulaClass::Regular,
        ] {
            let items = adversarial(fp(), class, 8).unwrap();
            assert!(items
                .iter()
                .any(|f| f.expand(DEFAULT_TERM_CAP).unwrap().is_zero()));
            assert!(items.iter().all(|f| f.class() == class && f.n() == 8));
        }
    }

    #[test]
    fn corpus_flags_match() {
        let c = Corpus::generate(
            fp(),
            GenSpec::Depth3 { n: 4, top_fanin: 3 },
            9,
            40,
            true,
            DEFAULT_TERM_CAP,
        )
        .unwrap();
        assert_eq!(c.items.len(), 44);
        for item in &c.items {
            assert_eq!(item.is_zero, item.expansion.is_zero());
            let out = grid_pit(|p| item.formula.eval(p), 4, 1, DEFAULT_GRID_BUDGET).unwrap();
            assert_eq!(item.is_zero, out.verdict == Verdict::ZeroOnH);
        }
    }
}
