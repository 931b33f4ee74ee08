//! End-to-end checks of every component against exhaustive oracles.
//!
//! Each criterion returns a one-line report; the acceptance test and the
//! `selftest` command print them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Field, SparseMultilinearPoly};
use crate::error::{Error, Result};
use crate::formula::{
    dividing_variables, is_simple, make_simple, Depth4Formula, Formula, DEFAULT_TERM_CAP,
};
use crate::hashing::{check_hash_conditions, HashFamily, PartitionFamily};
use crate::hitting::params::{depth3_epsilon, hash_k, hash_m, tau, Depth3Params};
use crate::hitting::{
    depth3_hs, depth4_hs, lift, pit_blackbox, product_of_restrictions, regular_hs, HittingSet,
    HsConfig, Meta, Verdict,
};
use crate::lowerbound::{vanishing_multilinear, verify_certificate, DEFAULT_MAX_CELLS};
use crate::oracle::{grid_pit, hash_conditions_direct, Corpus, GenSpec, DEFAULT_GRID_BUDGET};
use crate::reduce::{depth4_step_bound, reduce_depth3, reduce_depth4, regular_to_depth4};
use crate::roabp::Roabp;

/// How much work each criterion does.
#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Largest `n` used by the hitting-set criteria.
    pub n_max: usize,
    pub depth3_items: usize,
    pub depth4_items: usize,
    pub regular_items: usize,
    pub roabp_items: usize,
    pub hash_items: usize,
    pub simple_items: usize,
    pub lowerbound_items: usize,
    pub hs: HsConfig,
}

impl SelftestConfig {
    /// The sizes the acceptance gate runs with.
    pub fn full(seed: u64) -> Self {
        Self {
            seed,
            n_max: 8,
            depth3_items: 300,
            depth4_items: 300,
            regular_items: 200,
            roabp_items: 100,
            hash_items: 1000,
            simple_items: 200,
            lowerbound_items: 50,
            hs: HsConfig::default(),
        }
    }

    /// A fast smoke run.
    pub fn quick(seed: u64) -> Self {
        Self {
            depth3_items: 30,
            depth4_items: 30,
            regular_items: 20,
            roabp_items: 20,
            hash_items: 100,
            simple_items: 40,
            lowerbound_items: 10,
            ..Self::full(seed)
        }
    }
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self::full(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AC{:<2} {} {}: {} [{:.2}s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const TITLES: [&str; 10] = [
    "depth-3 hitting completeness",
    "depth-4 hitting completeness",
    "regular hitting completeness",
    "reduction soundness",
    "ROABP correctness",
    "hash verifier equivalence",
    "simple form",
    "lift and product counting",
    "lower-bound extractor",
    "parameter arithmetic",
];

type Outcome = std::result::Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(cfg: &SelftestConfig, id: usize) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => ac1(cfg),
        2 => ac2(cfg),
        3 => ac3(cfg),
        4 => ac4(cfg),
        5 => ac5(cfg),
        6 => ac6(cfg),
        7 => ac7(cfg),
        8 => ac8(cfg),
        9 => ac9(cfg),
        10 => ac10(),
        _ => fail(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionReport {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionReport> {
    (1..=10).map(|id| run_criterion(cfg, id)).collect()
}

/// At least `want` nonzero items (the first `want` kept) plus every zero
/// item met on the way, drawing more seeds as needed.
fn corpus_with_nonzero(
    field: Field,
    spec: GenSpec,
    seed: u64,
    want: usize,
    accept: impl Fn(&Formula) -> bool,
) -> std::result::Result<Corpus, String> {
    let mut corpus = lib(Corpus::generate(
        field,
        spec.clone(),
        seed,
        0,
        true,
        DEFAULT_TERM_CAP,
    ))?;
    corpus.items.retain(|item| accept(&item.formula));
    let mut next = seed;
    let mut nonzero = corpus.nonzero().count();
    let batch = want.max(16);
    let mut rounds = 0;
    while nonzero < want {
        rounds += 1;
        if rounds > 50 {
            return fail(format!(
                "only {nonzero} of {want} nonzero items after {rounds} batches"
            ));
        }
        let more = lib(Corpus::generate(
            field,
            spec.clone(),
            next,
            batch,
            false,
            DEFAULT_TERM_CAP,
        ))?;
        next = next.wrapping_add(batch as u64);
        for item in more.items {
            if !accept(&item.formula) {
                continue;
            }
            if !item.is_zero {
                if nonzero == want {
                    continue;
                }
                nonzero += 1;
            }
            corpus.items.push(item);
        }
    }
    Ok(corpus)
}

/// PIT over `h` agrees with the expansion flag and with grid PIT on every
/// item; returns (nonzero, zero) counts.
fn completeness(corpus: &Corpus, h: &HittingSet) -> std::result::Result<(usize, usize), String> {
    let n = h.n();
    let failures: Vec<String> = corpus
        .items
        .par_iter()
        .filter_map(|item| {
            let f = &item.formula;
            let pit = match pit_blackbox(|p| f.eval(p), h) {
                Ok(o) => o,
                Err(e) => return Some(e.to_string()),
            };
            let grid = match grid_pit(|p| f.eval(p), n, 1, DEFAULT_GRID_BUDGET) {
                Ok(o) => o,
                Err(e) => return Some(e.to_string()),
            };
            let on_h = pit.verdict != Verdict::ZeroOnH;
            let on_grid = grid.verdict != Verdict::ZeroOnH;
            (on_h != !item.is_zero || on_grid != !item.is_zero)
                .then(|| format!("seed {:?}: {}", item.seed, f.to_string().replace('\n', " ")))
        })
        .collect();
    if let Some(first) = failures.first() {
        return fail(format!("{} failures, first {first}", failures.len()));
    }
    let nonzero = corpus.nonzero().count();
    Ok((nonzero, corpus.items.len() - nonzero))
}

fn hs_sizes(cfg: &SelftestConfig) -> Vec<usize> {
    [4, 5, 6].into_iter().filter(|&n| n <= cfg.n_max).collect()
}

fn ac1(cfg: &SelftestConfig) -> Outcome {
    let mut parts = Vec::new();
    for n in hs_sizes(cfg) {
        let h = lib(depth3_hs(&cfg.hs, n, 0.5))?;
        let corpus = corpus_with_nonzero(
            cfg.hs.field,
            GenSpec::Depth3 { n, top_fanin: 4 },
            cfg.seed.wrapping_mul(1000).wrapping_add(n as u64),
            cfg.depth3_items,
            |_| true,
        )?;
        let (nz, z) = completeness(&corpus, &h)?;
        parts.push(format!("n={n} |H|={} nonzero={nz} zero={z}", h.len()));
    }
    Ok(format!("0 failures; {}", parts.join("; ")))
}

fn depth4_budget(n: usize) -> f64 {
    (1u64 << n) as f64 - 1.0
}

fn ac2(cfg: &SelftestConfig) -> Outcome {
    let mut parts = Vec::new();
    for n in hs_sizes(cfg) {
        let s = depth4_budget(n);
        let h = lib(depth4_hs(&cfg.hs, n, 2.0, s))?;
        let corpus = corpus_with_nonzero(
            cfg.hs.field,
            GenSpec::Depth4 {
                n,
                top_fanin: 2,
                max_sparsity: 4,
                max_factor_vars: n,
            },
            cfg.seed.wrapping_mul(2000).wrapping_add(n as u64),
            cfg.depth4_items,
            |f| {
                f.to_depth4()
                    .is_ok_and(|d| d.size() as f64 <= s && d.top_fanin() <= 2)
            },
        )?;
        let (nz, z) = completeness(&corpus, &h)?;
        parts.push(format!(
            "n={n} M=2 S={s} |H|={} nonzero={nz} zero={z}",
            h.len()
        ));
    }
    Ok(format!("0 failures; {}", parts.join("; ")))
}

const REGULAR_PROFILE: [usize; 5] = [2, 2, 2, 2, 1];
const REGULAR_N: usize = 8;
const REGULAR_DELTA: f64 = 1.0 / 125.0;

fn ac3(cfg: &SelftestConfig) -> Outcome {
    let n = REGULAR_N.min(cfg.n_max);
    let h = lib(regular_hs(&cfg.hs, n, 2, REGULAR_DELTA))?;
    let corpus = corpus_with_nonzero(
        cfg.hs.field,
        GenSpec::Regular {
            n,
            profile: REGULAR_PROFILE.to_vec(),
        },
        cfg.seed.wrapping_mul(3000),
        cfg.regular_items,
        |_| true,
    )?;
    let (nz, z) = completeness(&corpus, &h)?;
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    for item in &corpus.items {
        let psi = lib(item.formula.as_regular())?;
        let r = lib(regular_to_depth4(psi, 5.0, DEFAULT_TERM_CAP))?;
        if lib(r.formula.expand(DEFAULT_TERM_CAP))? != item.expansion {
            return fail(format!(
                "regular_to_depth4 changed the polynomial of seed {:?}",
                item.seed
            ));
        }
        if !r.fanin_within_bound {
            return fail(format!(
                "top fan-in above S^(n^alpha) for seed {:?}",
                item.seed
            ));
        }
        *cases.entry(r.case.tag()).or_default() += 1;
    }
    Ok(format!(
        "0 failures; n={n} profile={REGULAR_PROFILE:?} |H|={} nonzero={nz} zero={z}; depth-4 rewrite exact on all, cases {cases:?}",
        h.len()
    ))
}

fn check_depth4_reduction(
    phi: &Depth4Formula,
    f: &SparseMultilinearPoly,
    tau_: usize,
) -> std::result::Result<usize, String> {
    let r = lib(reduce_depth4(phi, tau_, DEFAULT_TERM_CAP))?;
    let want = f.derivative(&r.trace.a).zero_out(&r.trace.b);
    let got = lib(r.formula.expand(DEFAULT_TERM_CAP))?;
    if got != want || got.is_zero() {
        return fail(format!(
            "depth-4 reduction unsound on {}",
            phi.to_string().replace('\n', " ")
        ));
    }
    if r.formula.delta_far(tau_) != 0 {
        return fail("depth-4 reduction left a bad factor");
    }
    let n = phi.n() as f64;
    for (k, m) in r.trace.measures().into_iter().enumerate() {
        let bound = r.initial_delta as f64 * (1.0 - tau_ as f64 / (2.0 * n)).powi(k as i32);
        if m as f64 > bound + 1e-9 {
            return fail(format!("Δ_{k} = {m} above {bound}"));
        }
    }
    let steps = r.trace.a.len() + r.trace.b.len();
    let bound = depth4_step_bound(phi.n(), tau_, r.simple_size);
    if steps as f64 > bound + 1e-9 {
        return fail(format!("|A ⊔ B| = {steps} above {bound}"));
    }
    Ok(steps)
}

fn ac4(cfg: &SelftestConfig) -> Outcome {
    let field = cfg.hs.field;
    let count = cfg.depth3_items.min(cfg.depth4_items);
    let mut d3_steps = 0;
    let mut d3_items = 0;
    for n in hs_sizes(cfg) {
        let corpus = corpus_with_nonzero(
            field,
            GenSpec::Depth3 { n, top_fanin: 4 },
            cfg.seed.wrapping_mul(4000).wrapping_add(n as u64),
            count,
            |_| true,
        )?;
        let eps = depth3_epsilon(0.5);
        let t = tau(n, eps);
        let r_bound = lib(Depth3Params::new(n, 0.5))?.r;
        for item in corpus.nonzero() {
            let phi = lib(item.formula.as_depth3())?;
            let r = lib(reduce_depth3(phi, t, DEFAULT_TERM_CAP))?;
            let got = lib(r.formula.expand(DEFAULT_TERM_CAP))?;
            if got != item.expansion.derivative(&r.trace.a) || got.is_zero() {
                return fail(format!("depth-3 reduction unsound on seed {:?}", item.seed));
            }
            let vars = got.var_set();
            if r.formula
                .gates()
                .iter()
                .flatten()
                .any(|l| l.support().filter(|x| vars.contains(x)).count() as f64 > t)
            {
                return fail(format!(
                    "depth-3 reduction left a wide form on seed {:?}",
                    item.seed
                ));
            }
            for s in &r.trace.steps {
                if s.after as f64 > s.before as f64 * (1.0 - t / n as f64) + 1e-9 {
                    return fail(format!(
                        "bad-form count did not shrink enough on seed {:?}",
                        item.seed
                    ));
                }
            }
            if r.trace.a.len() > r_bound {
                return fail(format!("|A| = {} above r = {r_bound}", r.trace.a.len()));
            }
            d3_steps += r.trace.a.len();
            d3_items += 1;
        }
    }
    let mut d4_steps = 0;
    let mut d4_items = 0;
    for n in hs_sizes(cfg) {
        let corpus = corpus_with_nonzero(
            field,
            GenSpec::Depth4 {
                n,
                top_fanin: 3,
                max_sparsity: 4,
                max_factor_vars: n,
            },
            cfg.seed.wrapping_mul(5000).wrapping_add(n as u64),
            count,
            |_| true,
        )?;
        for item in corpus.nonzero() {
            let phi = lib(item.formula.to_depth4())?;
            for tau_ in [1, 2] {
                d4_steps += check_depth4_reduction(&phi, &item.expansion, tau_)?;
                d4_items += 1;
            }
        }
    }
    let regular = corpus_with_nonzero(
        field,
        GenSpec::Regular {
            n: REGULAR_N.min(cfg.n_max),
            profile: REGULAR_PROFILE.to_vec(),
        },
        cfg.seed.wrapping_mul(6000),
        cfg.regular_items.min(count),
        |_| true,
    )?;
    for item in regular.nonzero() {
        let psi = lib(item.formula.as_regular())?;
        let phi = lib(regular_to_depth4(psi, 5.0, DEFAULT_TERM_CAP))?.formula;
        d4_steps += check_depth4_reduction(&phi, &item.expansion, 2)?;
        d4_items += 1;
    }
    Ok(format!(
        "exact on {d3_items} depth-3 runs ({d3_steps} derivatives) and {d4_items} depth-4 runs ({d4_steps} steps); Δ and |A⊔B| bounds hold"
    ))
}

fn ac5(cfg: &SelftestConfig) -> Outcome {
    let field = cfg.hs.field;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5a5a);
    let mut max_ratio: f64 = 0.0;
    for i in 0..cfg.roabp_items {
        let n = rng.gen_range(2..=8usize.min(cfg.n_max.max(2)));
        let spec = GenSpec::Depth4 {
            n,
            top_fanin: rng.gen_range(1..=3),
            max_sparsity: rng.gen_range(1..=4),
            max_factor_vars: n,
        };
        let phi = lib(lib(crate::oracle::gen_formula(field, &spec, rng.gen()))?.to_depth4())?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let p = lib(Roabp::from_sparse_products(&phi, &order))?;
        let (s, k) = phi.sparsity_profile();
        let bound = phi.top_fanin().max(1) as f64 * (s.max(1) as f64).powi(k as i32);
        if p.width() as f64 > bound {
            return fail(format!(
                "instance {i}: width {} above M·s^k = {bound}",
                p.width()
            ));
        }
        max_ratio = max_ratio.max(p.width() as f64 / bound);
        let f = lib(phi.expand(DEFAULT_TERM_CAP))?;
        let diff = grid_pit(
            |x| Ok(field.sub(p.eval(x)?, f.eval(x)?)),
            n,
            2,
            DEFAULT_GRID_BUDGET,
        );
        if lib(diff)?.verdict != Verdict::ZeroOnH {
            return fail(format!(
                "instance {i}: ROABP disagrees with the expansion on {{0,1,2}}^{n}"
            ));
        }
    }
    Ok(format!(
        "{} instances agree on the full {{0,1,2}}^n grid; max width/(M·s^k) = {max_ratio:.3}",
        cfg.roabp_items
    ))
}

fn random_partitions(n: usize, rng: &mut ChaCha8Rng) -> PartitionFamily {
    let count = rng.gen_range(1..=3);
    let parts = (0..count)
        .map(|_| {
            let blocks = rng.gen_range(1..=n.max(1));
            let mut sets = vec![BTreeSet::new(); blocks];
            for x in 0..n {
                if rng.gen_bool(0.8) {
                    sets[rng.gen_range(0..blocks)].insert(x);
                }
            }
            sets
        })
        .collect();
    PartitionFamily::new(parts).expect("disjoint by construction")
}

fn ac6(cfg: &SelftestConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b6b);
    let (mut pass, mut fail_count) = (0, 0);
    for i in 0..cfg.hash_items {
        let n = rng.gen_range(2..=16usize);
        let m = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=3usize);
        let family = lib(HashFamily::new(n, m, k))?;
        let size = family.size().unwrap_or(u128::MAX);
        let h = lib(family.member(rng.gen_range(0..size.min(u64::MAX as u128) as u64) as u128))?;
        let parts = random_partitions(n, &mut rng);
        let lib_pass = check_hash_conditions(&h, &parts, k, n).is_pass();
        if lib_pass != hash_conditions_direct(&h, &parts, k, n) {
            return fail(format!(
                "instance {i}: verifier says {lib_pass}, enumeration disagrees"
            ));
        }
        if lib_pass {
            pass += 1;
        } else {
            fail_count += 1;
        }
    }
    let mut families = 0;
    for q in [2u64, 3, 5, 7] {
        for k in 1..=2usize {
            let family = lib(HashFamily::with_q(q as usize, q as usize, k, q))?;
            let size = family.size().ok_or("family size overflow")?;
            if size != (q as u128).pow(k as u32) {
                return fail(format!("q={q} k={k}: family has {size} members"));
            }
            let xs: Vec<u64> = (0..q).collect();
            let pairs: Vec<Vec<u64>> = if k == 2 {
                xs.iter()
                    .flat_map(|&a| {
                        xs.iter()
                            .filter(move |&&b| b != a)
                            .map(move |&b| vec![a, b])
                    })
                    .collect()
            } else {
                Vec::new()
            };
            for pts in xs.iter().map(|&a| vec![a]).chain(pairs) {
                if pts.len() > k {
                    continue;
                }
                let mut freq: BTreeMap<Vec<u64>, u128> = BTreeMap::new();
                for h in family.members() {
                    *freq
                        .entry(pts.iter().map(|&x| h.raw(x)).collect())
                        .or_default() += 1;
                }
                let expected = size / (q as u128).pow(pts.len() as u32);
                if freq.len() as u128 != (q as u128).pow(pts.len() as u32)
                    || freq.values().any(|&c| c != expected)
                {
                    return fail(format!("q={q} k={k}: values at {pts:?} are not uniform"));
                }
            }
            families += 1;
        }
    }
    Ok(format!(
        "{} instances agree ({pass} pass, {fail_count} fail); {families} families exactly k-wise uniform (q ≤ 7, k ≤ 2)",
        cfg.hash_items
    ))
}

fn ac7(cfg: &SelftestConfig) -> Outcome {
    let field = cfg.hs.field;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7c7c);
    let mut divisor_cases = 0;
    for i in 0..cfg.simple_items {
        let n = rng.gen_range(3..=7usize);
        let spec = GenSpec::Depth4 {
            n: n - 1,
            top_fanin: rng.gen_range(1..=3),
            max_sparsity: 3,
            max_factor_vars: n - 1,
        };
        let base = lib(lib(crate::oracle::gen_formula(field, &spec, rng.gen()))?.to_depth4())?;
        let base = lib(base.with_n(n))?;
        let phi = if i % 2 == 0 {
            let x = n - 1;
            let xp = lib(SparseMultilinearPoly::var(field, n, x))?;
            let gates = base
                .gates()
                .iter()
                .map(|g| {
                    let mut g = g.clone();
                    let j = rng.gen_range(0..g.len());
                    if rng.gen_bool(0.5) {
                        g[j] = g[j].mul(&xp)?;
                    } else {
                        g.push(xp.clone());
                    }
                    Ok(g)
                })
                .collect::<Result<Vec<_>>>();
            lib(Depth4Formula::new(field, n, lib(gates)?))?
        } else {
            base
        };
        let simple = lib(make_simple(&phi, DEFAULT_TERM_CAP))?;
        let before = lib(phi.expand(DEFAULT_TERM_CAP))?;
        if lib(simple.expand(DEFAULT_TERM_CAP))? != before {
            return fail(format!("instance {i}: make_simple changed the polynomial"));
        }
        if simple.size() > phi.size() {
            return fail(format!(
                "instance {i}: size grew from {} to {}",
                phi.size(),
                simple.size()
            ));
        }
        let (dividing, _) = dividing_variables(&simple, DEFAULT_TERM_CAP);
        if !is_simple(&simple, &dividing) {
            return fail(format!("instance {i}: output is not simple"));
        }
        if !dividing.is_empty() {
            divisor_cases += 1;
        }
    }
    Ok(format!(
        "{} instances ({divisor_cases} with dividing variables): expansion preserved, size never grew",
        cfg.simple_items
    ))
}

fn ac8(cfg: &SelftestConfig) -> Outcome {
    let field = cfg.hs.field;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x8d8d);
    let mut lifts = 0;
    let mut products = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=10usize);
        let mut coords: Vec<usize> = (0..n).collect();
        coords.shuffle(&mut rng);
        let a_len = rng.gen_range(0..=n);
        let b_len = rng.gen_range(0..=n - a_len);
        let mut a = coords[..a_len].to_vec();
        let mut b = coords[a_len..a_len + b_len].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        let t = n - a_len - b_len;
        let count = rng.gen_range(0..=20usize);
        let pts: BTreeSet<Vec<u64>> = (0..count)
            .map(|_| (0..t).map(|_| rng.gen_range(0..4u64)).collect())
            .collect();
        let h = lib(HittingSet::from_points(field, t, pts, Meta::new("random")))?;
        let l = lib(lift(&h, &a, &b, n))?;
        if l.len() != (1usize << a.len()) * h.len() {
            return fail(format!(
                "|lift| = {} but 2^{}·{}",
                l.len(),
                a.len(),
                h.len()
            ));
        }
        lifts += 1;

        let mut parts = Vec::new();
        let mut rest: Vec<usize> = (0..n).collect();
        rest.shuffle(&mut rng);
        let mut expected = 1usize;
        while !rest.is_empty() {
            let take = rng.gen_range(1..=rest.len().min(3));
            let mut block: Vec<usize> = rest.drain(..take).collect();
            block.sort_unstable();
            let pts: BTreeSet<Vec<u64>> = (0..rng.gen_range(1..=4))
                .map(|_| block.iter().map(|_| rng.gen_range(0..3u64)).collect())
                .collect();
            expected *= pts.len();
            parts.push((block, pts.into_iter().collect::<Vec<_>>()));
        }
        let ih = lib(product_of_restrictions(field, n, &parts, 1 << 20))?;
        if ih.len() != expected {
            return fail(format!(
                "|I_h| = {} but the product is {expected}",
                ih.len()
            ));
        }
        products += 1;
    }
    Ok(format!(
        "{lifts} lifts and {products} products counted exactly"
    ))
}

fn ac9(cfg: &SelftestConfig) -> Outcome {
    let field = cfg.hs.field;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e9e);
    let start = Instant::now();
    let mut total_points = 0;
    for i in 0..cfg.lowerbound_items {
        let n = rng.gen_range(1..=10usize);
        let size = rng.gen_range(0..(1usize << n));
        let mut pts = BTreeSet::new();
        while pts.len() < size {
            pts.insert((0..n).map(|_| rng.gen_range(0..3u64)).collect::<Vec<_>>());
        }
        total_points += pts.len();
        let h = lib(HittingSet::from_points(field, n, pts, Meta::new("random")))?;
        let f = lib(vanishing_multilinear(&h, DEFAULT_MAX_CELLS))?;
        let check = verify_certificate(&f, &h);
        if !check.is_pass() {
            return fail(format!("instance {i}: certificate {check:?}"));
        }
        if lib(vanishing_multilinear(&h, DEFAULT_MAX_CELLS))? != f {
            return fail(format!("instance {i}: output not deterministic"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 60.0 {
        return fail(format!("took {secs:.1}s, above the 60s budget"));
    }
    Ok(format!(
        "{} point sets ({total_points} points) certified and reproducible in {secs:.2}s",
        cfg.lowerbound_items
    ))
}

fn ac10() -> Outcome {
    let k_cases: [(usize, f64, usize); 4] = [
        (16, 0.5, 12),
        (256, 0.25, 20),
        (64, 0.5, 20),
        (1024, 0.2, 24),
    ];
    for (n, d, want) in k_cases {
        if hash_k(n, d) != want {
            return fail(format!(
                "k({n}, {d}) = {} but n^δ + 2·log₂n = {want}",
                hash_k(n, d)
            ));
        }
    }
    let m_cases: [(usize, f64, f64, usize); 4] = [
        (256, 0.25, 0.75, 160),
        (16, 0.5, 0.5, 16),
        (10000, 0.5, 0.5, 1000),
        (4, 1.0, 1.0, 4),
    ];
    for (n, d, e, want) in m_cases {
        if hash_m(n, d, e) != want {
            return fail(format!(
                "m({n}, {d}, {e}) = {} but expected {want}",
                hash_m(n, d, e)
            ));
        }
    }
    let e_cases = [(0.5, 0.5), (0.25, 7.0 / 12.0), (0.2, 0.6), (0.0, 2.0 / 3.0)];
    for (d, want) in e_cases {
        if (depth3_epsilon(d) - want).abs() > 1e-15 {
            return fail(format!(
                "ε({d}) = {} but 2/3 − δ/3 = {want}",
                depth3_epsilon(d)
            ));
        }
    }
    Ok("k, m and ε match on all tabulated inputs".into())
}

/// Errors from [`run_all`] never escape; this is for callers that want a
/// single verdict.
pub fn all_passed(reports: &[CriterionReport]) -> Result<()> {
    match reports.iter().find(|r| !r.passed) {
        None => Ok(()),
        Some(r) => Err(Error::Internal(format!("AC{} failed: {}", r.id, r.detail))),
    }
}
