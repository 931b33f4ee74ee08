use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::params::{
    regular_delta_bound, BottomClass, Depth3Params, Depth4Params, SmallSupportParams,
};
use super::{
    lift, product_of_restrictions, subset_pairs, GridBackend, HittingSet, Meta, RoabpBackend,
    RoabpGeneratorSpec,
};
use crate::algebra::Field;
use crate::error::{Error, Result};
use crate::hashing::{HashFamily, HashFn};

/// Knobs shared by all constructions.
#[derive(Clone)]
pub struct HsConfig {
    pub field: Field,
    pub backend: Arc<dyn RoabpBackend>,
    /// Largest point set any intermediate or final result may reach.
    pub max_points: usize,
    /// Stop a union as soon as it equals the full grid over the backend's
    /// alphabet (plus `{0, 1}` for lifts). Exact: no later component can
    /// add a point.
    pub saturation_cutoff: bool,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub q: Option<u64>,
}

impl Default for HsConfig {
    fn default() -> Self {
        Self {
            field: Field::default(),
            backend: Arc::new(GridBackend::default()),
            max_points: 1 << 22,
            saturation_cutoff: true,
            k: None,
            m: None,
            q: None,
        }
    }
}

impl std::fmt::Debug for HsConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HsConfig")
            .field("field", &self.field)
            .field("backend", &self.backend.name())
            .field("max_points", &self.max_points)
            .field("saturation_cutoff", &self.saturation_cutoff)
            .field("k", &self.k)
            .field("m", &self.m)
            .field("q", &self.q)
            .finish()
    }
}

impl HsConfig {
    fn family(&self, params: &SmallSupportParams) -> Result<HashFamily> {
        let k = self.k.unwrap_or(params.k);
        let m = self.m.unwrap_or(params.m);
        match self.q {
            Some(q) => HashFamily::with_q(params.n, m, k, q),
            None => HashFamily::new(params.n, m, k),
        }
    }

    fn check_budget(&self, what: &str, size: usize) -> Result<()> {
        if size > self.max_points {
            return Err(Error::Budget {
                what: what.into(),
                needed: size as f64,
                budget: self.max_points as f64,
            });
        }
        Ok(())
    }

    /// Size of the full grid over the backend alphabet (together with
    /// `extra`) on `dims` coordinates, if the backend has one.
    fn saturation_size(&self, extra: &[u64], dims: usize) -> Option<usize> {
        if !self.saturation_cutoff {
            return None;
        }
        let mut alphabet: BTreeSet<u64> = self.backend.alphabet(1)?.into_iter().collect();
        alphabet.extend(extra);
        alphabet.len().checked_pow(dims as u32)
    }
}

fn spec(t: usize, log2_width: f64) -> RoabpGeneratorSpec {
    RoabpGeneratorSpec {
        n: t,
        log2_width,
        degree: 1,
    }
}

/// `I_h` on the coordinates `vars` (a sorted list of original indices):
/// the product, over the buckets `T_j = h^{-1}(j) ∩ vars`, of ROABP hitting
/// sets on `T_j`. Points have one coordinate per entry of `vars`.
pub fn build_ih(cfg: &HsConfig, h: &HashFn, vars: &[usize], log2_width: f64) -> Result<HittingSet> {
    let mut cache = HashMap::new();
    build_ih_cached(cfg, h, vars, log2_width, &mut cache)
}

fn build_ih_cached(
    cfg: &HsConfig,
    h: &HashFn,
    vars: &[usize],
    log2_width: f64,
    cache: &mut HashMap<usize, Vec<Vec<u64>>>,
) -> Result<HittingSet> {
    let position: HashMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parts = Vec::new();
    for bucket in h.buckets(vars) {
        if bucket.is_empty() {
            continue;
        }
        let points = match cache.get(&bucket.len()) {
            Some(p) => p.clone(),
            None => {
                let p = cfg
                    .backend
                    .hitting_set(&cfg.field, &spec(bucket.len(), log2_width))?;
                cache.insert(bucket.len(), p.clone());
                p
            }
        };
        parts.push((bucket.iter().map(|v| position[v]).collect(), points));
    }
    product_of_restrictions(cfg.field, vars.len(), &parts, cfg.max_points)
}

/// `⋃_{h ∈ 𝓕} I_h` on the coordinates `vars`.
fn small_support_on(
    cfg: &HsConfig,
    params: &SmallSupportParams,
    vars: &[usize],
) -> Result<(HittingSet, Meta)> {
    let family = cfg.family(params)?;
    let mut meta = Meta::new("small-support")
        .param("k", family.k())
        .param("m", family.m())
        .param("q", family.q());
    let mut out = HittingSet::new(cfg.field, vars.len(), Meta::default());
    let full = cfg.saturation_size(&[], vars.len());
    let mut seen_partitions: HashSet<Vec<Vec<usize>>> = HashSet::new();
    let mut cache = HashMap::new();
    let mut members = 0u128;
    for (index, h) in family.members().enumerate() {
        members += 1;
        let mut key: Vec<Vec<usize>> = h
            .buckets(vars)
            .into_iter()
            .filter(|b| !b.is_empty())
            .collect();
        key.sort();
        if !seen_partitions.insert(key) {
            continue;
        }
        let ih = build_ih_cached(cfg, &h, vars, params.log2_width, &mut cache)?;
        let added = out.extend(&ih)?;
        cfg.check_budget("small-support hitting set", out.len())?;
        if added > 0 {
            meta.contributions.push(format!("h#{index} (+{added})"));
        }
        if full.is_some_and(|f| out.len() == f) {
            break;
        }
    }
    meta.params
        .insert("hash_members_scanned".into(), members.to_string());
    meta.params.insert(
        "distinct_partitions".into(),
        seen_partitions.len().to_string(),
    );
    Ok((out, meta))
}

/// The bucketed hitting set for `(M, n^{1−ε})`-restricted formulas whose
/// bottom factors are linear forms (`s = k+1`) or sparse polynomials
/// (`s = 2^k`), with `log₂ M` given.
pub fn small_support_hs(
    cfg: &HsConfig,
    bottom: BottomClass,
    n: usize,
    delta: f64,
    epsilon: f64,
    log2_m: f64,
) -> Result<HittingSet> {
    let params = SmallSupportParams::new(n, delta, epsilon, log2_m, bottom)?;
    let vars: Vec<usize> = (0..n).collect();
    let (mut h, meta) = small_support_on(cfg, &params, &vars)?;
    h.meta = describe(meta, &params, cfg).param("n", n);
    Ok(h)
}

fn describe(meta: Meta, p: &SmallSupportParams, cfg: &HsConfig) -> Meta {
    meta.param("delta", p.delta)
        .param("epsilon", p.epsilon)
        .param("log2_M", p.log2_m)
        .param("log2_s", p.log2_s)
        .param("t", p.t)
        .param("log2_width", p.log2_width)
        .param("backend", cfg.backend.name())
}

/// `⋃ 𝓛_A^B(𝓗_{A,B})` over disjoint `A`, `B` with `|A| ≤ ra`, `|B| ≤ rb`,
/// merged in [`subset_pairs`] order.
fn lifted_union(
    cfg: &HsConfig,
    params: &SmallSupportParams,
    n: usize,
    ra: usize,
    rb: usize,
    meta: &mut Meta,
) -> Result<HittingSet> {
    let mut out = HittingSet::new(cfg.field, n, Meta::default());
    let full = cfg.saturation_size(&[0, 1], n);
    let mut pairs = subset_pairs(n, ra, rb).peekable();
    let mut chunk = 1;
    let mut merged = 0usize;
    let mut saturated = false;
    while pairs.peek().is_some() && !saturated {
        let batch: Vec<(Vec<usize>, Vec<usize>)> = pairs.by_ref().take(chunk).collect();
        let lifted: Vec<Result<HittingSet>> = batch
            .par_iter()
            .map(|(a, b)| {
                let rest: Vec<usize> = (0..n)
                    .filter(|x| !a.contains(x) && !b.contains(x))
                    .collect();
                let (inner, _) = small_support_on(cfg, params, &rest)?;
                lift(&inner, a, b, n)
            })
            .collect();
        for ((a, b), l) in batch.iter().zip(lifted) {
            let added = out.extend(&l?)?;
            merged += 1;
            cfg.check_budget("hitting set", out.len())?;
            if added > 0 {
                meta.contributions
                    .push(format!("A={a:?} B={b:?} (+{added})"));
            }
            if full.is_some_and(|f| out.len() == f) {
                saturated = true;
                break;
            }
        }
        chunk = (rayon::current_num_threads() * 2).max(1);
    }
    meta.params
        .insert("subset_pairs_merged".into(), merged.to_string());
    meta.params
        .insert("saturated".into(), saturated.to_string());
    Ok(out)
}

/// Hitting set for multilinear ΣΠΣ formulas with top fan-in at most
/// `2^{n^δ}` on `n` variables.
pub fn depth3_hs(cfg: &HsConfig, n: usize, delta: f64) -> Result<HittingSet> {
    let p = Depth3Params::new(n, delta)?;
    let mut meta = describe(Meta::new("depth3"), &p.small, cfg)
        .param("n", n)
        .param("r", p.r)
        .param("s", p.small.k + 1)
        .param("k", cfg.k.unwrap_or(p.small.k))
        .param("m", cfg.m.unwrap_or(p.small.m));
    let mut h = lifted_union(cfg, &p.small, n, p.r, 0, &mut meta)?;
    h.meta = meta;
    Ok(h)
}

/// Hitting set for multilinear ΣΠΣΠ formulas with top fan-in at most `M`
/// and size at most `S`; requires `(log₂M)³·log₂S < n`.
pub fn depth4_hs(cfg: &HsConfig, n: usize, m: f64, s: f64) -> Result<HittingSet> {
    let p = Depth4Params::new(n, m, s)?;
    depth4_core(cfg, n, &p, Meta::new("depth4").param("M", m).param("S", s))
}

/// As [`depth4_hs`] with `log₂M` and `log₂S` given directly and without
/// the size hypothesis check.
pub fn depth4_hs_from_logs(
    cfg: &HsConfig,
    n: usize,
    log2_m: f64,
    log2_s: f64,
) -> Result<HittingSet> {
    let p = Depth4Params::from_logs(n, log2_m, log2_s)?;
    depth4_core(cfg, n, &p, Meta::new("depth4"))
}

fn depth4_core(cfg: &HsConfig, n: usize, p: &Depth4Params, meta: Meta) -> Result<HittingSet> {
    let mut meta = describe(meta, &p.small, cfg)
        .param("n", n)
        .param("log2_S", p.log2_s_size)
        .param("r", p.r)
        .param("k", cfg.k.unwrap_or(p.small.k))
        .param("m", cfg.m.unwrap_or(p.small.m));
    let mut h = lifted_union(cfg, &p.small, n, p.r, p.r, &mut meta)?;
    h.meta = meta;
    Ok(h)
}

/// Hitting set for multilinear regular formulas of product depth `d ≥ 2`
/// and size at most `2^{n^δ}`, with `δ ≤ 5^{−(d+1)}`.
///
/// The union of one depth-4 set for the small-degree case and one for each
/// split level `t ∈ [d−1]`, with `α_t = ¼·5^{−(d−t)}`.
pub fn regular_hs(cfg: &HsConfig, n: usize, d: usize, delta: f64) -> Result<HittingSet> {
    if d < 2 {
        return Err(Error::Parameter(format!(
            "regular_hs needs d >= 2, got {d}"
        )));
    }
    let bound = regular_delta_bound(d);
    if !(delta > 0.0 && delta <= bound * (1.0 + 1e-12)) {
        return Err(Error::Parameter(format!(
            "delta = {delta} must lie in (0, 1/5^(d+1)] = (0, {bound}]"
        )));
    }
    let nf = n as f64;
    let log_n = nf.log2();
    let mut cases = Vec::new();
    let lm1 = nf.powf(delta);
    cases.push((
        "case1".to_string(),
        lm1,
        lm1 + nf.powf(1.0 - 5f64.powi(-(d as i32))) * log_n,
    ));
    for t in 1..d {
        let alpha = 0.25 * 5f64.powi(-((d - t) as i32));
        let lm = nf.powf(delta + alpha);
        let ls = 1.0 + lm + log_n + nf.powf(1.0 - 4.0 * alpha) * log_n;
        cases.push((format!("case2_t{t}"), lm, ls));
    }
    let mut out = HittingSet::new(cfg.field, n, Meta::default());
    let mut meta = Meta::new("regular")
        .param("n", n)
        .param("d", d)
        .param("delta", delta)
        .param("backend", cfg.backend.name());
    let full = cfg.saturation_size(&[0, 1], n);
    for (name, lm, ls) in cases {
        if full.is_some_and(|f| out.len() == f) {
            meta.contributions
                .push(format!("{name}: skipped, saturated"));
            continue;
        }
        let part = depth4_hs_from_logs(cfg, n, lm, ls)?;
        meta.params.insert(format!("{name}.log2_M"), lm.to_string());
        meta.params.insert(format!("{name}.log2_S"), ls.to_string());
        for key in ["k", "m", "r", "epsilon"] {
            if let Some(v) = part.meta.params.get(key) {
                meta.params.insert(format!("{name}.{key}"), v.clone());
            }
        }
        let added = out.extend(&part)?;
        meta.contributions.push(format!("{name} (+{added})"));
    }
    out.meta = meta;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::grid_points;
    use super::*;

    fn cube(n: usize) -> BTreeSet<Vec<u64>> {
        grid_points(n, 1).into_iter().collect()
    }

    #[test]
    fn ih_is_product_of_bucket_sets() {
        let cfg = HsConfig::default();
        let fam = HashFamily::new(5, 2, 2).unwrap();
        for h in fam.members().take(10) {
            let ih = build_ih(&cfg, &h, &[0, 1, 2, 3, 4], 3.0).unwrap();
            let expected: usize = h
                .buckets(&[0, 1, 2, 3, 4])
                .iter()
                .map(|b| 1 << b.len())
                .product();
            assert_eq!(ih.len(), expected);
        }
    }

    #[test]
    fn constructions_cover_the_cube() {
        let cfg = HsConfig::default();
        let h3 = depth3_hs(&cfg, 4, 0.5).unwrap();
        assert_eq!(h3.points(), &cube(4));
        let h4 = depth4_hs(&cfg, 6, 2.0, 4.0).unwrap();
        assert_eq!(h4.points(), &cube(6));
        let reg = regular_hs(&cfg, 5, 2, 1.0 / 125.0).unwrap();
        assert_eq!(reg.points(), &cube(5));
    }

    #[test]
    fn cutoff_does_not_change_the_result() {
        let fast = HsConfig::default();
        let slow = HsConfig {
            saturation_cutoff: false,
            ..HsConfig::default()
        };
        let a = depth3_hs(&fast, 3, 0.5).unwrap();
        let b = depth3_hs(&slow, 3, 0.5).unwrap();
        assert_eq!(a.points(), b.points());
        let a = small_support_hs(&fast, BottomClass::Sparse, 4, 0.3, 0.5, 2.0).unwrap();
        let b = small_support_hs(&slow, BottomClass::Sparse, 4, 0.3, 0.5, 2.0).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn parameter_errors() {
        let cfg = HsConfig::default();
        assert!(matches!(
            depth4_hs(&cfg, 8, 16.0, 64.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            regular_hs(&cfg, 8, 2, 0.01),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            regular_hs(&cfg, 8, 1, 0.001),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = HsConfig {
            max_points: 10,
            ..HsConfig::default()
        };
        assert!(matches!(depth3_hs(&cfg, 4, 0.5), Err(Error::Budget { .. })));
    }
}
