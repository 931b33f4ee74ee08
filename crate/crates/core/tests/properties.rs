use std::collections::BTreeSet;

use mlpit::algebra::{Field, SparseMultilinearPoly, MERSENNE_61};
use mlpit::formula::{make_simple, parse, Formula, DEFAULT_TERM_CAP};
use mlpit::hashing::HashFamily;
use mlpit::hitting::{lift, subset_pairs, HittingSet, Meta};
use mlpit::lowerbound::{vanishing_on, DEFAULT_MAX_CELLS};
use mlpit::oracle::{gen_formula, GenSpec};
use mlpit::reduce::{reduce_depth3, reduce_depth4};
use mlpit::roabp::Roabp;
use proptest::prelude::*;

const CAP: usize = DEFAULT_TERM_CAP;
const P: u64 = MERSENNE_61;

fn fp() -> Field {
    Field::default()
}

/// Evaluates an expansion term by term, without the library evaluator.
fn eval_terms(f: &SparseMultilinearPoly, x: &[u64]) -> u64 {
    let p = P as u128;
    let mut acc = 0u128;
    for (m, c) in f.terms() {
        let mut t = c as u128;
        for &v in m.vars() {
            t = t * (x[v] as u128 % p) % p;
        }
        acc = (acc + t) % p;
    }
    acc as u64
}

/// `∂_A f|_{B=0}` at `x`, by inclusion-exclusion over the 0/1 settings of
/// `A`: a multilinear `f` has `∂_a f = f|_{a=1} − f|_{a=0}`.
fn derived_restricted(f: &dyn Fn(&[u64]) -> u64, a: &[usize], b: &[usize], x: &[u64]) -> u64 {
    let p = P as u128;
    let mut acc = 0u128;
    for mask in 0u32..(1 << a.len()) {
        let mut y = x.to_vec();
        for &v in b {
            y[v] = 0;
        }
        for (i, &v) in a.iter().enumerate() {
            y[v] = u64::from(mask >> i & 1 == 1);
        }
        let sign_neg = (a.len() - mask.count_ones() as usize) % 2 == 1;
        let val = f(&y) as u128;
        acc = if sign_neg {
            (acc + p - val) % p
        } else {
            (acc + val) % p
        };
    }
    acc as u64
}

fn point(n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..P, n)
}

fn depth3(n: usize) -> impl Strategy<Value = Formula> {
    any::<u64>()
        .prop_map(move |s| gen_formula(fp(), &GenSpec::Depth3 { n, top_fanin: 4 }, s).unwrap())
}

fn depth4(n: usize) -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(move |s| {
        gen_formula(
            fp(),
            &GenSpec::Depth4 {
                n,
                top_fanin: 3,
                max_sparsity: 4,
                max_factor_vars: n,
            },
            s,
        )
        .unwrap()
    })
}

fn regular(n: usize) -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(move |s| {
        gen_formula(
            fp(),
            &GenSpec::Regular {
                n,
                profile: vec![2, 2, 2, 2, 1],
            },
            s,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_matches_wide_arithmetic(a in 0..P, b in 0..P) {
        let f = fp();
        let (wa, wb, wp) = (a as u128, b as u128, P as u128);
        prop_assert_eq!(f.add(a, b) as u128, (wa + wb) % wp);
        prop_assert_eq!(f.sub(a, b) as u128, (wa + wp - wb) % wp);
        prop_assert_eq!(f.mul(a, b) as u128, wa * wb % wp);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn expansion_matches_evaluation(phi in prop_oneof![depth3(6), depth4(6), regular(6)], x in point(6)) {
        let f = phi.expand(CAP).unwrap();
        prop_assert_eq!(phi.eval(&x).unwrap(), eval_terms(&f, &x));
        prop_assert_eq!(f.eval(&x).unwrap(), eval_terms(&f, &x));
    }

    #[test]
    fn print_parse_roundtrip(phi in prop_oneof![depth3(5), depth4(5), regular(5)]) {
        let back = parse(fp(), &phi.to_string()).unwrap();
        prop_assert_eq!(back.class(), phi.class());
        prop_assert_eq!(back.expand(CAP).unwrap(), phi.expand(CAP).unwrap());
    }

    #[test]
    fn derive_restrict_matches_oracle(phi in depth4(6), mask in 0u32..729, x in point(6)) {
        let d = phi.to_depth4().unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut m = mask;
        for v in 0..6 {
            match m % 3 { 1 => a.push(v), 2 => b.push(v), _ => {} }
            m /= 3;
        }
        let out = d.derive_restrict(&a, &b).unwrap();
        let eval = |y: &[u64]| d.eval(y).unwrap();
        prop_assert_eq!(out.eval(&x).unwrap(), derived_restricted(&eval, &a, &b, &x));
    }

    #[test]
    fn make_simple_invariants(phi in depth4(6)) {
        let d = phi.to_depth4().unwrap();
        let s = make_simple(&d, CAP).unwrap();
        prop_assert_eq!(s.expand(CAP).unwrap(), d.expand(CAP).unwrap());
        prop_assert!(s.size() <= d.size());
    }

    #[test]
    fn depth3_reduction_sound(phi in depth3(6), x in point(6)) {
        let d = phi.as_depth3().unwrap();
        prop_assume!(!d.expand(CAP).unwrap().is_zero());
        let r = reduce_depth3(d, 2.0, CAP).unwrap();
        let eval = |y: &[u64]| d.eval(y).unwrap();
        prop_assert_eq!(r.formula.eval(&x).unwrap(), derived_restricted(&eval, &r.trace.a, &[], &x));
    }

    #[test]
    fn depth4_reduction_sound(phi in depth4(6), tau in 1usize..4, x in point(6)) {
        let d = phi.to_depth4().unwrap();
        prop_assume!(!d.expand(CAP).unwrap().is_zero());
        let r = reduce_depth4(&d, tau, CAP).unwrap();
        prop_assert_eq!(r.formula.delta_far(tau), 0);
        prop_assert!(!r.formula.expand(CAP).unwrap().is_zero());
        prop_assert!(r.trace.a.iter().all(|v| !r.trace.b.contains(v)));
        for s in &r.trace.steps {
            prop_assert!(s.after < s.before);
        }
        let eval = |y: &[u64]| d.eval(y).unwrap();
        prop_assert_eq!(r.formula.eval(&x).unwrap(), derived_restricted(&eval, &r.trace.a, &r.trace.b, &x));
    }

    #[test]
    fn roabp_matches_formula(phi in depth4(6), x in point(6), rot in 0usize..6) {
        let d = phi.to_depth4().unwrap();
        let order: Vec<usize> = (0..6).map(|i| (i + rot) % 6).collect();
        let p = Roabp::from_sparse_products(&d, &order).unwrap();
        prop_assert_eq!(p.eval(&x).unwrap(), d.eval(&x).unwrap());
    }

    #[test]
    fn subset_pairs_match_brute_force(n in 0usize..7, ra in 0usize..4, rb in 0usize..4) {
        let got: BTreeSet<(Vec<usize>, Vec<usize>)> = subset_pairs(n, ra, rb).collect();
        prop_assert_eq!(got.len(), subset_pairs(n, ra, rb).count());
        let mut want = BTreeSet::new();
        for code in 0..3usize.pow(n as u32) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            let mut c = code;
            for v in 0..n {
                match c % 3 { 1 => a.push(v), 2 => b.push(v), _ => {} }
                c /= 3;
            }
            if a.len() <= ra && b.len() <= rb {
                want.insert((a, b));
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn hash_buckets_in_range(n in 1usize..40, m in 1usize..40, k in 1usize..4, idx in any::<u64>()) {
        let m = m.min(n);
        let fam = HashFamily::new(n, m, k).unwrap();
        let size = fam.size().unwrap();
        prop_assert_eq!(size, (fam.q() as u128).pow(k as u32));
        let h = fam.member(idx as u128 % size).unwrap();
        for x in 1..=n {
            prop_assert!((1..=m).contains(&h.eval(x)));
        }
    }

    #[test]
    fn lift_counts(pts in prop::collection::btree_set(prop::collection::vec(0u64..5, 3), 0..10), a_mask in 0u32..8) {
        let h = HittingSet::from_points(fp(), 3, pts, Meta::new("p")).unwrap();
        let a: Vec<usize> = (0..3).filter(|i| a_mask >> i & 1 == 1).map(|i| i + 3).collect();
        let b: Vec<usize> = (0..3).filter(|i| a_mask >> i & 1 == 0).map(|i| i + 3).collect();
        let l = lift(&h, &a, &b, 6).unwrap();
        prop_assert_eq!(l.len(), h.len() << a.len());
    }

    #[test]
    fn vanishing_polynomial_vanishes(n in 1usize..7, pts in prop::collection::btree_set(prop::collection::vec(0u64..4, 6), 0..40)) {
        let pts: Vec<Vec<u64>> = pts.into_iter().map(|p| p[..n].to_vec()).collect::<BTreeSet<_>>().into_iter().collect();
        prop_assume!(pts.len() < 1 << n);
        let f = vanishing_on(fp(), n, &pts, DEFAULT_MAX_CELLS).unwrap();
        prop_assert!(!f.is_zero());
        for p in &pts {
            prop_assert_eq!(eval_terms(&f, p), 0);
        }
    }
}
