use super::*;
use crate::algebra::Field;
use crate::error::Error;
use crate::formula::{
    parse, Depth3Formula, Depth4Formula, RegularFormula, RegularNode, DEFAULT_TERM_CAP,
};

const CAP: usize = DEFAULT_TERM_CAP;

fn fp() -> Field {
    Field::default()
}

fn d3(text: &str) -> Depth3Formula {
    parse(fp(), text).unwrap().as_depth3().unwrap().clone()
}

fn d4(text: &str) -> Depth4Formula {
    parse(fp(), text).unwrap().to_depth4().unwrap()
}

/// Complete regular tree with the given profile on variables `vars`:
/// products split their variables into contiguous chunks, sums hand the
/// same variables to every child.
fn tree(profile: &[usize], vars: &[usize], salt: &mut u64) -> RegularNode {
    let (a, rest) = (profile[0], &profile[1..]);
    let children = (0..a)
        .map(|i| {
            *salt += 1;
            if rest.is_empty() {
                let var = (!vars.is_empty()).then(|| vars[(i + *salt as usize) % vars.len()]);
                RegularNode::leaf(fp(), var, *salt % 5 + 1)
            } else {
                let p = rest[0];
                let chunk = vars.len().div_ceil(p).max(1);
                let parts = (0..p)
                    .map(|j| {
                        let lo = (j * chunk).min(vars.len());
                        let hi = ((j + 1) * chunk).min(vars.len());
                        tree(&rest[1..], &vars[lo..hi], salt)
                    })
                    .collect();
                RegularNode::Product(parts)
            }
        })
        .collect();
    RegularNode::Sum(children)
}

fn regular(profile: &[usize], n: usize) -> RegularFormula {
    let vars: Vec<usize> = (0..n).collect();
    RegularFormula::new(fp(), n, tree(profile, &vars, &mut 0)).unwrap()
}

#[test]
fn depth3_example() {
    let phi = d3("# n: 4\n(x1 + x2 + x3)*(x4)");
    let r = reduce_depth3(&phi, 2.0, CAP).unwrap();
    assert_eq!(r.trace.a, vec![0]);
    assert_eq!(r.trace.steps.len(), 1);
    assert_eq!((r.trace.steps[0].before, r.trace.steps[0].after), (1, 0));
    assert_eq!(
        r.formula.expand(CAP).unwrap(),
        phi.expand(CAP).unwrap().derivative(&[0])
    );
    assert_eq!(r.formula.expand(CAP).unwrap().to_string(), "x4");
}

#[test]
fn depth3_univariate_forms_untouched() {
    let phi = d3("(x1 + 2)*(x2) + (x3)*(x4 + 1)");
    let r = reduce_depth3(&phi, 1.0, CAP).unwrap();
    assert!(r.trace.a.is_empty());
    assert_eq!(r.formula, phi);
}

#[test]
fn depth3_bad_count_shrinks() {
    let phi = d3(
        "(x1 + x2 + x3 + x4)*(x5 + x6 + x7) + (x1 + x5 + x6 + 3)*(x2 + x3 + x8) + (x4 + x7 + x8)",
    );
    let n = phi.n();
    let tau = 1.5;
    let r = reduce_depth3(&phi, tau, CAP).unwrap();
    assert!(!r.trace.a.is_empty());
    for s in &r.trace.steps {
        assert!(
            s.after as f64 <= s.before as f64 * (1.0 - tau / n as f64) + 1e-9,
            "{s:?}"
        );
    }
    let f = r.formula.expand(CAP).unwrap();
    assert_eq!(f, phi.expand(CAP).unwrap().derivative(&r.trace.a));
    let vars = f.var_set();
    for l in r.formula.gates().iter().flatten() {
        assert!(l.support().filter(|x| vars.contains(x)).count() as f64 <= tau);
    }
}

#[test]
fn depth3_zero_input() {
    let phi = d3("(x1) + (-1*x1)");
    assert!(matches!(
        reduce_depth3(&phi, 1.0, CAP),
        Err(Error::ZeroPolynomial(_))
    ));
    assert!(matches!(
        reduce_depth3(&phi, 0.0, CAP),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn depth4_example_follows_tie_rule() {
    let phi = d4("# n: 4\n(x1*x2 + x3)*(x4)");
    let r = reduce_depth4(&phi, 2, CAP).unwrap();
    assert_eq!(r.initial_delta, 2);
    assert_eq!(r.trace.steps.len(), 1);
    let s = &r.trace.steps[0];
    assert_eq!(
        (s.var, s.action, s.before, s.after),
        (0, Action::Derive, 2, 0)
    );
    assert_eq!(s.split, Some((1, 1)));
    assert_eq!(r.trace.a, vec![0]);
    assert!(r.trace.b.is_empty());
    assert_eq!(r.formula.expand(CAP).unwrap().to_string(), "x2*x4");
    assert_eq!(r.formula.delta_far(2), 0);
}

#[test]
fn depth4_restricted_input_untouched() {
    let phi = d4("(x1*x2 + 1)*(x3) + (x4 + x5)");
    let r = reduce_depth4(&phi, 2, CAP).unwrap();
    assert!(r.trace.a.is_empty() && r.trace.b.is_empty());
    assert_eq!(r.formula.expand(CAP).unwrap(), phi.expand(CAP).unwrap());
}

#[test]
fn depth4_soundness_and_bounds() {
    let cases = [
        "(x1*x2*x3 + x4*x5 + x6 + 1)*(x7*x8 + 2) + (x1*x4*x7 + x2*x5*x8 + x3*x6)",
        "(x1*x2 + x3*x4 + x5*x6 + x7)*(x8) + (x1 + x2*x3*x4*x5)*(x6*x7 + x8 + 1)",
        "(x1*x2*x3*x4*x5*x6 + 1) + (-1*x1*x2*x3*x4*x5*x6 + x7*x8*x1)",
    ];
    for text in cases {
        let phi = d4(text);
        let n = phi.n();
        for tau in 1..=3 {
            let r = reduce_depth4(&phi, tau, CAP).unwrap();
            let expected = phi
                .expand(CAP)
                .unwrap()
                .derivative(&r.trace.a)
                .zero_out(&r.trace.b);
            let got = r.formula.expand(CAP).unwrap();
            assert_eq!(got, expected, "{text} tau={tau}");
            assert!(!got.is_zero());
            assert_eq!(r.formula.delta_far(tau), 0);
            assert!(r.trace.certified);
            let delta = r.initial_delta as f64;
            for (k, m) in r.trace.measures().into_iter().enumerate() {
                let bound = delta * (1.0 - tau as f64 / (2.0 * n as f64)).powi(k as i32);
                assert!(m as f64 <= bound + 1e-9, "{text} tau={tau} step {k}");
            }
            for s in &r.trace.steps {
                assert!(s.after < s.before);
            }
            let steps = (r.trace.a.len() + r.trace.b.len()) as f64;
            assert!(steps <= depth4_step_bound(n, tau, r.simple_size));
            assert!(r.trace.a.iter().all(|x| !r.trace.b.contains(x)));
        }
    }
}

#[test]
fn depth4_zero_input() {
    let phi = d4("(x1*x2) + (-1*x1*x2)");
    assert!(matches!(
        reduce_depth4(&phi, 1, CAP),
        Err(Error::ZeroPolynomial(_))
    ));
}

#[test]
fn trace_display() {
    let r = reduce_depth4(&d4("# n: 4\n(x1*x2 + x3)*(x4)"), 2, CAP).unwrap();
    let text = r.trace.to_string();
    assert!(
        text.starts_with("A = {x1}\nB = {}\ncertified = true\n"),
        "{text}"
    );
    assert!(text.contains("step 1: derive x1  measure 2 -> 0"), "{text}");
}

#[test]
fn squeeze_profiles() {
    let psi = regular(&[2, 2, 3, 1, 1], 4);
    let s = squeeze(&psi, CAP).unwrap();
    assert_eq!(s.profile(), &[18, 2, 1]);
    assert_eq!(s.expand(CAP).unwrap(), psi.expand(CAP).unwrap());

    let psi = regular(&[1, 1, 1, 1, 1], 2);
    assert_eq!(squeeze(&psi, CAP).unwrap().profile(), &[1, 1, 1]);

    let psi = regular(&[2, 2, 2, 2, 2], 6);
    let s = squeeze(&psi, CAP).unwrap();
    assert_eq!(s.profile(), &[8, 4, 2]);
    assert_eq!(s.expand(CAP).unwrap(), psi.expand(CAP).unwrap());

    assert!(matches!(
        squeeze(&regular(&[2, 2, 2], 3), CAP),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        squeeze(&regular(&[4, 2, 4, 4, 1], 6), 10),
        Err(Error::Budget { .. })
    ));
}

#[test]
fn regular_case_small_degree() {
    let psi = regular(&[2, 1, 3, 1, 2], 3);
    let r = regular_to_depth4(&psi, 5.0, CAP).unwrap();
    assert_eq!(r.case, ReducedCase::SmallDegree);
    assert_eq!(r.formula.top_fanin(), 1);
    assert_eq!(r.formula.expand(CAP).unwrap(), psi.expand(CAP).unwrap());
}

#[test]
fn regular_case_large_p1() {
    let psi = regular(&[2, 2, 2, 4, 1], 8);
    let n = 8f64;
    assert!(8.0 > n.powf(1.0 - 1.0 / 25.0));
    assert!(2.0 > n.powf(1.0 / 25.0));
    let r = regular_to_depth4(&psi, 5.0, CAP).unwrap();
    assert_eq!(r.case, ReducedCase::LargeP1);
    assert_eq!(r.formula.top_fanin(), 2);
    assert!(r.formula.gates().iter().all(|g| g.len() == 2));
    assert_eq!(r.formula.expand(CAP).unwrap(), psi.expand(CAP).unwrap());
}

#[test]
fn regular_case_split() {
    let psi = regular(&[2, 1, 2, 4, 1], 4);
    let r = regular_to_depth4(&psi, 5.0, CAP).unwrap();
    match r.case {
        ReducedCase::Split { t, alpha } => {
            assert_eq!(t, 1);
            assert!((alpha - 0.05).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(r.formula.top_fanin(), 4);
    assert!((r.log2_top_fanin - 2.0).abs() < 1e-12);
    assert!(r.formula.gates().iter().all(|g| g.len() == 4));
    assert!(r.fanin_within_bound);
    assert_eq!(r.formula.expand(CAP).unwrap(), psi.expand(CAP).unwrap());
}

#[test]
fn regular_preconditions() {
    let psi = regular(&[2, 2, 2], 3);
    assert!(matches!(
        regular_to_depth4(&psi, 5.0, CAP),
        Err(Error::Precondition(_))
    ));
    let psi = regular(&[2, 2, 2, 2, 1], 8);
    assert!(matches!(
        regular_to_depth4(&psi, 2.0, CAP),
        Err(Error::Precondition(_))
    ));
}
