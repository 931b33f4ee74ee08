//! Parameter arithmetic for the bucketed constructions.
//!
//! All quantities are computed in floating point from `n` and the class
//! parameters, rounded up and clamped to the ranges that make sense at
//! small `n`. Rounding up tolerates a relative error of `1e-9` so that
//! exact values such as `16^{1/2} + 2·log₂16 = 12` are not pushed to 13.

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// `⌈x⌉`, ignoring floating-point noise just above an integer.
pub fn ceil_tol(x: f64) -> f64 {
    (x - TOL * x.abs().max(1.0)).ceil()
}

fn clamp_count(x: f64, lo: usize, hi: usize) -> usize {
    if x.is_nan() {
        return lo;
    }
    let c = ceil_tol(x);
    if c <= lo as f64 {
        lo
    } else if c >= hi as f64 {
        hi
    } else {
        c as usize
    }
}

/// Number of hash values per bucket: `k = ⌈n^δ + 2·log₂n⌉`, clamped to
/// `[1, n]`.
pub fn hash_k(n: usize, delta: f64) -> usize {
    let nf = n as f64;
    clamp_count(nf.powf(delta) + 2.0 * nf.log2(), 1, n.max(1))
}

/// Number of buckets: `m = ⌈10·n^{1−(ε+δ)/2}⌉`, clamped to `[1, n]`.
pub fn hash_m(n: usize, delta: f64, epsilon: f64) -> usize {
    let nf = n as f64;
    clamp_count(10.0 * nf.powf(1.0 - (epsilon + delta) / 2.0), 1, n.max(1))
}

/// ε for the depth-3 construction: `2/3 − δ/3`.
pub fn depth3_epsilon(delta: f64) -> f64 {
    2.0 / 3.0 - delta / 3.0
}

/// Support bound `τ = n^{1−ε}` of the restricted class.
pub fn tau(n: usize, epsilon: f64) -> f64 {
    (n as f64).powf(1.0 - epsilon)
}

/// The ROABP sparsity parameter `s` of each class, as `log₂ s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BottomClass {
    /// Linear forms: `s = k + 1`.
    Linear,
    /// Sparse polynomials: `s = 2^k`.
    Sparse,
}

impl BottomClass {
    pub fn log2_s(self, k: usize) -> f64 {
        match self {
            BottomClass::Linear => ((k + 1) as f64).log2(),
            BottomClass::Sparse => k as f64,
        }
    }
}

/// Everything the bucketed construction needs, in one place.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallSupportParams {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub bottom: BottomClass,
    pub k: usize,
    pub m: usize,
    /// `log₂ M` of the top fan-in bound.
    pub log2_m: f64,
    pub log2_s: f64,
    /// `t = k·log₂ n`, the number of factors that may share a bucket.
    pub t: f64,
    /// `log₂` of the per-bucket ROABP width `M·s^t`.
    pub log2_width: f64,
}

impl SmallSupportParams {
    pub fn new(
        n: usize,
        delta: f64,
        epsilon: f64,
        log2_m: f64,
        bottom: BottomClass,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        for (name, v) in [("delta", delta), ("epsilon", epsilon), ("log2 M", log2_m)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        let k = hash_k(n, delta);
        let m = hash_m(n, delta, epsilon);
        let log2_s = bottom.log2_s(k);
        let t = k as f64 * (n as f64).log2();
        Ok(Self {
            n,
            delta,
            epsilon,
            bottom,
            k,
            m,
            log2_m,
            log2_s,
            t,
            log2_width: log2_m.max(0.0) + t * log2_s,
        })
    }
}

/// Parameters of the depth-3 construction for top fan-in `2^{n^δ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Depth3Params {
    pub small: SmallSupportParams,
    /// Largest derived set `r = ⌈n^ε·log₂M·log₂n⌉`, clamped to `[0, n]`.
    pub r: usize,
}

impl Depth3Params {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Parameter(format!(
                "delta must lie in [0, 1], got {delta}"
            )));
        }
        let epsilon = depth3_epsilon(delta);
        let log2_m = (n as f64).powf(delta);
        let small = SmallSupportParams::new(n, delta, epsilon, log2_m, BottomClass::Linear)?;
        let nf = n as f64;
        let r = clamp_count(nf.powf(epsilon) * log2_m * nf.log2(), 0, n);
        Ok(Self { small, r })
    }
}

/// Parameters of the depth-4 construction for top fan-in `M` and size `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Depth4Params {
    pub small: SmallSupportParams,
    pub log2_s_size: f64,
    /// `r = ⌈2·n^ε·log₂S⌉`, clamped to `[0, n]`.
    pub r: usize,
}

impl Depth4Params {
    /// Checks `(log₂M)³·log₂S < n`, then derives the parameters.
    pub fn new(n: usize, m: f64, s: f64) -> Result<Self> {
        if m < 2.0 || s < 2.0 {
            return Err(Error::Parameter(format!(
                "depth-4 construction needs M >= 2 and S >= 2 (got M={m}, S={s})"
            )));
        }
        let (lm, ls) = (m.log2(), s.log2());
        let lhs = lm.powi(3) * ls;
        if lhs >= n as f64 {
            return Err(Error::Parameter(format!(
                "(log2 M)^3 * log2 S = {lhs:.3} must be below n = {n}"
            )));
        }
        Self::from_logs(n, lm, ls)
    }

    /// Derives the parameters from `log₂M` and `log₂S` without checking
    /// the size hypothesis.
    pub fn from_logs(n: usize, log2_m: f64, log2_s: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("depth-4 construction needs n >= 2".into()));
        }
        if log2_m <= 0.0 || log2_s <= 0.0 {
            return Err(Error::Parameter(format!(
                "log2 M and log2 S must be positive (got {log2_m}, {log2_s})"
            )));
        }
        let nf = n as f64;
        let ln = nf.ln();
        let delta = log2_m.ln() / ln;
        let n_eps = nf.powf(2.0 / 3.0) * log2_m / log2_s.powf(2.0 / 3.0);
        let epsilon = n_eps.ln() / ln;
        let small = SmallSupportParams::new(n, delta, epsilon, log2_m, BottomClass::Sparse)?;
        let r = clamp_count(2.0 * n_eps * log2_s, 0, n);
        Ok(Self {
            small,
            log2_s_size: log2_s,
            r,
        })
    }
}

/// Largest admissible δ for regular formulas of product depth `d`.
pub fn regular_delta_bound(d: usize) -> f64 {
    5f64.powi(-(d as i32 + 1))
}
