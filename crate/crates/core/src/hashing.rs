//! Explicit k-wise independent hash families `[n] → [m]`.
//!
//! Members are the polynomials of degree below `k` over `F_q`, enumerated
//! lexicographically by coefficient vector (constant term most
//! significant). A member maps `x ∈ [n]` to `((poly(x) mod q) mod m) + 1`.
//! The final reduction into `[m]` is only approximately uniform; every
//! consumer verifies the conditions it needs explicitly instead of relying
//! on the probabilistic guarantee.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::algebra::{is_prime, next_prime};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFamily {
    n: usize,
    m: usize,
    k: usize,
    q: u64,
}

impl HashFamily {
    /// The family with `q` the least prime at least `max(n, m, 2)`.
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        let q = next_prime(n.max(m).max(2) as u64);
        Self::with_q(n, m, k, q)
    }

    pub fn with_q(n: usize, m: usize, k: usize, q: u64) -> Result<Self> {
        if n == 0 || m == 0 || k == 0 {
            return Err(Error::Parameter(format!(
                "hash family needs n, m, k >= 1 (got n={n}, m={m}, k={k})"
            )));
        }
        if !is_prime(q) || (q as u128) < n.max(m) as u128 {
            return Err(Error::Parameter(format!(
                "q = {q} must be a prime at least max(n, m) = {}",
                n.max(m)
            )));
        }
        Ok(Self { n, m, k, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of members `q^k`, or `None` if it does not fit in a `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.q as u128).checked_pow(self.k as u32)
    }

    /// The member with the given position in lexicographic order.
    pub fn member(&self, mut index: u128) -> Result<HashFn> {
        if self.size().is_some_and(|s| index >= s) {
            return Err(Error::Parameter(format!("hash index {index} out of range")));
        }
        let mut coeffs = vec![0u64; self.k];
        for c in coeffs.iter_mut().rev() {
            *c = (index % self.q as u128) as u64;
            index /= self.q as u128;
        }
        Ok(HashFn {
            coeffs,
            q: self.q,
            m: self.m,
        })
    }

    /// All members in enumeration order.
    pub fn members(&self) -> impl Iterator<Item = HashFn> + '_ {
        let mut coeffs = vec![0u64; self.k];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = HashFn {
                coeffs: coeffs.clone(),
                q: self.q,
                m: self.m,
            };
            done = true;
            for c in coeffs.iter_mut().rev() {
                *c += 1;
                if *c < self.q {
                    done = false;
                    break;
                }
                *c = 0;
            }
            Some(out)
        })
    }

    /// The first member, in enumeration order, passing
    /// [`check_hash_conditions`] for `parts`.
    pub fn find_good(&self, parts: &PartitionFamily) -> Result<(u128, HashFn)> {
        let size = self.size().ok_or_else(|| Error::Budget {
            what: "hash family size".into(),
            needed: (self.q as f64).powi(self.k as i32),
            budget: u64::MAX as f64,
        })?;
        let bound = u64::try_from(size).map_err(|_| Error::Budget {
            what: "hash family size".into(),
            needed: size as f64,
            budget: u64::MAX as f64,
        })?;
        let found = (0..bound).into_par_iter().find_first(|&i| {
            self.member(i as u128)
                .map(|h| check_hash_conditions(&h, parts, self.k, self.n).is_pass())
                .unwrap_or(false)
        });
        match found {
            Some(i) => Ok((i as u128, self.member(i as u128)?)),
            None => Err(Error::HashExhausted { family_size: size }),
        }
    }
}

/// One member of a [`HashFamily`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashFn {
    coeffs: Vec<u64>,
    q: u64,
    m: usize,
}

impl HashFn {
    /// Coefficients `c_0, …, c_{k−1}` of `poly(x) = Σ c_i x^i`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `poly(x) mod q`, before the reduction into `[m]`.
    pub fn raw(&self, x: u64) -> u64 {
        let q = self.q as u128;
        let x = x as u128 % q;
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| (acc * x + c as u128) % q) as u64
    }

    /// Bucket in `1..=m` of the 1-based element `x`.
    pub fn eval(&self, x: usize) -> usize {
        (self.raw(x as u64) % self.m as u64) as usize + 1
    }

    /// Bucket in `0..m` of the 0-based variable index `i`.
    pub fn bucket(&self, i: usize) -> usize {
        self.eval(i + 1) - 1
    }

    /// The buckets `T_1, …, T_m` (as 0-based lists) of the variables in
    /// `vars`.
    pub fn buckets(&self, vars: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m];
        for &v in vars {
            out[self.bucket(v)].push(v);
        }
        out
    }
}

/// A list of partitions `𝓐_1, …, 𝓐_M`, each a family of pairwise-disjoint
/// sets of 0-based variable indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionFamily {
    parts: Vec<Vec<BTreeSet<usize>>>,
}

impl PartitionFamily {
    pub fn new(parts: Vec<Vec<BTreeSet<usize>>>) -> Result<Self> {
        for (i, family) in parts.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for set in family {
                for &x in set {
                    if !seen.insert(x) {
                        return Err(Error::Precondition(format!(
                            "partition {i} uses x{} in two sets",
                            x + 1
                        )));
                    }
                }
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[Vec<BTreeSet<usize>>] {
        &self.parts
    }

    /// Largest set size.
    pub fn max_set(&self) -> usize {
        self.parts
            .iter()
            .flatten()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0)
    }
}

/// Which of the two conditions failed, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HashCheck {
    Pass,
    /// `|h^{-1}(bucket) ∩ A| > k` for the set `A = parts[partition][set]`.
    TooManyInSet {
        partition: usize,
        bucket: usize,
        set: usize,
        count: usize,
    },
    /// More than `k·log₂ n` sets of the partition meet the bucket at least
    /// twice; `set` is the one that crossed the threshold.
    TooManyCollidingSets {
        partition: usize,
        bucket: usize,
        set: usize,
        count: usize,
    },
}

impl HashCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, HashCheck::Pass)
    }
}

/// Checks, for every partition `i` and bucket `j` (1-based), that
/// (1) `|h^{-1}(j) ∩ A| ≤ k` for all `A ∈ 𝓐_i` and
/// (2) `#{A ∈ 𝓐_i : |h^{-1}(j) ∩ A| > 1} ≤ k·log₂ n`.
pub fn check_hash_conditions(h: &HashFn, parts: &PartitionFamily, k: usize, n: usize) -> HashCheck {
    let threshold = k as f64 * (n.max(1) as f64).log2();
    let mut hits = vec![0usize; h.m];
    let mut colliding = vec![0usize; h.m];
    for (i, family) in parts.parts.iter().enumerate() {
        colliding.iter_mut().for_each(|c| *c = 0);
        for (a, set) in family.iter().enumerate() {
            hits.iter_mut().for_each(|c| *c = 0);
            for &x in set {
                hits[h.bucket(x)] += 1;
            }
            for (j, &c) in hits.iter().enumerate() {
                if c > k {
                    return HashCheck::TooManyInSet {
                        partition: i,
                        bucket: j + 1,
                        set: a,
                        count: c,
                    };
                }
                if c > 1 {
                    colliding[j] += 1;
                    if colliding[j] as f64 > threshold {
                        return HashCheck::TooManyCollidingSets {
                            partition: i,
                            bucket: j + 1,
                            set: a,
                            count: colliding[j],
                        };
                    }
                }
            }
        }
    }
    HashCheck::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(v: &[&[usize]]) -> Vec<BTreeSet<usize>> {
        v.iter().map(|s| s.iter().copied().collect()).collect()
    }

    #[test]
    fn constant_member_sends_everything_to_one_bucket() {
        let fam = HashFamily::new(6, 3, 1).unwrap();
        for h in fam.members() {
            let b = h.eval(1);
            assert!((1..=6).all(|x| h.eval(x) == b));
        }
    }

    #[test]
    fn bucket_arithmetic() {
        let fam = HashFamily::with_q(4, 3, 2, 5).unwrap();
        let h = fam.member(1).unwrap();
        assert_eq!(h.coeffs(), &[0, 1]);
        assert_eq!(h.eval(4), 2);
    }

    #[test]
    fn family_size_and_order() {
        let fam = HashFamily::with_q(5, 5, 2, 5).unwrap();
        assert_eq!(fam.size(), Some(25));
        let all: Vec<_> = fam.members().collect();
        assert_eq!(all.len(), 25);
        for (i, h) in all.iter().enumerate() {
            assert_eq!(&fam.member(i as u128).unwrap(), h);
        }
        assert_eq!(all[7].coeffs(), &[1, 2]);
    }

    #[test]
    fn q_selection() {
        assert_eq!(HashFamily::new(16, 10, 3).unwrap().q(), 17);
        assert_eq!(HashFamily::new(1, 1, 1).unwrap().q(), 2);
        assert!(HashFamily::with_q(8, 2, 1, 7).is_err());
        assert!(HashFamily::with_q(4, 2, 1, 6).is_err());
    }

    #[test]
    fn injective_member_passes() {
        let fam = HashFamily::with_q(5, 5, 2, 5).unwrap();
        let h = fam.member(1).unwrap();
        let parts = PartitionFamily::new(vec![sets(&[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(check_hash_conditions(&h, &parts, 2, 5), HashCheck::Pass);
    }

    #[test]
    fn single_bucket_fails_condition_one() {
        let fam = HashFamily::new(4, 1, 2).unwrap();
        let h = fam.member(0).unwrap();
        let parts = PartitionFamily::new(vec![sets(&[&[0, 1, 2]])]).unwrap();
        assert!(matches!(
            check_hash_conditions(&h, &parts, 2, 4),
            HashCheck::TooManyInSet {
                count: 3,
                bucket: 1,
                ..
            }
        ));
        assert_eq!(
            fam.find_good(&parts),
            Err(Error::HashExhausted { family_size: 25 })
        );
    }

    #[test]
    fn condition_two_counts_colliding_sets() {
        let fam = HashFamily::new(8, 1, 2).unwrap();
        let h = fam.member(0).unwrap();
        let pairs: Vec<BTreeSet<usize>> = (0..8).step_by(2).map(|i| [i, i + 1].into()).collect();
        let parts = PartitionFamily::new(vec![pairs]).unwrap();
        // threshold k*log2(n) = 2*3 = 6 with four colliding pairs
        assert_eq!(check_hash_conditions(&h, &parts, 2, 8), HashCheck::Pass);
        // threshold 2*log2(2) = 2: the third pair crosses it
        assert_eq!(
            check_hash_conditions(&h, &parts, 2, 2),
            HashCheck::TooManyCollidingSets {
                partition: 0,
                bucket: 1,
                set: 2,
                count: 3
            }
        );
    }

    #[test]
    fn singletons_accept_first_member() {
        let fam = HashFamily::new(6, 2, 2).unwrap();
        let parts =
            PartitionFamily::new(vec![sets(&[&[0], &[1], &[2]]), sets(&[&[3], &[5]])]).unwrap();
        assert_eq!(fam.find_good(&parts).unwrap().0, 0);
    }

    #[test]
    fn overlapping_partition_rejected() {
        assert!(PartitionFamily::new(vec![sets(&[&[0, 1], &[1]])]).is_err());
    }
}
