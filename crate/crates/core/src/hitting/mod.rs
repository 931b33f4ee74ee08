//! Hitting sets: the bucketed small-support construction, lifts, the
//! depth-3 / depth-4 / regular generators, and the black-box PIT driver.
//!
//! Points are stored in a [`BTreeSet`], so every set is deduplicated and
//! iterates in lexicographic order. That order is also the tie-break for
//! witnesses found in parallel.

mod backend;
mod construct;
pub mod params;
mod subsets;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

pub use backend::{grid_points, roabp_hitting_set, GridBackend, RoabpBackend, RoabpGeneratorSpec};
pub use construct::{
    build_ih, depth3_hs, depth4_hs, depth4_hs_from_logs, regular_hs, small_support_hs, HsConfig,
};
pub use subsets::{colex_subsets, subset_pairs};

use crate::algebra::Field;
use crate::error::{Error, Result};

/// Provenance of a point set: which construction produced it and with which
/// parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    pub construction: String,
    pub params: BTreeMap<String, String>,
    /// One entry per component that added new points, in the order merged.
    pub contributions: Vec<String>,
}

impl Meta {
    pub fn new(construction: impl Into<String>) -> Self {
        Self {
            construction: construction.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// A finite set of points in `F^n` with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct HittingSet {
    field: Field,
    n: usize,
    points: BTreeSet<Vec<u64>>,
    pub meta: Meta,
}

impl HittingSet {
    pub fn new(field: Field, n: usize, meta: Meta) -> Self {
        Self {
            field,
            n,
            points: BTreeSet::new(),
            meta,
        }
    }

    pub fn from_points<I>(field: Field, n: usize, points: I, meta: Meta) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u64>>,
    {
        let mut h = Self::new(field, n, meta);
        for p in points {
            h.insert(p)?;
        }
        Ok(h)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &BTreeSet<Vec<u64>> {
        &self.points
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        self.points.contains(p)
    }

    /// Adds a point, reducing its coordinates into the field. Returns
    /// whether it was new.
    pub fn insert(&mut self, p: Vec<u64>) -> Result<bool> {
        if p.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: p.len(),
            });
        }
        let p = p.into_iter().map(|v| self.field.reduce(v)).collect();
        Ok(self.points.insert(p))
    }

    /// Adds every point of `other`; returns how many were new.
    pub fn extend(&mut self, other: &HittingSet) -> Result<usize> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        self.field.ensure_same(&other.field)?;
        let before = self.points.len();
        self.points.extend(other.points.iter().cloned());
        Ok(self.points.len() - before)
    }

    /// Point-set file: a header `n=<n> p=<prime> construction=<name>`, then
    /// one `# key=value` line per parameter, then one comma-separated point
    /// per line.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "n={} p={} construction={}",
            self.n,
            self.field.modulus(),
            self.meta.construction
        );
        for (k, v) in &self.meta.params {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "# points={}", self.points.len());
        for p in &self.points {
            let line: Vec<String> = p.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    /// Parses the point-set file format of [`HittingSet::to_file_string`].
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::PointFile {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut n = None;
        let mut p = None;
        let mut construction = String::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::PointFile {
                line: 1,
                msg: format!("expected key=value, got `{tok}`"),
            })?;
            let bad = |what: &str| Error::PointFile {
                line: 1,
                msg: format!("bad {what} `{v}`"),
            };
            match k {
                "n" => n = Some(v.parse::<usize>().map_err(|_| bad("n"))?),
                "p" => p = Some(v.parse::<u64>().map_err(|_| bad("modulus"))?),
                "construction" => construction = v.to_string(),
                _ => {}
            }
        }
        let n = n.ok_or(Error::PointFile {
            line: 1,
            msg: "header lacks n=".into(),
        })?;
        let field = Field::new(p.ok_or(Error::PointFile {
            line: 1,
            msg: "header lacks p=".into(),
        })?)?;
        let mut meta = Meta::new(construction);
        let mut h = Self::new(field, n, Meta::default());
        for (i, line) in lines {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    if k != "points" {
                        meta.params.insert(k.to_string(), v.to_string());
                    }
                }
                continue;
            }
            let point = line
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::PointFile {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if point.len() != n {
                return Err(Error::PointFile {
                    line: i + 1,
                    msg: format!("point has {} coordinates, expected {n}", point.len()),
                });
            }
            if point.iter().any(|&v| v >= field.modulus()) {
                return Err(Error::PointFile {
                    line: i + 1,
                    msg: "coordinate not reduced modulo p".into(),
                });
            }
            h.points.insert(point);
        }
        h.meta = meta;
        Ok(h)
    }
}

/// The lift `𝓛_A^B(H) = {0,1}^A × {0}^B × H`, where `H` lives on the
/// remaining coordinates `[n] \ (A ∪ B)` in increasing order.
pub fn lift(h: &HittingSet, a: &[usize], b: &[usize], n: usize) -> Result<HittingSet> {
    let mut in_a = vec![false; n];
    let mut in_b = vec![false; n];
    for &x in a {
        if x >= n {
            return Err(Error::VariableOutOfRange { index: x, n });
        }
        in_a[x] = true;
    }
    for &x in b {
        if x >= n {
            return Err(Error::VariableOutOfRange { index: x, n });
        }
        if in_a[x] {
            return Err(Error::Precondition(format!(
                "x{} is in both A and B",
                x + 1
            )));
        }
        in_b[x] = true;
    }
    let a_vars: Vec<usize> = (0..n).filter(|&x| in_a[x]).collect();
    let rest: Vec<usize> = (0..n).filter(|&x| !in_a[x] && !in_b[x]).collect();
    if rest.len() != h.n {
        return Err(Error::Dimension {
            expected: rest.len(),
            got: h.n,
        });
    }
    if a_vars.len() >= 64 {
        return Err(Error::Budget {
            what: "lift over A".into(),
            needed: 2f64.powi(a_vars.len() as i32),
            budget: u64::MAX as f64,
        });
    }
    let mut out = HittingSet::new(h.field, n, h.meta.clone());
    for p in &h.points {
        let mut base = vec![0u64; n];
        for (i, &x) in rest.iter().enumerate() {
            base[x] = p[i];
        }
        for mask in 0u64..(1u64 << a_vars.len()) {
            let mut q = base.clone();
            for (i, &x) in a_vars.iter().enumerate() {
                q[x] = (mask >> i) & 1;
            }
            out.points.insert(q);
        }
    }
    Ok(out)
}

/// The product of restrictions: the points of `F^n` whose restriction to
/// the coordinates `parts[j].0` is a point of `parts[j].1`, for every `j`.
/// The coordinate lists must partition `[n]`.
pub fn product_of_restrictions(
    field: Field,
    n: usize,
    parts: &[(Vec<usize>, Vec<Vec<u64>>)],
    max_points: usize,
) -> Result<HittingSet> {
    let mut seen = vec![false; n];
    for (coords, points) in parts {
        for &x in coords {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Precondition(format!(
                    "coordinate lists do not partition [{n}] (x{})",
                    x + 1
                )));
            }
        }
        if let Some(p) = points.iter().find(|p| p.len() != coords.len()) {
            return Err(Error::Dimension {
                expected: coords.len(),
                got: p.len(),
            });
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Precondition(format!(
            "coordinate lists do not cover [{n}]"
        )));
    }
    let total: f64 = parts.iter().map(|(_, p)| p.len() as f64).product();
    if total > max_points as f64 {
        return Err(Error::Budget {
            what: "bucket product I_h".into(),
            needed: total,
            budget: max_points as f64,
        });
    }
    let mut acc: Vec<Vec<u64>> = vec![vec![0; n]];
    for (coords, points) in parts {
        let mut next = Vec::with_capacity(acc.len() * points.len());
        for base in &acc {
            for p in points {
                let mut q = base.clone();
                for (i, &x) in coords.iter().enumerate() {
                    q[x] = p[i];
                }
                next.push(q);
            }
        }
        acc = next;
    }
    HittingSet::from_points(field, n, acc, Meta::new("product"))
}

/// Outcome of black-box PIT over a point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ZeroOnH,
    Nonzero { witness: Vec<u64>, value: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitOutcome {
    pub verdict: Verdict,
    /// Evaluations a sequential scan in lexicographic order would make.
    pub evals: usize,
}

/// Evaluates `f` on the points of `h` (in parallel) and reports the
/// lexicographically first point where it is nonzero.
pub fn pit_blackbox<F>(f: F, h: &HittingSet) -> Result<PitOutcome>
where
    F: Fn(&[u64]) -> Result<u64> + Sync,
{
    let points: Vec<&Vec<u64>> = h.points.iter().collect();
    let hit = points.par_iter().position_first(|p| !matches!(f(p), Ok(0)));
    match hit {
        None => Ok(PitOutcome {
            verdict: Verdict::ZeroOnH,
            evals: points.len(),
        }),
        Some(i) => {
            let value = f(points[i])?;
            if value == 0 {
                return Err(Error::Evaluation(
                    "evaluation is not deterministic: witness re-check gave zero".into(),
                ));
            }
            Ok(PitOutcome {
                verdict: Verdict::Nonzero {
                    witness: points[i].clone(),
                    value,
                },
                evals: i + 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp() -> Field {
        Field::default()
    }

    #[test]
    fn lift_example() {
        let h = HittingSet::from_points(fp(), 2, [vec![7, 9]], Meta::new("t")).unwrap();
        let l = lift(&h, &[1], &[2], 4).unwrap();
        let pts: Vec<_> = l.points().iter().cloned().collect();
        assert_eq!(pts, vec![vec![7, 0, 0, 9], vec![7, 1, 0, 9]]);
        assert_eq!(lift(&h, &[], &[], 2).unwrap().points(), h.points());
        assert!(lift(&h, &[1], &[1], 4).is_err());
        assert!(lift(&h, &[1], &[], 4).is_err());
    }

    #[test]
    fn product_examples() {
        let only =
            product_of_restrictions(fp(), 2, &[(vec![0, 1], vec![vec![3, 4], vec![5, 6]])], 100)
                .unwrap();
        assert_eq!(only.len(), 2);
        let bits: Vec<(Vec<usize>, Vec<Vec<u64>>)> =
            (0..3).map(|i| (vec![i], vec![vec![0], vec![1]])).collect();
        let cube = product_of_restrictions(fp(), 3, &bits, 100).unwrap();
        assert_eq!(
            cube.points().iter().cloned().collect::<Vec<_>>(),
            grid_points(3, 1)
        );
        assert!(product_of_restrictions(fp(), 3, &bits, 7).is_err());
        assert!(product_of_restrictions(fp(), 4, &bits, 100).is_err());
    }

    #[test]
    fn pit_examples() {
        let h = HittingSet::from_points(fp(), 4, grid_points(4, 1), Meta::new("cube")).unwrap();
        let zero = pit_blackbox(|_| Ok(0), &h).unwrap();
        assert_eq!(
            zero,
            PitOutcome {
                verdict: Verdict::ZeroOnH,
                evals: 16
            }
        );
        let f = |p: &[u64]| Ok((p[0] + p[1]) * p[2] + p[3]);
        let only = HittingSet::from_points(fp(), 4, [vec![1, 1, 1, 1]], Meta::new("one")).unwrap();
        assert_eq!(
            pit_blackbox(f, &only).unwrap().verdict,
            Verdict::Nonzero {
                witness: vec![1, 1, 1, 1],
                value: 3
            }
        );
        let out = pit_blackbox(f, &h).unwrap();
        assert_eq!(
            out.verdict,
            Verdict::Nonzero {
                witness: vec![0, 0, 0, 1],
                value: 1
            }
        );
        assert_eq!(out.evals, 2);
        let err = pit_blackbox(|_| Err(Error::Evaluation("boom".into())), &h);
        assert!(err.is_err());
    }

    #[test]
    fn file_roundtrip() {
        let meta = Meta::new("depth3").param("delta", 0.25).param("k", 3);
        let h = HittingSet::from_points(fp(), 3, grid_points(3, 1), meta).unwrap();
        let text = h.to_file_string();
        assert!(text
            .starts_with("n=3 p=2305843009213693951 construction=depth3\n# delta=0.25\n# k=3\n"));
        let back = HittingSet::parse_file(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_file_string(), text);
        assert!(matches!(
            HittingSet::parse_file("n=2 p=7\n1,2,3\n"),
            Err(Error::PointFile { line: 2, .. })
        ));
        assert!(HittingSet::parse_file("n=2 p=8\n").is_err());
    }
}
