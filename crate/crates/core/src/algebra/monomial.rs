use std::cmp::Ordering;
use std::fmt;

/// A multilinear monomial: a set of 0-based variable indices, stored sorted.
///
/// Monomials order by degree first and lexicographically within a degree,
/// so `1 < x1 < x2 < x1*x2 < ...`. Coefficient columns of the lower-bound
/// extractor use the same order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Self(vec![i])
    }

    /// Builds a monomial from indices in any order. Returns `None` if an
    /// index repeats, since that would not be multilinear.
    pub fn new<I: IntoIterator<Item = usize>>(vars: I) -> Option<Self> {
        let mut v: Vec<usize> = vars.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Self(v))
    }

    /// Monomial whose variables are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Product of two monomials, or `None` when they share a variable.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => return None,
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Some(Monomial(out))
    }

    /// Removes every index in `set`; `None` unless all of them are present.
    pub fn divide(&self, set: &[usize]) -> Option<Monomial> {
        if !set.iter().all(|&i| self.contains(i)) {
            return None;
        }
        Some(Monomial(
            self.0
                .iter()
                .copied()
                .filter(|i| !set.contains(i))
                .collect(),
        ))
    }

    pub fn without(&self, i: usize) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&j| j != i).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", v + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_degree_then_lex() {
        let mut ms = [
            Monomial::new([0, 1]).unwrap(),
            Monomial::var(2),
            Monomial::one(),
            Monomial::var(0),
        ];
        ms.sort();
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["1", "x1", "x3", "x1*x2"]);
    }

    #[test]
    fn product_rejects_overlap() {
        let a = Monomial::new([0, 2]).unwrap();
        assert_eq!(a.mul(&Monomial::var(1)), Monomial::new([0, 1, 2]));
        assert_eq!(a.mul(&Monomial::var(2)), None);
        assert!(Monomial::new([3, 3]).is_none());
    }
}
