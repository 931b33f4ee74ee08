use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Field, Monomial};
use crate::error::{Error, Result};

/// A multilinear polynomial in `n` variables over a prime field, stored as a
/// map from monomial to nonzero coefficient.
///
/// The representation is canonical: no zero coefficients, no duplicate
/// monomials, every index below `n`. Two polynomials are equal exactly when
/// they have the same field, variable count and terms. The zero polynomial is
/// the empty map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMultilinearPoly {
    field: Field,
    n: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl SparseMultilinearPoly {
    pub fn zero(field: Field, n: usize) -> Self {
        Self {
            field,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, n: usize, c: u64) -> Self {
        let mut p = Self::zero(field, n);
        p.add_term(Monomial::one(), c);
        p
    }

    /// The polynomial `x_i` (0-based index).
    pub fn var(field: Field, n: usize, i: usize) -> Result<Self> {
        Self::from_terms(field, n, [(Monomial::var(i), 1)])
    }

    /// Collects terms, merging repeated monomials and dropping zeros.
    pub fn from_terms<I>(field: Field, n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let mut p = Self::zero(field, n);
        for (m, c) in terms {
            if let Some(v) = m.max_var() {
                if v >= n {
                    return Err(Error::VariableOutOfRange { index: v, n });
                }
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let c = self.field.reduce(c);
        if c == 0 {
            return;
        }
        let f = self.field;
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// ‖f‖: the number of monomials with a nonzero coefficient.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Monomial::one()).copied(),
            _ => None,
        }
    }

    /// Index `i` if the polynomial is exactly `x_i` with coefficient 1.
    pub fn as_bare_var(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, &c) = self.terms.iter().next()?;
        (c == 1 && m.degree() == 1).then(|| m.vars()[0])
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// var(f): variables occurring in some monomial.
    pub fn var_set(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().copied())
            .collect()
    }

    /// var*(f): variables `x` with `∂_x f ≠ 0` and `f|_{x=0} ≠ 0`, i.e. the
    /// variables of `f` that do not divide it.
    pub fn var_star(&self) -> BTreeSet<usize> {
        self.var_set()
            .into_iter()
            .filter(|&x| self.terms.keys().any(|m| !m.contains(x)))
            .collect()
    }

    /// `x_i | f` for a nonzero `f`.
    pub fn divisible_by(&self, i: usize) -> bool {
        !self.is_zero() && self.terms.keys().all(|m| m.contains(i))
    }

    /// Same polynomial viewed in `n` variables.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if let Some(v) = self.var_set().last() {
            if *v >= n {
                return Err(Error::VariableOutOfRange { index: *v, n });
            }
        }
        Ok(Self {
            field: self.field,
            n,
            terms: self.terms.clone(),
        })
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: point.len(),
            });
        }
        let f = &self.field;
        Ok(self.terms.iter().fold(0, |acc, (m, &c)| {
            let t = m
                .vars()
                .iter()
                .fold(c, |t, &i| f.mul(t, f.reduce(point[i])));
            f.add(acc, t)
        }))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.field.ensure_same(&other.field)?;
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.field, self.n);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, usize::MAX)
    }

    /// Product, failing if a pair of monomials shares a variable or the
    /// result would exceed `cap` terms.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.field, self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let m = a.mul(b).ok_or_else(|| {
                    Error::NotMultilinear(format!("{a} * {b} repeats a variable"))
                })?;
                out.add_term(m, self.field.mul(ca, cb));
                if out.terms.len() > cap {
                    return Err(Error::TermCap { cap });
                }
            }
        }
        Ok(out)
    }

    /// ∂_A f: keeps monomials containing every variable of `a`, with those
    /// variables removed.
    pub fn derivative(&self, a: &[usize]) -> Self {
        let mut out = Self::zero(self.field, self.n);
        for (m, &c) in &self.terms {
            if let Some(rest) = m.divide(a) {
                out.add_term(rest, c);
            }
        }
        out
    }

    /// f|_{B = values}; the result keeps all `n` indices.
    pub fn restrict(&self, b: &[usize], values: &[u64]) -> Result<Self> {
        if b.len() != values.len() {
            return Err(Error::Dimension {
                expected: b.len(),
                got: values.len(),
            });
        }
        let f = &self.field;
        let mut out = Self::zero(self.field, self.n);
        for (m, &c) in &self.terms {
            let mut coeff = c;
            let mut rest = Vec::with_capacity(m.degree());
            for &v in m.vars() {
                match b.iter().position(|&x| x == v) {
                    Some(k) => coeff = f.mul(coeff, f.reduce(values[k])),
                    None => rest.push(v),
                }
            }
            out.add_term(Monomial::new(rest).expect("sub-monomial"), coeff);
        }
        Ok(out)
    }

    /// f|_{B=0}.
    pub fn zero_out(&self, b: &[usize]) -> Self {
        let mut out = self.clone();
        out.terms.retain(|m, _| !b.iter().any(|&x| m.contains(x)));
        out
    }
}

impl fmt::Display for SparseMultilinearPoly {
    /// Text form: `+`-separated terms, each `c*x<i>*...`, `x<i>*...` or `c`.
    /// Coefficients print in the symmetric range, so `p - 1` shows as `-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, &c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let c = self.field.to_signed(c);
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::new(101).unwrap()
    }

    fn mono(v: &[usize]) -> Monomial {
        Monomial::new(v.iter().copied()).unwrap()
    }

    fn poly(n: usize, terms: &[(&[usize], i128)]) -> SparseMultilinearPoly {
        let fl = f();
        SparseMultilinearPoly::from_terms(
            fl,
            n,
            terms.iter().map(|(v, c)| (mono(v), fl.from_i128(*c))),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        // x1*x2 + x3 at (1,1,0)
        let p = poly(3, &[(&[0, 1], 1), (&[2], 1)]);
        assert_eq!(p.eval(&[1, 1, 0]).unwrap(), 1);
        assert_eq!(
            SparseMultilinearPoly::zero(f(), 3)
                .eval(&[5, 6, 7])
                .unwrap(),
            0
        );
        // (x1+x2)(x3+x4) at all ones
        let a = poly(4, &[(&[0], 1), (&[1], 1)]);
        let b = poly(4, &[(&[2], 1), (&[3], 1)]);
        assert_eq!(a.mul(&b).unwrap().eval(&[1, 1, 1, 1]).unwrap(), 4);
        assert!(matches!(p.eval(&[1, 1]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn derivative_examples() {
        let p = poly(2, &[(&[0, 1], 1), (&[1], 1)]);
        assert_eq!(p.derivative(&[0]), poly(2, &[(&[1], 1)]));
        assert_eq!(p.derivative(&[]), p);
        // ∂_{x1}((x1+x2)x3 + x4) = x3
        let q = poly(4, &[(&[0, 2], 1), (&[1, 2], 1), (&[3], 1)]);
        assert_eq!(q.derivative(&[0]), poly(4, &[(&[2], 1)]));
    }

    #[test]
    fn restrict_examples() {
        let p = poly(3, &[(&[0, 1], 1), (&[2], 1)]);
        assert_eq!(p.restrict(&[2], &[0]).unwrap(), poly(3, &[(&[0, 1], 1)]));
        assert_eq!(p.restrict(&[], &[]).unwrap(), p);
        // ((x1+x2)x3)|_{x1=1,x2=1} = 2*x3
        let q = poly(3, &[(&[0, 2], 1), (&[1, 2], 1)]);
        assert_eq!(q.restrict(&[0, 1], &[1, 1]).unwrap(), poly(3, &[(&[2], 2)]));
        assert!(q.restrict(&[0], &[]).is_err());
    }

    #[test]
    fn var_star_examples() {
        assert!(poly(2, &[(&[0, 1], 1)]).var_star().is_empty());
        assert_eq!(
            poly(2, &[(&[0], 1), (&[1], 1)]).var_star(),
            BTreeSet::from([0, 1])
        );
        // x1*x2 + x1: x1 divides, x2 does not
        assert_eq!(
            poly(2, &[(&[0, 1], 1), (&[0], 1)]).var_star(),
            BTreeSet::from([1])
        );
    }

    #[test]
    fn display_uses_signed_coefficients() {
        let p = poly(2, &[(&[0], 1), (&[1], -1), (&[], 3)]);
        assert_eq!(p.to_string(), "3 + x1 + -1*x2");
        assert_eq!(SparseMultilinearPoly::zero(f(), 2).to_string(), "0");
    }

    #[test]
    fn non_multilinear_product_is_rejected() {
        let a = poly(2, &[(&[0], 1)]);
        assert!(matches!(a.mul(&a), Err(Error::NotMultilinear(_))));
    }
}
