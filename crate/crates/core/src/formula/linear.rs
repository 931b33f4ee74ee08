use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::Result;

/// An affine function `c + Σ a_i x_i`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, u64>,
    constant: u64,
}

impl LinearForm {
    pub fn new<I: IntoIterator<Item = (usize, u64)>>(
        field: Field,
        coeffs: I,
        constant: u64,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (i, c) in coeffs {
            let e = map.entry(i).or_insert(0);
            *e = field.add(*e, field.reduce(c));
        }
        map.retain(|_, c| *c != 0);
        Self {
            coeffs: map,
            constant: field.reduce(constant),
        }
    }

    pub fn constant_form(field: Field, c: u64) -> Self {
        Self::new(field, [], c)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(&i).copied().unwrap_or(0)
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.coeffs.contains_key(&i)
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant == 0
    }

    pub fn sparsity(&self) -> usize {
        self.coeffs.len() + usize::from(self.constant != 0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn eval(&self, field: &Field, point: &[u64]) -> u64 {
        self.coeffs.iter().fold(self.constant, |acc, (&i, &c)| {
            field.add(acc, field.mul(c, field.reduce(point[i])))
        })
    }

    /// The form with `x_i = 0` for every `i` in `b`.
    pub fn zero_out(&self, b: &[usize]) -> Self {
        let mut out = self.clone();
        out.coeffs.retain(|i, _| !b.contains(i));
        out
    }

    pub fn to_poly(&self, field: Field, n: usize) -> Result<SparseMultilinearPoly> {
        SparseMultilinearPoly::from_terms(
            field,
            n,
            std::iter::once((Monomial::one(), self.constant))
                .chain(self.coeffs.iter().map(|(&i, &c)| (Monomial::var(i), c))),
        )
    }

    /// Writes the form in the polynomial text grammar.
    pub fn write(&self, field: &Field, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !std::mem::replace(&mut first, false) {
                write!(f, " + ")?;
            }
            Ok(())
        };
        if self.constant != 0 || self.coeffs.is_empty() {
            sep(f)?;
            write!(f, "{}", field.to_signed(self.constant))?;
        }
        for (&i, &c) in &self.coeffs {
            sep(f)?;
            match field.to_signed(c) {
                1 => write!(f, "x{}", i + 1)?,
                s => write!(f, "{s}*x{}", i + 1)?,
            }
        }
        Ok(())
    }
}
