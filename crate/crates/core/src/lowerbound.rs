//! Nonzero multilinear polynomials vanishing on a given point set.

use rayon::prelude::*;

use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::{Error, Result};
use crate::hitting::HittingSet;

/// Default cap on the number of matrix entries of the linear system.
pub const DEFAULT_MAX_CELLS: usize = 1 << 26;

/// The first `count` multilinear monomials over `n` variables, by degree
/// and then lexicographically.
pub fn first_monomials(n: usize, count: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(count);
    for deg in 0..=n {
        if out.len() >= count {
            break;
        }
        let mut idx: Vec<usize> = (0..deg).collect();
        loop {
            if out.len() >= count {
                break;
            }
            out.push(Monomial::new(idx.iter().copied()).expect("distinct indices"));
            let Some(i) = (0..deg).rev().find(|&i| idx[i] < n - deg + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..deg {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

fn monomial_value(field: &Field, m: &Monomial, point: &[u64]) -> u64 {
    m.vars()
        .iter()
        .fold(1, |acc, &v| field.mul(acc, field.reduce(point[v])))
}

/// A nonzero multilinear polynomial in `n` variables vanishing on every
/// point of `points`.
///
/// The unknowns are the coefficients of the first `|H|+1` monomials in
/// degree-then-lexicographic order. After row reduction the first free
/// column is set to 1 and every other free column to 0, so the output
/// depends only on the point set.
pub fn vanishing_on(
    field: Field,
    n: usize,
    points: &[Vec<u64>],
    max_cells: usize,
) -> Result<SparseMultilinearPoly> {
    let rows = points.len();
    if n < 64 && (rows as u128) >= (1u128 << n) {
        return Err(Error::Precondition(format!(
            "need |H| < 2^n, got |H| = {rows} with n = {n}"
        )));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: p.len(),
        });
    }
    let cols = rows + 1;
    let cells = rows as f64 * cols as f64;
    if cells > max_cells as f64 {
        return Err(Error::Budget {
            what: "linear system entries".into(),
            needed: cells,
            budget: max_cells as f64,
        });
    }
    let monomials = first_monomials(n, cols);
    let mut matrix: Vec<Vec<u64>> = points
        .par_iter()
        .map(|p| {
            monomials
                .iter()
                .map(|m| monomial_value(&field, m, p))
                .collect()
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut free = None;
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows).find(|&i| matrix[i][c] != 0) else {
            if free.is_none() {
                free = Some(c);
            }
            continue;
        };
        matrix.swap(r, found);
        let inv = field.inv(matrix[r][c]).expect("nonzero pivot");
        for v in matrix[r].iter_mut().skip(c) {
            *v = field.mul(*v, inv);
        }
        let pivot_row = matrix[r].clone();
        matrix.par_iter_mut().enumerate().for_each(|(i, row)| {
            let factor = row[c];
            if i != r && factor != 0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *v = field.sub(*v, field.mul(factor, pv));
                }
            }
        });
        pivots.push(c);
        r += 1;
        if r == rows {
            if free.is_none() && c + 1 < cols {
                free = Some(c + 1);
            }
            break;
        }
    }
    let free =
        free.ok_or_else(|| Error::Internal("no free column in an underdetermined system".into()))?;
    let mut terms = vec![(monomials[free].clone(), 1u64)];
    for (i, &pc) in pivots.iter().enumerate() {
        if pc < free {
            terms.push((monomials[pc].clone(), field.neg(matrix[i][free])));
        }
    }
    SparseMultilinearPoly::from_terms(field, n, terms)
}

/// `vanishing_on` for the points of a hitting set.
pub fn vanishing_multilinear(h: &HittingSet, max_cells: usize) -> Result<SparseMultilinearPoly> {
    let points: Vec<Vec<u64>> = h.points().iter().cloned().collect();
    vanishing_on(h.field(), h.n(), &points, max_cells)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Pass,
    ZeroPolynomial,
    NonzeroAt(Vec<u64>),
    Mismatch(String),
}

impl Certificate {
    pub fn is_pass(&self) -> bool {
        matches!(self, Certificate::Pass)
    }
}

/// Checks that `f` is nonzero and vanishes on every point of `h`.
pub fn verify_certificate(f: &SparseMultilinearPoly, h: &HittingSet) -> Certificate {
    if f.field() != h.field() || f.n() != h.n() {
        return Certificate::Mismatch(format!(
            "polynomial over F_{} in {} variables, points over F_{} in {}",
            f.field().modulus(),
            f.n(),
            h.field().modulus(),
            h.n()
        ));
    }
    if f.is_zero() {
        return Certificate::ZeroPolynomial;
    }
    let points: Vec<&Vec<u64>> = h.points().iter().collect();
    match points
        .par_iter()
        .position_first(|p| !matches!(f.eval(p), Ok(0)))
    {
        Some(i) => Certificate::NonzeroAt(points[i].clone()),
        None => Certificate::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitting::Meta;

    fn hs(n: usize, pts: &[&[u64]]) -> HittingSet {
        HittingSet::from_points(
            Field::default(),
            n,
            pts.iter().map(|p| p.to_vec()),
            Meta::new("test"),
        )
        .unwrap()
    }

    #[test]
    fn monomial_order() {
        let m: Vec<String> = first_monomials(3, 8)
            .iter()
            .map(|m| format!("{:?}", m.vars()))
            .collect();
        assert_eq!(
            m,
            [
                "[]",
                "[0]",
                "[1]",
                "[2]",
                "[0, 1]",
                "[0, 2]",
                "[1, 2]",
                "[0, 1, 2]"
            ]
        );
        assert_eq!(first_monomials(3, 100).len(), 8);
        let all = first_monomials(5, 32);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_examples() {
        let h = hs(1, &[&[0]]);
        let f = vanishing_multilinear(&h, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(f.to_string(), "x1");

        let h = hs(2, &[&[0, 0], &[1, 1]]);
        let f = vanishing_multilinear(&h, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(f.to_string(), "-1*x1 + x2");
        assert!(verify_certificate(&f, &h).is_pass());

        let h = hs(3, &[]);
        let f = vanishing_multilinear(&h, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(f.as_constant(), Some(1));
    }

    #[test]
    fn full_cube_rejected() {
        let h = hs(1, &[&[0], &[1]]);
        assert!(matches!(
            vanishing_multilinear(&h, DEFAULT_MAX_CELLS),
            Err(Error::Precondition(_))
        ));
        let h = hs(2, &[&[0, 0], &[1, 1], &[2, 3]]);
        assert!(matches!(
            vanishing_multilinear(&h, 4),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn certificate_failures() {
        let field = Field::default();
        let h = hs(2, &[&[0, 0]]);
        let one = SparseMultilinearPoly::constant(field, 2, 1);
        assert_eq!(
            verify_certificate(&one, &h),
            Certificate::NonzeroAt(vec![0, 0])
        );
        let zero = SparseMultilinearPoly::zero(field, 2);
        assert_eq!(verify_certificate(&zero, &h), Certificate::ZeroPolynomial);
        let other = SparseMultilinearPoly::constant(field, 3, 1);
        assert!(matches!(
            verify_certificate(&other, &h),
            Certificate::Mismatch(_)
        ));
    }
}
