/// The `k`-subsets of `universe` in colexicographic order.
pub fn colex_subsets(universe: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let m = universe.len();
    let mut mask: Option<u64> = if k > m || m > 63 {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = mask?;
        mask = if cur == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let next = (((r ^ cur) >> 2) / c) | r;
            (next < (1u64 << m)).then_some(next)
        };
        Some(
            (0..m)
                .filter(|i| cur >> i & 1 == 1)
                .map(|i| universe[i])
                .collect(),
        )
    })
}

/// Disjoint pairs `(A, B)` of subsets of `[n]` with `|A| ≤ ra` and
/// `|B| ≤ rb`, ordered by `|A| + |B|`, then `|A|`, then `A` and `B`
/// colexicographically.
pub fn subset_pairs(
    n: usize,
    ra: usize,
    rb: usize,
) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    let ra = ra.min(n);
    let rb = rb.min(n);
    (0..=(ra + rb).min(n)).flat_map(move |total| {
        let lo = total.saturating_sub(rb);
        let hi = total.min(ra);
        (lo..=hi).flat_map(move |a_size| {
            let all: Vec<usize> = (0..n).collect();
            let a_sets: Vec<Vec<usize>> = colex_subsets(&all, a_size).collect();
            a_sets.into_iter().flat_map(move |a| {
                let rest: Vec<usize> = (0..n).filter(|x| !a.contains(x)).collect();
                let b_sets: Vec<Vec<usize>> = colex_subsets(&rest, total - a_size).collect();
                b_sets.into_iter().map(move |b| (a.clone(), b))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn colex_order() {
        let u = [0, 1, 2, 3];
        let s: Vec<_> = colex_subsets(&u, 2).collect();
        assert_eq!(
            s,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            colex_subsets(&u, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(colex_subsets(&u, 5).count(), 0);
        assert_eq!(colex_subsets(&u, 4).count(), 1);
        for k in 0..=7 {
            assert_eq!(
                colex_subsets(&[0, 1, 2, 3, 4, 5, 6], k).count(),
                binom(7, k)
            );
        }
    }

    #[test]
    fn pair_counts() {
        // every variable is in A, in B or in neither
        assert_eq!(subset_pairs(5, 5, 5).count(), 243);
        assert_eq!(subset_pairs(5, 2, 0).count(), 1 + 5 + 10);
        let first: Vec<_> = subset_pairs(3, 1, 1).take(4).collect();
        assert_eq!(
            first,
            vec![
                (vec![], vec![]),
                (vec![], vec![0]),
                (vec![], vec![1]),
                (vec![], vec![2]),
            ]
        );
    }
}
