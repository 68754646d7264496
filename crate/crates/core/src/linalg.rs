//! Exact rank over the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Columns without a pivot are skipped; every division in the update step
/// is exact.
pub fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let nrows = rows.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let v = pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
        }
        prev = pivot.clone();
        rank += 1;
    }
    rank
}

/// Rank of small integer rows; converts and calls [`bareiss_rank`].
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    bareiss_rank(
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    fn rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
        let mut m: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.rem_euclid(p)).collect())
            .collect();
        let ncols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = pow_mod(m[rank][col], p - 2, p);
            let pivot = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                let f = row[col] * inv % p;
                for (x, y) in row[col..ncols].iter_mut().zip(&pivot[col..ncols]) {
                    *x = (*x - f * y).rem_euclid(p);
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_cases() {
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(integer_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(integer_rank(&[vec![0, 2, 1], vec![0, 4, 3], vec![0, 6, 4]]), 2);
        assert_eq!(integer_rank(&[vec![2, 0], vec![0, 3], vec![1, 1]]), 2);
    }

    proptest! {
        #[test]
        fn agrees_with_modular_rank(
            rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 0..7)
        ) {
            // Bareiss rank is the rational rank; it bounds every modular rank
            // from above and matches it for a large prime.
            let r = integer_rank(&rows);
            prop_assert_eq!(r, rank_mod_p(&rows, 1_000_003));
            prop_assert!(rank_mod_p(&rows, 3) <= r);
        }
    }
}
