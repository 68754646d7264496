//! Graded dimensions of `T^1` by exact linear algebra, used as an oracle
//! for the basis builder.
//!
//! With `f_r = u_r^{n_r} - prod_{j<r} u_j^{l_j^(r)}`,
//! `T^1 = C[u]^g / (Jacobian columns + (f_1, ..., f_g) C[u]^g)`. The unit
//! vector `e_r` has degree `-n_r a_r`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::build_basis;
use crate::error::{Error, Result};
use crate::linalg::bareiss_rank;
use crate::semigroup::FreeStructure;

const MAX_WIDENINGS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TjurinaGradedDims {
    /// Nonzero graded dimensions.
    pub dims: BTreeMap<i64, u64>,
    pub total: u64,
    pub window: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleComparison {
    pub matches: bool,
    pub conductor: u64,
    pub basis_histogram: BTreeMap<i64, u64>,
    pub oracle: TjurinaGradedDims,
}

/// All `k` with `sum k_i w_i = target`, largest `k_0` first.
pub fn enumerate_monomials(weights: &[u64], target: u64) -> Vec<Vec<u64>> {
    fn rec(weights: &[u64], rem: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        match weights {
            [] => {
                if rem == 0 {
                    out.push(cur.clone());
                }
            }
            [w, rest @ ..] => {
                for k in (0..=rem / w).rev() {
                    cur.push(k);
                    rec(rest, rem - k * w, cur, out);
                    cur.pop();
                }
            }
        }
    }
    assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
    let mut out = Vec::new();
    rec(weights, target, &mut Vec::with_capacity(weights.len()), &mut out);
    out
}

type Monomial = Vec<u64>;
/// Sparse module element: `(monomial, unit) -> coefficient`.
type ModuleVector = Vec<((Monomial, usize), i64)>;

fn shifted(m: &[u64], by: &[u64], reduce: Option<usize>) -> Monomial {
    let mut out: Monomial = m.iter().zip(by).map(|(x, y)| x + y).collect();
    if let Some(j) = reduce {
        out[j] -= 1;
    }
    out
}

fn target(d: i64, shift: i64) -> Option<u64> {
    u64::try_from(d + shift).ok()
}

/// Dimension of the degree-`d` piece of `T^1`.
pub fn graded_dim(fs: &FreeStructure, d: i64) -> u64 {
    let g = fs.g();
    let a = fs.generators();
    let width = g + 1;
    let unit_degree = |r: usize| (fs.n(r) * fs.a(r)) as i64;

    let mut columns: HashMap<(Monomial, usize), usize> = HashMap::new();
    for r in 1..=g {
        if let Some(t) = target(d, unit_degree(r)) {
            for m in enumerate_monomials(a, t) {
                let idx = columns.len();
                columns.insert((m, r), idx);
            }
        }
    }
    if columns.is_empty() {
        return 0;
    }

    // Exponent vectors of the two terms of each f_r.
    let lead = |r: usize| {
        let mut v = vec![0; width];
        v[r] = fs.n(r);
        v
    };
    let tail = |r: usize| {
        let mut v = fs.ell_row(r).to_vec();
        v.resize(width, 0);
        v
    };

    let mut generators: Vec<ModuleVector> = Vec::new();
    for j in 0..=g {
        let Some(t) = target(d, a[j] as i64) else {
            continue;
        };
        for m in enumerate_monomials(a, t) {
            let mut v: ModuleVector = Vec::new();
            for r in 1..=g {
                if j == r {
                    v.push(((shifted(&m, &lead(r), Some(r)), r), fs.n(r) as i64));
                } else if j < r && fs.ell(r, j) > 0 {
                    v.push(((shifted(&m, &tail(r), Some(j)), r), -(fs.ell(r, j) as i64)));
                }
            }
            generators.push(v);
        }
    }
    for i in 1..=g {
        for r in 1..=g {
            let Some(t) = target(d, unit_degree(r) - unit_degree(i)) else {
                continue;
            };
            for m in enumerate_monomials(a, t) {
                generators.push(vec![
                    ((shifted(&m, &lead(i), None), r), 1),
                    ((shifted(&m, &tail(i), None), r), -1),
                ]);
            }
        }
    }

    let ncols = columns.len();
    let rows: Vec<Vec<BigInt>> = generators
        .into_iter()
        .filter_map(|v| {
            let mut row = vec![BigInt::from(0); ncols];
            for (key, c) in v {
                let idx = columns[&key];
                row[idx] += c;
            }
            row.iter().any(|x| x.sign() != num_bigint::Sign::NoSign).then_some(row)
        })
        .collect();
    (ncols - bareiss_rank(rows)) as u64
}

/// Graded dimensions over a window grown from the basis degrees until the
/// boundary pieces vanish and the total equals the conductor.
pub fn graded_profile(fs: &FreeStructure, work_limit: Option<u64>) -> Result<TjurinaGradedDims> {
    let c = fs.conductor();
    if let Some(limit) = work_limit {
        if c > limit {
            return Err(Error::WorkLimitExceeded { conductor: c, limit });
        }
    }
    let basis = build_basis(fs)?;
    let pad = fs.a(fs.g()) as i64;
    let lo0 = basis.iter().map(|b| b.degree).min().unwrap_or(0);
    let hi0 = basis.iter().map(|b| b.degree).max().unwrap_or(0);
    let floor = -(1..=fs.g()).map(|r| (fs.n(r) * fs.a(r)) as i64).max().unwrap_or(0);

    let mut computed: BTreeMap<i64, u64> = BTreeMap::new();
    for widening in 0..=MAX_WIDENINGS {
        let extra = pad * (1 << widening);
        let lo = (lo0 - extra).max(floor - 1);
        let hi = hi0 + extra;
        let missing: Vec<i64> = (lo..=hi).filter(|d| !computed.contains_key(d)).collect();
        let fresh: Vec<(i64, u64)> = missing.par_iter().map(|&d| (d, graded_dim(fs, d))).collect();
        computed.extend(fresh);

        let total: u64 = computed.range(lo..=hi).map(|(_, v)| v).sum();
        if computed[&lo] == 0 && computed[&hi] == 0 && total == c {
            let dims = computed
                .range(lo..=hi)
                .filter(|(_, v)| **v > 0)
                .map(|(k, v)| (*k, *v))
                .collect();
            return Ok(TjurinaGradedDims {
                dims,
                total,
                window: (lo, hi),
            });
        }
    }
    Err(Error::WindowNotCertified(MAX_WIDENINGS))
}

/// Degree histogram of the constructed basis.
pub fn basis_histogram(fs: &FreeStructure) -> Result<BTreeMap<i64, u64>> {
    let mut hist = BTreeMap::new();
    for b in build_basis(fs)? {
        *hist.entry(b.degree).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Runs the oracle and compares it with the basis degree multiset.
pub fn compare_with_basis(fs: &FreeStructure, work_limit: Option<u64>) -> Result<OracleComparison> {
    let oracle = graded_profile(fs, work_limit)?;
    let basis_histogram = basis_histogram(fs)?;
    Ok(OracleComparison {
        matches: basis_histogram == oracle.dims,
        conductor: fs.conductor(),
        basis_histogram,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{free_structure, NumericalSemigroup};

    fn fs(g: &[u64]) -> FreeStructure {
        free_structure(&NumericalSemigroup::new(g.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn monomials() {
        assert_eq!(enumerate_monomials(&[2, 3], 6), vec![vec![3, 0], vec![0, 2]]);
        assert!(enumerate_monomials(&[2, 3], 1).is_empty());
        assert_eq!(enumerate_monomials(&[9, 6, 7], 21), vec![vec![1, 2, 0], vec![0, 0, 3]]);
        assert_eq!(enumerate_monomials(&[2, 3], 0), vec![vec![0, 0]]);
    }

    #[test]
    fn single_degrees() {
        let f = fs(&[2, 3]);
        assert_eq!(graded_dim(&f, -6), 1);
        assert_eq!(graded_dim(&f, -4), 1);
        assert_eq!(graded_dim(&f, 0), 0);
        assert_eq!(graded_dim(&f, -7), 0);
        let f = fs(&[4, 6, 13]);
        assert_eq!(graded_dim(&f, 1), 1);
        assert_eq!(graded_dim(&f, 2), 0);
    }

    #[test]
    fn profiles_match_basis() {
        let p = graded_profile(&fs(&[2, 3]), None).unwrap();
        assert_eq!(p.dims, BTreeMap::from([(-6, 1), (-4, 1)]));
        assert_eq!(p.total, 2);

        for gens in [&[4u64, 6, 13][..], &[9, 6, 7], &[6, 9, 7], &[2, 4, 3], &[6, 3, 2]] {
            let cmp = compare_with_basis(&fs(gens), None).unwrap();
            assert!(cmp.matches, "{gens:?}: {cmp:?}");
        }

        let p = graded_profile(&fs(&[9, 6, 7]), None).unwrap();
        assert_eq!(p.total, 18);
        let positive: Vec<i64> = p.dims.keys().copied().filter(|&d| d > 0).collect();
        assert_eq!(positive, vec![1, 2, 4]);
    }

    #[test]
    fn work_limit() {
        assert_eq!(
            graded_profile(&fs(&[4, 6, 13]), Some(10)),
            Err(Error::WorkLimitExceeded { conductor: 16, limit: 10 })
        );
    }
}
