//! Index sets `E`, `I`, `D'`, `D` and the monomial basis of `T^1` for the
//! monomial curve of a free semigroup.
//!
//! Points are exponent tuples `(k_0, ..., k_{t-1})` where `k_i` is the
//! exponent of `u_i`. The staircase `D'` at level `s` is built from the
//! recursive family
//!
//! ```text
//! P(s, 1) = { (i) : i < l_0^(s) }
//! P(s, t) = P(s, t-1) x [0, n_{t-1})  u  (P(t-1, t-1) + (l_0^(s), ..., l_{t-2}^(s))) x [0, l_{t-1}^(s))
//! D'_s    = P(s, s)
//! ```
//!
//! so that `|D'_s| = a_s / e_s`. A range with a negative upper end is empty.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::semigroup::FreeStructure;

/// Exponent tuple; ordered lexicographically with `k_0` most significant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<u64>);

impl LatticePoint {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    /// `sum_i k_i w_i`.
    pub fn weighted_sum(&self, weights: &[u64]) -> u64 {
        self.0.iter().zip(weights).map(|(k, w)| k * w).sum()
    }
}

impl From<Vec<u64>> for LatticePoint {
    fn from(v: Vec<u64>) -> Self {
        LatticePoint(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexFamily {
    pub level: usize,
    /// `I_{l_{s-2}^(s)}`.
    pub i_prev: Vec<LatticePoint>,
    /// `I_{l_{s-1}^(s)}`, absent when `l_{s-1}^(s) = 0`.
    pub i_last: Option<Vec<LatticePoint>>,
    pub d_prime: Vec<LatticePoint>,
    pub d: Vec<LatticePoint>,
    /// Lexicographic maximum removed from `D'`.
    pub h: LatticePoint,
}

/// Which part of the basis description produced an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "u8")]
pub enum Clause {
    /// Unit 1, points of `E`.
    First = 1,
    /// Unit 2 when `g >= 3`.
    Second = 2,
    /// Units `3..g-1`.
    Middle = 3,
    /// Unit `g` (for `g >= 2`).
    Last = 4,
}

impl From<Clause> for u8 {
    fn from(c: Clause) -> u8 {
        c as u8
    }
}

impl Clause {
    fn for_unit(unit: usize, g: usize) -> Clause {
        match unit {
            1 => Clause::First,
            u if u == g => Clause::Last,
            2 => Clause::Second,
            _ => Clause::Middle,
        }
    }
}

/// A basis vector `(u_0^{k_0} ... u_g^{k_g}) e_unit` of `T^1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub unit: usize,
    pub exponents: Vec<u64>,
    /// `sum_{i=0}^{g} k_i a_i - n_unit a_unit`.
    pub degree: i64,
    pub clause: Clause,
}

fn require_g(fs: &FreeStructure, min: usize) -> Result<()> {
    if fs.g() < min {
        return Err(Error::Precondition(format!(
            "needs at least {} generators, got {}",
            min + 1,
            fs.g() + 1
        )));
    }
    Ok(())
}

/// The set `E`: `{(0,0)}` when `n_1 = 1`, otherwise the box
/// `0 <= i <= l_0^(1) - 2`, `0 <= j <= n_1 - 2` (`i` is the `u_0` exponent).
pub fn build_e(fs: &FreeStructure) -> Result<Vec<LatticePoint>> {
    require_g(fs, 1)?;
    let n1 = fs.n(1);
    if n1 == 1 {
        return Ok(vec![LatticePoint(vec![0, 0])]);
    }
    let l0 = fs.ell(1, 0);
    let mut points = Vec::new();
    for i in 0..l0.saturating_sub(1) {
        for j in 0..n1 - 1 {
            points.push(LatticePoint(vec![i, j]));
        }
    }
    Ok(points)
}

/// Builds `P(s, t)` for every `t <= s` of one row, given the finished
/// staircases `P(t, t)` of the lower levels.
struct Staircase<'a> {
    fs: &'a FreeStructure,
    /// `full[t]` is `D'` at level `t` (index 0 unused), for `t < current level`.
    full: Vec<Vec<LatticePoint>>,
}

struct LevelSets {
    prev: Vec<LatticePoint>,
    last: Vec<LatticePoint>,
    union: Vec<LatticePoint>,
}

impl<'a> Staircase<'a> {
    fn new(fs: &'a FreeStructure) -> Self {
        Staircase {
            fs,
            full: vec![Vec::new()],
        }
    }

    /// `P(t, t)` for `t >= 1`; level 1 is `{ (i) : i < l_0^(1) }`.
    fn full_level(&mut self, t: usize) -> &[LatticePoint] {
        while self.full.len() <= t {
            let s = self.full.len();
            let sets = self.row(s, s);
            self.full.push(sets.union);
        }
        &self.full[t]
    }

    /// `P(s, t)` split into its two parts.
    fn row(&mut self, s: usize, t: usize) -> LevelSets {
        let fs = self.fs;
        let row = fs.ell_row(s).to_vec();
        let mut current: Vec<LatticePoint> = (0..row[0]).map(|i| LatticePoint(vec![i])).collect();
        let mut sets = LevelSets {
            prev: Vec::new(),
            last: Vec::new(),
            union: current.clone(),
        };
        for tt in 2..=t {
            let n_prev = fs.n(tt - 1);
            let prev: Vec<LatticePoint> = current
                .iter()
                .flat_map(|p| {
                    (0..n_prev).map(move |k| {
                        let mut c = p.0.clone();
                        c.push(k);
                        LatticePoint(c)
                    })
                })
                .collect();
            let shift = &row[..tt - 1];
            let l_last = row[tt - 1];
            let base: Vec<LatticePoint> = if l_last == 0 {
                Vec::new()
            } else {
                self.full_level(tt - 1).to_vec()
            };
            let last: Vec<LatticePoint> = base
                .iter()
                .flat_map(|p| {
                    (0..l_last).map(move |k| {
                        let mut c: Vec<u64> = p.0.iter().zip(shift).map(|(x, d)| x + d).collect();
                        c.push(k);
                        LatticePoint(c)
                    })
                })
                .collect();
            let union: BTreeSet<LatticePoint> = prev.iter().chain(last.iter()).cloned().collect();
            current = union.iter().cloned().collect();
            sets = LevelSets {
                prev,
                last,
                union: current.clone(),
            };
        }
        sets
    }
}

/// Builds `I_prev`, `I_last`, `D'` and `D` at level `2 <= s <= g`.
pub fn build_index_family(fs: &FreeStructure, s: usize) -> Result<IndexFamily> {
    require_g(fs, 2)?;
    if s < 2 || s > fs.g() {
        return Err(Error::Precondition(format!("level {s} outside 2..={}", fs.g())));
    }
    let mut stairs = Staircase::new(fs);
    let mut sets = stairs.row(s, s);

    let expected = fs.a(s) / fs.e(s);
    if sets.union.len() as u64 != expected || sets.prev.len() + sets.last.len() != sets.union.len() {
        return Err(Error::Internal(format!(
            "|D'| at level {s} is {} (parts {} + {}), expected a_s/e_s = {expected}",
            sets.union.len(),
            sets.prev.len(),
            sets.last.len()
        )));
    }

    let l_last = fs.ell(s, s - 1);
    let h_source = if l_last == 0 { &sets.prev } else { &sets.last };
    let h = h_source
        .iter()
        .max()
        .cloned()
        .ok_or_else(|| Error::Internal(format!("empty I-set at level {s}")))?;
    let d: Vec<LatticePoint> = sets.union.iter().filter(|p| **p != h).cloned().collect();

    sets.prev.sort();
    sets.last.sort();
    Ok(IndexFamily {
        level: s,
        i_prev: sets.prev,
        i_last: if l_last == 0 { None } else { Some(sets.last) },
        d_prime: sets.union,
        d,
        h,
    })
}

/// All tuples `(k_from, ..., k_g)` with `k_r < n_r` (or `k_from < n_from - 1`
/// when `reduce_first`).
fn trailing_ranges(fs: &FreeStructure, from: usize, reduce_first: bool) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for r in from..=fs.g() {
        let bound = if reduce_first && r == from {
            fs.n(r).saturating_sub(1)
        } else {
            fs.n(r)
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..bound).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

fn element(fs: &FreeStructure, unit: usize, exponents: Vec<u64>) -> BasisElement {
    let sum: u64 = exponents.iter().zip(fs.generators()).map(|(k, a)| k * a).sum();
    let degree = sum as i64 - (fs.n(unit) * fs.a(unit)) as i64;
    BasisElement {
        unit,
        exponents,
        degree,
        clause: Clause::for_unit(unit, fs.g()),
    }
}

/// The monomial basis of `T^1`, unit by unit. Its length equals the
/// conductor.
///
/// When `n_1 = 1` the first equation is `u_1 - u_0^l`, whose own `T^1`
/// vanishes, so unit 1 contributes nothing even though `E = {(0,0)}`.
pub fn build_basis(fs: &FreeStructure) -> Result<Vec<BasisElement>> {
    let g = fs.g();
    let mut basis = Vec::new();
    if g == 0 {
        return Ok(basis);
    }

    if fs.n(1) > 1 {
        let tails = trailing_ranges(fs, 2, false);
        for p in build_e(fs)? {
            for tail in &tails {
                let mut ex = p.0.clone();
                ex.extend_from_slice(tail);
                basis.push(element(fs, 1, ex));
            }
        }
    }

    for m in 2..=g {
        if fs.n(m) < 2 {
            continue;
        }
        let family = build_index_family(fs, m)?;
        let tails = trailing_ranges(fs, m, true);
        for p in &family.d {
            for tail in &tails {
                let mut ex = p.0.clone();
                ex.extend_from_slice(tail);
                basis.push(element(fs, m, ex));
            }
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{free_structure, NumericalSemigroup};

    fn fs(g: &[u64]) -> FreeStructure {
        free_structure(&NumericalSemigroup::new(g.to_vec()).unwrap()).unwrap()
    }

    fn pts(v: &[&[u64]]) -> Vec<LatticePoint> {
        v.iter().map(|p| LatticePoint(p.to_vec())).collect()
    }

    #[test]
    fn e_sets() {
        assert_eq!(build_e(&fs(&[18, 27, 21, 32])).unwrap(), pts(&[&[0, 0], &[1, 0]]));
        assert_eq!(build_e(&fs(&[9, 6, 7])).unwrap(), pts(&[&[0, 0], &[0, 1]]));
        // n_1 = 1 since 2 | 4
        assert_eq!(build_e(&fs(&[2, 4, 3])).unwrap(), pts(&[&[0, 0]]));
        // l_0^(1) = 1: the box is empty
        assert!(build_e(&fs(&[6, 3, 2])).unwrap().is_empty());
        assert!(build_e(&fs(&[1])).is_err());
    }

    #[test]
    fn level_two_example() {
        let fam = build_index_family(&fs(&[18, 27, 21, 32]), 2).unwrap();
        assert_eq!(fam.h, LatticePoint(vec![4, 0]));
        assert_eq!(
            fam.d,
            pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[2, 0], &[3, 0]])
        );
        assert_eq!(fam.i_last.unwrap(), pts(&[&[2, 0], &[3, 0], &[4, 0]]));
    }

    #[test]
    fn level_two_with_l0_one() {
        let fam = build_index_family(&fs(&[9, 6, 7]), 2).unwrap();
        assert_eq!(
            fam.d_prime,
            pts(&[&[0, 0], &[0, 1], &[0, 2], &[1, 0], &[1, 1], &[2, 0], &[2, 1]])
        );
        assert_eq!(fam.h, LatticePoint(vec![2, 1]));
        assert_eq!(fam.d.len(), 6);
    }

    #[test]
    fn last_coefficient_zero_uses_prev() {
        // 2*3 = 3*2 + 0*4: l_1^(2) = 0
        let fam = build_index_family(&fs(&[2, 4, 3]), 2).unwrap();
        assert!(fam.i_last.is_none());
        assert_eq!(fam.h, LatticePoint(vec![2, 0]));
        assert_eq!(fam.d, pts(&[&[0, 0], &[1, 0]]));
    }

    #[test]
    fn level_precondition() {
        assert!(build_index_family(&fs(&[2, 3]), 2).is_err());
        assert!(build_index_family(&fs(&[4, 6, 13]), 3).is_err());
        assert!(build_index_family(&fs(&[4, 6, 13]), 1).is_err());
    }

    #[test]
    fn basis_two_generators() {
        let b = build_basis(&fs(&[2, 3])).unwrap();
        let mut degrees: Vec<i64> = b.iter().map(|e| e.degree).collect();
        degrees.sort();
        assert_eq!(degrees, vec![-6, -4]);
        assert!(build_basis(&fs(&[1])).unwrap().is_empty());
    }

    #[test]
    fn basis_clause_counts() {
        let b = build_basis(&fs(&[18, 27, 21, 32])).unwrap();
        assert_eq!(b.len(), 116);
        let count = |c: Clause| b.iter().filter(|e| e.clause == c).count();
        assert_eq!(count(Clause::First), 18);
        assert_eq!(count(Clause::Second), 36);
        assert_eq!(count(Clause::Middle), 0);
        assert_eq!(count(Clause::Last), 62);
    }

    #[test]
    fn basis_four_six_thirteen() {
        let b = build_basis(&fs(&[4, 6, 13])).unwrap();
        assert_eq!(b.len(), 16);
        let mut unit1: Vec<i64> = b.iter().filter(|e| e.unit == 1).map(|e| e.degree).collect();
        unit1.sort();
        assert_eq!(unit1, vec![-12, -8, 1, 5]);
    }

    #[test]
    fn basis_non_minimal() {
        assert_eq!(build_basis(&fs(&[2, 4, 3])).unwrap().len(), 2);
        assert_eq!(build_basis(&fs(&[6, 3, 2])).unwrap().len(), 2);
        assert_eq!(build_basis(&fs(&[4, 6, 10, 13])).unwrap().len(), 16);
    }
}
