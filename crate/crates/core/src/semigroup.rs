//! Numerical semigroups given by an ordered generator list, their gcd tower,
//! freeness and the canonical decomposition `n_i a_i = sum_j l_j^(i) a_j`.
//!
//! Generator order is significant: freeness is always checked with respect
//! to the order given, and generators need not be minimal.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// An ordered list of positive generators `a_0, ..., a_g`.
///
/// Top-level semigroups have coprime generators. The scaled variant built by
/// [`NumericalSemigroup::with_scale`] allows a common divisor and keeps it as
/// `scale`; it stands for the semigroup generated by `a_i / scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
    #[serde(skip)]
    scale: u64,
}

impl NumericalSemigroup {
    pub fn new(generators: Vec<u64>) -> Result<Self> {
        let sg = Self::with_scale(generators)?;
        if sg.scale != 1 {
            return Err(Error::NotCoprime(sg.scale));
        }
        Ok(sg)
    }

    /// Accepts generators with a common divisor and records it.
    pub fn with_scale(generators: Vec<u64>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if let Some(pos) = generators.iter().position(|&a| a == 0) {
            return Err(Error::ZeroGenerator(pos));
        }
        let scale = generators.iter().fold(0u64, |acc, &a| acc.gcd(&a));
        Ok(Self { generators, scale })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Index of the last generator, i.e. `g` for `<a_0, ..., a_g>`.
    pub fn g(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// The semigroup with every generator divided by the common scale.
    pub fn reduced(&self) -> NumericalSemigroup {
        NumericalSemigroup {
            generators: self.generators.iter().map(|a| a / self.scale).collect(),
            scale: 1,
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        is_member(&self.generators, v)
    }
}

/// `table[v]` is true iff `v` is a non-negative integer combination of `gens`,
/// for `0 <= v <= upto`.
pub fn membership_table(gens: &[u64], upto: u64) -> Vec<bool> {
    let len = upto as usize + 1;
    let mut table = vec![false; len];
    table[0] = true;
    for v in 1..len {
        table[v] = gens
            .iter()
            .any(|&a| (a as usize) <= v && table[v - a as usize]);
    }
    table
}

/// Membership by dynamic programming over `0..=v`.
pub fn is_member(gens: &[u64], v: u64) -> bool {
    membership_table(gens, v)[v as usize]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdTower {
    /// `e_i = gcd(a_0, ..., a_i)` for `i = 0..=g`.
    pub e: Vec<u64>,
    /// `n_i = e_{i-1} / e_i` for `i = 1..=g`, stored at `n[i - 1]`.
    pub n: Vec<u64>,
}

pub fn gcd_tower(sg: &NumericalSemigroup) -> GcdTower {
    let gens = sg.generators();
    let mut e = Vec::with_capacity(gens.len());
    e.push(gens[0]);
    for &a in &gens[1..] {
        let prev = *e.last().unwrap();
        e.push(prev.gcd(&a));
    }
    let n = e.windows(2).map(|w| w[0] / w[1]).collect();
    GcdTower { e, n }
}

/// One defining binomial `f_i = u_i^{n_i} - u_0^{l_0} ... u_{i-1}^{l_{i-1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationShape {
    pub index: usize,
    pub lead_exponent: u64,
    pub tail: Vec<u64>,
    pub degree: u64,
}

/// A free semigroup together with its gcd tower, canonical `l`-table and
/// conductor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeStructure {
    base: NumericalSemigroup,
    e: Vec<u64>,
    n: Vec<u64>,
    ell: Vec<Vec<u64>>,
    conductor: u64,
}

#[derive(Serialize)]
struct FreeStructureView<'a> {
    generators: &'a [u64],
    e: &'a [u64],
    n: &'a [u64],
    ell: &'a [Vec<u64>],
    conductor: u64,
}

impl Serialize for FreeStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FreeStructureView {
            generators: self.base.generators(),
            e: &self.e,
            n: &self.n,
            ell: &self.ell,
            conductor: self.conductor,
        }
        .serialize(s)
    }
}

impl FreeStructure {
    pub fn base(&self) -> &NumericalSemigroup {
        &self.base
    }

    pub fn generators(&self) -> &[u64] {
        self.base.generators()
    }

    pub fn g(&self) -> usize {
        self.base.g()
    }

    pub fn a(&self, i: usize) -> u64 {
        self.base.generators()[i]
    }

    pub fn e(&self, i: usize) -> u64 {
        self.e[i]
    }

    /// `n_i` for `1 <= i <= g`.
    pub fn n(&self, i: usize) -> u64 {
        self.n[i - 1]
    }

    pub fn e_all(&self) -> &[u64] {
        &self.e
    }

    pub fn n_all(&self) -> &[u64] {
        &self.n
    }

    /// Row `(l_0^(i), ..., l_{i-1}^(i))` for `1 <= i <= g`.
    pub fn ell_row(&self, i: usize) -> &[u64] {
        &self.ell[i - 1]
    }

    pub fn ell(&self, i: usize, j: usize) -> u64 {
        self.ell[i - 1][j]
    }

    pub fn ell_table(&self) -> &[Vec<u64>] {
        &self.ell
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// The scaled prefix `<a_0/e_m, ..., a_m/e_m>` as a free structure of its
    /// own. `l`-rows and `n_i` are unchanged by the scaling.
    pub fn level(&self, m: usize) -> FreeStructure {
        assert!(m <= self.g(), "level {m} out of range");
        let em = self.e[m];
        let gens: Vec<u64> = self.generators()[..=m].iter().map(|a| a / em).collect();
        let base = NumericalSemigroup {
            generators: gens,
            scale: 1,
        };
        let mut fs = FreeStructure {
            base,
            e: self.e[..=m].iter().map(|e| e / em).collect(),
            n: self.n[..m].to_vec(),
            ell: self.ell[..m].to_vec(),
            conductor: 0,
        };
        fs.conductor = conductor_recursive(&fs);
        fs
    }

    /// `n_i a_i < a_{i+1}` for every `1 <= i <= g - 1`.
    pub fn has_plane_branch_inequalities(&self) -> bool {
        (1..self.g()).all(|i| self.n(i) * self.a(i) < self.a(i + 1))
    }
}

fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let ext = (x as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as u64)
}

/// Checks freeness in the given order and computes the canonical `l`-table
/// (`l_j^(i) < n_j` for `j >= 1`) by peeling residues from the top index down.
pub fn free_structure(sg: &NumericalSemigroup) -> Result<FreeStructure> {
    let tower = gcd_tower(sg);
    let gens = sg.generators();
    let g = sg.g();
    let mut ell = Vec::with_capacity(g);

    for i in 1..=g {
        let n_i = tower.n[i - 1];
        let target = n_i.checked_mul(gens[i]).ok_or(Error::Overflow)?;
        let mut rest = target;
        let mut row = vec![0u64; i];
        for j in (1..i).rev() {
            // invariant: e_j divides rest
            let e_j = tower.e[j];
            let n_j = tower.n[j - 1];
            let q = gens[j] / e_j;
            let inv = mod_inverse(q % n_j, n_j)
                .ok_or_else(|| Error::Internal(format!("a_{j}/e_{j} not invertible mod n_{j}")))?;
            let k = ((rest / e_j) % n_j) * inv % n_j;
            let take = k * gens[j];
            if take > rest {
                return Err(Error::NotFree(i));
            }
            rest -= take;
            row[j] = k;
        }
        if rest % gens[0] != 0 {
            return Err(Error::Internal(format!(
                "residue peeling left {rest}, not a multiple of a_0 at row {i}"
            )));
        }
        row[0] = rest / gens[0];

        let check: u64 = row.iter().zip(gens).map(|(l, a)| l * a).sum();
        if check != target || (1..i).any(|j| row[j] >= tower.n[j - 1]) {
            return Err(Error::Internal(format!("non-canonical l-row at index {i}")));
        }
        ell.push(row);
    }

    let mut fs = FreeStructure {
        base: sg.clone(),
        e: tower.e,
        n: tower.n,
        ell,
        conductor: 0,
    };
    fs.conductor = conductor_recursive(&fs);
    Ok(fs)
}

/// `c(Gamma_m) = n_m c(Gamma_{m-1}) + (n_m - 1)(a_m/e_m - 1)`, starting from
/// `c(<1>) = 0`. Works on scaled structures as well.
pub fn conductor_recursive(fs: &FreeStructure) -> u64 {
    let mut c = 0u64;
    for m in 1..=fs.g() {
        let n_m = fs.n(m);
        let q = fs.a(m) / fs.e(m);
        c = n_m * c + (n_m - 1) * (q - 1);
    }
    c
}

/// Brauer's bound on the Frobenius number for coprime generators, valid for
/// any generator order.
fn brauer_bound(gens: &[u64]) -> u64 {
    let tower = gcd_tower(&NumericalSemigroup {
        generators: gens.to_vec(),
        scale: 1,
    });
    let weighted: u64 = (1..gens.len()).map(|i| gens[i] * tower.n[i - 1]).sum();
    let total: u64 = gens.iter().sum();
    weighted.saturating_sub(total)
}

/// Conductor by direct gap enumeration: the first position starting a run of
/// `min(a_i)` consecutive members.
///
/// The scan stops at `min(Sylvester bound over coprime pairs, Brauer bound) +
/// min(a_i)` or at `limit`, whichever is smaller.
pub fn conductor_bruteforce(sg: &NumericalSemigroup, limit: Option<u64>) -> Result<u64> {
    let reduced = sg.reduced();
    let gens = reduced.generators();
    let min_gen = *gens.iter().min().unwrap();
    if min_gen == 1 {
        return Ok(0);
    }

    let mut bound = brauer_bound(gens);
    for (i, &x) in gens.iter().enumerate() {
        for &y in &gens[i + 1..] {
            if x.gcd(&y) == 1 {
                bound = bound.min((x - 1) * (y - 1));
            }
        }
    }
    let mut scan_to = bound + min_gen;
    if let Some(limit) = limit {
        scan_to = scan_to.min(limit);
    }

    let table = membership_table(gens, scan_to);
    let mut run = 0u64;
    for (v, &member) in table.iter().enumerate() {
        if member {
            run += 1;
            if run == min_gen {
                return Ok(v as u64 + 1 - min_gen);
            }
        } else {
            run = 0;
        }
    }
    Err(Error::LimitExceeded(scan_to))
}

/// Gaps of a coprime semigroup, in increasing order.
pub fn gaps(sg: &NumericalSemigroup) -> Result<Vec<u64>> {
    let c = conductor_bruteforce(sg, None)?;
    let reduced = sg.reduced();
    let table = membership_table(reduced.generators(), c);
    Ok((0..c).filter(|&v| !table[v as usize]).collect())
}

/// Least element of the semigroup in every residue class mod `m`, sorted.
/// Computed as shortest paths on the residue graph with generator steps.
pub fn apery_set(sg: &NumericalSemigroup, m: u64) -> Result<Vec<u64>> {
    if sg.scale() != 1 {
        return Err(Error::NotCoprime(sg.scale()));
    }
    if m == 0 || !sg.contains(m) {
        return Err(Error::NotMember(m));
    }
    let len = m as usize;
    let mut dist = vec![u64::MAX; len];
    dist[0] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &a in sg.generators() {
            let next = (r + (a % m) as usize) % len;
            let nd = d + a;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Reverse((nd, next)));
            }
        }
    }
    dist.sort_unstable();
    Ok(dist)
}

pub fn monomial_curve_equations(fs: &FreeStructure) -> Vec<EquationShape> {
    (1..=fs.g())
        .map(|i| EquationShape {
            index: i,
            lead_exponent: fs.n(i),
            tail: fs.ell_row(i).to_vec(),
            degree: fs.n(i) * fs.a(i),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(g: &[u64]) -> NumericalSemigroup {
        NumericalSemigroup::new(g.to_vec()).unwrap()
    }

    #[test]
    fn tower_examples() {
        let t = gcd_tower(&sg(&[18, 27, 21, 32]));
        assert_eq!(t.e, vec![18, 9, 3, 1]);
        assert_eq!(t.n, vec![2, 3, 3]);
        let t = gcd_tower(&sg(&[2, 3]));
        assert_eq!((t.e, t.n), (vec![2, 1], vec![2]));
        let t = gcd_tower(&sg(&[9, 6, 7]));
        assert_eq!((t.e, t.n), (vec![9, 3, 1], vec![3, 3]));
    }

    #[test]
    fn membership_examples() {
        assert!(!is_member(&[3, 5], 7));
        assert!(is_member(&[3, 5], 8));
        assert!(is_member(&[2, 3], 0));
    }

    #[test]
    fn rejects_bad_generators() {
        assert_eq!(NumericalSemigroup::new(vec![]), Err(Error::EmptyGenerators));
        assert_eq!(NumericalSemigroup::new(vec![4, 0]), Err(Error::ZeroGenerator(1)));
        assert_eq!(NumericalSemigroup::new(vec![4, 6]), Err(Error::NotCoprime(2)));
        let scaled = NumericalSemigroup::with_scale(vec![4, 6]).unwrap();
        assert_eq!(scaled.scale(), 2);
        assert_eq!(scaled.reduced().generators(), &[2, 3]);
    }

    #[test]
    fn ell_tables() {
        let fs = free_structure(&sg(&[18, 27, 21, 32])).unwrap();
        assert_eq!(fs.ell_table(), &[vec![3], vec![2, 1], vec![3, 0, 2]]);
        let fs = free_structure(&sg(&[4, 6, 13])).unwrap();
        assert_eq!(fs.ell_table(), &[vec![3], vec![5, 1]]);
        assert_eq!(free_structure(&sg(&[3, 5, 7])), Err(Error::NotFree(2)));
    }

    #[test]
    fn canonical_row_prefers_small_digits() {
        // 2*9 = 3*6 = 3*4 + 1*6; l_1 must stay below n_1 = 2
        let fs = free_structure(&sg(&[4, 6, 9])).unwrap();
        assert_eq!(fs.ell_row(2), &[3, 1]);
        // l_0 may be zero
        let fs = free_structure(&sg(&[8, 6, 9])).unwrap();
        assert_eq!(fs.ell_row(2), &[0, 3]);
    }

    #[test]
    fn non_minimal_generators() {
        // 10 = 4 + 6, so n_2 = 1
        let fs = free_structure(&sg(&[4, 6, 10, 13])).unwrap();
        assert_eq!(fs.n_all(), &[2, 1, 2]);
        assert_eq!(fs.ell_row(2), &[1, 1]);
        assert_eq!(fs.conductor(), 16);
    }

    #[test]
    fn conductors() {
        assert_eq!(free_structure(&sg(&[2, 3])).unwrap().conductor(), 2);
        assert_eq!(free_structure(&sg(&[6, 9, 7])).unwrap().conductor(), 18);
        assert_eq!(free_structure(&sg(&[18, 27, 21, 32])).unwrap().conductor(), 116);
        assert_eq!(conductor_bruteforce(&sg(&[2, 3]), None), Ok(2));
        assert_eq!(conductor_bruteforce(&sg(&[6, 7, 9]), None), Ok(18));
        assert_eq!(conductor_bruteforce(&sg(&[18, 27, 21, 32]), None), Ok(116));
        assert_eq!(
            gaps(&sg(&[6, 9, 7])).unwrap(),
            vec![1, 2, 3, 4, 5, 8, 10, 11, 17]
        );
    }

    #[test]
    fn gap_scan_limit() {
        assert_eq!(conductor_bruteforce(&sg(&[6, 7, 9]), Some(10)), Err(Error::LimitExceeded(10)));
        // no coprime pair: falls back to the Brauer bound
        assert_eq!(conductor_bruteforce(&sg(&[6, 10, 15]), None), Ok(30));
    }

    #[test]
    fn apery_examples() {
        assert_eq!(apery_set(&sg(&[2, 3]), 2).unwrap(), vec![0, 3]);
        assert_eq!(apery_set(&sg(&[6, 7, 9]), 6).unwrap(), vec![0, 7, 9, 14, 16, 23]);
        assert_eq!(
            apery_set(&sg(&[9, 6, 7]), 7).unwrap(),
            vec![0, 6, 9, 12, 15, 18, 24]
        );
        assert_eq!(apery_set(&sg(&[3, 5]), 7), Err(Error::NotMember(7)));
    }

    #[test]
    fn equations() {
        let eq = monomial_curve_equations(&free_structure(&sg(&[2, 3])).unwrap());
        assert_eq!(eq.len(), 1);
        assert_eq!((eq[0].lead_exponent, eq[0].tail.clone(), eq[0].degree), (2, vec![3], 6));
        let fs = free_structure(&sg(&[18, 27, 21, 32])).unwrap();
        let degrees: Vec<u64> = monomial_curve_equations(&fs).iter().map(|e| e.degree).collect();
        assert_eq!(degrees, vec![54, 63, 96]);
        let eq = monomial_curve_equations(&free_structure(&sg(&[4, 6, 13])).unwrap());
        assert_eq!(eq[1].tail, vec![5, 1]);
        assert_eq!(eq.iter().map(|e| e.degree).collect::<Vec<_>>(), vec![12, 26]);
    }

    #[test]
    fn level_scaling() {
        let fs = free_structure(&sg(&[18, 27, 21, 32])).unwrap();
        let l2 = fs.level(2);
        assert_eq!(l2.generators(), &[6, 9, 7]);
        assert_eq!(l2.conductor(), 18);
        let l1 = fs.level(1);
        assert_eq!(l1.generators(), &[2, 3]);
        assert_eq!(l1.conductor(), 2);
    }
}
