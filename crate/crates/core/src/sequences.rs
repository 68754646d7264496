//! δ-sequences of curves with one place at infinity and their relation to
//! plane-branch semigroups.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::semigroup::{free_structure, is_member, NumericalSemigroup};

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DeltaSequence {
    pub deltas: Vec<u64>,
    pub e: Vec<u64>,
    pub n: Vec<u64>,
}

impl DeltaSequence {
    pub fn new(deltas: Vec<u64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if let Some(i) = deltas.iter().position(|&d| d == 0) {
            return Err(Error::ZeroGenerator(i));
        }
        let mut e = vec![deltas[0]];
        for &d in &deltas[1..] {
            let last = *e.last().expect("non-empty");
            e.push(last.gcd(&d));
        }
        let n = e.windows(2).map(|w| w[0] / w[1]).collect();
        Ok(DeltaSequence { deltas, e, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmCheck {
    pub valid: bool,
    /// First violated condition (1, 2 or 3).
    pub failed_condition: Option<u8>,
}

/// Abhyankar–Moh conditions, checked in order:
/// (1) `e_s = 1` and `n_i > 1`; (2) `n_i δ_i` lies in the semigroup of the
/// earlier terms; (3) `δ_i < n_{i-1} δ_{i-1}` with `n_0 = 1`.
pub fn is_delta_sequence(gens: &[u64]) -> AmCheck {
    let fail = |c| AmCheck {
        valid: false,
        failed_condition: Some(c),
    };
    let Ok(ds) = DeltaSequence::new(gens.to_vec()) else {
        return fail(1);
    };
    if *ds.e.last().expect("non-empty") != 1 || ds.n.iter().any(|&n| n <= 1) {
        return fail(1);
    }
    for i in 1..gens.len() {
        if !is_member(&gens[..i], ds.n[i - 1] * gens[i]) {
            return fail(2);
        }
    }
    for i in 1..gens.len() {
        let n_prev = if i == 1 { 1 } else { ds.n[i - 2] };
        if gens[i] >= n_prev * gens[i - 1] {
            return fail(3);
        }
    }
    AmCheck {
        valid: true,
        failed_condition: None,
    }
}

/// Free in the given order and `n_i a_i < a_{i+1}` for `1 <= i <= g - 1`.
pub fn is_plane_branch(gens: &[u64]) -> bool {
    NumericalSemigroup::new(gens.to_vec())
        .and_then(|sg| free_structure(&sg))
        .map(|fs| fs.has_plane_branch_inequalities())
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaSequence {
    pub betas: Vec<u64>,
}

impl BetaSequence {
    pub fn new(betas: Vec<u64>) -> Result<Self> {
        if !is_plane_branch(&betas) {
            return Err(Error::Precondition(format!(
                "{betas:?} is not a plane-branch semigroup"
            )));
        }
        Ok(BetaSequence { betas })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Relation {
    R1,
    R2,
}

/// `R2` iff `(δ_0 - δ_1) | δ_0`.
pub fn select_relation(deltas: &[u64]) -> Result<Relation> {
    if deltas.len() < 2 || deltas[1] >= deltas[0] {
        return Err(Error::Precondition("needs δ_0 > δ_1".into()));
    }
    Ok(if deltas[0].is_multiple_of(deltas[0] - deltas[1]) {
        Relation::R2
    } else {
        Relation::R1
    })
}

fn square_over(d0: u64, e: u64) -> Result<u64> {
    let sq = d0.checked_mul(d0).ok_or(Error::Overflow)?;
    if sq % e != 0 {
        return Err(Error::NonIntegralRelation { num: sq, den: e });
    }
    Ok(sq / e)
}

/// Applies one relation regardless of the selector.
pub fn apply_relation(ds: &DeltaSequence, rel: Relation) -> Result<BetaSequence> {
    let d = &ds.deltas;
    if d.len() < 2 || d[1] >= d[0] {
        return Err(Error::Precondition("needs δ_0 > δ_1".into()));
    }
    let mut betas = vec![d[0] - d[1]];
    if rel == Relation::R1 {
        betas.push(d[0]);
    }
    for i in 2..d.len() {
        let q = square_over(d[0], ds.e[i - 1])?;
        if q <= d[i] {
            return Err(Error::Precondition(format!(
                "δ_0²/e_{} = {q} does not exceed δ_{i} = {}",
                i - 1,
                d[i]
            )));
        }
        betas.push(q - d[i]);
    }
    Ok(BetaSequence { betas })
}

/// The plane-branch semigroup of a δ-sequence via the selected relation.
pub fn delta_to_beta(ds: &DeltaSequence) -> Result<BetaSequence> {
    apply_relation(ds, select_relation(&ds.deltas)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaCandidate {
    pub relation: Relation,
    pub selected: bool,
    pub betas: Vec<u64>,
    pub plane_branch: bool,
}

/// Both relations, labelled, with the selector's choice marked.
pub fn delta_to_beta_candidates(ds: &DeltaSequence) -> Result<Vec<BetaCandidate>> {
    let selected = select_relation(&ds.deltas)?;
    let mut out = Vec::new();
    for rel in [Relation::R1, Relation::R2] {
        if let Ok(b) = apply_relation(ds, rel) {
            out.push(BetaCandidate {
                relation: rel,
                selected: rel == selected,
                plane_branch: is_plane_branch(&b.betas),
                betas: b.betas,
            });
        }
    }
    Ok(out)
}

/// Fills `δ_2, δ_3, ...` from `δ_0, δ_1` by `δ_i = δ_0²/e_{i-1} - β_{i+offset}`.
fn extend_candidate(d0: u64, d1: u64, betas: &[u64], offset: usize, len: usize) -> Option<Vec<u64>> {
    let mut deltas = vec![d0, d1];
    let mut e = d0.gcd(&d1);
    for i in 2..len {
        let q = d0.checked_mul(d0)? / e;
        let b = betas[i - offset];
        if q <= b {
            return None;
        }
        let d = q - b;
        e = e.gcd(&d);
        deltas.push(d);
    }
    Some(deltas)
}

fn accept(deltas: Vec<u64>, beta: &BetaSequence) -> Option<DeltaSequence> {
    if !is_delta_sequence(&deltas).valid {
        return None;
    }
    let sg = NumericalSemigroup::new(deltas.clone()).ok()?;
    free_structure(&sg).ok()?;
    let ds = DeltaSequence::new(deltas).ok()?;
    (delta_to_beta(&ds).ok()? == *beta).then_some(ds)
}

/// All δ-sequences whose plane-branch semigroup is `beta`.
///
/// R1 forces `δ_0 = β_1`. R2 forces `δ_0 = k β_0` with `k β_0 < β_1`
/// (condition (3) at index 2), so the search is finite; `cap` bounds `δ_0`.
pub fn enumerate_deltas(beta: &BetaSequence, cap: Option<u64>) -> Result<Vec<DeltaSequence>> {
    let b = &beta.betas;
    let cap = cap.unwrap_or(DEFAULT_CAP);
    let mut out = Vec::new();
    if b.len() < 2 {
        return Ok(out);
    }
    if b[1] > b[0] {
        if b[1] > cap {
            return Err(Error::CapExceeded(cap));
        }
        if let Some(ds) =
            extend_candidate(b[1], b[1] - b[0], b, 0, b.len()).and_then(|d| accept(d, beta))
        {
            out.push(ds);
        }
    }
    for k in 2.. {
        let d0 = k * b[0];
        if d0 >= b[1] {
            break;
        }
        if d0 > cap {
            return Err(Error::CapExceeded(cap));
        }
        if let Some(ds) =
            extend_candidate(d0, d0 - b[0], b, 1, b.len() + 1).and_then(|d| accept(d, beta))
        {
            out.push(ds);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PuiseuxMember {
    pub deltas: Vec<u64>,
    /// Whether the triple satisfies all three Abhyankar–Moh conditions.
    pub am_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PuiseuxFamily {
    pub members: Vec<PuiseuxMember>,
    /// True when no `a` fits and the pair `(b1, b1 - b0)` is returned.
    pub fallback: bool,
}

/// `(a, a - 1, a² b0 - b1)` for every integer `a` with `a b0 < b1 < a² b0`.
pub fn one_puiseux_family(b0: u64, b1: u64) -> Result<PuiseuxFamily> {
    if b0 < 2 || b1 <= b0 || b0.gcd(&b1) != 1 {
        return Err(Error::Precondition(format!(
            "needs coprime b1 > b0 >= 2, got ({b0}, {b1})"
        )));
    }
    let mut members = Vec::new();
    for a in 2.. {
        if a * b0 >= b1 {
            break;
        }
        if a * a * b0 > b1 {
            let deltas = vec![a, a - 1, a * a * b0 - b1];
            members.push(PuiseuxMember {
                am_valid: is_delta_sequence(&deltas).valid,
                deltas,
            });
        }
    }
    if members.is_empty() {
        let deltas = vec![b1, b1 - b0];
        return Ok(PuiseuxFamily {
            members: vec![PuiseuxMember {
                am_valid: is_delta_sequence(&deltas).valid,
                deltas,
            }],
            fallback: true,
        });
    }
    Ok(PuiseuxFamily {
        members,
        fallback: false,
    })
}
