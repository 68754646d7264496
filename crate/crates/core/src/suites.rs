//! Seeded generators of free semigroups and the verification suites run by
//! `verify`.

use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::basis::{build_basis, build_e, build_index_family, LatticePoint};
use crate::error::Result;
use crate::exact::Exact;
use crate::moduli::{
    at_infinity_tau2, b_sk_formula, dimension_bounds, dplus_l2_bounds, plane_branch_check,
    tau_report,
};
use crate::semigroup::{
    apery_set, conductor_bruteforce, conductor_recursive, free_structure, FreeStructure,
    NumericalSemigroup,
};
use crate::tjurina::compare_with_basis;

pub const PAPER_EXAMPLE: [u64; 4] = [18, 27, 21, 32];
pub const DEFAULT_RANDOM_COUNT: usize = 200;
pub const DEFAULT_ORACLE_LIMIT: u64 = 60;
pub const MAX_GENERATOR: u64 = 500;
pub const MAX_G: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    PaperExample,
    PlaneBranch,
    AtInfinity,
    RandomFree,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    ExampleGolden,
    ConductorOracle,
    #[serde(rename = "cardinality-Dprime")]
    CardinalityDprime,
    AperyDegree,
    BasisCount,
    OracleProfile,
    BoundsSimple,
    BoundsRefined,
    PlaneBranchEquivalence,
    SumDFormula,
    BFormulaDelta,
    TriangleBounds,
    AtInfinityFormula,
    ZeroDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    DiscrepancyReported,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub semigroup: Vec<u64>,
    pub check: CheckId,
    pub status: Status,
    pub payload: Value,
}

impl VerificationRecord {
    /// A check that may only pass or fail.
    fn hard(sg: &[u64], check: CheckId, ok: bool, payload: Value) -> Self {
        VerificationRecord {
            semigroup: sg.to_vec(),
            check,
            status: if ok { Status::Pass } else { Status::Fail },
            payload,
        }
    }

    /// A cross-validation that may only pass or report a discrepancy.
    fn report(sg: &[u64], check: CheckId, ok: bool, payload: Value) -> Self {
        VerificationRecord {
            semigroup: sg.to_vec(),
            check,
            status: if ok { Status::Pass } else { Status::DiscrepancyReported },
            payload,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of random members; suites use their own default when absent.
    pub count: Option<usize>,
    /// Largest conductor handed to the graded oracle.
    pub work_limit: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub members: usize,
    pub pass: usize,
    pub fail: usize,
    pub discrepancy_reported: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub summary: SuiteSummary,
    pub records: Vec<VerificationRecord>,
}

impl SuiteReport {
    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn records_for(&self, check: CheckId) -> impl Iterator<Item = &VerificationRecord> {
        self.records.iter().filter(move |r| r.check == check)
    }
}

/// Output of the random generator together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFree {
    pub generators: Vec<u64>,
    pub n: Vec<u64>,
    pub ell: Vec<Vec<u64>>,
}

/// Glues one level onto `gens`: every old generator is multiplied by `n` and
/// `q = sum_j l_j gens_j` is appended, so that `n q = sum_j l_j (n gens_j)`.
fn glue(gens: &[u64], n: u64, row: &[u64]) -> Option<Vec<u64>> {
    let q: u64 = row.iter().zip(gens).map(|(l, a)| l * a).sum();
    if q < 2 || q.gcd(&n) != 1 {
        return None;
    }
    let mut out: Vec<u64> = gens.iter().map(|a| a * n).collect();
    out.push(q);
    Some(out)
}

/// A free semigroup with `g <= max_g` and generators `<= max_gen`, built by
/// choosing the tower `n_i >= 2` and canonical rows `l_j^(i) < n_j`.
pub fn random_free<R: Rng>(rng: &mut R, max_g: usize, max_gen: u64) -> GeneratedFree {
    loop {
        let g = rng.gen_range(1..=max_g);
        let mut gens = vec![1u64];
        let mut ns: Vec<u64> = Vec::new();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut ok = true;
        for _ in 0..g {
            let n = rng.gen_range(2..=4);
            let mut row = vec![rng.gen_range(0..=4)];
            row.extend(ns.iter().map(|&nj| rng.gen_range(0..nj)));
            match glue(&gens, n, &row) {
                Some(next) if next.iter().all(|&a| a <= max_gen) => {
                    gens = next;
                    ns.push(n);
                    rows.push(row);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return GeneratedFree {
                generators: gens,
                n: ns,
                ell: rows,
            };
        }
    }
}

/// A plane-branch semigroup: like [`random_free`] but each new generator
/// exceeds `n_{i-1} a_{i-1}` after scaling.
pub fn random_plane_branch<R: Rng>(rng: &mut R, max_g: usize, max_gen: u64) -> GeneratedFree {
    'outer: loop {
        let g = rng.gen_range(1..=max_g);
        let mut gens = vec![1u64];
        let mut ns: Vec<u64> = Vec::new();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for level in 0..g {
            let n = rng.gen_range(2..=3);
            let mut row = vec![0];
            row.extend(ns.iter().map(|&nj| rng.gen_range(0..nj)));
            let rest: u64 = row.iter().zip(&gens).map(|(l, a)| l * a).sum();
            // after scaling, a_{i-1} becomes n * gens_last
            let bound = if level == 0 {
                1
            } else {
                ns[level - 1] * n * gens[level]
            };
            let mut l0 = if rest > bound { 0 } else { (bound - rest) / gens[0] + 1 };
            l0 += rng.gen_range(0..=2);
            let mut glued = None;
            for _ in 0..4 {
                row[0] = l0;
                if let Some(next) = glue(&gens, n, &row) {
                    glued = Some(next);
                    break;
                }
                l0 += 1;
            }
            match glued {
                Some(next) if next.iter().all(|&a| a <= max_gen) => {
                    gens = next;
                    ns.push(n);
                    rows.push(row);
                }
                _ => continue 'outer,
            }
        }
        return GeneratedFree {
            generators: gens,
            n: ns,
            ell: rows,
        };
    }
}

fn structure(gens: &[u64]) -> Result<FreeStructure> {
    free_structure(&NumericalSemigroup::new(gens.to_vec())?)
}

fn pts(v: &[&[u64]]) -> Vec<LatticePoint> {
    let mut out: Vec<LatticePoint> = v.iter().map(|p| LatticePoint(p.to_vec())).collect();
    out.sort();
    out
}

fn example_golden(fs: &FreeStructure) -> Result<VerificationRecord> {
    let e_set = build_e(fs)?;
    let l2 = build_index_family(fs, 2)?;
    let l3 = build_index_family(fs, 3)?;
    let expected_ell: Vec<Vec<u64>> = vec![vec![3], vec![2, 1], vec![3, 0, 2]];
    let expected_e = pts(&[&[0, 0], &[1, 0]]);
    let expected_d2 = pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[2, 0], &[3, 0]]);
    let i1: Vec<&[u64]> = vec![
        &[0, 0, 0], &[0, 0, 1], &[0, 0, 2], &[0, 1, 0], &[0, 1, 1], &[0, 1, 2],
        &[1, 0, 0], &[1, 0, 1], &[1, 0, 2], &[1, 1, 0], &[1, 1, 1], &[1, 1, 2],
        &[2, 0, 0], &[2, 0, 1], &[2, 0, 2], &[2, 1, 0], &[2, 1, 1], &[2, 1, 2],
    ];
    let i2: Vec<&[u64]> = vec![
        &[3, 0, 0], &[3, 0, 1], &[3, 1, 0], &[3, 1, 1], &[4, 0, 0], &[4, 0, 1], &[4, 1, 0],
        &[4, 1, 1], &[5, 0, 0], &[5, 0, 1], &[6, 0, 0], &[6, 0, 1], &[7, 0, 0],
    ];
    let expected_d3 = pts(&[i1, i2].concat());
    let checks = [
        ("n", fs.n_all() == [2, 3, 3]),
        ("ell", fs.ell_table() == expected_ell.as_slice()),
        ("E", e_set == expected_e),
        ("D_2", l2.d == expected_d2),
        ("h_2", l2.h == LatticePoint(vec![4, 0])),
        ("D_3", l3.d == expected_d3 && l3.d.len() == 31),
        ("h_3", l3.h == LatticePoint(vec![7, 0, 1])),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(VerificationRecord::hard(
        fs.generators(),
        CheckId::ExampleGolden,
        failed.is_empty(),
        json!({
            "ell": fs.ell_table(),
            "E": e_set,
            "D_2": l2.d,
            "h_2": l2.h,
            "D_3_size": l3.d.len(),
            "h_3": l3.h,
            "mismatched": failed,
        }),
    ))
}

/// Degrees of `D'_s` over the scaled prefix `Gamma_s`, sorted.
fn dprime_degrees(fs: &FreeStructure, s: usize) -> Result<Vec<u64>> {
    let lvl = fs.level(s);
    let fam = build_index_family(&lvl, s)?;
    let mut deg: Vec<u64> = fam
        .d_prime
        .iter()
        .map(|p| p.weighted_sum(lvl.generators()))
        .collect();
    deg.sort_unstable();
    Ok(deg)
}

/// Conductor, cardinality, Apéry and basis-count checks.
fn structural_checks(fs: &FreeStructure, with_apery: bool) -> Result<Vec<VerificationRecord>> {
    let gens = fs.generators();
    let mut out = Vec::new();
    let rec = conductor_recursive(fs);
    let brute = conductor_bruteforce(fs.base(), None)?;
    out.push(VerificationRecord::hard(
        gens,
        CheckId::ConductorOracle,
        rec == brute && rec == fs.conductor(),
        json!({"recursive": rec, "bruteforce": brute}),
    ));

    let mut sizes = Vec::new();
    let mut card_ok = true;
    let mut apery_ok = true;
    let mut apery = Vec::new();
    for s in 2..=fs.g() {
        let fam = build_index_family(fs, s)?;
        let expected = fs.a(s) / fs.e(s);
        card_ok &= fam.d_prime.len() as u64 == expected;
        sizes.push(json!({"s": s, "size": fam.d_prime.len(), "a_s/e_s": expected}));
        if with_apery {
            let lvl = fs.level(s);
            let deg = dprime_degrees(fs, s)?;
            let ap = apery_set(lvl.base(), lvl.a(s))?;
            let ok = deg == ap;
            apery_ok &= ok;
            apery.push(json!({"s": s, "degrees": deg, "apery": ap}));
        }
    }
    if fs.g() >= 2 {
        out.push(VerificationRecord::hard(
            gens,
            CheckId::CardinalityDprime,
            card_ok,
            json!(sizes),
        ));
        if with_apery {
            out.push(VerificationRecord::hard(
                gens,
                CheckId::AperyDegree,
                apery_ok,
                json!(apery),
            ));
        }
    }

    let count = build_basis(fs)?.len() as u64;
    out.push(VerificationRecord::hard(
        gens,
        CheckId::BasisCount,
        count == rec && count == brute,
        json!({"basis": count, "conductor": rec}),
    ));
    Ok(out)
}

fn bounds_checks(fs: &FreeStructure) -> Result<Vec<VerificationRecord>> {
    if fs.g() < 2 {
        return Ok(Vec::new());
    }
    let gens = fs.generators();
    let b = dimension_bounds(fs)?;
    Ok(vec![
        VerificationRecord::hard(
            gens,
            CheckId::BoundsSimple,
            b.holds_simple_lower && b.holds_simple_upper && b.holds_tau_minus_derived,
            json!({
                "simple_lower": b.simple_lower,
                "tau_plus": b.tau_actual,
                "simple_upper": b.simple_upper,
                "tau_minus": b.tau_minus_actual,
                "tau_minus_derived": [b.tau_minus_derived_lower, b.tau_minus_derived_upper],
            }),
        ),
        VerificationRecord::report(
            gens,
            CheckId::BoundsRefined,
            b.holds_refined_lower,
            json!({
                "refined_lower": b.refined_lower,
                "refined_lower_brute_b": b.refined_lower_brute_b,
                "tau_plus": b.tau_actual,
                "holds_refined_lower_brute_b": b.holds_refined_lower_brute_b,
                "tau_minus_printed": [b.tau_minus_printed_lower, b.tau_minus_printed_upper],
                "holds_tau_minus_printed": b.holds_tau_minus_printed,
                "tau_minus": b.tau_minus_actual,
                "j_m": b.j_m,
                "l_1": b.l_1,
            }),
        ),
    ])
}

fn zero_degree(fs: &FreeStructure, hard: bool) -> Result<VerificationRecord> {
    let t = tau_report(fs)?;
    let payload = json!({"zero_count": t.zero_count, "tau_plus": t.tau_plus, "tau_minus": t.tau_minus});
    let ok = t.zero_count == 0;
    Ok(if hard {
        VerificationRecord::hard(fs.generators(), CheckId::ZeroDegree, ok, payload)
    } else {
        VerificationRecord::report(fs.generators(), CheckId::ZeroDegree, ok, payload)
    })
}

fn plane_branch_checks(fs: &FreeStructure) -> Result<Vec<VerificationRecord>> {
    let gens = fs.generators();
    let r = plane_branch_check(fs)?;
    let mut out = vec![VerificationRecord::hard(
        gens,
        CheckId::PlaneBranchEquivalence,
        r.is_plane_branch == r.recursion_holds,
        json!({"is_plane_branch": r.is_plane_branch, "recursion_holds": r.recursion_holds, "levels": r.levels}),
    )];
    if r.is_plane_branch {
        let per_level: Vec<Value> = r
            .levels
            .iter()
            .map(|l| json!({"m": l.m, "direct": l.sum_d, "formula": l.sum_d_formula}))
            .collect();
        let ok = r
            .levels
            .iter()
            .all(|l| Exact::from(l.sum_d) == l.sum_d_formula);
        out.push(VerificationRecord::hard(gens, CheckId::SumDFormula, ok, json!(per_level)));
    }
    Ok(out)
}

fn at_infinity_checks(fs: &FreeStructure) -> Result<Vec<VerificationRecord>> {
    let gens = fs.generators();
    let mut out = Vec::new();
    let r = at_infinity_tau2(fs)?;
    let ok = r.delta.as_ref().is_none_or(Exact::is_zero);
    out.push(VerificationRecord::report(
        gens,
        CheckId::AtInfinityFormula,
        ok,
        json!({
            "hypotheses": r.hypotheses,
            "hypotheses_hold": r.hypotheses_hold,
            "direct": r.tau2_direct,
            "formula": r.formula_value,
            "formula_integral": r.formula_integral,
            "delta": r.delta,
        }),
    ));
    for k in 1..fs.n(2) {
        let b = b_sk_formula(fs, 2, k)?;
        out.push(VerificationRecord::report(
            gens,
            CheckId::BFormulaDelta,
            b.delta == 0,
            json!({
                "s": 2,
                "k": k,
                "formula": b.formula,
                "direct": b.brute,
                "delta": b.delta,
                "sigma": b.sigma,
                "gamma": b.gamma,
                "guard_holds": b.guard_holds,
            }),
        ));
    }
    for k in 0..fs.n(2).saturating_sub(1) {
        let t = dplus_l2_bounds(fs, k)?;
        let delta = t.statement_upper.clone() - Exact::from(t.direct);
        out.push(VerificationRecord::report(
            gens,
            CheckId::TriangleBounds,
            t.holds_statement_upper && t.holds_lower,
            json!({
                "k": k,
                "direct": t.direct,
                "statement_upper": t.statement_upper,
                "proof_case1_value": t.proof_case1_value,
                "lower": t.lower,
                "triangle_c": t.triangle_c,
                "delta": delta,
            }),
        ));
    }
    Ok(out)
}

fn oracle_check(fs: &FreeStructure, limit: u64) -> Result<VerificationRecord> {
    let cmp = compare_with_basis(fs, Some(limit))?;
    Ok(VerificationRecord::hard(
        fs.generators(),
        CheckId::OracleProfile,
        cmp.matches,
        json!({
            "conductor": cmp.conductor,
            "basis": cmp.basis_histogram,
            "oracle": cmp.oracle.dims,
            "window": cmp.oracle.window,
        }),
    ))
}

/// Deterministic member list of a suite.
pub fn suite_members(suite: Suite, opts: &SuiteOptions) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match suite {
        Suite::PaperExample => vec![PAPER_EXAMPLE.to_vec()],
        Suite::RandomFree => {
            let count = opts.count.unwrap_or(DEFAULT_RANDOM_COUNT);
            let mut out = vec![PAPER_EXAMPLE.to_vec()];
            while out.len() < count.max(1) {
                out.push(random_free(&mut rng, MAX_G, MAX_GENERATOR).generators);
            }
            out
        }
        Suite::PlaneBranch => {
            let half = opts.count.unwrap_or(60) / 2;
            let mut out: Vec<Vec<u64>> = vec![vec![4, 6, 13], vec![4, 6, 25], vec![6, 9, 7], vec![9, 6, 7]];
            let mut plane = 0;
            while plane < half {
                let g = random_plane_branch(&mut rng, 3, MAX_GENERATOR);
                if g.generators.len() >= 3 {
                    out.push(g.generators);
                    plane += 1;
                }
            }
            let mut other = 0;
            while other < half {
                let g = random_free(&mut rng, 3, MAX_GENERATOR);
                let fs = structure(&g.generators).expect("generator output is free");
                if fs.g() >= 2 && !fs.has_plane_branch_inequalities() {
                    out.push(g.generators);
                    other += 1;
                }
            }
            out
        }
        Suite::AtInfinity => {
            let count = opts.count.unwrap_or(30);
            let mut out: Vec<Vec<u64>> = vec![vec![9, 6, 7], vec![4, 6, 13]];
            let mut attempts = 0;
            while out.len() < count && attempts < 20_000 {
                attempts += 1;
                let g = random_free(&mut rng, 2, MAX_GENERATOR);
                let a = &g.generators;
                if a.len() == 3 && g.n[0] * a[1] > a[2] && a[0] > a[1] && g.n[1] * a[2] > g.n[0] * a[1] && !out.contains(a) {
                    out.push(g.generators);
                }
            }
            out
        }
        Suite::Oracle => {
            let limit = opts.work_limit.unwrap_or(DEFAULT_ORACLE_LIMIT);
            let count = opts.count.unwrap_or(24);
            let mut out: Vec<Vec<u64>> = vec![
                vec![2, 3],
                vec![4, 6, 13],
                vec![9, 6, 7],
                vec![6, 9, 7],
                vec![2, 4, 3],
                vec![6, 10, 15],
            ];
            out.retain(|g| structure(g).is_ok_and(|fs| fs.conductor() <= limit));
            let mut attempts = 0;
            while out.len() < count && attempts < 20_000 {
                attempts += 1;
                let g = random_free(&mut rng, 3, 60);
                let fs = structure(&g.generators).expect("generator output is free");
                if fs.conductor() <= limit && !out.contains(&g.generators) {
                    out.push(g.generators);
                }
            }
            out
        }
    }
}

fn member_records(suite: Suite, gens: &[u64], opts: &SuiteOptions) -> Result<Vec<VerificationRecord>> {
    let fs = structure(gens)?;
    let mut out = Vec::new();
    match suite {
        Suite::PaperExample => {
            out.push(example_golden(&fs)?);
            out.extend(structural_checks(&fs, true)?);
            out.extend(bounds_checks(&fs)?);
            out.push(zero_degree(&fs, false)?);
        }
        Suite::RandomFree => {
            out.extend(structural_checks(&fs, true)?);
            out.extend(bounds_checks(&fs)?);
            out.push(zero_degree(&fs, false)?);
        }
        Suite::PlaneBranch => {
            out.extend(plane_branch_checks(&fs)?);
            out.extend(bounds_checks(&fs)?);
            out.push(zero_degree(&fs, true)?);
        }
        Suite::AtInfinity => {
            out.extend(at_infinity_checks(&fs)?);
            out.extend(bounds_checks(&fs)?);
            out.push(zero_degree(&fs, true)?);
        }
        Suite::Oracle => {
            let limit = opts.work_limit.unwrap_or(DEFAULT_ORACLE_LIMIT);
            out.push(oracle_check(&fs, limit)?);
        }
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let members = suite_members(suite, opts);
    let per_member: Vec<Vec<VerificationRecord>> = members
        .par_iter()
        .map(|g| member_records(suite, g, opts))
        .collect::<Result<_>>()?;
    let records: Vec<VerificationRecord> = per_member.into_iter().flatten().collect();
    let mut summary = SuiteSummary {
        members: members.len(),
        ..SuiteSummary::default()
    };
    for r in &records {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::DiscrepancyReported => summary.discrepancy_reported += 1,
        }
    }
    Ok(SuiteReport {
        suite,
        seed: opts.seed,
        summary,
        records,
    })
}
