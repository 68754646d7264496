use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use semigroup_deform::basis::build_index_family;
use semigroup_deform::moduli::{dimension_bounds, plane_branch_check};
use semigroup_deform::semigroup::{apery_set, free_structure, FreeStructure, NumericalSemigroup};
use semigroup_deform::sequences::{delta_to_beta, enumerate_deltas, BetaSequence};
use semigroup_deform::suites::{
    run_suite, CheckId, Status, Suite, SuiteOptions, SuiteReport, DEFAULT_ORACLE_LIMIT,
    PAPER_EXAMPLE,
};

type Outcome = Result<String, String>;

fn fs(gens: &[u64]) -> FreeStructure {
    free_structure(&NumericalSemigroup::new(gens.to_vec()).unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

/// Every record of `check` passes; returns how many there were.
fn all_pass(report: &SuiteReport, check: CheckId) -> Result<usize, String> {
    let mut n = 0;
    for r in report.records_for(check) {
        n += 1;
        ensure(r.status == Status::Pass, || {
            format!("{:?} failed on {:?}: {}", check, r.semigroup, r.payload)
        })?;
    }
    Ok(n)
}

fn random_suite() -> SuiteReport {
    run_suite(Suite::RandomFree, &SuiteOptions::default()).unwrap()
}

fn goldens() -> Outcome {
    let start = Instant::now();
    let report = run_suite(Suite::PaperExample, &SuiteOptions::default()).unwrap();
    let n = all_pass(&report, CheckId::ExampleGolden)?;
    ensure(n == 1, || "golden record missing".into())?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("ell, E, D_2, h points and 31 points of D_3 match in {:?}", start.elapsed()))
}

fn basis_count(report: &SuiteReport, elapsed: Duration) -> Outcome {
    ensure(report.summary.members >= 200, || "fewer than 200 members".into())?;
    let n = all_pass(report, CheckId::BasisCount)?;
    all_pass(report, CheckId::ConductorOracle)?;
    let worked = report
        .records_for(CheckId::BasisCount)
        .find(|r| r.semigroup == PAPER_EXAMPLE)
        .ok_or("worked example missing")?;
    ensure(worked.payload["basis"] == json!(116), || format!("worked example {}", worked.payload))?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{n} members, worked example 116, {elapsed:?}"))
}

fn cardinality(report: &SuiteReport) -> Outcome {
    let n = all_pass(report, CheckId::CardinalityDprime)?;
    Ok(format!("{n} members with g >= 2"))
}

fn apery(report: &SuiteReport) -> Outcome {
    let n = all_pass(report, CheckId::AperyDegree)?;
    ensure(n >= 50, || format!("only {n} members checked"))?;
    let f = fs(&[9, 6, 7]);
    let lvl = f.level(2);
    let fam = build_index_family(&lvl, 2).unwrap();
    let mut deg: Vec<u64> = fam.d_prime.iter().map(|p| p.weighted_sum(lvl.generators())).collect();
    deg.sort_unstable();
    let ap = apery_set(lvl.base(), lvl.a(2)).unwrap();
    let expected = vec![0, 6, 9, 12, 15, 18, 24];
    ensure(deg == expected && ap == expected, || format!("<9,6,7>: {deg:?} vs {ap:?}"))?;
    Ok(format!("{n} members, <9,6,7> gives {expected:?}"))
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let report = run_suite(Suite::Oracle, &SuiteOptions::default()).unwrap();
    let n = all_pass(&report, CheckId::OracleProfile)?;
    ensure(n >= 20, || format!("only {n} members"))?;
    for r in report.records_for(CheckId::OracleProfile) {
        ensure(r.payload["conductor"].as_u64().unwrap() <= DEFAULT_ORACLE_LIMIT, || {
            format!("{:?} exceeds the conductor limit", r.semigroup)
        })?;
    }
    for required in [vec![2, 3], vec![4, 6, 13], vec![9, 6, 7], vec![6, 9, 7]] {
        ensure(report.records_for(CheckId::OracleProfile).any(|r| r.semigroup == required), || {
            format!("{required:?} missing")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{n} members, {:?}", start.elapsed()))
}

fn simple_bounds(report: &SuiteReport) -> Outcome {
    let n = all_pass(report, CheckId::BoundsSimple)?;
    for (gens, want) in [
        (vec![4, 6, 13], (0, 2, 2)),
        (vec![9, 6, 7], (0, 3, 6)),
        (vec![6, 9, 7], (0, 3, 6)),
    ] {
        let b = dimension_bounds(&fs(&gens)).unwrap();
        let got = (b.simple_lower, b.tau_actual as i64, b.simple_upper);
        ensure(got == want, || format!("{gens:?}: {got:?}, expected {want:?}"))?;
    }
    Ok(format!("{n} members and 3 instances"))
}

fn plane_branch() -> Outcome {
    let report = run_suite(Suite::PlaneBranch, &SuiteOptions::default()).unwrap();
    let n = all_pass(&report, CheckId::PlaneBranchEquivalence)?;
    let m = all_pass(&report, CheckId::SumDFormula)?;
    for gens in [vec![4, 6, 13], vec![4, 6, 25]] {
        let r = plane_branch_check(&fs(&gens)).unwrap();
        ensure(r.is_plane_branch && r.recursion_holds, || format!("{gens:?} not a plane branch"))?;
        ensure(r.sum_d_direct == 0 && r.sum_d_formula.is_zero(), || {
            format!("{gens:?}: sum d {} vs {}", r.sum_d_direct, r.sum_d_formula)
        })?;
    }
    let r = plane_branch_check(&fs(&[6, 9, 7])).unwrap();
    ensure(!r.is_plane_branch && !r.recursion_holds, || "<6,9,7> sides not both false".into())?;
    Ok(format!("{n} members, {m} sum formulas, 3 instances"))
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let beta = BetaSequence::new(vec![10, 36, 183]).unwrap();
    let found = enumerate_deltas(&beta, None).map_err(|e| e.to_string())?;
    let mut seqs: Vec<Vec<u64>> = found.iter().map(|d| d.deltas.clone()).collect();
    seqs.sort();
    let expected = vec![vec![20, 10, 4, 17], vec![30, 20, 54, 267], vec![36, 26, 465]];
    ensure(seqs == expected, || format!("got {seqs:?}"))?;
    for d in &found {
        let back = delta_to_beta(d).map_err(|e| e.to_string())?;
        ensure(back == beta, || format!("{:?} maps to {back:?}", d.deltas))?;
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("3 sequences round-trip in {:?}", start.elapsed()))
}

fn zero_degree() -> Outcome {
    let mut total = 0;
    for suite in [Suite::PlaneBranch, Suite::AtInfinity] {
        let report = run_suite(suite, &SuiteOptions::default()).unwrap();
        total += all_pass(&report, CheckId::ZeroDegree)?;
    }
    Ok(format!("zero_count = 0 on {total} members"))
}

fn cross_validation() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_sgdeform"))
        .args(["verify", "--suite", "at-infinity"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let records = v["records"].as_array().ok_or("no records")?;
    let find = |check: &str, pred: &dyn Fn(&Value) -> bool| {
        records
            .iter()
            .any(|r| r["semigroup"] == json!([9, 6, 7]) && r["check"] == json!(check) && pred(&r["payload"]))
    };
    let ratio = |x: i64, y: i64| json!({"num": x, "den": y});
    ensure(
        find("b-formula-delta", &|p| {
            p["k"] == json!(1) && p["formula"] == json!(1) && p["direct"] == json!(0)
        }),
        || "b_{2,1} record missing".into(),
    )?;
    ensure(
        find("triangle-bounds", &|p| {
            p["statement_upper"] == ratio(3, 2)
                && p["direct"] == json!(2)
                && p["proof_case1_value"] == ratio(2, 1)
        }),
        || "triangle record missing".into(),
    )?;
    ensure(find("at-infinity-formula", &|p| !p["delta"].is_null()), || {
        "at-infinity formula record missing".into()
    })?;
    let s = &v["summary"];
    Ok(format!(
        "exit 0, {} members, {} discrepancies reported",
        s["members"], s["discrepancy_reported"]
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let random = random_suite();
    let random_time = start.elapsed();

    let results: Vec<(&str, Outcome)> = vec![
        ("1 worked-example goldens", goldens()),
        ("2 basis-count identity", basis_count(&random, random_time)),
        ("3 cardinality identity", cardinality(&random)),
        ("4 apery-degree identity", apery(&random)),
        ("5 oracle equivalence", oracle()),
        ("6 simple bound chain", simple_bounds(&random)),
        ("7 plane-branch equivalence", plane_branch()),
        ("8 delta enumeration", enumeration()),
        ("9 zero-degree check", zero_degree()),
        ("10 formula cross-validation", cross_validation()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
