//! The acceptance suite. Runs without the test harness so that every
//! criterion prints exactly one line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use metaprops::arith_r::{check_certificate, comparison_refute, witness_compare};
use metaprops::atlas::{self, rosser_table, Atlas, PropertyId, RosserPair, Status};
use metaprops::logic::{eval_sigma1, goedel, Formula, Sigma1Result};
use metaprops::machine::{programs, run, smn, smn_inflation};
use metaprops::reductions::{stabilizing_stage, theory_of_finite, theory_to_set_tt, tt_satisfied};
use metaprops::resets::{canonical_ei_pair, check_ei_exclusion, creative_demo, ReSet};
use metaprops::theories::{
    bounded_truth, derived_theory, diagonal_demo, s4, scan_pattern, succ_decide, succ_theory, weak_rep_scan,
    BooleanCombo, DiagonalReport, DiagonalStub, Family, ScanPattern, Verdict, CURATED_SUCC,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;
const SMN_BUDGET: u64 = 10_000;
const SMN_TIME: Duration = Duration::from_secs(10);
const ROSSER_TIME: Duration = Duration::from_secs(60);
const ROSSER_BUDGET: u64 = 200;
const COMPARISON_BUDGET: u64 = 6;
const K_STAGE: u64 = 100_000;
const EI_STAGES: [u64; 5] = [10, 100, 1_000, 10_000, 100_000];
const J_INDEPENDENCE_STAGE: u64 = 1_000_000;
const SCAN_RANGE: u64 = 200;

type Outcome = Result<String, String>;

fn big(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| BigUint::from(x)).collect()
}

fn smn_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut halted = 0;
    for case in 0..200 {
        let i = common::random_program(&mut rng, 3).encode();
        let m = rng.gen_range(0..=3);
        let args: Vec<u64> = (0..3).map(|_| rng.gen_range(0..10)).collect();
        let (ys, zs) = args.split_at(m);
        let direct = run(&i, &big(&args), SMN_BUDGET);
        let fixed = run(&smn(m, 3 - m, &i, &big(ys)), &big(zs), smn_inflation(m, SMN_BUDGET));
        if direct != fixed {
            return Err(format!("case {case}: {direct:?} vs {fixed:?}"));
        }
        halted += direct.halted() as usize;
    }
    let t = start.elapsed();
    if t > SMN_TIME {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("200 cases, {halted} halting, 0 mismatches, {t:.2?}"))
}

fn creative_diagonal() -> Outcome {
    let rows = creative_demo(20, 100, K_STAGE);
    let distinct: BTreeSet<_> = rows.iter().map(|r| &r.index).collect();
    if distinct.len() != 20 {
        return Err("indices are not distinct".into());
    }
    match rows.iter().position(|r| !r.holds()) {
        Some(k) => Err(format!("row {k}: {:?}", rows[k])),
        None => Ok(format!("20 indices, each i in the complement of K and outside W_i at stage {K_STAGE}")),
    }
}

fn ei_exclusion() -> Outcome {
    let p = canonical_ei_pair();
    let r = check_ei_exclusion(&p.left.index, &p.right.index, &EI_STAGES, 100);
    if !(r.structural && r.valid && r.excluded && r.precondition_failures.is_empty()) {
        return Err(format!("canonical order: {r:?}"));
    }
    let s = p.swapped();
    let r = check_ei_exclusion(&s.left.index, &s.right.index, &EI_STAGES, 100);
    if !(r.structural && r.valid && r.excluded) {
        return Err(format!("swapped order: {r:?}"));
    }
    Ok(format!("witness absent from both sides at stages {EI_STAGES:?}, also swapped"))
}

fn rosser_separator() -> Outcome {
    let start = Instant::now();
    let mut certs = 0;
    for pair in [RosserPair::EvensOdds, RosserPair::Residue3] {
        let r = rosser_table(pair, 50, ROSSER_BUDGET);
        if !r.passed {
            let bad: Vec<_> = r
                .rows
                .iter()
                .filter(|x| !x.accepted || (x.in_left && x.proof.is_none()) || (x.in_right && x.refutation.is_none()))
                .map(|x| x.n)
                .collect();
            return Err(format!("{pair:?} fails at {bad:?}"));
        }
        certs += r.rows.iter().filter(|x| x.proof.is_some() || x.refutation.is_some()).count();
    }
    let t = start.elapsed();
    if t > ROSSER_TIME {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{certs} certificates accepted for n <= 50 on two pairs, none contradictory, {t:.2?}"))
}

fn comparison_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let x = BTreeSet::from(["x".to_string()]);
    let (mut pairs, mut emitted, mut trials) = (0, 0, 0);
    while pairs < 200 {
        let s0 = Formula::exists("y", common::random_delta0(&mut rng, &["x", "y"], 2));
        let s1 = Formula::exists("y", common::random_delta0(&mut rng, &["x", "y"], 2));
        if s0.free_vars() != x || s1.free_vars() != x {
            continue;
        }
        pairs += 1;
        let wc = witness_compare(&s0, &s1).map_err(|e| e.to_string())?;
        for n in 0..=4 {
            let Ok(Sigma1Result::True(_)) = eval_sigma1(&wc.le_at(n), COMPARISON_BUDGET) else { continue };
            let Some(c) = comparison_refute(&wc, n, COMPARISON_BUDGET) else {
                return Err(format!("no certificate for {} at {n}", wc.le));
            };
            if !check_certificate(&c) {
                return Err(format!("rejected certificate for {} at {n}", wc.le));
            }
            emitted += 1;
            for k in 0..c.witnesses.len() {
                for delta in [1u64, 2] {
                    let mut t = c.clone();
                    t.witnesses[k] += delta;
                    trials += 1;
                    if check_certificate(&t) {
                        return Err(format!("tampered witness accepted for {} at {n}", wc.le));
                    }
                }
            }
        }
    }
    if emitted == 0 {
        return Err("no refutations exercised".into());
    }
    Ok(format!("200 pairs, {emitted} refutations accepted, {trials}/{trials} tampered witnesses rejected"))
}

fn succ_decision() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    for k in 0..500 {
        let phi = common::random_succ_sentence(&mut rng, 4);
        let (a, b) = (succ_decide(&phi), succ_decide(&Formula::not(phi.clone())));
        let exclusive = matches!(
            (&a, &b),
            (Ok(Verdict::Provable), Ok(Verdict::Refutable)) | (Ok(Verdict::Refutable), Ok(Verdict::Provable))
        );
        if !exclusive {
            return Err(format!("sentence {k} {phi}: {a:?} / {b:?}"));
        }
    }
    for s in CURATED_SUCC {
        let phi: Formula = s.parse().map_err(|e| format!("{s}: {e:?}"))?;
        let qe = succ_decide(&phi).map_err(|e| e.to_string())? == Verdict::Provable;
        if Ok(qe) != bounded_truth(&phi) {
            return Err(format!("disagrees with the bounded oracle on {s}"));
        }
    }
    if let Some(n) = (1..=20).find(|&n| succ_decide(&s4(n)) != Ok(Verdict::Provable)) {
        return Err(format!("S4.{n} not provable"));
    }
    Ok("500 fuzz sentences exclusive, 30 curated agree with the bounded oracle, S4.1..S4.20 provable".into())
}

/// The verdict propositional entailment gives from literals fixed by `b`
/// (true) and `c` (false).
fn brute_entails(phi: &BooleanCombo, b: &BTreeSet<u64>, c: &BTreeSet<u64>) -> Verdict {
    let free: Vec<u64> = phi.atoms().into_iter().filter(|n| !b.contains(n) && !c.contains(n)).collect();
    let values: Vec<bool> = (0..1u32 << free.len())
        .map(|mask| {
            phi.eval(&|n| match free.iter().position(|&f| f == n) {
                Some(k) => mask >> k & 1 == 1,
                None => b.contains(&n),
            })
        })
        .collect();
    if values.iter().all(|&v| v) {
        Verdict::Provable
    } else if values.iter().all(|&v| !v) {
        Verdict::Refutable
    } else {
        Verdict::Open
    }
}

fn derived_j() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut checked = 0;
    for _ in 0..20 {
        let mut pool: Vec<u64> = (0..10).collect();
        let (mut b, mut c) = (BTreeSet::new(), BTreeSet::new());
        for _ in 0..rng.gen_range(0..=5) {
            b.insert(pool.swap_remove(rng.gen_range(0..pool.len())));
        }
        for _ in 0..rng.gen_range(0..=5) {
            c.insert(pool.swap_remove(rng.gen_range(0..pool.len())));
        }
        let bv: Vec<u64> = b.iter().copied().collect();
        let cv: Vec<u64> = c.iter().copied().collect();
        let t = derived_theory(
            ReSet::of(&programs::finite_set(&bv)),
            ReSet::of(&programs::finite_set(&cv)),
            Family::JaniczakA,
        );
        let stage = stabilizing_stage(&bv.iter().chain(&cv).copied().collect::<Vec<_>>(), 10);
        for _ in 0..50 {
            let phi = common::random_combo(&mut rng, 10, 4);
            let got = t.derived_decide(&phi, stage).map_err(|e| e.to_string())?;
            if got != brute_entails(&phi, &b, &c) {
                return Err(format!("{phi} with B={b:?} C={c:?}: {got:?}"));
            }
            checked += 1;
        }
        for n in (0..10).filter(|n| !b.contains(n) && !c.contains(n)) {
            let v = t.derived_decide(&BooleanCombo::Atom(n), J_INDEPENDENCE_STAGE).map_err(|e| e.to_string())?;
            if v != Verdict::Open {
                return Err(format!("p{n} decided outside B and C: {v:?}"));
            }
        }
    }
    Ok(format!("{checked} combinations agree with truth-table entailment; free atoms open at stage {J_INDEPENDENCE_STAGE}"))
}

fn tt_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let xs: Vec<Vec<u64>> = (0..10)
        .map(|_| {
            let set: BTreeSet<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..10)).collect();
            set.into_iter().collect()
        })
        .collect();
    let combos: Vec<BooleanCombo> = (0..100).map(|_| common::random_combo(&mut rng, 10, 4)).collect();
    for x in &xs {
        let t = theory_of_finite(x);
        let s = stabilizing_stage(x, 10);
        for phi in &combos {
            let decided = t.derived_decide(phi, s).map_err(|e| e.to_string())? == Verdict::Provable;
            let sat = tt_satisfied(&theory_to_set_tt(phi), &|q| x.iter().any(|&n| BigUint::from(n) == *q));
            if decided != sat {
                return Err(format!("{phi} with X={x:?}"));
            }
        }
    }
    Ok("100 combinations x 10 sets agree".into())
}

const UNARY_SUCC: [&str; 20] = [
    "(= x 0)",
    "(= x (S (S (S 0))))",
    "(not (= x (S 0)))",
    "(exists y (= x (S y)))",
    "(exists y (= x (S (S (S y)))))",
    "(forall y (not (= (S y) x)))",
    "(or (= x 0) (= x (S (S (S (S 0))))))",
    "(and (not (= x 0)) (not (= x (S (S 0)))))",
    "(exists y (and (= x (S y)) (not (= y (S 0)))))",
    "(exists y (= (S (S x)) y))",
    "(= x x)",
    "(not (= x x))",
    "(exists y (and (= x (S (S y))) (= y (S (S (S 0))))))",
    "(forall y (imp (= x (S y)) (not (= y 0))))",
    "(exists y (exists z (and (= x (S y)) (= y (S z)))))",
    "(not (exists y (= x (S (S (S (S (S y))))))))",
    "(or (= x (S 0)) (exists y (= x (S (S (S (S (S (S (S (S y)))))))))))",
    "(forall y (or (= y x) (not (= (S y) (S x)))))",
    "(exists y (and (not (= y x)) (= (S y) (S (S 0)))))",
    "(imp (= x (S (S 0))) (= x (S 0)))",
];

fn weak_rep_scans() -> Outcome {
    let t = succ_theory();
    let mut kinds = BTreeMap::new();
    for s in UNARY_SUCC {
        let phi: Formula = s.parse().map_err(|e| format!("{s}: {e:?}"))?;
        let scan = weak_rep_scan(&t, &phi, SCAN_RANGE, 0).map_err(|e| e.to_string())?;
        let kind = match scan_pattern(&scan, SCAN_RANGE) {
            ScanPattern::Finite { .. } => "finite",
            ScanPattern::Cofinite { .. } => "cofinite",
            ScanPattern::Neither => return Err(format!("{s} is neither finite nor cofinite on 0..={SCAN_RANGE}")),
        };
        *kinds.entry(kind).or_insert(0) += 1;
    }
    Ok(format!("20 formulas over 0..={SCAN_RANGE}: {kinds:?}"))
}

fn diagonal() -> Outcome {
    let n = goedel(&DiagonalStub::Honest.representation()).to_string();
    match diagonal_demo(DiagonalStub::Honest) {
        DiagonalReport::Contradiction { diagonal, goedel_matches: true, member_by_definition, member_by_representation, .. }
            if diagonal == n && member_by_definition != member_by_representation => {}
        other => return Err(format!("honest stub: {other:?}")),
    }
    match diagonal_demo(DiagonalStub::Dishonest) {
        DiagonalReport::RepresentationFailure { at, .. } => {
            Ok(format!("honest stub contradicts itself at its own code; dishonest stub fails at {at}"))
        }
        other => Err(format!("dishonest stub: {other:?}")),
    }
}

fn atlas_check() -> Outcome {
    use PropertyId::*;
    let a = Atlas::get();
    let count = a.edges().count();
    let open = a.edges().filter(|e| e.status == Status::Open).count();
    if count != 132 || open != 6 {
        return Err(format!("{count} pairs, {open} open"));
    }
    let problems = a.consistency_problems();
    if !problems.is_empty() {
        return Err(problems.join("; "));
    }
    for chain in [&[Rosser, EI, RI, EU][..], &[RFD, RSS, RSW], &[REW, RSW]] {
        if !a.has_chain(chain) {
            return Err(format!("missing chain {chain:?}"));
        }
    }
    if atlas::export_dot(None) != a.export_dot(None) || atlas::export_dot(Some(TP)) != a.export_dot(Some(TP)) {
        return Err("DOT export is not stable".into());
    }
    for hint in a.edges().filter_map(|e| e.witness_hint.as_deref()) {
        let r = atlas::run_demo(hint, None).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("demo {hint} failed"));
        }
    }
    Ok("132 pairs, 6 open, citations resolve, chains present, DOT stable, hinted demos pass".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("s-m-n suite", smn_suite),
        ("creative diagonal", creative_diagonal),
        ("EI witness exclusion", ei_exclusion),
        ("Rosser separator", rosser_separator),
        ("comparison fuzz", comparison_fuzz),
        ("Succ decision", succ_decision),
        ("derived J theories", derived_j),
        ("tt round trip", tt_round_trip),
        ("weak-representability scans", weak_rep_scans),
        ("diagonal demo", diagonal),
        ("atlas", atlas_check),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
