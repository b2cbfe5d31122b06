use super::*;
use crate::machine::programs;
use crate::resets::canonical_ei_pair;
use proptest::prelude::*;

fn p(s: &str) -> Formula {
    s.parse().unwrap()
}

fn finite(members: &[u64]) -> ReSet {
    ReSet::of(&programs::finite_set(members))
}

fn combo(s: &str) -> BooleanCombo {
    s.parse().unwrap()
}

#[test]
fn derived_literals_example() {
    let t = derived_theory(finite(&[2]), finite(&[3]), Family::JaniczakA);
    assert_eq!(t.verdict(&a_n(2), 0).unwrap(), Verdict::Open);
    assert_eq!(t.verdict(&a_n(2), 100).unwrap(), Verdict::Provable);
    assert_eq!(t.verdict(&a_n(3), 100).unwrap(), Verdict::Refutable);
    for s in [0, 10, 1000, 100_000] {
        assert_eq!(t.verdict(&a_n(4), s).unwrap(), Verdict::Open);
    }
    assert_eq!(t.derived_decide(&combo("(or p2 p3)"), 100).unwrap(), Verdict::Provable);
    assert_eq!(t.derived_decide(&combo("(and p2 p4)"), 100).unwrap(), Verdict::Open);
    assert_eq!(t.derived_decide(&combo("(and p3 p4)"), 100).unwrap(), Verdict::Refutable);
    // A full sentence reduced through the normal form: "no singleton class".
    let no_singleton = p("(not (exists x (forall y (imp (E x y) (= y x)))))");
    assert_eq!(t.verdict(&no_singleton, 100).unwrap(), Verdict::Open);
    let t0 = derived_theory(finite(&[0]), finite(&[]), Family::JaniczakA);
    assert_eq!(t0.verdict(&no_singleton, 100).unwrap(), Verdict::Refutable);
}

#[test]
fn empty_parameters_prove_only_tautologies() {
    let t = derived_theory(finite(&[]), finite(&[]), Family::SuccCycleChi);
    assert_eq!(t.derived_decide(&combo("(or p1 (not p1))"), 1000).unwrap(), Verdict::Provable);
    assert_eq!(t.derived_decide(&combo("(and p1 (not p1))"), 1000).unwrap(), Verdict::Refutable);
    assert_eq!(t.derived_decide(&combo("p1"), 1000).unwrap(), Verdict::Open);
    assert_eq!(t.verdict(&chi(2), 1000).unwrap(), Verdict::Open);
    assert!(matches!(t.verdict(&s4(1), 10), Err(TheoryError::UnsupportedShape(_))));
}

#[test]
fn chi_family_reading() {
    let t = derived_theory(finite(&[1]), finite(&[0]), Family::SuccCycleChi);
    assert_eq!(t.verdict(&chi(2), 100).unwrap(), Verdict::Provable);
    assert_eq!(t.verdict(&chi(1), 100).unwrap(), Verdict::Refutable);
    assert_eq!(t.verdict(&Formula::imp(chi(1), chi(3)), 100).unwrap(), Verdict::Provable);
}

#[test]
fn overlapping_parameters_are_reported() {
    let t = derived_theory(finite(&[1, 2]), finite(&[2]), Family::JaniczakA);
    assert_eq!(t.derived_decide(&combo("p2"), 100), Err(TheoryError::Inconsistent(2)));
}

#[test]
fn plain_j() {
    let j = j_theory();
    assert_eq!(j.verdict(&p("(exists x (E x x))"), 0).unwrap(), Verdict::Provable);
    assert_eq!(j.verdict(&a_n(1), 0).unwrap(), Verdict::Open);
    for ax in j_axioms().take(5) {
        if ax.rank() <= J_RANK_BUDGET {
            assert_eq!(j.verdict(&ax, 0).unwrap(), Verdict::Provable, "{ax}");
        }
    }
}

/// Brute-force J-model probing: evaluates in a census model with prescribed
/// small classes and many large ones, independent of the control-model
/// layout used by the normal form.
#[test]
fn normal_form_agrees_with_probing() {
    let sentences = [
        "(exists x (exists y (and (E x y) (not (= x y)))))",
        "(forall x (exists y (and (E x y) (not (= x y)))))",
        "(exists x (forall y (imp (E x y) (= x y))))",
        "(forall x (forall y (E x y)))",
        "(exists x (exists y (not (E x y))))",
        "(forall x (exists y (not (E x y))))",
        "(exists x (and (forall y (imp (E x y) (= x y))) (exists z (not (E x z)))))",
        "(or (exists x (forall y (imp (E x y) (= x y)))) (forall x (exists y (and (E x y) (not (= x y))))))",
    ];
    for s in sentences {
        let phi = p(s);
        let NormalForm::Combo(c) = j_normal_form(&phi, 4).unwrap() else { panic!() };
        for mask in 0u32..16 {
            let present: Vec<u64> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let mut sizes: Vec<usize> = present.iter().map(|&n| n as usize + 1).collect();
            sizes.extend([7, 8, 9, 10, 11, 12]);
            let truth = Census { sizes }.satisfies(&phi).unwrap();
            assert_eq!(c.eval(&|n| present.contains(&n)), truth, "{s} {present:?}");
        }
    }
}

#[test]
fn putnam_literals() {
    let evens = programs::evens().encode();
    let odds = programs::odds().encode();
    let e = putnam_e(&[(evens.clone(), odds.clone())]);
    let lit = |k: &Index, n: u64| Formula::rel(&format!("P{k}"), vec![numeral(n)]);
    assert_eq!(e.verdict(&lit(&evens, 4), 100).unwrap(), Verdict::Provable);
    assert_eq!(e.verdict(&lit(&evens, 3), 10_000).unwrap(), Verdict::Open);
    let k = crate::resets::dominance_index(&evens, &odds);
    assert_eq!(e.verdict(&lit(&k, 4), 10_000).unwrap(), Verdict::Provable);
    assert_eq!(e.verdict(&Formula::not(lit(&k, 3)), 10_000).unwrap(), Verdict::Provable);
    assert_eq!(e.verdict(&lit(&k, 3), 10_000).unwrap(), Verdict::Refutable);
    assert!(matches!(e.verdict(&p("(forall x (P0 x))"), 10), Err(TheoryError::UnsupportedShape(_))));
}

#[test]
fn succ_pred_literals() {
    // Index 1538 is `decjz 1 0` at arity 1: it halts exactly on inputs ≥ 1.
    assert_eq!(Index::from(1538).program().to_string().trim(), "arity 1\ndecjz 1 0");
    let t = succ_pred_theory();
    let lit = |i: u64, n: u64| Formula::rel("P", vec![numeral(i), numeral(n)]);
    assert_eq!(t.verdict(&lit(1538, 3), 100).unwrap(), Verdict::Provable);
    for s in [1, 100, 10_000, 1_000_000] {
        assert_eq!(t.verdict(&lit(1538, 0), s).unwrap(), Verdict::Open);
        assert_eq!(t.verdict(&lit(53, 5), s).unwrap(), Verdict::Open);
    }
    assert_eq!(t.verdict(&Formula::not(lit(1538, 3)), 100).unwrap(), Verdict::Refutable);
    assert_eq!(t.verdict(&s4(3), 0).unwrap(), Verdict::Provable);
    assert!(matches!(t.verdict(&p("(exists x (P x x))"), 10), Err(TheoryError::UnsupportedShape(_))));
}

#[test]
fn r_fragment() {
    let r = r_theory();
    assert_eq!(r.verdict(&p("(= (+ (S 0) (S 0)) (S (S 0)))"), 10).unwrap(), Verdict::Provable);
    assert_eq!(r.verdict(&p("(= (S 0) 0)"), 10).unwrap(), Verdict::Refutable);
    assert_eq!(r.verdict(&p("(exists y (= (+ y y) (S (S (S (S 0))))))"), 0).unwrap(), Verdict::Open);
    assert_eq!(r.verdict(&p("(exists y (= (+ y y) (S (S (S (S 0))))))"), 5).unwrap(), Verdict::Provable);
}

#[test]
fn weak_rep_scans() {
    let succ = succ_theory();
    let scan = weak_rep_scan(&succ, &p("(and (not (= x 0)) (not (= x (S (S 0)))))"), 30, 0).unwrap();
    let expected: BTreeSet<u64> = (0..=30).filter(|&n| n != 0 && n != 2).collect();
    assert_eq!(scan, expected);
    assert_eq!(scan_pattern(&scan, 30), ScanPattern::Cofinite { missing: vec![0, 2] });
    let one = weak_rep_scan(&succ, &p("(= x (S 0))"), 30, 0).unwrap();
    assert_eq!(one, BTreeSet::from([1]));
    assert_eq!(scan_pattern(&one, 30), ScanPattern::Finite { members: vec![1] });
    assert!(matches!(
        weak_rep_scan(&succ, &p("(= x y)"), 3, 0),
        Err(TheoryError::UnsupportedShape(_))
    ));
    assert!(matches!(weak_rep_scan(&j_theory(), &p("(E x x)"), 3, 0), Err(TheoryError::UnsupportedShape(_))));
}

#[test]
fn family_codes() {
    assert_eq!(goedel(&a_n(5)), BigUint::from(15u32));
    assert_eq!(goedel(&chi(3)), BigUint::from(10u32));
    assert_eq!(Family::SuccCycleChi.code(&BigUint::from(2u32)), goedel(&chi(3)));
    for n in 0..8u64 {
        assert_eq!(ungoedel(&goedel(&a_n(n))), Some(a_n(n)));
        assert_eq!(ungoedel(&goedel(&chi(n + 1))), Some(chi(n + 1)));
    }
    assert_eq!(ungoedel(&BigUint::from(1u32)), None);
    let other = p("(exists x (E x x))");
    assert_eq!(goedel(&other) % 3u32, BigUint::from(2u32));
    assert_eq!(ungoedel(&goedel(&other)), Some(other));
}

#[test]
fn transfer_is_total_and_preimage_correct() {
    let t = derived_theory(canonical_ei_pair().left, canonical_ei_pair().right, Family::JaniczakA);
    let h = ei_transfer(&Index::from(4), &Index::from(53), &t).unwrap();
    assert_eq!(&h % 3u32, BigUint::from(0u32));
    assert!(ei_transfer(&Index::from(1), &Index::from(2), &succ_theory()).is_err());
    for family in [Family::JaniczakA, Family::SuccCycleChi] {
        let evens = programs::evens().encode();
        let g = preimage_index(&evens, family);
        for n in 0..20u64 {
            let code = family.code(&BigUint::from(n));
            let direct = ReSet::new(evens.clone()).contains(&code, 10_000);
            assert_eq!(ReSet::new(g.clone()).contains_u64(n, 10_000), direct, "{family:?} {n}");
        }
    }
}

#[test]
fn family_image_programs() {
    for family in [Family::JaniczakA, Family::SuccCycleChi] {
        let w = ReSet::of(&family_image_program(family, &programs::evens().encode()));
        for x in 0..40u64 {
            let expected = (0..=x).any(|n| n % 2 == 0 && family.code(&BigUint::from(n)) == BigUint::from(x));
            assert_eq!(w.contains_u64(x, 10_000), expected, "{family:?} {x}");
        }
    }
}

#[test]
fn transferred_witness_is_excluded() {
    let (k0, k1) = (canonical_ei_pair().left, canonical_ei_pair().right);
    let t = derived_theory(k0.clone(), k1.clone(), Family::JaniczakA);
    let i = family_image_program(Family::JaniczakA, &k0.index).encode();
    let j = family_image_program(Family::JaniczakA, &k1.index).encode();
    // Preconditions on the family part: f[K₀] ⊆ W_i and f[K₁] ⊆ W_j, sampled.
    for n in 0..30u64 {
        let code = Family::JaniczakA.code(&BigUint::from(n));
        if k0.contains_u64(n, 5_000) {
            assert!(ReSet::new(i.clone()).contains(&code, 50_000));
        }
        if k1.contains_u64(n, 5_000) {
            assert!(ReSet::new(j.clone()).contains(&code, 50_000));
        }
    }
    let h = ei_transfer(&i, &j, &t).unwrap();
    for s in [10, 1_000, 100_000] {
        assert!(!ReSet::new(i.clone()).contains(&h, s));
        assert!(!ReSet::new(j.clone()).contains(&h, s));
    }
}

#[test]
fn diagonal_stubs() {
    match diagonal_demo(DiagonalStub::Honest) {
        DiagonalReport::Contradiction {
            diagonal,
            goedel_matches,
            member_by_definition,
            member_by_representation,
            ..
        } => {
            assert_eq!(diagonal, goedel(&DiagonalStub::Honest.representation()).to_string());
            assert!(goedel_matches);
            assert_ne!(member_by_definition, member_by_representation);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(diagonal_demo(DiagonalStub::Dishonest), DiagonalReport::RepresentationFailure { .. }));
}

#[test]
fn succ_matches_bounded_oracle() {
    for s in CURATED_SUCC {
        let phi = p(s);
        let qe = succ_decide(&phi).unwrap() == Verdict::Provable;
        assert_eq!(qe, bounded_truth(&phi).unwrap(), "{s}");
    }
}

#[test]
fn succ_decides_s4_scheme() {
    for n in 1..=20 {
        assert_eq!(succ_decide(&s4(n)), Ok(Verdict::Provable));
    }
}

fn arb_succ_term(vars: Vec<&'static str>) -> impl Strategy<Value = Term> {
    let base = prop_oneof![Just(Term::zero())].boxed();
    let base = if vars.is_empty() {
        base
    } else {
        prop_oneof![1 => Just(Term::zero()), 3 => proptest::sample::select(vars).prop_map(Term::var)].boxed()
    };
    (base, 0u64..3).prop_map(|(t, k)| Term::succ_n(k, t))
}

/// Random Succ sentences over the variables `x`, `y`, `z`, quantified in
/// that order.
pub(crate) fn arb_succ_sentence(depth: usize) -> BoxedStrategy<Formula> {
    fn body(vars: Vec<&'static str>, size: u32) -> BoxedStrategy<Formula> {
        let atom = (arb_succ_term(vars.clone()), arb_succ_term(vars.clone())).prop_map(|(a, b)| Formula::eq(a, b));
        let leaf = atom.boxed();
        if size == 0 {
            return leaf;
        }
        let sub = body(vars, size - 1);
        prop_oneof![
            2 => leaf,
            1 => sub.clone().prop_map(Formula::not),
            1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            1 => (sub.clone(), sub).prop_map(|(a, b)| Formula::or(a, b)),
        ]
        .boxed()
    }
    let names = ["x", "y", "z"];
    let vars: Vec<&'static str> = names[..depth].to_vec();
    (body(vars, 2), proptest::collection::vec(any::<bool>(), depth))
        .prop_map(move |(m, quants)| {
            names[..quants.len()]
                .iter()
                .zip(&quants)
                .rev()
                .fold(m, |acc, (x, ex)| if *ex { Formula::exists(x, acc) } else { Formula::forall(x, acc) })
        })
        .boxed()
}

fn arb_combo(atoms: u64) -> impl Strategy<Value = BooleanCombo> {
    let leaf = prop_oneof![
        8 => (0..atoms).prop_map(BooleanCombo::Atom),
        1 => Just(BooleanCombo::Top),
        1 => Just(BooleanCombo::Bot),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(BooleanCombo::not),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(BooleanCombo::And),
            proptest::collection::vec(inner, 1..4).prop_map(BooleanCombo::Or),
        ]
    })
}

/// Propositional entailment by enumerating all valuations of the atoms.
fn brute_entails(c: &BooleanCombo, pos: &BTreeSet<u64>, neg: &BTreeSet<u64>) -> (bool, bool) {
    let atoms: Vec<u64> = c.atoms().into_iter().collect();
    let (mut all_true, mut all_false) = (true, true);
    for row in 0u32..1 << atoms.len() {
        let val = |n: u64| row >> atoms.iter().position(|&a| a == n).unwrap() & 1 == 1;
        let consistent = atoms.iter().all(|&a| (!pos.contains(&a) || val(a)) && (!neg.contains(&a) || !val(a)));
        if consistent {
            let v = c.eval(&val);
            all_true &= v;
            all_false &= !v;
        }
    }
    (all_true, all_false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn succ_qe_matches_oracle(phi in arb_succ_sentence(2)) {
        let qe = succ_decide(&phi).unwrap() == Verdict::Provable;
        prop_assert_eq!(qe, bounded_truth(&phi).unwrap());
    }

    #[test]
    fn succ_exclusive(phi in arb_succ_sentence(3)) {
        let a = succ_decide(&phi).unwrap();
        let b = succ_decide(&Formula::not(phi)).unwrap();
        prop_assert!(a != b && a != Verdict::Open && b != Verdict::Open);
    }

    #[test]
    fn derived_matches_brute_force(
        c in arb_combo(10),
        b in proptest::collection::btree_set(0u64..10, 0..5),
        cset in proptest::collection::btree_set(0u64..10, 0..5),
    ) {
        let cset: BTreeSet<u64> = cset.difference(&b).copied().collect();
        let bv: Vec<u64> = b.iter().copied().collect();
        let cv: Vec<u64> = cset.iter().copied().collect();
        let t = derived_theory(finite(&bv), finite(&cv), Family::JaniczakA);
        let v = t.derived_decide(&c, 1_000).unwrap();
        let (pr, rf) = brute_entails(&c, &b, &cset);
        prop_assert_eq!(v == Verdict::Provable, pr);
        prop_assert_eq!(v == Verdict::Refutable, rf);
    }

    #[test]
    fn derived_consistent_and_monotone(
        c in arb_combo(6),
        b in proptest::collection::btree_set(0u64..6, 0..3),
        s1 in 0u64..40,
        ds in 0u64..400,
    ) {
        let bv: Vec<u64> = b.iter().copied().collect();
        let cv: Vec<u64> = (0..6).filter(|n| !b.contains(n) && n % 2 == 0).collect();
        let t = derived_theory(finite(&bv), finite(&cv), Family::SuccCycleChi);
        let phi = Family::SuccCycleChi.formula_of(&c);
        let early = t.verdict(&phi, s1).unwrap();
        let late = t.verdict(&phi, s1 + ds).unwrap();
        prop_assert!(!(t.provable(&phi, s1).unwrap() && t.refutable(&phi, s1).unwrap()));
        if early != Verdict::Open {
            prop_assert_eq!(early, late);
        }
    }

    #[test]
    fn putnam_consistent_and_monotone(n in 0u64..30, s in 0u64..300, ds in 0u64..3000) {
        let evens = programs::evens().encode();
        let odds = programs::odds().encode();
        let k = crate::resets::dominance_index(&evens, &odds);
        let e = putnam_e(&[(evens, odds)]);
        let lit = Formula::rel(&format!("P{k}"), vec![numeral(n)]);
        let early = e.verdict(&lit, s).unwrap();
        let late = e.verdict(&lit, s + ds).unwrap();
        if early != Verdict::Open {
            prop_assert_eq!(early, late);
        }
        let expected = if n % 2 == 0 { Verdict::Provable } else { Verdict::Refutable };
        prop_assert!(late == Verdict::Open || late == expected);
    }
}
