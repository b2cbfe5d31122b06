//! The successor theories and quantifier elimination for `(ℕ, 0, S)`.
//!
//! Succ is complete and `ℕ ⊨ Succ`, so a sentence is provable in Succ iff it
//! is true in ℕ. Truth is decided by eliminating quantifiers over literals
//! `S^a u = S^b w` with `u, w` variables or `0`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::{TheoryError, Verdict};
use crate::logic::{Formula, Signature, Term};

/// `∀x(S^n x ≠ x)`.
pub fn s4(n: u64) -> Formula {
    let x = Term::var("x");
    Formula::forall("x", Formula::not(Formula::eq(Term::succ_n(n, x.clone()), x)))
}

fn s1_to_s3() -> Vec<Formula> {
    let (x, y) = (Term::var("x"), Term::var("y"));
    vec![
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::imp(Formula::eq(Term::s(x.clone()), Term::s(y.clone())), Formula::eq(x.clone(), y.clone())),
            ),
        ),
        Formula::forall("x", Formula::not(Formula::eq(Term::s(x.clone()), Term::zero()))),
        Formula::forall(
            "x",
            Formula::imp(
                Formula::not(Formula::eq(x.clone(), Term::zero())),
                Formula::exists("y", Formula::eq(x, Term::s(y))),
            ),
        ),
    ]
}

/// S1, S2, S3, then S4.n for `n = 1, 2, …`.
pub fn succ_axioms() -> impl Iterator<Item = Formula> {
    s1_to_s3().into_iter().chain((1..).map(s4))
}

/// S1, S2, S3.
pub fn succ_minus_axioms() -> impl Iterator<Item = Formula> {
    s1_to_s3().into_iter()
}

/// `χ_n`: there is a cycle of length exactly `n`.
pub fn chi(n: u64) -> Formula {
    assert!(n >= 1, "cycle lengths start at 1");
    let x = Term::var("x");
    let mut parts = vec![Formula::eq(Term::succ_n(n, x.clone()), x.clone())];
    for d in (1..n).filter(|d| n % d == 0) {
        parts.push(Formula::not(Formula::eq(Term::succ_n(d, x.clone()), x.clone())));
    }
    Formula::exists("x", Formula::conj(parts).expect("non-empty"))
}

/// `Some(n)` when `φ` is literally `chi(n)`.
pub fn recognize_chi(phi: &Formula) -> Option<u64> {
    let Formula::Exists(_, body) = phi else { return None };
    let first = match body.as_ref() {
        Formula::And(a, _) => a.as_ref(),
        other => other,
    };
    let Formula::Eq(l, _) = first else { return None };
    let n = side(l).ok()?.1;
    (n >= 1 && chi(n) == *phi).then_some(n)
}

type Side = (Option<String>, u64);

/// `S^a u = S^b w` (or its negation), normalised so that one offset is zero
/// and the sides are ordered.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Lit {
    l: Side,
    r: Side,
    pos: bool,
}

type Dnf = BTreeSet<BTreeSet<Lit>>;

fn top() -> Dnf {
    BTreeSet::from([BTreeSet::new()])
}

fn side(t: &Term) -> Result<Side, TheoryError> {
    match t {
        Term::Var(x) => Ok((Some(x.clone()), 0)),
        Term::App(f, args) if f == "0" && args.is_empty() => Ok((None, 0)),
        Term::App(f, args) if f == "S" && args.len() == 1 => side(&args[0]).map(|(b, k)| (b, k + 1)),
        Term::App(f, _) => Err(TheoryError::WrongSignature(f.clone())),
    }
}

/// The literal as a DNF, folding it when both sides share a base.
fn lit(l: Side, r: Side, pos: bool) -> Dnf {
    let m = l.1.min(r.1);
    let (l, r) = ((l.0, l.1 - m), (r.0, r.1 - m));
    if l.0 == r.0 {
        return if (l.1 == r.1) == pos { top() } else { Dnf::new() };
    }
    let (l, r) = if l <= r { (l, r) } else { (r, l) };
    BTreeSet::from([BTreeSet::from([Lit { l, r, pos }])])
}

fn and(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for c in a {
        for d in b {
            let merged: BTreeSet<Lit> = c.union(d).cloned().collect();
            let clash = merged.iter().any(|x| merged.contains(&Lit { pos: !x.pos, ..x.clone() }));
            if !clash {
                out.insert(merged);
            }
        }
    }
    out
}

fn negate(d: &Dnf) -> Dnf {
    let mut acc = top();
    for c in d {
        let alt: Dnf = c.iter().map(|x| BTreeSet::from([Lit { pos: !x.pos, ..x.clone() }])).collect();
        acc = and(&acc, &alt);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn mentions(x: &str, s: &Side) -> bool {
    s.0.as_deref() == Some(x)
}

/// `∃x` of one conjunct.
fn eliminate_conj(x: &str, c: &BTreeSet<Lit>) -> Dnf {
    let (with, without): (Vec<&Lit>, Vec<&Lit>) = c.iter().partition(|l| mentions(x, &l.l) || mentions(x, &l.r));
    let mut out: Dnf = BTreeSet::from([without.into_iter().cloned().collect()]);
    // Orient every literal as (x + a) ⋈ (t + b).
    let oriented: Vec<(u64, Side, bool)> = with
        .iter()
        .map(|l| if mentions(x, &l.l) { (l.l.1, l.r.clone(), l.pos) } else { (l.r.1, l.l.clone(), l.pos) })
        .collect();
    let Some(k) = oriented.iter().position(|o| o.2) else {
        // Only disequations: each rules out at most one value of x.
        return out;
    };
    let (a, t, _) = oriented[k].clone();
    let b = t.1;
    for (j, (a2, s, pos)) in oriented.iter().enumerate() {
        if j != k {
            // x + a = t + b turns (x + a2 ⋈ s) into (t + b + a2 ⋈ s + a).
            out = and(&out, &lit((t.0.clone(), b + a2), (s.0.clone(), s.1 + a), *pos));
        }
    }
    for i in 0..a.saturating_sub(b) {
        out = and(&out, &lit((t.0.clone(), 0), (None, i), false));
    }
    out
}

fn eliminate(x: &str, d: &Dnf) -> Dnf {
    d.iter().flat_map(|c| eliminate_conj(x, c)).collect()
}

fn dnf(phi: &Formula) -> Result<Dnf, TheoryError> {
    Ok(match phi {
        Formula::Eq(a, b) => lit(side(a)?, side(b)?, true),
        Formula::Rel(r, _) => return Err(TheoryError::WrongSignature(r.clone())),
        Formula::Not(a) => negate(&dnf(a)?),
        Formula::And(a, b) => and(&dnf(a)?, &dnf(b)?),
        Formula::Or(a, b) => dnf(a)?.union(&dnf(b)?).cloned().collect(),
        Formula::Imp(a, b) => negate(&dnf(a)?).union(&dnf(b)?).cloned().collect(),
        Formula::Exists(x, a) => eliminate(x, &dnf(a)?),
        Formula::Forall(x, a) => negate(&eliminate(x, &negate(&dnf(a)?))),
        Formula::ExistsLe(..) | Formula::ForallLe(..) => {
            return Err(TheoryError::WrongSignature("<=".into()))
        }
    })
}

fn check_signature(phi: &Formula) -> Result<(), TheoryError> {
    Signature::successor().check(phi).map_err(|e| TheoryError::WrongSignature(e.to_string()))
}

/// Decides a Succ sentence.
pub fn succ_decide(phi: &Formula) -> Result<Verdict, TheoryError> {
    if !phi.is_sentence() {
        return Err(TheoryError::NotASentence);
    }
    check_signature(phi)?;
    Ok(if dnf(phi)?.contains(&BTreeSet::new()) { Verdict::Provable } else { Verdict::Refutable })
}

/// Truth of `φ` in ℕ under an assignment to its free variables.
pub fn succ_eval(phi: &Formula, env: &BTreeMap<String, BigUint>) -> Result<bool, TheoryError> {
    check_signature(phi)?;
    let value = |s: &Side| -> Result<BigUint, TheoryError> {
        let base = match &s.0 {
            None => BigUint::from(0u32),
            Some(x) => env.get(x).cloned().ok_or(TheoryError::NotASentence)?,
        };
        Ok(base + s.1)
    };
    for c in dnf(phi)? {
        let mut all = true;
        for l in &c {
            if (value(&l.l)? == value(&l.r)?) != l.pos {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Thirty hand-written Succ sentences, each checked against the
/// bounded-domain evaluator.
pub const CURATED_SUCC: [&str; 30] = [
    "(forall x (not (= (S x) x)))",
    "(exists x (= (S x) 0))",
    "(forall x (not (= (S x) 0)))",
    "(forall x (imp (not (= x 0)) (exists y (= x (S y)))))",
    "(forall x (exists y (= x (S y))))",
    "(exists x (= x (S (S 0))))",
    "(forall x (forall y (imp (= (S x) (S y)) (= x y))))",
    "(exists x (exists y (and (not (= x y)) (= (S x) (S y)))))",
    "(forall x (exists y (= y (S (S x)))))",
    "(forall x (exists y (= x (S (S y)))))",
    "(forall x (or (= x 0) (or (= x (S 0)) (exists y (= x (S (S y)))))))",
    "(exists x (and (not (= x 0)) (and (not (= x (S 0))) (not (= x (S (S 0)))))))",
    "(forall x (forall y (or (= x y) (not (= x y)))))",
    "(forall x (exists y (and (not (= y x)) (not (= y (S x))))))",
    "(exists x (forall y (not (= (S y) x))))",
    "(exists x (forall y (not (= y x))))",
    "(forall x (forall y (exists z (and (not (= z x)) (not (= z y))))))",
    "(exists x (exists y (= (S (S x)) y)))",
    "(forall x (forall y (imp (= (S (S x)) (S y)) (= y (S x)))))",
    "(forall x (not (= (S (S (S x))) x)))",
    "(exists x (= (S (S x)) (S 0)))",
    "(forall x (imp (= (S x) (S (S 0))) (= x (S 0))))",
    "(exists x (and (= (S x) (S (S (S 0)))) (not (= x (S (S 0))))))",
    "(forall x (exists y (or (= x (S y)) (= x 0))))",
    "(forall x (forall y (imp (= x (S y)) (not (= y (S x))))))",
    "(exists x (exists y (exists z (and (= y (S x)) (= z (S y))))))",
    "(forall x (exists y (exists z (and (= y (S x)) (= x (S z))))))",
    "(not (exists x (forall y (or (= y x) (= y (S x))))))",
    "(forall x (forall y (or (= x (S y)) (or (= y (S x)) (exists z (not (= z z)))))))",
    "(exists x (forall y (imp (not (= y 0)) (not (= y (S x))))))",
];

/// Evaluation in ℕ with the `i`-th nested quantifier (from outside, `i ≥ 1`)
/// ranging over `0..=i·((c+1)·2^(k+1)+1)`, where `k` is the quantifier rank
/// and `c` the largest successor depth of a term.
///
/// Over `(ℕ, 0, S)` two tuples satisfy the same rank-`r` formulas with
/// offsets `≤ c` once they agree on every pairwise difference (and distance
/// from `0`) up to `(c+1)·2^r`. A witness for an inner `∃` can therefore be
/// taken within `(c+1)·2^r + 1` of the largest value already chosen, which
/// the ranges above cover.
pub fn bounded_truth(phi: &Formula) -> Result<bool, TheoryError> {
    check_signature(phi)?;
    let k = phi.rank() as u32;
    let c = max_depth(phi);
    let step = (c + 1) * (1u64 << (k + 1)) + 1;
    let mut env = BTreeMap::new();
    bounded_rec(phi, &mut env, 0, step)
}

fn max_depth(phi: &Formula) -> u64 {
    fn term(t: &Term) -> u64 {
        side(t).map(|s| s.1).unwrap_or(0)
    }
    match phi {
        Formula::Eq(a, b) => term(a).max(term(b)),
        Formula::Rel(..) => 0,
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => max_depth(a),
        Formula::ExistsLe(_, t, a) | Formula::ForallLe(_, t, a) => term(t).max(max_depth(a)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => max_depth(a).max(max_depth(b)),
    }
}

fn bounded_rec(phi: &Formula, env: &mut BTreeMap<String, u64>, depth: u64, step: u64) -> Result<bool, TheoryError> {
    let val = |t: &Term, env: &BTreeMap<String, u64>| -> Result<u64, TheoryError> {
        let (b, k) = side(t)?;
        Ok(b.map(|x| env.get(&x).copied().ok_or(TheoryError::NotASentence)).transpose()?.unwrap_or(0) + k)
    };
    Ok(match phi {
        Formula::Eq(a, b) => val(a, env)? == val(b, env)?,
        Formula::Not(a) => !bounded_rec(a, env, depth, step)?,
        Formula::And(a, b) => bounded_rec(a, env, depth, step)? && bounded_rec(b, env, depth, step)?,
        Formula::Or(a, b) => bounded_rec(a, env, depth, step)? || bounded_rec(b, env, depth, step)?,
        Formula::Imp(a, b) => !bounded_rec(a, env, depth, step)? || bounded_rec(b, env, depth, step)?,
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            let want = matches!(phi, Formula::Exists(..));
            let saved = env.get(x).copied();
            let mut found = !want;
            for v in 0..=(depth + 1) * step {
                env.insert(x.clone(), v);
                if bounded_rec(a, env, depth + 1, step)? == want {
                    found = want;
                    break;
                }
            }
            match saved {
                Some(v) => env.insert(x.clone(), v),
                None => env.remove(x),
            };
            found
        }
        Formula::Rel(r, _) => return Err(TheoryError::WrongSignature(r.clone())),
        Formula::ExistsLe(..) | Formula::ForallLe(..) => return Err(TheoryError::WrongSignature("<=".into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn axioms_print_stably() {
        assert_eq!(s4(1).to_string(), "(forall x (not (= (S x) x)))");
        for a in succ_axioms().take(25) {
            assert_eq!(p(&a.to_string()), a);
            assert_eq!(succ_decide(&a), Ok(Verdict::Provable));
        }
        assert_eq!(succ_minus_axioms().count(), 3);
    }

    #[test]
    fn basic_decisions() {
        assert_eq!(succ_decide(&p("(forall x (not (= (S x) x)))")), Ok(Verdict::Provable));
        assert_eq!(succ_decide(&p("(exists x (= (S x) 0))")), Ok(Verdict::Refutable));
        assert_eq!(succ_decide(&p("(forall x (exists y (= x (S y))))")), Ok(Verdict::Refutable));
        assert_eq!(
            succ_decide(&p("(forall x (imp (not (= x 0)) (exists y (= x (S y)))))")),
            Ok(Verdict::Provable)
        );
        assert!(matches!(succ_decide(&p("(exists x (= (+ x x) 0))")), Err(TheoryError::WrongSignature(_))));
        assert_eq!(succ_decide(&p("(= x 0)")), Err(TheoryError::NotASentence));
    }

    #[test]
    fn chi_shape() {
        assert_eq!(chi(1).to_string(), "(exists x (= (S x) x))");
        assert_eq!(chi(4).to_string(), "(exists x (and (= (S (S (S (S x)))) x) (and (not (= (S x) x)) (not (= (S (S x)) x)))))");
        for n in 1..12 {
            assert_eq!(recognize_chi(&chi(n)), Some(n));
            assert_eq!(succ_decide(&chi(n)), Ok(Verdict::Refutable));
        }
        assert_eq!(recognize_chi(&s4(2)), None);
    }

    #[test]
    fn eval_with_free_variable() {
        let phi = p("(and (not (= x 0)) (not (= x (S (S 0)))))");
        let at = |n: u64| succ_eval(&phi, &BTreeMap::from([("x".to_string(), BigUint::from(n))])).unwrap();
        assert!(!at(0) && at(1) && !at(2) && at(3));
        let big: BigUint = BigUint::from(10u32).pow(300);
        let e = BTreeMap::from([("x".to_string(), big)]);
        assert!(succ_eval(&p("(exists y (= x (S (S y))))"), &e).unwrap());
    }
}
