//! Janiczak's theory J of one equivalence relation, the sentences `A_n`, and
//! reduction of arbitrary sentences to Boolean combinations of them.

use serde::Serialize;

use super::combo::BooleanCombo;
use super::TheoryError;
use crate::logic::{Formula, Signature, Term};

fn e(a: &str, b: &str) -> Formula {
    Formula::rel("E", vec![Term::var(a), Term::var(b)])
}

fn eq(a: &str, b: &str) -> Formula {
    Formula::eq(Term::var(a), Term::var(b))
}

fn distinct(vars: &[String]) -> Vec<Formula> {
    let mut out = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            out.push(Formula::not(eq(&vars[i], &vars[j])));
        }
    }
    out
}

fn names(prefix: &str, range: std::ops::RangeInclusive<u64>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn exists_all(vars: &[String], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |acc, x| Formula::exists(x, acc))
}

/// `A_n`: some class has exactly `n+1` elements.
///
/// Written with the variables `x0 … xn` and `y`.
pub fn a_n(n: u64) -> Formula {
    let xs = names("x", 0..=n);
    let mut parts: Vec<Formula> = xs[1..].iter().map(|x| e("x0", x)).collect();
    parts.extend(distinct(&xs));
    let closed = Formula::disj(xs.iter().map(|x| eq("y", x)).collect()).expect("non-empty");
    parts.push(Formula::forall("y", Formula::imp(e("x0", "y"), closed)));
    exists_all(&xs, Formula::conj(parts).expect("non-empty"))
}

/// `Some(n)` when `φ` is literally `a_n(n)`.
pub fn recognize_a_n(phi: &Formula) -> Option<u64> {
    let mut depth = 0u64;
    let mut cur = phi;
    while let Formula::Exists(x, body) = cur {
        if *x != format!("x{depth}") {
            return None;
        }
        depth += 1;
        cur = body;
    }
    let n = depth.checked_sub(1)?;
    (a_n(n) == *phi).then_some(n)
}

/// The class of `u` has at least `n` elements, witnessed by `z1 … zn`.
fn at_least(u: &str, n: u64) -> (Vec<String>, Formula) {
    let zs = names("z", 1..=n);
    let mut parts: Vec<Formula> = zs.iter().map(|z| e(u, z)).collect();
    parts.extend(distinct(&zs));
    let body = Formula::conj(parts).expect("n >= 1");
    (zs, body)
}

fn exactly(u: &str, n: u64) -> Formula {
    let (zs, body) = at_least(u, n);
    let closed = Formula::disj(zs.iter().map(|z| eq("w", z)).collect()).expect("n >= 1");
    exists_all(&zs, Formula::and(body, Formula::forall("w", Formula::imp(e(u, "w"), closed))))
}

/// J1: reflexivity, symmetry, transitivity.
pub fn j1() -> Vec<Formula> {
    vec![
        Formula::forall("x", e("x", "x")),
        Formula::forall("x", Formula::forall("y", Formula::imp(e("x", "y"), e("y", "x")))),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::forall("z", Formula::imp(Formula::and(e("x", "y"), e("y", "z")), e("x", "z"))),
            ),
        ),
    ]
}

/// J2 for `n ≥ 1`: at most one class has exactly `n` elements.
pub fn j2(n: u64) -> Formula {
    assert!(n >= 1);
    Formula::forall(
        "x",
        Formula::forall("y", Formula::imp(Formula::and(exactly("x", n), exactly("y", n)), e("x", "y"))),
    )
}

/// J3 for `n ≥ 1`: at least `n` classes have at least `n` elements.
pub fn j3(n: u64) -> Formula {
    assert!(n >= 1);
    let xs = names("x", 1..=n);
    let mut parts: Vec<Formula> = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            parts.push(Formula::not(e(&xs[i], &xs[j])));
        }
    }
    for x in &xs {
        let (zs, body) = at_least(x, n);
        parts.push(exists_all(&zs, body));
    }
    exists_all(&xs, Formula::conj(parts).expect("n >= 1"))
}

/// J1, then J2(n) and J3(n) for `n = 1, 2, …`.
pub fn j_axioms() -> impl Iterator<Item = Formula> {
    j1().into_iter().chain((1..).flat_map(|n| [j2(n), j3(n)]))
}

// ---------------------------------------------------------------------------
// Finite control models

/// A finite structure for `{E}` given by its class sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub sizes: Vec<usize>,
}

impl Census {
    /// Classes of size `n+1` for `n ∈ present`, plus `big_count` classes of
    /// `big_size` elements.
    pub fn control(present: &[u64], big_count: usize, big_size: usize) -> Census {
        let mut sizes: Vec<usize> = present.iter().map(|&n| n as usize + 1).collect();
        sizes.extend(std::iter::repeat(big_size).take(big_count));
        Census { sizes }
    }

    fn classes(&self) -> Vec<usize> {
        self.sizes.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat(c).take(k)).collect()
    }

    /// Truth of a sentence over `{E}` in this structure.
    pub fn satisfies(&self, phi: &Formula) -> Result<bool, TheoryError> {
        let mut scope = Vec::new();
        let compiled = compile(phi, &mut scope)?;
        let class = self.classes();
        let mut env = vec![0usize; slot_count(&compiled)];
        Ok(eval(&compiled, &class, &mut env))
    }
}

enum C {
    E(usize, usize),
    Eq(usize, usize),
    Not(Box<C>),
    And(Box<C>, Box<C>),
    Or(Box<C>, Box<C>),
    Imp(Box<C>, Box<C>),
    Ex(usize, Box<C>),
    All(usize, Box<C>),
}

fn slot_count(c: &C) -> usize {
    match c {
        C::E(a, b) | C::Eq(a, b) => a.max(b) + 1,
        C::Not(a) => slot_count(a),
        C::And(a, b) | C::Or(a, b) | C::Imp(a, b) => slot_count(a).max(slot_count(b)),
        C::Ex(s, a) | C::All(s, a) => (s + 1).max(slot_count(a)),
    }
}

fn compile(phi: &Formula, scope: &mut Vec<String>) -> Result<C, TheoryError> {
    let var = |t: &Term, scope: &Vec<String>| -> Result<usize, TheoryError> {
        match t {
            Term::Var(x) => scope.iter().rposition(|y| y == x).ok_or(TheoryError::NotASentence),
            Term::App(f, _) => Err(TheoryError::WrongSignature(f.clone())),
        }
    };
    let bin = |a: &Formula, b: &Formula, scope: &mut Vec<String>| -> Result<(Box<C>, Box<C>), TheoryError> {
        Ok((Box::new(compile(a, scope)?), Box::new(compile(b, scope)?)))
    };
    Ok(match phi {
        Formula::Eq(a, b) => C::Eq(var(a, scope)?, var(b, scope)?),
        Formula::Rel(r, args) if r == "E" && args.len() == 2 => C::E(var(&args[0], scope)?, var(&args[1], scope)?),
        Formula::Rel(r, _) => return Err(TheoryError::WrongSignature(r.clone())),
        Formula::Not(a) => C::Not(Box::new(compile(a, scope)?)),
        Formula::And(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            C::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            C::Or(a, b)
        }
        Formula::Imp(a, b) => {
            let (a, b) = bin(a, b, scope)?;
            C::Imp(a, b)
        }
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            scope.push(x.clone());
            let slot = scope.len() - 1;
            let body = Box::new(compile(a, scope)?);
            scope.pop();
            if matches!(phi, Formula::Exists(..)) {
                C::Ex(slot, body)
            } else {
                C::All(slot, body)
            }
        }
        Formula::ExistsLe(..) | Formula::ForallLe(..) => return Err(TheoryError::WrongSignature("<=".into())),
    })
}

fn eval(c: &C, class: &[usize], env: &mut [usize]) -> bool {
    match c {
        C::E(a, b) => class[env[*a]] == class[env[*b]],
        C::Eq(a, b) => env[*a] == env[*b],
        C::Not(a) => !eval(a, class, env),
        C::And(a, b) => eval(a, class, env) && eval(b, class, env),
        C::Or(a, b) => eval(a, class, env) || eval(b, class, env),
        C::Imp(a, b) => !eval(a, class, env) || eval(b, class, env),
        C::Ex(s, a) | C::All(s, a) => {
            let want = matches!(c, C::Ex(..));
            for v in 0..class.len() {
                env[*s] = v;
                if eval(a, class, env) == want {
                    return want;
                }
            }
            !want
        }
    }
}

// ---------------------------------------------------------------------------
// Normal form

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalForm {
    Combo(BooleanCombo),
    /// The quantifier rank exceeded the budget.
    Exhausted { rank: usize },
}

/// The control models for rank `q`: one per `T ⊆ {0..q-1}`, in truth-table
/// row order over `p_0 … p_{q-1}`.
pub fn control_models(q: usize) -> Vec<Census> {
    (0..1usize << q)
        .map(|row| {
            let present: Vec<u64> = (0..q).filter(|&i| row >> (q - 1 - i) & 1 == 1).map(|i| i as u64).collect();
            Census::control(&present, q + 1, q + 1)
        })
        .collect()
}

/// A Boolean combination of `A_0 … A_{q-1}` equivalent over J to `φ`, where
/// `q` is the quantifier rank of `φ`.
///
/// With `q` quantifiers one can count up to `q` inside a class and tell apart
/// at most `q` classes, so classes larger than `q` all look alike and the
/// truth of `φ` in a model of J depends only on which `A_n` with `n < q`
/// hold. Each such pattern is realised by a finite control model with `q+1`
/// extra classes of size `q+1`, and `φ` is evaluated there.
pub fn j_normal_form(phi: &Formula, budget: usize) -> Result<NormalForm, TheoryError> {
    Signature::janiczak().check(phi).map_err(|e| TheoryError::WrongSignature(e.to_string()))?;
    if !phi.is_sentence() {
        return Err(TheoryError::NotASentence);
    }
    let q = phi.rank();
    if q > budget {
        return Ok(NormalForm::Exhausted { rank: q });
    }
    let table = control_models(q).iter().map(|m| m.satisfies(phi)).collect::<Result<Vec<_>, _>>()?;
    let vars: Vec<u64> = (0..q as u64).collect();
    Ok(NormalForm::Combo(BooleanCombo::from_table(&vars, &table)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn a_n_template() {
        assert_eq!(
            a_n(0).to_string(),
            "(exists x0 (forall y (imp (E x0 y) (= y x0))))"
        );
        for n in 0..6 {
            let phi = a_n(n);
            let mut vars = std::collections::BTreeSet::new();
            collect_bound(&phi, &mut vars);
            assert_eq!(vars.len() as u64, n + 2);
            assert_eq!(recognize_a_n(&phi), Some(n));
            assert_eq!(p(&phi.to_string()), phi);
        }
        assert_eq!(recognize_a_n(&j2(2)), None);
    }

    fn collect_bound(phi: &Formula, out: &mut std::collections::BTreeSet<String>) {
        match phi {
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                out.insert(x.clone());
                collect_bound(a, out);
            }
            Formula::Not(a) => collect_bound(a, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                collect_bound(a, out);
                collect_bound(b, out);
            }
            _ => {}
        }
    }

    #[test]
    fn a_n_in_census_models() {
        for n in 0..5u64 {
            for sizes in [vec![1, 3, 6], vec![2, 2, 5], vec![4], vec![1, 2, 3, 4, 5]] {
                let m = Census { sizes: sizes.clone() };
                assert_eq!(m.satisfies(&a_n(n)).unwrap(), sizes.contains(&(n as usize + 1)), "{n} {sizes:?}");
            }
        }
    }

    #[test]
    fn axioms_parse_and_hold_in_rich_models() {
        assert_eq!(p(&j2(2).to_string()), j2(2));
        let m = Census { sizes: vec![1, 2, 3, 3, 3] };
        for a in j1() {
            assert!(m.satisfies(&a).unwrap());
        }
        assert!(m.satisfies(&j2(1)).unwrap() && m.satisfies(&j2(2)).unwrap() && !m.satisfies(&j2(3)).unwrap());
        assert!(m.satisfies(&j3(3)).unwrap());
        assert!(!Census { sizes: vec![1, 2] }.satisfies(&j3(2)).unwrap());
        assert_eq!(j_axioms().take(7).count(), 7);
    }

    #[test]
    fn normal_forms() {
        let nf = |s: &str| match j_normal_form(&p(s), 4).unwrap() {
            NormalForm::Combo(c) => c,
            NormalForm::Exhausted { rank } => panic!("rank {rank}"),
        };
        assert_eq!(nf("(exists x (E x x))"), BooleanCombo::Top);
        assert_eq!(nf("(exists x (forall y (imp (E x y) (= y x))))"), BooleanCombo::Atom(0));
        for k in 0..3 {
            assert_eq!(j_normal_form(&a_n(k), 4).unwrap(), NormalForm::Combo(BooleanCombo::Atom(k)));
        }
        assert_eq!(j_normal_form(&a_n(5), 4).unwrap(), NormalForm::Exhausted { rank: 7 });
        assert!(matches!(j_normal_form(&p("(exists x (= x 0))"), 4), Err(TheoryError::WrongSignature(_))));
    }
}
