//! The theories Q and R, Σ₁-completeness certificates for R, witness
//! comparison, Rosser separators and function definitions.
//!
//! Provability in R is only exposed through certificates. A certificate names
//! a conclusion, its witnesses and the exact set of axiom instances its
//! replay needs. The replay discipline for a ground Δ₀ sentence is:
//!
//! * `m̄ + n̄` cites `Ax1(m, n)`, `m̄ · n̄` cites `Ax2(m, n)`;
//! * a false equation `s = t` cites `Ax3(val s, val t)`;
//! * a true `s ≤ t` cites `Ax1(val t - val s, val s)`; a false one cites
//!   `Ax4(val t)` and `Ax3(val s, i)` for every `i <= val t`;
//! * a true `∃x≤t` cites its least witness and `Ax1(val t - i, i)`, a false
//!   one cites `Ax4(val t)` and every instance; `∀x≤t` is dual;
//! * `and`, `or` and `imp` cite only the leftmost subformula that decides
//!   them, or both when both are needed.
//!
//! Emission ([`emit`]) and checking ([`check`]) are separate code paths.

mod arithmetize;
mod check;
mod emit;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{numeral, sigma1_parts, Formula, Term};

pub use arithmetize::{arithmetize, Arithmetization, Case};
pub use check::{check_certificate, explain_certificate};
pub use emit::{
    comparison_refute, define_function_formula, function_certificate, rosser_separator,
    rosser_separator_for, sigma1_prove, strong_rep_certificate, strong_rep_from_function,
};

pub const SCHEMA: &str = "metaprops.cert/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Ax1,
    Ax2,
    Ax3,
    Ax4,
    Ax5,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
}

impl Scheme {
    pub fn arity(self) -> usize {
        match self {
            Scheme::Ax1 | Scheme::Ax2 | Scheme::Ax3 => 2,
            Scheme::Ax4 | Scheme::Ax5 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("bad parameters {1:?} for {0}")]
    BadParams(Scheme, Vec<u64>),
    #[error("formula is not Σ₁")]
    NotSigma1,
    #[error("the two formulas do not share exactly one free variable")]
    FreeVariableMismatch,
    #[error("program is outside the arithmetizable class: {0}")]
    NotArithmetizable(String),
    #[error("program diverges on input {0}")]
    NonTotalObserved(u64),
    #[error("expected a formula with free variables {0}")]
    ArityMismatch(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomInstance {
    pub scheme: Scheme,
    pub params: Vec<u64>,
    pub sentence: String,
}

/// `x ≤ y` unfolded as `∃z(z + x = y)`.
pub fn le_expanded(a: Term, b: Term) -> Formula {
    Formula::exists("z", Formula::eq(Term::add(Term::var("z"), a), b))
}

/// Largest numeral an axiom instance may mention.
pub const MAX_NUMERAL: u64 = 1 << 16;

fn template(scheme: Scheme, p: &[u64]) -> Option<Formula> {
    let sum = p.iter().try_fold(0u64, |a, &b| a.checked_add(b))?;
    let prod = p.iter().try_fold(1u64, |a, &b| a.checked_mul(b))?;
    if sum.max(prod) > MAX_NUMERAL {
        return None;
    }
    let (x, y) = (Term::var("x"), Term::var("y"));
    let n = numeral;
    Some(match scheme {
        Scheme::Ax1 => Formula::eq(Term::add(n(p[0]), n(p[1])), n(p[0].checked_add(p[1])?)),
        Scheme::Ax2 => Formula::eq(Term::mul(n(p[0]), n(p[1])), n(p[0].checked_mul(p[1])?)),
        Scheme::Ax3 if p[0] != p[1] => Formula::not(Formula::eq(n(p[0]), n(p[1]))),
        Scheme::Ax3 => return None,
        Scheme::Ax4 => {
            let cases = (0..=p[0]).map(|i| Formula::eq(x.clone(), n(i))).collect();
            Formula::forall(
                "x",
                Formula::imp(le_expanded(x.clone(), n(p[0])), Formula::disj(cases).expect("n+1 cases")),
            )
        }
        Scheme::Ax5 => Formula::forall(
            "x",
            Formula::or(le_expanded(x.clone(), n(p[0])), le_expanded(n(p[0]), x.clone())),
        ),
        Scheme::Q1 => Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::imp(Formula::eq(Term::s(x.clone()), Term::s(y.clone())), Formula::eq(x, y)),
            ),
        ),
        Scheme::Q2 => Formula::forall("x", Formula::not(Formula::eq(Term::s(x), Term::zero()))),
        Scheme::Q3 => Formula::forall(
            "x",
            Formula::imp(
                Formula::not(Formula::eq(x.clone(), Term::zero())),
                Formula::exists("y", Formula::eq(x, Term::s(y))),
            ),
        ),
        Scheme::Q4 => Formula::forall("x", Formula::forall("y", Formula::eq(Term::add(x.clone(), Term::zero()), x))),
        Scheme::Q5 => Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::eq(Term::add(x.clone(), Term::s(y.clone())), Term::s(Term::add(x, y))),
            ),
        ),
        Scheme::Q6 => Formula::forall("x", Formula::eq(Term::mul(x, Term::zero()), Term::zero())),
        Scheme::Q7 => Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::eq(
                    Term::mul(x.clone(), Term::s(y.clone())),
                    Term::add(Term::mul(x.clone(), y), x),
                ),
            ),
        ),
    })
}

/// Instantiates an axiom scheme of R (`Ax1`–`Ax5`) or Q (`Q1`–`Q7`).
pub fn axiom(scheme: Scheme, params: &[u64]) -> Result<AxiomInstance, ArithError> {
    let bad = || ArithError::BadParams(scheme, params.to_vec());
    if params.len() != scheme.arity() {
        return Err(bad());
    }
    let phi = template(scheme, params).ok_or_else(bad)?;
    Ok(AxiomInstance { scheme, params: params.to_vec(), sentence: phi.to_string() })
}

pub fn r_axioms_up_to(n: u64) -> Vec<AxiomInstance> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            out.push(axiom(Scheme::Ax1, &[a, b]).expect("small"));
            out.push(axiom(Scheme::Ax2, &[a, b]).expect("small"));
            if a != b {
                out.push(axiom(Scheme::Ax3, &[a, b]).expect("distinct"));
            }
        }
        out.push(axiom(Scheme::Ax4, &[a]).expect("unary"));
        out.push(axiom(Scheme::Ax5, &[a]).expect("unary"));
    }
    out
}

pub fn q_axioms() -> Vec<AxiomInstance> {
    use Scheme::*;
    [Q1, Q2, Q3, Q4, Q5, Q6, Q7].into_iter().map(|s| axiom(s, &[]).expect("nullary")).collect()
}

type AxKey = (Scheme, Vec<u64>);

fn instances(keys: BTreeSet<AxKey>) -> Result<Vec<AxiomInstance>, ArithError> {
    keys.into_iter().map(|(s, p)| axiom(s, &p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Sigma1Truth,
    ComparisonRefutation,
    FunctionDefinition,
    StrongRep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub kind: CertKind,
    pub conclusion: String,
    /// Open formulas the conclusion was built from, where the kind needs them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<String>,
    pub witnesses: Vec<u64>,
    pub cited_axioms: Vec<AxiomInstance>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Certificate, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn conclusion_formula(&self) -> Option<Formula> {
        self.conclusion.parse().ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessComparison {
    pub var: String,
    pub sigma: Formula,
    pub sigma_prime: Formula,
    /// `∃y(φ₀(x,y) ∧ ∀z≤y ¬φ₁(x,z))`
    pub lt: Formula,
    /// `∃y(φ₁(x,y) ∧ ∀z<y ¬φ₀(x,z))`, with `z<y` written `z≤y ∧ z≠y`.
    pub le: Formula,
}

impl WitnessComparison {
    pub fn lt_at(&self, n: u64) -> Formula {
        self.lt.subst(&self.var, &numeral(n))
    }

    pub fn le_at(&self, n: u64) -> Formula {
        self.le.subst(&self.var, &numeral(n))
    }
}

fn single_exists(phi: &Formula) -> Option<(&str, &Formula)> {
    match phi {
        Formula::Exists(y, body) if sigma1_parts(body).map(|(v, _)| v.is_empty()).unwrap_or(false) => {
            Some((y.as_str(), body))
        }
        _ => None,
    }
}

fn pick(base: &str, avoid: &BTreeSet<String>) -> String {
    std::iter::once(base.to_string())
        .chain((0..).map(|k| format!("{base}{k}")))
        .find(|v| !avoid.contains(v))
        .expect("fresh name")
}

/// Builds `σ < σ′` and `σ′ ≤ σ` for `σ = ∃y φ₀(x,y)` and `σ′ = ∃y φ₁(x,y)`.
pub fn witness_compare(sigma: &Formula, sigma_prime: &Formula) -> Result<WitnessComparison, ArithError> {
    let (y0, phi0) = single_exists(sigma).ok_or(ArithError::NotSigma1)?;
    let (y1, phi1) = single_exists(sigma_prime).ok_or(ArithError::NotSigma1)?;
    let fv = sigma.free_vars();
    if fv.len() != 1 || fv != sigma_prime.free_vars() {
        return Err(ArithError::FreeVariableMismatch);
    }
    let x = fv.into_iter().next().expect("one variable");
    let mut avoid = BTreeSet::from([x.clone()]);
    let y = pick("y", &avoid);
    avoid.insert(y.clone());
    let z = pick("z", &avoid);
    let (vy, vz) = (Term::var(&y), Term::var(&z));
    let f0 = |t: &Term| phi0.subst(y0, t);
    let f1 = |t: &Term| phi1.subst(y1, t);
    let lt = Formula::exists(
        &y,
        Formula::and(f0(&vy), Formula::forall_le(&z, vy.clone(), Formula::not(f1(&vz)))),
    );
    let le = Formula::exists(
        &y,
        Formula::and(
            f1(&vy),
            Formula::forall_le(
                &z,
                vy.clone(),
                Formula::imp(Formula::not(Formula::eq(vz.clone(), vy.clone())), Formula::not(f0(&vz))),
            ),
        ),
    );
    Ok(WitnessComparison { var: x, sigma: sigma.clone(), sigma_prime: sigma_prime.clone(), lt, le })
}

/// `σ(x) = ∃y(y + y = x)`, defining the even numbers.
pub fn evens_sigma() -> Formula {
    Formula::exists("y", Formula::eq(Term::add(Term::var("y"), Term::var("y")), Term::var("x")))
}

/// `σ′(x) = ∃y(S(y + y) = x)`, defining the odd numbers.
pub fn odds_sigma() -> Formula {
    Formula::exists(
        "y",
        Formula::eq(Term::s(Term::add(Term::var("y"), Term::var("y"))), Term::var("x")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval_sigma1, Sigma1Result};

    #[test]
    fn axiom_templates() {
        let a = axiom(Scheme::Ax1, &[2, 3]).unwrap();
        assert_eq!(a.sentence, "(= (+ (S (S 0)) (S (S (S 0)))) (S (S (S (S (S 0))))))");
        assert!(matches!(axiom(Scheme::Ax3, &[0, 0]), Err(ArithError::BadParams(..))));
        assert_eq!(axiom(Scheme::Q2, &[]).unwrap().sentence, "(forall x (not (= (S x) 0)))");
        assert_eq!(
            axiom(Scheme::Ax4, &[1]).unwrap().sentence,
            "(forall x (imp (exists z (= (+ z x) (S 0))) (or (= x 0) (= x (S 0)))))"
        );
        assert!(axiom(Scheme::Ax5, &[1, 2]).is_err());
        assert!(axiom(Scheme::Ax2, &[u64::MAX, 2]).is_err());
        assert!(axiom(Scheme::Ax4, &[MAX_NUMERAL + 1]).is_err());
        for ax in q_axioms().iter().chain(&r_axioms_up_to(3)) {
            let phi: Formula = ax.sentence.parse().unwrap();
            assert!(phi.is_sentence());
            assert_eq!(phi.to_string(), ax.sentence);
        }
    }

    #[test]
    fn comparison_shape() {
        let wc = witness_compare(&evens_sigma(), &odds_sigma()).unwrap();
        assert_eq!(
            wc.lt.to_string(),
            "(exists y (and (= (+ y y) x) (foralle z y (not (= (S (+ z z)) x)))))"
        );
        assert_eq!(
            wc.le.to_string(),
            "(exists y (and (= (S (+ y y)) x) (foralle z y (imp (not (= z y)) (not (= (+ z z) x))))))"
        );
        let bad = "(exists y (= y w))".parse().unwrap();
        assert_eq!(witness_compare(&evens_sigma(), &bad), Err(ArithError::FreeVariableMismatch));
        let two = "(exists a (exists b (= (+ a b) x)))".parse().unwrap();
        assert_eq!(witness_compare(&two, &odds_sigma()), Err(ArithError::NotSigma1));
    }

    #[test]
    fn trichotomy_for_evens_and_odds() {
        let wc = witness_compare(&evens_sigma(), &odds_sigma()).unwrap();
        for n in 0..=50 {
            let lt = matches!(eval_sigma1(&wc.lt_at(n), 60).unwrap(), Sigma1Result::True(_));
            let le = matches!(eval_sigma1(&wc.le_at(n), 60).unwrap(), Sigma1Result::True(_));
            assert!(lt ^ le, "n = {n}");
            assert_eq!(lt, n % 2 == 0);
        }
        let same = witness_compare(&evens_sigma(), &evens_sigma()).unwrap();
        for n in (0..=20).step_by(2) {
            assert_eq!(eval_sigma1(&same.lt_at(n), 30).unwrap(), Sigma1Result::Unknown);
            assert!(matches!(eval_sigma1(&same.le_at(n), 30).unwrap(), Sigma1Result::True(_)));
        }
    }
}
