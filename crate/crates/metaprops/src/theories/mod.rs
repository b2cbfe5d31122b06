//! Decidable base theories (Succ, Succ⁻, J), the theories built on top of
//! them, and stage-bounded provability oracles.
//!
//! Every oracle answers at a stage `s`. Answers only ever move from `Open`
//! to a decided verdict as `s` grows, and no sentence is both provable and
//! refutable.

pub mod combo;
pub mod janiczak;
pub mod succ;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use combo::BooleanCombo;
pub use janiczak::{a_n, j_axioms, j_normal_form, recognize_a_n, Census, NormalForm};
pub use succ::{bounded_truth, chi, CURATED_SUCC, recognize_chi, s4, succ_axioms, succ_decide, succ_eval, succ_minus_axioms};

use crate::arith_r::{sigma1_prove, ArithError};
use crate::logic::{goedel, numeral, ungoedel, Formula, Signature, Term};
use crate::machine::{smn, Budget, Index, Instr, Program};
use crate::resets::{ei_witness, DisjointPair, ReSet};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("expected a sentence")]
    NotASentence,
    #[error("query shape not supported: {0}")]
    UnsupportedShape(String),
    #[error("{0} is enumerated into both parameter sets")]
    Inconsistent(u64),
    #[error("the theory is not a derived theory")]
    NotDerived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Provable,
    Refutable,
    /// Neither, at this stage.
    Open,
}

/// How `p_n` is read as a sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `p_n ↦ A_n` over J.
    JaniczakA,
    /// `p_n ↦ χ_{n+1}` over Succ⁻.
    SuccCycleChi,
}

impl Family {
    pub fn sentence(self, n: u64) -> Formula {
        match self {
            Family::JaniczakA => a_n(n),
            Family::SuccCycleChi => chi(n + 1),
        }
    }

    pub fn recognize(self, phi: &Formula) -> Option<u64> {
        match self {
            Family::JaniczakA => recognize_a_n(phi),
            Family::SuccCycleChi => recognize_chi(phi).map(|m| m - 1),
        }
    }

    /// `f(n) = ⌜sentence(n)⌝`.
    pub fn code(self, n: &BigUint) -> BigUint {
        match self {
            Family::JaniczakA => n * 3u32,
            Family::SuccCycleChi => (n + 1u32) * 3u32 + 1u32,
        }
    }

    pub fn base_signature(self) -> Signature {
        match self {
            Family::JaniczakA => Signature::janiczak(),
            Family::SuccCycleChi => Signature::successor(),
        }
    }

    /// Reads a sentence as a combination of family members, structurally.
    pub fn combo_of(self, phi: &Formula) -> Option<BooleanCombo> {
        if let Some(n) = self.recognize(phi) {
            return Some(BooleanCombo::Atom(n));
        }
        match phi {
            Formula::Not(a) => Some(BooleanCombo::not(self.combo_of(a)?)),
            Formula::And(a, b) => Some(BooleanCombo::And(vec![self.combo_of(a)?, self.combo_of(b)?])),
            Formula::Or(a, b) => Some(BooleanCombo::Or(vec![self.combo_of(a)?, self.combo_of(b)?])),
            Formula::Imp(a, b) => {
                Some(BooleanCombo::Or(vec![BooleanCombo::not(self.combo_of(a)?), self.combo_of(b)?]))
            }
            Formula::Forall(x, a) if **a == Formula::eq(Term::var(x), Term::var(x)) => Some(BooleanCombo::Top),
            _ => None,
        }
    }

    /// The sentence a combination stands for; `⊤` is `∀x(x=x)`.
    pub fn formula_of(self, c: &BooleanCombo) -> Formula {
        let top = || Formula::forall("x", Formula::eq(Term::var("x"), Term::var("x")));
        match c {
            BooleanCombo::Top => top(),
            BooleanCombo::Bot => Formula::not(top()),
            BooleanCombo::Atom(n) => self.sentence(*n),
            BooleanCombo::Not(a) => Formula::not(self.formula_of(a)),
            BooleanCombo::And(cs) => Formula::conj(cs.iter().map(|a| self.formula_of(a)).collect()).expect("non-empty"),
            BooleanCombo::Or(cs) => Formula::disj(cs.iter().map(|a| self.formula_of(a)).collect()).expect("non-empty"),
        }
    }
}

const A_DECODE_LIMIT: u64 = 256;
const CHI_DECODE_LIMIT: u64 = 1024;

/// Family members get compact codes: `⌜A_n⌝ = 3n`, `⌜χ_m⌝ = 3m+1`.
pub(crate) fn family_goedel(phi: &Formula) -> Option<BigUint> {
    if let Some(n) = recognize_a_n(phi) {
        return Some(Family::JaniczakA.code(&BigUint::from(n)));
    }
    recognize_chi(phi).map(|m| BigUint::from(m) * 3u32 + 1u32)
}

/// Inverse of `family_goedel` for codes `3n` and `3m+1`, within the decoding
/// limits.
pub(crate) fn family_ungoedel(tag: u32, n: &BigUint) -> Option<Formula> {
    let n = n.to_u64()?;
    match tag {
        0 if n <= A_DECODE_LIMIT => Some(a_n(n)),
        1 if (1..=CHI_DECODE_LIMIT).contains(&n) => Some(chi(n)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Handles

#[derive(Clone, Debug)]
pub enum OracleKind {
    QeSucc,
    JBoolean { budget: usize },
    DerivedLiterals { family: Family, pair: DisjointPair, budget: usize },
    PutnamE { hints: Vec<(Index, Index)> },
    SuccPred,
    RFragment,
}

#[derive(Clone, Debug)]
pub struct TheoryHandle {
    pub name: String,
    pub signature: Signature,
    pub kind: OracleKind,
}

/// Default quantifier-rank budget for reducing J sentences to combinations.
pub const J_RANK_BUDGET: usize = 4;

/// Succ, decided by quantifier elimination.
pub fn succ_theory() -> TheoryHandle {
    TheoryHandle { name: "Succ".into(), signature: Signature::successor(), kind: OracleKind::QeSucc }
}

/// J itself: provable and refutable exactly for the tautologous and
/// contradictory combinations.
pub fn j_theory() -> TheoryHandle {
    TheoryHandle {
        name: "J".into(),
        signature: Signature::janiczak(),
        kind: OracleKind::JBoolean { budget: J_RANK_BUDGET },
    }
}

/// The Σ₁ fragment of R: Σ₁ sentences proved by certificate search, and
/// refuted when their negation is Σ₁ and provable.
pub fn r_theory() -> TheoryHandle {
    TheoryHandle { name: "R".into(), signature: Signature::arithmetic(), kind: OracleKind::RFragment }
}

/// `base + {p_n : n ∈ B} + {¬p_n : n ∈ C}` with `p_n` read through `family`.
pub fn derived_theory(b: ReSet, c: ReSet, family: Family) -> TheoryHandle {
    let base = match family {
        Family::JaniczakA => "J",
        Family::SuccCycleChi => "Succ-",
    };
    TheoryHandle {
        name: format!("{base}+B/C[{}|{}]", b.index, c.index),
        signature: family.base_signature(),
        kind: OracleKind::DerivedLiterals { family, pair: DisjointPair::assumed(b, c), budget: J_RANK_BUDGET },
    }
}

/// Putnam's theory E in the relations `P0, P1, …`, with complement hints
/// `(i, j)` meaning "use the axiom separating `W_{e(i,j)}` from `W_{e(j,i)}`".
pub fn putnam_e(hints: &[(Index, Index)]) -> TheoryHandle {
    TheoryHandle {
        name: "E".into(),
        signature: Signature::successor().with_family("P", 1),
        kind: OracleKind::PutnamE { hints: hints.to_vec() },
    }
}

/// `Succ + {P(ī, n̄) : n ∈ W_i}`.
pub fn succ_pred_theory() -> TheoryHandle {
    TheoryHandle {
        name: "Succ+P".into(),
        signature: Signature::successor().with_relation("P", 2),
        kind: OracleKind::SuccPred,
    }
}

fn from_arith(e: ArithError) -> TheoryError {
    TheoryError::UnsupportedShape(e.to_string())
}

fn flip(v: Verdict) -> Verdict {
    match v {
        Verdict::Provable => Verdict::Refutable,
        Verdict::Refutable => Verdict::Provable,
        Verdict::Open => Verdict::Open,
    }
}

/// `(name, args)` of an atomic or negated atomic query.
fn literal(phi: &Formula) -> Option<(bool, &str, &[Term])> {
    match phi {
        Formula::Rel(r, args) => Some((true, r, args)),
        Formula::Not(a) => match a.as_ref() {
            Formula::Rel(r, args) => Some((false, r, args)),
            _ => None,
        },
        _ => None,
    }
}

fn unsupported(phi: &Formula) -> TheoryError {
    TheoryError::UnsupportedShape(phi.to_string())
}

impl TheoryHandle {
    pub fn family(&self) -> Option<Family> {
        match &self.kind {
            OracleKind::DerivedLiterals { family, .. } => Some(*family),
            _ => None,
        }
    }

    /// The verdict on a sentence at stage `s`.
    pub fn verdict(&self, phi: &Formula, s: Budget) -> Result<Verdict, TheoryError> {
        if !phi.is_sentence() {
            return Err(TheoryError::NotASentence);
        }
        self.signature.check(phi).map_err(|e| TheoryError::WrongSignature(e.to_string()))?;
        match &self.kind {
            OracleKind::QeSucc => succ_decide(phi),
            OracleKind::JBoolean { budget } => match j_normal_form(phi, *budget)? {
                NormalForm::Combo(c) => Ok(tautology_verdict(&c)),
                NormalForm::Exhausted { rank } => Err(TheoryError::UnsupportedShape(format!("rank {rank} over budget"))),
            },
            OracleKind::DerivedLiterals { family, budget, .. } => {
                let combo = match family.combo_of(phi) {
                    Some(c) => c,
                    None if *family == Family::JaniczakA => match j_normal_form(phi, *budget)? {
                        NormalForm::Combo(c) => c,
                        NormalForm::Exhausted { .. } => return Err(unsupported(phi)),
                    },
                    None => return Err(unsupported(phi)),
                };
                self.derived_decide(&combo, s)
            }
            OracleKind::PutnamE { hints } => {
                let (pos, name, args) = literal(phi).ok_or_else(|| unsupported(phi))?;
                let k: BigUint = name
                    .strip_prefix('P')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| unsupported(phi))?;
                let [t] = args else { return Err(unsupported(phi)) };
                let n = t.as_numeral().ok_or_else(|| unsupported(phi))?;
                let v = putnam_literal(&Index(k), n, hints, s);
                Ok(if pos { v } else { flip(v) })
            }
            OracleKind::SuccPred => {
                if Signature::successor().check(phi).is_ok() {
                    return succ_decide(phi);
                }
                let (pos, _, args) = literal(phi).ok_or_else(|| unsupported(phi))?;
                let [i, n] = args else { return Err(unsupported(phi)) };
                let (i, n) = match (i.as_numeral(), n.as_numeral()) {
                    (Some(i), Some(n)) => (i, n),
                    _ => return Err(unsupported(phi)),
                };
                let v = if ReSet::new(Index::from(i)).contains_u64(n, s) { Verdict::Provable } else { Verdict::Open };
                Ok(if pos { v } else { flip(v) })
            }
            OracleKind::RFragment => {
                let pos = sigma1_prove(phi, s);
                let neg = sigma1_prove(&Formula::not(phi.clone()), s);
                match (pos, neg) {
                    (Err(e), Err(_)) => Err(from_arith(e)),
                    (Ok(Some(_)), _) => Ok(Verdict::Provable),
                    (_, Ok(Some(_))) => Ok(Verdict::Refutable),
                    _ => Ok(Verdict::Open),
                }
            }
        }
    }

    pub fn provable(&self, phi: &Formula, s: Budget) -> Result<bool, TheoryError> {
        Ok(self.verdict(phi, s)? == Verdict::Provable)
    }

    pub fn refutable(&self, phi: &Formula, s: Budget) -> Result<bool, TheoryError> {
        Ok(self.verdict(phi, s)? == Verdict::Refutable)
    }

    /// The verdict on a combination by propositional entailment from the
    /// literals enumerated by stage `s`. The family members are mutually
    /// independent over the base theory, so atoms outside the literal set
    /// range freely.
    pub fn derived_decide(&self, c: &BooleanCombo, s: Budget) -> Result<Verdict, TheoryError> {
        let OracleKind::DerivedLiterals { pair, .. } = &self.kind else {
            return match &self.kind {
                OracleKind::JBoolean { .. } => Ok(tautology_verdict(c)),
                _ => Err(TheoryError::NotDerived),
            };
        };
        let mut fixed = BTreeMap::new();
        for n in c.atoms() {
            let (inb, inc) = (pair.left.contains_u64(n, s), pair.right.contains_u64(n, s));
            match (inb, inc) {
                (true, true) => return Err(TheoryError::Inconsistent(n)),
                (true, false) => {
                    fixed.insert(n, true);
                }
                (false, true) => {
                    fixed.insert(n, false);
                }
                _ => {}
            }
        }
        Ok(entailment(c, &fixed))
    }

    /// Membership of a code in `T_P` at stage `s`.
    pub fn nucleus_contains(&self, code: &BigUint, s: Budget) -> bool {
        ungoedel(code).is_some_and(|phi| self.provable(&phi, s).unwrap_or(false))
    }
}

/// Verdict of `c` given fixed values for some atoms, the rest free.
pub fn entailment(c: &BooleanCombo, fixed: &BTreeMap<u64, bool>) -> Verdict {
    let free: Vec<u64> = c.atoms().into_iter().filter(|n| !fixed.contains_key(n)).collect();
    let (mut any_true, mut any_false) = (false, false);
    for assign in combo::assignments(&free) {
        let v = c.eval(&|n| fixed.get(&n).copied().unwrap_or_else(|| combo::lookup(&assign, n)));
        any_true |= v;
        any_false |= !v;
        if any_true && any_false {
            return Verdict::Open;
        }
    }
    if any_false {
        Verdict::Refutable
    } else {
        Verdict::Provable
    }
}

fn tautology_verdict(c: &BooleanCombo) -> Verdict {
    entailment(c, &BTreeMap::new())
}

fn putnam_literal(k: &Index, n: u64, hints: &[(Index, Index)], s: Budget) -> Verdict {
    if ReSet::new(k.clone()).contains_u64(n, s) {
        return Verdict::Provable;
    }
    for (i, j) in hints {
        if crate::resets::dominance_index(i, j) == *k
            && ReSet::new(crate::resets::dominance_index(j, i)).contains_u64(n, s)
        {
            return Verdict::Refutable;
        }
    }
    Verdict::Open
}

// ---------------------------------------------------------------------------
// Weak representability scans

/// `{n ≤ N : T ⊢ φ(n̄)}` at stage `s`.
pub fn weak_rep_scan(t: &TheoryHandle, phi: &Formula, n_max: u64, s: Budget) -> Result<BTreeSet<u64>, TheoryError> {
    let free = phi.free_vars();
    let [x] = free.iter().collect::<Vec<_>>()[..] else {
        return Err(TheoryError::UnsupportedShape("expected exactly one free variable".into()));
    };
    if !t.signature.has_constant("0") || !t.signature.has_function("S", 1) {
        return Err(TheoryError::UnsupportedShape("the theory has no numerals".into()));
    }
    let mut out = BTreeSet::new();
    for n in 0..=n_max {
        if t.provable(&phi.subst(x, &numeral(n)), s)? {
            out.insert(n);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanPattern {
    /// No member in the upper half of the scanned range.
    Finite { members: Vec<u64> },
    /// Every number in the upper half is a member.
    Cofinite { missing: Vec<u64> },
    Neither,
}

/// Classifies a scan over `0..=n_max` by its upper half `n_max/2..=n_max`.
pub fn scan_pattern(scan: &BTreeSet<u64>, n_max: u64) -> ScanPattern {
    let upper = n_max / 2..=n_max;
    if upper.clone().all(|n| !scan.contains(&n)) {
        ScanPattern::Finite { members: scan.iter().copied().collect() }
    } else if upper.clone().all(|n| scan.contains(&n)) {
        ScanPattern::Cofinite { missing: (0..=n_max).filter(|n| !scan.contains(n)).collect() }
    } else {
        ScanPattern::Neither
    }
}

// ---------------------------------------------------------------------------
// Transfer of effective inseparability

/// `(i, n) ↦ φ_i(f(n))`.
fn preimage_program(family: Family) -> Program {
    let offset = family.code(&BigUint::from(0u32));
    Program::new(
        2,
        vec![
            Instr::Set(3, offset),
            Instr::Decjz(2, 6),
            Instr::Inc(3),
            Instr::Inc(3),
            Instr::Inc(3),
            Instr::Decjz(4, 1),
            Instr::Sim { dst: 0, prog: 1, arg: 3 },
            Instr::Halt,
        ],
    )
    .expect("valid program")
}

/// `g(i)`: an index with `W_{g(i)} = f⁻¹[W_i]`.
pub fn preimage_index(i: &Index, family: Family) -> Index {
    smn(1, 1, &preimage_program(family).encode(), std::slice::from_ref(&i.0))
}

/// A program whose domain is `f[W_inner]`.
pub fn family_image_program(family: Family, inner: &Index) -> Program {
    use Instr::*;
    let offset = family.code(&BigUint::from(0u32)).to_usize().expect("small offset");
    let fail = offset + 8;
    let mut v: Vec<Instr> = vec![Set(5, inner.0.clone())];
    v.extend((0..offset).map(|_| Decjz(1, fail)));
    let top = v.len();
    v.extend([
        Decjz(1, top + 5),
        Decjz(1, fail),
        Decjz(1, fail),
        Inc(2),
        Decjz(3, top),
        Sim { dst: 0, prog: 5, arg: 2 },
        Halt,
        Decjz(3, fail),
    ]);
    Program::new(1, v).expect("valid program")
}

/// `h(i, j) = f(t(g(i), g(j)))` for the derived theory `T`.
///
/// If `T_P ⊆ W_i`, `T_R ⊆ W_j` and the two are disjoint, then
/// `f[B] ⊆ W_i` gives `B ⊆ W_{g(i)}` and likewise for `C`, so
/// `t(g(i), g(j)) ∉ W_{g(i)} ∪ W_{g(j)}` and `h(i, j) ∉ W_i ∪ W_j`.
pub fn ei_transfer(i: &Index, j: &Index, t: &TheoryHandle) -> Result<BigUint, TheoryError> {
    let family = t.family().ok_or(TheoryError::NotDerived)?;
    let inner = ei_witness(&preimage_index(i, family), &preimage_index(j, family));
    Ok(family.code(&inner))
}

// ---------------------------------------------------------------------------
// The diagonal lemma on stub theories

/// A decidable stub theory over `{0, S, D}` that decides Succ instances by
/// truth in ℕ and comes with a formula claimed to weakly represent
/// `D = {n : ¬P(n, n)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalStub {
    /// Decides `D(n̄)` as `n ∈ D`, i.e. represents `D` faithfully.
    Honest,
    /// Offers `x = x`, which does not represent `D`.
    Dishonest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum DiagonalReport {
    Contradiction {
        formula: String,
        /// `⌜ψ(x)⌝`, in decimal.
        diagonal: String,
        goedel_matches: bool,
        /// `n ∈ D` read off the definition of `D`: `T ⊬ ψ(n̄)`.
        member_by_definition: bool,
        /// `n ∈ D` read off the representation: `T ⊢ ψ(n̄)`.
        member_by_representation: bool,
    },
    RepresentationFailure {
        formula: String,
        /// The first sampled `n` where the formula disagrees with `D`.
        at: String,
        in_d: bool,
        provable: bool,
    },
}

impl DiagonalStub {
    pub fn representation(self) -> Formula {
        match self {
            DiagonalStub::Honest => Formula::rel("D", vec![Term::var("x")]),
            DiagonalStub::Dishonest => Formula::eq(Term::var("x"), Term::var("x")),
        }
    }

    /// `T ⊢ φ(m̄)` for `φ` with the single free variable `x`.
    fn proves(self, phi: &Formula, m: &BigUint, depth: u32) -> bool {
        if self == DiagonalStub::Honest && *phi == self.representation() {
            // On the diagonal the question refers back to itself. The stub
            // has to answer something; one level down it answers "no".
            return depth == 0 && self.in_d(m, depth + 1);
        }
        if phi.free_vars() != BTreeSet::from(["x".to_string()]) {
            return false;
        }
        succ_eval(phi, &BTreeMap::from([("x".to_string(), m.clone())])).unwrap_or(false)
    }

    /// `P(n, m)`: `n` codes a formula `φ(x)` with `T ⊢ φ(m̄)`.
    fn p(self, n: &BigUint, m: &BigUint, depth: u32) -> bool {
        ungoedel(n).is_some_and(|phi| self.proves(&phi, m, depth))
    }

    fn in_d(self, n: &BigUint, depth: u32) -> bool {
        !self.p(n, n, depth)
    }
}

/// Runs the diagonal argument on a stub: checks the offered formula against
/// `D` on sample codes, then evaluates both readings of `n ∈ D` at
/// `n = ⌜ψ⌝`.
pub fn diagonal_demo(stub: DiagonalStub) -> DiagonalReport {
    let psi = stub.representation();
    let samples: Vec<BigUint> = (0u32..=40)
        .map(BigUint::from)
        .chain(
            ["(= x x)", "(= x 0)", "(not (= x x))", "(exists y (= x (S y)))"]
                .iter()
                .map(|s| goedel(&s.parse().expect("sample formula"))),
        )
        .collect();
    for m in &samples {
        let (in_d, provable) = (stub.in_d(m, 0), stub.proves(&psi, m, 0));
        if in_d != provable {
            return DiagonalReport::RepresentationFailure {
                formula: psi.to_string(),
                at: m.to_string(),
                in_d,
                provable,
            };
        }
    }
    let n = goedel(&psi);
    DiagonalReport::Contradiction {
        formula: psi.to_string(),
        diagonal: n.to_string(),
        goedel_matches: ungoedel(&n).as_ref() == Some(&psi),
        member_by_definition: stub.in_d(&n, 0),
        member_by_representation: stub.proves(&psi, &n, 0),
    }
}

#[cfg(test)]
mod tests;
