//! RE sets as program indices, disjoint pairs, the dominance function, K and
//! the canonical effectively inseparable pair.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::machine::{self, programs, run, smn, Budget, Index, Instr, Outcome, Program};

/// Stage-bounded answer to a membership question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Enumerated by the stage.
    In,
    /// Not enumerated by the stage.
    OutSoFar,
    /// The question could not be posed within the stage, e.g. because the
    /// element itself had to be computed first.
    Unknown,
}

/// `W_index`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReSet {
    pub index: Index,
}

impl ReSet {
    pub fn new(index: Index) -> ReSet {
        ReSet { index }
    }

    pub fn of(p: &Program) -> ReSet {
        ReSet { index: p.encode() }
    }

    /// Membership at stage `s`: `x` is in once `run(index, (x), s)` halts.
    ///
    /// This is the test `dom_enum` applies to each `x <= s`, applied to any
    /// `x`, so large elements such as indices can be asked about too.
    pub fn status(&self, x: &BigUint, s: Budget) -> Membership {
        if self.contains(x, s) {
            Membership::In
        } else {
            Membership::OutSoFar
        }
    }

    pub fn contains(&self, x: &BigUint, s: Budget) -> bool {
        run(&self.index, std::slice::from_ref(x), s).halted()
    }

    pub fn contains_u64(&self, x: u64, s: Budget) -> bool {
        self.contains(&BigUint::from(x), s)
    }

    /// `W_{index,s}`.
    pub fn stage(&self, s: Budget) -> BTreeSet<u64> {
        machine::dom_enum(&self.index, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Disjointness {
    Assumed,
    VerifiedUpTo { bound: u64, stage: Budget },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointPair {
    pub left: ReSet,
    pub right: ReSet,
    pub disjointness_witness: Disjointness,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResetsError {
    #[error("{0} lies in both sides of the pair")]
    Overlap(u64),
    #[error("the reduction does not halt on {0} within the stage")]
    NonTotal(u64),
}

impl DisjointPair {
    pub fn assumed(left: ReSet, right: ReSet) -> DisjointPair {
        DisjointPair { left, right, disjointness_witness: Disjointness::Assumed }
    }

    /// Checks `x <= bound` at stage `s` and records the result.
    pub fn verified(left: ReSet, right: ReSet, bound: u64, s: Budget) -> Result<DisjointPair, ResetsError> {
        if let Some(x) = (0..=bound).find(|&x| left.contains_u64(x, s) && right.contains_u64(x, s)) {
            return Err(ResetsError::Overlap(x));
        }
        Ok(DisjointPair { left, right, disjointness_witness: Disjointness::VerifiedUpTo { bound, stage: s } })
    }

    pub fn swapped(&self) -> DisjointPair {
        DisjointPair {
            left: self.right.clone(),
            right: self.left.clone(),
            disjointness_witness: self.disjointness_witness.clone(),
        }
    }
}

/// `e(i, j)`: an index of `{x : ∃y[T(i,x,y) ∧ ∀z≤y ¬T(j,x,z)]}`.
///
/// Uniform in `i` and `j` through `smn`. When `W_i ∩ W_j = ∅` the set equals
/// `W_i`, but the index is not `i` itself.
pub fn dominance_index(i: &Index, j: &Index) -> Index {
    smn(2, 1, &programs::dominance3().encode(), &[i.0.clone(), j.0.clone()])
}

/// `K = {x : x ∈ W_x}`.
pub fn creative_k() -> ReSet {
    ReSet::of(&programs::diagonal())
}

/// The productive function of the complement of K: if `W_i ⊆ K̄` then
/// `i ∈ K̄ ∖ W_i`.
pub fn k_productive(i: &Index) -> Index {
    i.clone()
}

/// One index `i` with `W_i ⊆ K̄`, and where the productive function sends it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CreativeRow {
    pub index: String,
    pub domain: Vec<u64>,
    /// Every element of `W_i` in `0..=bound` stays out of `K` at the stage.
    pub subset_verified: bool,
    pub image_in_k: bool,
    pub image_in_w: bool,
}

impl CreativeRow {
    pub fn holds(&self) -> bool {
        self.subset_verified && !self.image_in_k && !self.image_in_w
    }
}

/// Builds `count` indices of finite sets drawn from `K̄ ∩ [0, bound]` (as
/// seen at `stage`) and checks `k_productive(i) ∈ K̄ ∖ W_i` for each.
pub fn creative_demo(count: usize, bound: u64, stage: Budget) -> Vec<CreativeRow> {
    let k = creative_k();
    let outside: Vec<u64> = (0..=bound).filter(|&x| !k.contains_u64(x, stage)).collect();
    (0..count)
        .map(|c| {
            let members: Vec<u64> = outside.iter().copied().skip(c).step_by(c % 4 + 1).take(c % 5 + 1).collect();
            let i = programs::finite_set(&members).encode();
            let w = ReSet::new(i.clone());
            let domain: Vec<u64> = (0..=bound).filter(|&x| w.contains_u64(x, stage)).collect();
            let subset_verified = domain.iter().all(|&x| !k.contains_u64(x, stage));
            let p = k_productive(&i);
            CreativeRow {
                index: i.to_string(),
                domain,
                subset_verified,
                image_in_k: k.contains(&p.0, stage),
                image_in_w: w.contains(&p.0, stage),
            }
        })
        .collect()
}

/// `(K₀, K₁)` with `K_v = {x : φ_x(x) = v}`.
pub fn canonical_ei_pair() -> DisjointPair {
    DisjointPair::assumed(ReSet::of(&programs::k_zero()), ReSet::of(&programs::k_one()))
}

/// The diagonal witness `n` for `(W_i, W_j)`: `φ_n(x)` is 1 if `x` enters
/// `W_i` first and 0 if it enters `W_j` first.
///
/// If `K₀ ⊆ W_i`, `K₁ ⊆ W_j` and the two are disjoint, then `n ∉ W_i ∪ W_j`.
/// For `n ∈ W_i` would give `φ_n(n) = 1`, so `n ∈ K₁ ⊆ W_j`; symmetrically
/// for `W_j`.
pub fn ei_witness(i: &Index, j: &Index) -> BigUint {
    ei_witness_index(i, j).0
}

fn ei_witness_index(i: &Index, j: &Index) -> Index {
    smn(2, 1, &programs::race3().encode(), &[i.0.clone(), j.0.clone()])
}

/// One stage of the exclusion argument for `ei_witness`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExclusionStage {
    pub stage: Budget,
    pub in_left: bool,
    pub in_right: bool,
    /// `φ_n(n)` within the stage, if it halted.
    pub diagonal_value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExclusionReport {
    pub witness: String,
    /// `n` is literally the race program with `(i, j)` fixed.
    pub structural: bool,
    pub stages: Vec<ExclusionStage>,
    /// Elements `x <= bound` found in `K₀ ∖ W_i` or `K₁ ∖ W_j` at the largest
    /// stage.
    pub precondition_failures: Vec<u64>,
    /// Every implication of the diagonal argument that could be checked held.
    pub valid: bool,
    pub excluded: bool,
}

/// Replays the diagonal argument for `ei_witness(i, j)` at the given stages.
///
/// At each stage it records where `n` has appeared. If `n` shows up on a side,
/// the argument predicts the value `φ_n(n)` and forces `n` onto the other
/// side; the report marks the argument broken when that does not happen. It
/// also samples the preconditions `K₀ ⊆ W_i`, `K₁ ⊆ W_j` on `0..=bound`.
pub fn check_ei_exclusion(i: &Index, j: &Index, stages: &[Budget], bound: u64) -> ExclusionReport {
    let n = ei_witness_index(i, j);
    let structural = {
        let p = n.program();
        matches!(p.instrs.as_slice(),
            [Instr::Set(_, a), Instr::Set(_, b), Instr::Race { .. }, Instr::Halt]
                if *a == i.0 && *b == j.0)
            && p.arity == 1
    };
    let (wi, wj) = (ReSet::new(i.clone()), ReSet::new(j.clone()));
    let mut valid = structural;
    let mut rows = Vec::new();
    for &s in stages {
        let in_left = wi.contains(&n.0, s);
        let in_right = wj.contains(&n.0, s);
        let diag = run(&n, &[n.0.clone()], s);
        if in_left || in_right {
            // The race on n is then decided, and the argument says the winner's
            // value puts n into the opposite K_v, hence onto the other side.
            let big = s.saturating_mul(8);
            match run(&n, &[n.0.clone()], big) {
                Outcome::Halted(v) if v == BigUint::from(1u32) => {
                    valid &= wj.contains(&n.0, big);
                }
                Outcome::Halted(v) if v == BigUint::from(0u32) => {
                    valid &= wi.contains(&n.0, big);
                }
                _ => valid = false,
            }
        }
        rows.push(ExclusionStage {
            stage: s,
            in_left,
            in_right,
            diagonal_value: diag.value().map(|v| v.to_string()),
        });
    }
    let top = stages.iter().copied().max().unwrap_or(0);
    let (k0, k1) = {
        let p = canonical_ei_pair();
        (p.left, p.right)
    };
    let precondition_failures: Vec<u64> = (0..=bound)
        .filter(|&x| {
            (k0.contains_u64(x, top) && !wi.contains_u64(x, top.saturating_mul(4)))
                || (k1.contains_u64(x, top) && !wj.contains_u64(x, top.saturating_mul(4)))
        })
        .collect();
    let excluded = rows.iter().all(|r| !r.in_left && !r.in_right);
    ExclusionReport {
        witness: n.to_string(),
        structural,
        stages: rows,
        precondition_failures,
        valid,
        excluded,
    }
}

/// `f` is meant to satisfy `x ∈ A ⇒ f(x) ∈ C` and `x ∈ B ⇒ f(x) ∈ D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiReduction {
    pub f: Index,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub n: u64,
    pub image: String,
    /// `true` when `n` was on the left side.
    pub left: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SemiReductionReport {
    pub checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl SemiReductionReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub fn check_semi_reduction(
    f: &SemiReduction,
    from: &DisjointPair,
    to: &DisjointPair,
    bound: u64,
    s: Budget,
) -> Result<SemiReductionReport, ResetsError> {
    let prog = f.f.program();
    let mut report = SemiReductionReport::default();
    for n in 0..=bound {
        let image = match machine::run_program(&prog, &[BigUint::from(n)], s) {
            Outcome::Halted(v) => v,
            Outcome::Running => return Err(ResetsError::NonTotal(n)),
        };
        report.checked += 1;
        for (side, src, dst) in [(true, &from.left, &to.left), (false, &from.right, &to.right)] {
            if src.contains_u64(n, s) && !dst.contains(&image, s) {
                report.counterexamples.push(Counterexample { n, image: image.to_string(), left: side });
            }
        }
    }
    Ok(report)
}
