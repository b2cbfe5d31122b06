//! Truth-table conditions, and the two tt-reductions between a parameter set
//! `X` and the theory `T_X = J + {A_n : n ∈ X} + {¬A_n : n ∉ X}`.
//!
//! Truth tables are stored most-significant-first: entry `r` of `alpha` is
//! the value when query `i` is answered by bit `k-1-i` of `r`.

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::machine::{run, Budget, Index, Instr, Outcome, Program};
use crate::resets::ReSet;
use crate::theories::{derived_theory, BooleanCombo, Family, TheoryHandle};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TtCondition {
    #[serde(serialize_with = "decimal")]
    pub queries: Vec<BigUint>,
    pub alpha: Vec<bool>,
}

fn decimal<S: serde::Serializer>(qs: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(|q| q.to_string()))
}

impl TtCondition {
    pub fn new(queries: Vec<BigUint>, alpha: Vec<bool>) -> TtCondition {
        assert!(!queries.is_empty(), "norm is at least 1");
        assert_eq!(alpha.len(), 1 << queries.len(), "alpha must be total");
        TtCondition { queries, alpha }
    }

    pub fn norm(&self) -> usize {
        self.queries.len()
    }

    /// The truth table as a bit string, most significant row first.
    pub fn bits(&self) -> String {
        self.alpha.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for TtCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.queries.iter().map(|q| q.to_string()).collect();
        write!(f, "<{}> {}", qs.join(","), self.bits())
    }
}

/// `α(c_A(x₁), …, c_A(x_k)) = 1`.
pub fn tt_satisfied(c: &TtCondition, oracle: &dyn Fn(&BigUint) -> bool) -> bool {
    let k = c.norm();
    let row = c
        .queries
        .iter()
        .enumerate()
        .fold(0usize, |r, (i, q)| if oracle(q) { r | 1 << (k - 1 - i) } else { r });
    c.alpha[row]
}

/// The condition asking `X` about the support of `φ`: `T_X ⊢ φ*` iff it is
/// satisfied by `X`. Constant combinations become norm-1 conditions with a
/// constant table.
pub fn theory_to_set_tt(phi: &BooleanCombo) -> TtCondition {
    let vars: Vec<u64> = phi.atoms().into_iter().collect();
    if vars.is_empty() {
        let v = phi.eval(&|_| false);
        return TtCondition::new(vec![BigUint::from(0u32)], vec![v, v]);
    }
    TtCondition::new(vars.iter().map(|&n| BigUint::from(n)).collect(), phi.truth_table(&vars))
}

/// `n ↦ ⟨⟨⌜A_n⌝⟩, identity⟩`, with the query computed by a program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtReduction {
    pub program: Index,
}

/// Computes `x ↦ 3x = ⌜A_x⌝`.
fn times_three() -> Program {
    use Instr::*;
    Program::new(1, vec![Decjz(1, 5), Inc(0), Inc(0), Inc(0), Decjz(2, 0), Halt]).expect("valid program")
}

/// Steps `times_three` needs on input `n`.
pub fn query_cost(n: u64) -> Budget {
    5 * n + 2
}

impl TtReduction {
    /// The condition for `n`, or `None` if the program has not halted within
    /// the budget.
    pub fn condition(&self, n: u64, b: Budget) -> Option<TtCondition> {
        match run(&self.program, &[BigUint::from(n)], b) {
            Outcome::Halted(q) => Some(TtCondition::new(vec![q], vec![false, true])),
            Outcome::Running => None,
        }
    }

    /// Totality on `0..=bound`, each input within its declared cost.
    pub fn total_up_to(&self, bound: u64) -> bool {
        (0..=bound).all(|n| self.condition(n, query_cost(n)).is_some())
    }
}

/// `X ≤_tt T_X` via `n ↦ ⌜A_n⌝`.
pub fn set_to_theory_reduction() -> TtReduction {
    TtReduction { program: times_three().encode() }
}

/// `T_X` for a finite `X`, with `X` and its complement as parameter sets.
pub fn theory_of_finite(x: &[u64]) -> TheoryHandle {
    use crate::machine::programs;
    derived_theory(
        ReSet::of(&programs::finite_set(x)),
        ReSet::of(&programs::cofinite_set(x)),
        Family::JaniczakA,
    )
}

/// A stage by which `theory_of_finite(x)` has settled every atom up to
/// `max_atom`.
pub fn stabilizing_stage(x: &[u64], max_atom: u64) -> Budget {
    x.iter().copied().chain([max_atom]).max().unwrap_or(0) + 8
}
