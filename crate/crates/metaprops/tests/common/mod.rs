#![allow(dead_code)]

use metaprops::logic::{numeral, Formula, Term};
use metaprops::machine::{Instr, Program};
use metaprops::theories::BooleanCombo;
use rand::Rng;

/// A small counter-machine program over registers `0..=arity+2`, mixing
/// loops, constants and early halts.
pub fn random_program(rng: &mut impl Rng, arity: usize) -> Program {
    let len = rng.gen_range(1..=8);
    let regs = arity + 3;
    let instrs = (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0..=3 => Instr::Inc(rng.gen_range(0..regs)),
            4..=7 => Instr::Decjz(rng.gen_range(0..regs), rng.gen_range(0..len)),
            8 => Instr::Set(rng.gen_range(0..regs), rng.gen_range(0u32..6).into()),
            _ => Instr::Halt,
        })
        .collect();
    Program::new(arity, instrs).expect("labels in range")
}

pub fn random_term(rng: &mut impl Rng, vars: &[&str], depth: usize) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return if !vars.is_empty() && rng.gen_bool(0.6) {
            Term::var(vars[rng.gen_range(0..vars.len())])
        } else {
            numeral(rng.gen_range(0..4))
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::s(random_term(rng, vars, depth - 1)),
        1 => Term::add(random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1)),
        _ => Term::mul(random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1)),
    }
}

const BOUND_NAMES: [&str; 3] = ["u", "v", "w"];

/// A Δ₀ formula whose free variables are among `vars`. Bounded quantifiers
/// range up to a variable or a small numeral.
pub fn random_delta0(rng: &mut impl Rng, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let (a, b) = (random_term(rng, vars, 2), random_term(rng, vars, 2));
        return if rng.gen_bool(0.7) { Formula::eq(a, b) } else { Formula::le(a, b) };
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(random_delta0(rng, vars, depth - 1)),
        1 => Formula::and(random_delta0(rng, vars, depth - 1), random_delta0(rng, vars, depth - 1)),
        2 => Formula::or(random_delta0(rng, vars, depth - 1), random_delta0(rng, vars, depth - 1)),
        3 => Formula::imp(random_delta0(rng, vars, depth - 1), random_delta0(rng, vars, depth - 1)),
        k => {
            let fresh = BOUND_NAMES.iter().copied().find(|b| !vars.contains(b));
            let Some(z) = fresh else { return random_delta0(rng, vars, depth - 1) };
            let bound = if !vars.is_empty() && rng.gen_bool(0.5) {
                Term::var(vars[rng.gen_range(0..vars.len())])
            } else {
                numeral(rng.gen_range(0..4))
            };
            let mut inner: Vec<&str> = vars.to_vec();
            inner.push(z);
            let body = random_delta0(rng, &inner, depth - 1);
            if k == 4 {
                Formula::exists_le(z, bound, body)
            } else {
                Formula::forall_le(z, bound, body)
            }
        }
    }
}

/// A sentence of Succ: successor terms over quantified variables and `0`.
pub fn random_succ_sentence(rng: &mut impl Rng, depth: usize) -> Formula {
    fn go(rng: &mut impl Rng, scope: &mut Vec<&'static str>, depth: usize) -> Formula {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        let can_bind = scope.len() < NAMES.len();
        if depth == 0 || (!scope.is_empty() && rng.gen_bool(0.25)) {
            let side = |rng: &mut _| {
                let base = if scope.is_empty() || Rng::gen_bool(rng, 0.2) {
                    Term::zero()
                } else {
                    Term::var(scope[Rng::gen_range(rng, 0..scope.len())])
                };
                Term::succ_n(Rng::gen_range(rng, 0..3), base)
            };
            let (a, b) = (side(rng), side(rng));
            return Formula::eq(a, b);
        }
        match rng.gen_range(0..6) {
            0 | 1 if can_bind => {
                let v = NAMES[scope.len()];
                scope.push(v);
                let body = go(rng, scope, depth - 1);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
            2 => Formula::not(go(rng, scope, depth - 1)),
            3 => Formula::and(go(rng, scope, depth - 1), go(rng, scope, depth - 1)),
            4 => Formula::or(go(rng, scope, depth - 1), go(rng, scope, depth - 1)),
            _ => Formula::imp(go(rng, scope, depth - 1), go(rng, scope, depth - 1)),
        }
    }
    go(rng, &mut Vec::new(), depth)
}

/// A Boolean combination over atoms `0..atoms`.
pub fn random_combo(rng: &mut impl Rng, atoms: u64, depth: usize) -> BooleanCombo {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..20) {
            0 => BooleanCombo::Top,
            1 => BooleanCombo::Bot,
            _ => BooleanCombo::Atom(rng.gen_range(0..atoms)),
        };
    }
    let kids = |rng: &mut _| -> Vec<BooleanCombo> {
        let n = Rng::gen_range(rng, 1..4);
        (0..n).map(|_| random_combo(rng, atoms, depth - 1)).collect()
    };
    match rng.gen_range(0..3) {
        0 => BooleanCombo::not(random_combo(rng, atoms, depth - 1)),
        1 => BooleanCombo::And(kids(rng)),
        _ => BooleanCombo::Or(kids(rng)),
    }
}
