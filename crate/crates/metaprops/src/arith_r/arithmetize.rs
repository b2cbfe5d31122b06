//! Σ₁ graphs for a class of one-input programs.
//!
//! A program is in the class when it has arity 1, increments only register 0,
//! tests only register 1 or registers that are never incremented, and uses no
//! `set`, `sim` or `race`. Control flow then depends only on whether the
//! input register has run out, so the run on `x` is the first `x` steps of a
//! fixed decrement walk followed by a fixed zero-mode tail. The walk is
//! eventually periodic, which makes the step count and output affine in `x`
//! on each residue class.

use std::collections::BTreeMap;

use super::ArithError;
use crate::logic::{numeral, Formula, Term};
use crate::machine::{Instr, Program};

/// One branch of the graph. `Progression` covers `x = x0 + dx·k` with
/// `steps = steps0 + dsteps·k` and `out = out0 + dout·k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    Single { x: u64, steps: u64, out: u64 },
    Progression { x0: u64, dx: u64, steps0: u64, dsteps: u64, out0: u64, dout: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arithmetization {
    pub cases: Vec<Case>,
}

enum SegEnd {
    Test { pc: usize, steps: u64, out: u64 },
    Halted { steps: u64, out: u64 },
    Loops,
}

fn check_class(p: &Program) -> Result<(), ArithError> {
    let bad = |why: &str| Err(ArithError::NotArithmetizable(why.to_string()));
    if p.arity != 1 {
        return bad("arity must be 1");
    }
    let incremented = |r: usize| p.instrs.iter().any(|i| *i == Instr::Inc(r));
    for ins in &p.instrs {
        match ins {
            Instr::Halt => {}
            Instr::Inc(0) => {}
            Instr::Inc(_) => return bad("increments a register other than 0"),
            Instr::Decjz(1, _) => {}
            Instr::Decjz(r, _) if !incremented(*r) => {}
            Instr::Decjz(..) => return bad("tests a register that is incremented"),
            Instr::Set(..) | Instr::Sim { .. } | Instr::Race { .. } => {
                return bad("uses set, sim or race")
            }
        }
    }
    Ok(())
}

/// Runs from `pc` with register 1 either exhausted (`zero`) or still positive,
/// stopping before the next test of register 1 in positive mode.
fn segment(p: &Program, mut pc: usize, zero: bool) -> SegEnd {
    let (mut steps, mut out) = (0u64, 0u64);
    let mut seen = vec![false; p.instrs.len() + 1];
    loop {
        if pc >= p.instrs.len() {
            return SegEnd::Halted { steps: steps + 1, out };
        }
        if seen[pc] {
            return SegEnd::Loops;
        }
        seen[pc] = true;
        match &p.instrs[pc] {
            Instr::Halt => return SegEnd::Halted { steps: steps + 1, out },
            Instr::Inc(_) => {
                out += 1;
                pc += 1;
            }
            Instr::Decjz(1, l) if zero => pc = *l,
            Instr::Decjz(1, _) => return SegEnd::Test { pc, steps, out },
            Instr::Decjz(_, l) => pc = *l,
            _ => unreachable!("checked by check_class"),
        }
        steps += 1;
    }
}

fn target(p: &Program, pc: usize) -> usize {
    match p.instrs[pc] {
        Instr::Decjz(_, l) => l,
        _ => unreachable!("tests are decjz"),
    }
}

pub fn arithmetize(p: &Program) -> Result<Arithmetization, ArithError> {
    check_class(p)?;
    // Test j sits at pcs[j], after steps[j] steps and outs[j] increments.
    let (mut pcs, mut steps, mut outs) = (Vec::new(), Vec::new(), Vec::new());
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    let mut end = segment(p, 0, false);
    let (mut s, mut o) = (0u64, 0u64);
    let tail = loop {
        match end {
            SegEnd::Test { pc, steps: ds, out: dout } => {
                s += ds;
                o += dout;
                if let Some(&j) = first.get(&pc) {
                    break Some((j, pcs.len() - j, s - steps[j], o - outs[j]));
                }
                first.insert(pc, pcs.len());
                pcs.push(pc);
                steps.push(s);
                outs.push(o);
                s += 1;
                end = segment(p, pc + 1, false);
            }
            SegEnd::Halted { steps: ds, out: dout } => {
                end = SegEnd::Halted { steps: s + ds, out: o + dout };
                break None;
            }
            SegEnd::Loops => break None,
        }
    };
    let fail = |j: usize| match segment(p, target(p, pcs[j]), true) {
        SegEnd::Halted { steps: zs, out: zo } => Some((steps[j] + 1 + zs, outs[j] + zo)),
        _ => None,
    };
    let mut cases = Vec::new();
    let prefix = tail.map(|(mu, ..)| mu).unwrap_or(pcs.len());
    for j in 0..prefix {
        if let Some((st, out)) = fail(j) {
            cases.push(Case::Single { x: j as u64, steps: st, out });
        }
    }
    match tail {
        Some((mu, lambda, dsteps, dout)) => {
            for j in mu..mu + lambda {
                if let Some((st, out)) = fail(j) {
                    cases.push(Case::Progression {
                        x0: j as u64,
                        dx: lambda as u64,
                        steps0: st,
                        dsteps,
                        out0: out,
                        dout,
                    });
                }
            }
        }
        None => {
            if let SegEnd::Halted { steps: st, out } = end {
                cases.push(Case::Progression {
                    x0: pcs.len() as u64,
                    dx: 1,
                    steps0: st,
                    dsteps: 0,
                    out0: out,
                    dout: 0,
                });
            }
        }
    }
    Ok(Arithmetization { cases })
}

fn affine(c: u64, d: u64) -> Term {
    Term::add(numeral(c), Term::mul(numeral(d), Term::var("k")))
}

impl Case {
    fn formula(&self, with_output: bool) -> Formula {
        let (x, y, v) = (Term::var("x"), Term::var("y"), Term::var("v"));
        match *self {
            Case::Single { x: x0, steps, out } => {
                let mut parts = vec![Formula::eq(x, numeral(x0)), Formula::eq(y, numeral(steps))];
                if with_output {
                    parts.push(Formula::eq(v, numeral(out)));
                }
                Formula::conj(parts).expect("non-empty")
            }
            Case::Progression { x0, dx, steps0, dsteps, out0, dout } => {
                let mut parts = vec![Formula::eq(x.clone(), affine(x0, dx)), Formula::eq(y, affine(steps0, dsteps))];
                if with_output {
                    parts.push(Formula::eq(v, affine(out0, dout)));
                }
                Formula::exists_le("k", x, Formula::conj(parts).expect("non-empty"))
            }
        }
    }

    fn at(&self, n: u64) -> Option<(u64, u64)> {
        match *self {
            Case::Single { x, steps, out } => (x == n).then_some((steps, out)),
            Case::Progression { x0, dx, steps0, dsteps, out0, dout } => {
                if n < x0 || (n - x0) % dx != 0 {
                    return None;
                }
                let k = (n - x0) / dx;
                Some((steps0.checked_add(dsteps.checked_mul(k)?)?, out0.checked_add(dout.checked_mul(k)?)?))
            }
        }
    }
}

impl Arithmetization {
    fn matrix(&self, with_output: bool) -> Formula {
        let cases = self.cases.iter().map(|c| c.formula(with_output)).collect();
        Formula::disj(cases).unwrap_or_else(|| Formula::not(Formula::eq(Term::var("x"), Term::var("x"))))
    }

    /// `H(x, y, v)`: the run on `x` halts after exactly `y` steps with output `v`.
    pub fn graph_matrix(&self) -> Formula {
        self.matrix(true)
    }

    /// `∃y H(x, y, v)`.
    pub fn graph_formula(&self) -> Formula {
        Formula::exists("y", self.graph_matrix())
    }

    /// `∃y D(x, y)`: the run on `x` halts, after `y` steps.
    pub fn domain_formula(&self) -> Formula {
        Formula::exists("y", self.matrix(false))
    }

    /// `(steps, output)` of the run on `n`, read off the cases.
    pub fn halting(&self, n: u64) -> Option<(u64, u64)> {
        self.cases.iter().find_map(|c| c.at(n))
    }

    /// The least input with no halting case, if any.
    pub fn first_divergence(&self) -> Option<u64> {
        let horizon = self
            .cases
            .iter()
            .map(|c| match *c {
                Case::Single { x, .. } => x + 1,
                Case::Progression { x0, dx, .. } => x0 + dx,
            })
            .max()
            .unwrap_or(0);
        (0..=horizon).find(|&n| self.halting(n).is_none())
    }
}
