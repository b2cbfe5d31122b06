//! Counter machines as a concrete model of partial recursive functions.
//!
//! Registers hold naturals. Inputs go to registers `1..=arity`, the output is
//! read from register 0, and every other register starts at zero. Besides the
//! classical `inc`, `decjz` and `halt` the instruction set has:
//!
//! * `set r c`: load the constant `c` into `r` (one step);
//! * `sim d p a`: `d := φ_p(a)`, diverging when the simulated program does;
//! * `race d l r a`: decide which of `W_l`, `W_r` receives `a` first.
//!
//! Every executed instruction costs one step; `sim` and `race` also pay for
//! all the steps they simulate.
//!
//! A trace is the list of top-level configurations visited, and its code is
//! `pair(2^cost, seq(configs))`, where `cost` counts every step including
//! nested ones. The factor `2^cost` gives the lower bound `code >= 2^cost`.
//! That bound is what makes `race` decidable once one side has halted. If the
//! left side halted with code `y`, any right trace with a code `<= y` costs
//! less than `bits(y)`.
//!
//! `race` reports `1` when the left trace code is strictly smaller and `0`
//! when the right one is. This is the order used by
//! `∃y[T(l,a,y) ∧ ∀z≤y ¬T(r,a,z)]`. Equal trace codes go to the smaller
//! program code, so `2` only comes from racing a program against itself. It explores both sides with doubling
//! quotas, rerunning from scratch each round. A program whose configuration
//! repeats is reported as running at every budget without further
//! simulation.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::{decode_seq, encode_seq, log2_exact, pair, pow2, unpair};

pub type Reg = usize;

/// Step budget. A run with budget `b` executes at most `b` steps.
pub type Budget = u64;

const MAX_REG: usize = 1 << 12;
const MAX_ARITY: usize = 1 << 8;
const MAX_LEN: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Inc(Reg),
    Decjz(Reg, usize),
    Halt,
    Set(Reg, BigUint),
    Sim { dst: Reg, prog: Reg, arg: Reg },
    Race { dst: Reg, left: Reg, right: Reg, arg: Reg },
}

impl Instr {
    fn registers(&self) -> Vec<Reg> {
        match self {
            Instr::Inc(r) | Instr::Decjz(r, _) | Instr::Set(r, _) => vec![*r],
            Instr::Halt => vec![],
            Instr::Sim { dst, prog, arg } => vec![*dst, *prog, *arg],
            Instr::Race { dst, left, right, arg } => vec![*dst, *left, *right, *arg],
        }
    }

    fn map_registers(&self, f: &impl Fn(Reg) -> Reg) -> Instr {
        match self {
            Instr::Inc(r) => Instr::Inc(f(*r)),
            Instr::Decjz(r, l) => Instr::Decjz(f(*r), *l),
            Instr::Halt => Instr::Halt,
            Instr::Set(r, c) => Instr::Set(f(*r), c.clone()),
            Instr::Sim { dst, prog, arg } => Instr::Sim { dst: f(*dst), prog: f(*prog), arg: f(*arg) },
            Instr::Race { dst, left, right, arg } => Instr::Race {
                dst: f(*dst),
                left: f(*left),
                right: f(*right),
                arg: f(*arg),
            },
        }
    }

    fn encode(&self) -> BigUint {
        let u = |r: usize| BigUint::from(r);
        let (tag, body) = match self {
            Instr::Halt => (0u32, BigUint::zero()),
            Instr::Inc(r) => (1, u(*r)),
            Instr::Decjz(r, l) => (2, pair(&u(*r), &u(*l))),
            Instr::Set(r, c) => (3, pair(&u(*r), c)),
            Instr::Sim { dst, prog, arg } => (4, pair(&u(*dst), &pair(&u(*prog), &u(*arg)))),
            Instr::Race { dst, left, right, arg } => (
                5,
                pair(&u(*dst), &pair(&u(*left), &pair(&u(*right), &u(*arg)))),
            ),
        };
        body * 6u32 + tag
    }

    fn decode(code: &BigUint) -> Option<Instr> {
        let tag = (code % 6u32).to_u32()?;
        let body: BigUint = code / 6u32;
        let reg = |n: &BigUint| n.to_usize().filter(|&r| r < MAX_REG);
        Some(match tag {
            0 if body.is_zero() => Instr::Halt,
            0 => return None,
            1 => Instr::Inc(reg(&body)?),
            2 => {
                let (r, l) = unpair(&body);
                Instr::Decjz(reg(&r)?, l.to_usize().filter(|&l| l < MAX_LEN)?)
            }
            3 => {
                let (r, c) = unpair(&body);
                Instr::Set(reg(&r)?, c)
            }
            4 => {
                let (d, rest) = unpair(&body);
                let (p, a) = unpair(&rest);
                Instr::Sim { dst: reg(&d)?, prog: reg(&p)?, arg: reg(&a)? }
            }
            _ => {
                let (d, rest) = unpair(&body);
                let (l, rest) = unpair(&rest);
                let (r, a) = unpair(&rest);
                Instr::Race { dst: reg(&d)?, left: reg(&l)?, right: reg(&r)?, arg: reg(&a)? }
            }
        })
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc(r) => write!(f, "inc {r}"),
            Instr::Decjz(r, l) => write!(f, "decjz {r} {l}"),
            Instr::Halt => write!(f, "halt"),
            Instr::Set(r, c) => write!(f, "set {r} {c}"),
            Instr::Sim { dst, prog, arg } => write!(f, "sim {dst} {prog} {arg}"),
            Instr::Race { dst, left, right, arg } => write!(f, "race {dst} {left} {right} {arg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub arity: usize,
    pub instrs: Vec<Instr>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("program has no instructions")]
    Empty,
    #[error("instruction {at} jumps to {label}, past the end")]
    BadLabel { at: usize, label: usize },
    #[error("register {0} is out of range")]
    BadRegister(usize),
    #[error("arity {0} is out of range")]
    BadArity(usize),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

impl Program {
    pub fn new(arity: usize, instrs: Vec<Instr>) -> Result<Program, ProgramError> {
        let p = Program { arity, instrs };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        if self.instrs.is_empty() {
            return Err(ProgramError::Empty);
        }
        if self.arity > MAX_ARITY {
            return Err(ProgramError::BadArity(self.arity));
        }
        for (at, ins) in self.instrs.iter().enumerate() {
            if let Instr::Decjz(_, label) = ins {
                if *label >= self.instrs.len() {
                    return Err(ProgramError::BadLabel { at, label: *label });
                }
            }
            if let Some(r) = ins.registers().into_iter().find(|&r| r >= MAX_REG) {
                return Err(ProgramError::BadRegister(r));
            }
        }
        Ok(())
    }

    /// The program every invalid code decodes to: `decjz 0 0` with arity 0.
    pub fn diverging() -> Program {
        Program { arity: 0, instrs: vec![Instr::Decjz(0, 0)] }
    }

    pub fn register_count(&self) -> usize {
        let top = self.instrs.iter().flat_map(|i| i.registers()).max().unwrap_or(0);
        top.max(self.arity) + 1
    }

    pub fn encode(&self) -> Index {
        let codes: Vec<BigUint> = self.instrs.iter().map(Instr::encode).collect();
        Index(pair(&BigUint::from(self.arity), &encode_seq(&codes)))
    }

    pub fn decode(i: &Index) -> Program {
        Self::try_decode(i).unwrap_or_else(Program::diverging)
    }

    /// Decodes only canonical codes of valid programs.
    pub fn try_decode(i: &Index) -> Option<Program> {
        let (arity, body) = unpair(&i.0);
        let arity = arity.to_usize().filter(|&a| a <= MAX_ARITY)?;
        let codes = decode_seq(&body, MAX_LEN)?;
        let instrs = codes.iter().map(Instr::decode).collect::<Option<Vec<_>>>()?;
        let p = Program { arity, instrs };
        p.validate().ok()?;
        if p.encode() != *i {
            return None;
        }
        Some(p)
    }

    pub fn max_constant(&self) -> BigUint {
        self.instrs
            .iter()
            .filter_map(|i| match i {
                Instr::Set(_, c) => Some(c.clone()),
                _ => None,
            })
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arity {}", self.arity)?;
        for ins in &self.instrs {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = ProgramError;

    /// One instruction per line. An optional `arity N` line may come first
    /// (default 1). Text after `#` is ignored.
    fn from_str(s: &str) -> Result<Program, ProgramError> {
        let mut arity = None;
        let mut instrs = Vec::new();
        for (n, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| ProgramError::Syntax { line: n + 1, msg: msg.to_string() };
            let words: Vec<&str> = line.split_whitespace().collect();
            let nums = |k: usize| -> Result<Vec<usize>, ProgramError> {
                if words.len() != k + 1 {
                    return Err(err(&format!("`{}` takes {k} operands", words[0])));
                }
                words[1..].iter().map(|w| w.parse().map_err(|_| err("bad operand"))).collect()
            };
            let ins = match words[0] {
                "arity" if instrs.is_empty() && arity.is_none() => {
                    arity = Some(nums(1)?[0]);
                    continue;
                }
                "inc" => Instr::Inc(nums(1)?[0]),
                "decjz" => {
                    let v = nums(2)?;
                    Instr::Decjz(v[0], v[1])
                }
                "halt" => {
                    nums(0)?;
                    Instr::Halt
                }
                "set" => {
                    if words.len() != 3 {
                        return Err(err("`set` takes 2 operands"));
                    }
                    let r = words[1].parse().map_err(|_| err("bad register"))?;
                    let c = words[2].parse().map_err(|_| err("bad constant"))?;
                    Instr::Set(r, c)
                }
                "sim" => {
                    let v = nums(3)?;
                    Instr::Sim { dst: v[0], prog: v[1], arg: v[2] }
                }
                "race" => {
                    let v = nums(4)?;
                    Instr::Race { dst: v[0], left: v[1], right: v[2], arg: v[3] }
                }
                other => return Err(err(&format!("unknown instruction `{other}`"))),
            };
            instrs.push(ins);
        }
        Program::new(arity.unwrap_or(1), instrs)
    }
}

/// A Gödel number of a program. Every natural is an index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Index(pub BigUint);

impl Index {
    pub fn program(&self) -> Program {
        Program::decode(self)
    }
}

impl From<u64> for Index {
    fn from(n: u64) -> Self {
        Index(BigUint::from(n))
    }
}

impl From<Index> for String {
    fn from(i: Index) -> String {
        i.0.to_string()
    }
}

impl TryFrom<String> for Index {
    type Error = num_bigint::ParseBigIntError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse().map(Index)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Index {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(Index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted(BigUint),
    Running,
}

impl Outcome {
    pub fn halted(&self) -> bool {
        matches!(self, Outcome::Halted(_))
    }
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Outcome::Halted(v) => Some(v),
            Outcome::Running => None,
        }
    }
}

/// What happened to a bounded run, with the bookkeeping callers may need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Execution {
    Halted { value: BigUint, cost: u64, configs: Option<Vec<Config>> },
    /// A configuration repeated after `steps` steps, so the run never halts.
    Diverged { steps: u64 },
    OutOfBudget,
}

/// A machine configuration: program counter and registers.
pub type Config = (usize, Vec<BigUint>);

fn config_code(pc: usize, regs: &[BigUint]) -> BigUint {
    pair(&BigUint::from(pc), &encode_seq(regs))
}

fn trace_code(cost: u64, configs: &[Config]) -> BigUint {
    let codes: Vec<BigUint> = configs.iter().map(|(pc, regs)| config_code(*pc, regs)).collect();
    pair(&pow2(cost), &encode_seq(&codes))
}

thread_local! {
    static DECODED: RefCell<HashMap<BigUint, Rc<Program>>> = RefCell::new(HashMap::new());
}

/// `Program::decode` with a per-thread memo; simulated programs are decoded
/// over and over from the same registers.
fn decode_cached(code: &BigUint) -> Rc<Program> {
    if let Some(p) = DECODED.with(|m| m.borrow().get(code).cloned()) {
        return p;
    }
    let p = Rc::new(Program::decode(&Index(code.clone())));
    DECODED.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= 4096 {
            m.clear();
        }
        m.insert(code.clone(), p.clone());
    });
    p
}

pub fn execute(p: &Program, args: &[BigUint], budget: Budget, record: bool) -> Execution {
    stacker::maybe_grow(128 * 1024, 8 * 1024 * 1024, || exec_inner(p, args, budget, record))
}

fn exec_inner(p: &Program, args: &[BigUint], budget: Budget, record: bool) -> Execution {
    let mut regs = vec![BigUint::zero(); p.register_count()];
    for (k, a) in args.iter().take(p.arity).enumerate() {
        regs[k + 1] = a.clone();
    }
    let mut configs = record.then(Vec::new);
    let mut pc = 0usize;
    let mut used = 0u64;
    let mut snapshot: Option<(usize, Vec<BigUint>)> = None;
    let (mut power, mut lam) = (1u64, 0u64);
    loop {
        if used >= budget {
            return Execution::OutOfBudget;
        }
        if let Some((spc, sregs)) = &snapshot {
            if *spc == pc && *sregs == regs {
                return Execution::Diverged { steps: used };
            }
        }
        lam += 1;
        if lam == power {
            snapshot = Some((pc, regs.clone()));
            power = power.saturating_mul(2);
            lam = 0;
        }
        if let Some(c) = configs.as_mut() {
            c.push((pc, regs.clone()));
        }
        used += 1;
        match p.instrs.get(pc).unwrap_or(&Instr::Halt) {
            Instr::Halt => {
                return Execution::Halted { value: regs[0].clone(), cost: used, configs };
            }
            Instr::Inc(r) => {
                regs[*r] += 1u32;
                pc += 1;
            }
            Instr::Decjz(r, l) => {
                if regs[*r].is_zero() {
                    pc = *l;
                } else {
                    regs[*r] -= 1u32;
                    pc += 1;
                }
            }
            Instr::Set(r, c) => {
                regs[*r] = c.clone();
                pc += 1;
            }
            Instr::Sim { dst, prog, arg } => {
                let child = decode_cached(&regs[*prog]);
                match execute(&child, &[regs[*arg].clone()], budget - used, false) {
                    Execution::Halted { value, cost, .. } => {
                        used += cost;
                        regs[*dst] = value;
                        pc += 1;
                    }
                    Execution::Diverged { .. } => return Execution::Diverged { steps: used },
                    Execution::OutOfBudget => return Execution::OutOfBudget,
                }
            }
            Instr::Race { dst, left, right, arg } => {
                let l = decode_cached(&regs[*left]);
                let r = decode_cached(&regs[*right]);
                let tie = regs[*left].cmp(&regs[*right]);
                match race(&l, &r, &regs[*arg], tie, budget - used) {
                    RaceResult::Decided { verdict, cost } => {
                        used += cost;
                        regs[*dst] = BigUint::from(verdict);
                        pc += 1;
                    }
                    RaceResult::Diverged => return Execution::Diverged { steps: used },
                    RaceResult::OutOfBudget => return Execution::OutOfBudget,
                }
            }
        }
    }
}

enum Side {
    Pending(u64),
    Halted(BigUint),
    Never,
}

enum RaceResult {
    Decided { verdict: u8, cost: u64 },
    Diverged,
    OutOfBudget,
}

/// Runs both programs on `x` and reports which halts with the smaller trace
/// code: 1 for `left`, 0 for `right`. Equal traces go to the smaller program
/// code, as passed in `tie`; only identical codes give 2.
fn race(left: &Program, right: &Program, x: &BigUint, tie: std::cmp::Ordering, budget: Budget) -> RaceResult {
    let mut sides = [Side::Pending(0), Side::Pending(0)];
    let progs = [left, right];
    let mut used = 0u64;
    let mut quota = 1u64;
    loop {
        for k in 0..2 {
            if !matches!(sides[k], Side::Pending(_)) {
                continue;
            }
            let give = quota.min(budget - used);
            if give == 0 {
                return RaceResult::OutOfBudget;
            }
            sides[k] = match execute(progs[k], std::slice::from_ref(x), give, true) {
                Execution::Halted { cost, configs, .. } => {
                    used += cost;
                    Side::Halted(trace_code(cost, &configs.unwrap_or_default()))
                }
                Execution::Diverged { steps } => {
                    used += steps;
                    Side::Never
                }
                Execution::OutOfBudget => {
                    used += give;
                    if give < quota {
                        return RaceResult::OutOfBudget;
                    }
                    Side::Pending(give)
                }
            };
        }
        let decided = |verdict: u8| RaceResult::Decided { verdict, cost: used };
        // A pending side has cost > q, so its code is at least 2^(q+1).
        let beats = |y: &BigUint, q: u64| q + 1 >= y.bits();
        match (&sides[0], &sides[1]) {
            (Side::Never, Side::Never) => return RaceResult::Diverged,
            (Side::Halted(a), Side::Halted(b)) => {
                return decided(match a.cmp(b).then(tie) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Greater => 0,
                    std::cmp::Ordering::Equal => 2,
                })
            }
            (Side::Halted(_), Side::Never) => return decided(1),
            (Side::Never, Side::Halted(_)) => return decided(0),
            (Side::Halted(a), Side::Pending(q)) if beats(a, *q) => return decided(1),
            (Side::Pending(q), Side::Halted(b)) if beats(b, *q) => return decided(0),
            _ => {}
        }
        quota = quota.saturating_mul(2);
    }
}

fn to_big(args: &[u64]) -> Vec<BigUint> {
    args.iter().map(|&a| BigUint::from(a)).collect()
}

pub fn run_program(p: &Program, args: &[BigUint], b: Budget) -> Outcome {
    match execute(p, args, b, false) {
        Execution::Halted { value, .. } => Outcome::Halted(value),
        _ => Outcome::Running,
    }
}

/// `φ_i(args)` within `b` steps. Missing arguments are zero, extra ones are
/// ignored.
pub fn run(i: &Index, args: &[BigUint], b: Budget) -> Outcome {
    run_program(&i.program(), args, b)
}

pub fn run_u64(i: &Index, args: &[u64], b: Budget) -> Outcome {
    run(i, &to_big(args), b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub configs: Vec<Config>,
    pub cost: u64,
    pub output: BigUint,
}

impl Trace {
    pub fn code(&self) -> BigUint {
        trace_code(self.cost, &self.configs)
    }
}

/// The halting trace of `i` on `x`, if it halts within `b` steps.
pub fn trace(i: &Index, x: &BigUint, b: Budget) -> Option<Trace> {
    match execute(&i.program(), std::slice::from_ref(x), b, true) {
        Execution::Halted { value, cost, configs } => {
            Some(Trace { configs: configs.unwrap_or_default(), cost, output: value })
        }
        _ => None,
    }
}

/// Kleene's T: `y` is the code of the halting trace of `i` on `x`.
///
/// The cost is read off `y` and the run is replayed for exactly that many
/// steps, so this always terminates.
#[allow(non_snake_case)]
pub fn kleene_T(i: &Index, x: &BigUint, y: &BigUint) -> bool {
    let (p, s) = unpair(y);
    let Some(cost) = log2_exact(&p) else { return false };
    let Some(configs) = decode_seq(&s, MAX_LEN.max(cost as usize + 1)) else { return false };
    if configs.len() as u64 > cost {
        return false;
    }
    match trace(i, x, cost) {
        Some(t) => {
            t.cost == cost
                && t.configs.len() == configs.len()
                && t.configs.iter().zip(&configs).all(|((pc, regs), c)| config_code(*pc, regs) == *c)
        }
        None => false,
    }
}

/// An upper bound on the trace code of every run of `i` on `x` costing at most
/// `b` steps.
///
/// Registers never exceed `max(x, i) + b`. Constants and simulated programs
/// come from codes at most `i`, and each step adds at most one. The bound
/// plugs this into the trace coding with `b` configurations.
pub fn trace_code_bound(i: &Index, x: &BigUint, b: Budget) -> BigUint {
    let p = i.program();
    let top = x.max(&i.0).clone() + b;
    let regs = vec![top; p.register_count()];
    trace_code(b, &vec![(p.instrs.len(), regs); b as usize])
}

/// Extra steps the `smn` prefix adds: one `set` per fixed argument.
pub fn smn_inflation(m: usize, b: Budget) -> Budget {
    b + m as u64
}

/// `s^m_n`: an index of `zs ↦ φ_i(ys ++ zs)`.
///
/// The new program loads `ys` with `m` `set` instructions and then runs the
/// body of `i` with registers renamed. The `zs` are read where the new program
/// receives them, so they are never copied. Hence `run(smn(..), zs, b + m)`
/// and `run(i, ys ++ zs, b)` agree for every `b`. Distinct `ys` give distinct
/// `set` constants, so the map is injective in `ys`.
pub fn smn(m: usize, n: usize, i: &Index, ys: &[BigUint]) -> Index {
    assert_eq!(ys.len(), m, "smn expects exactly m fixed arguments");
    let p = i.program();
    let a = p.arity;
    let top = p.register_count();
    // Old register r of the body lives at new register map(r):
    // inputs m+1..=m+n that the body reads become new inputs 1..=n;
    // everything else moves above all new inputs.
    let base = top + n + 1;
    let map = |r: Reg| -> Reg {
        if r == 0 {
            0
        } else if r > m && r <= m + n && r <= a {
            r - m
        } else {
            base + r
        }
    };
    let mut instrs: Vec<Instr> = (1..=m)
        .map(|r| Instr::Set(map(r), if r <= a { ys[r - 1].clone() } else { BigUint::zero() }))
        .collect();
    for ins in &p.instrs {
        let moved = ins.map_registers(&map);
        instrs.push(match moved {
            Instr::Decjz(r, l) => Instr::Decjz(r, l + m),
            other => other,
        });
    }
    Program { arity: n, instrs }.encode()
}

pub fn smn_u64(m: usize, n: usize, i: &Index, ys: &[u64]) -> Index {
    smn(m, n, i, &to_big(ys))
}

/// `W_{i,s} = {x <= s : run(i, (x), s) halts}`.
pub fn dom_enum(i: &Index, s: Budget) -> BTreeSet<u64> {
    let p = i.program();
    (0..=s)
        .filter(|&x| run_program(&p, &[BigUint::from(x)], s).halted())
        .collect()
}

/// A small library of programs used throughout the crate.
pub mod programs {
    use super::*;

    fn prog(arity: usize, src: &[Instr]) -> Program {
        Program::new(arity, src.to_vec()).expect("library program is valid")
    }

    use Instr::*;

    pub fn halt_only() -> Program {
        prog(0, &[Halt])
    }

    /// `decjz 2 0` on a zero register: loops on every input.
    pub fn self_loop() -> Program {
        prog(1, &[Decjz(2, 0)])
    }

    pub fn identity() -> Program {
        prog(1, &[Decjz(1, 3), Inc(0), Decjz(2, 0), Halt])
    }

    pub fn successor() -> Program {
        prog(1, &[Decjz(1, 3), Inc(0), Decjz(2, 0), Inc(0), Halt])
    }

    pub fn constant(c: u64) -> Program {
        prog(1, &[Set(0, BigUint::from(c)), Halt])
    }

    pub fn addition() -> Program {
        prog(
            2,
            &[Decjz(1, 3), Inc(0), Decjz(3, 0), Decjz(2, 6), Inc(0), Decjz(3, 3), Halt],
        )
    }

    /// Halts iff `x ≡ r (mod m)`, only decrementing register 1.
    pub fn residue(m: usize, r: usize) -> Program {
        assert!(m >= 1 && r < m);
        let (lp, stop) = (m + 1, m + 2);
        let mut v: Vec<Instr> =
            (0..m).map(|k| Decjz(1, if k == r { stop } else { lp })).collect();
        v.extend([Decjz(2, 0), Decjz(2, lp), Halt]);
        prog(1, &v)
    }

    pub fn evens() -> Program {
        residue(2, 0)
    }

    pub fn odds() -> Program {
        residue(2, 1)
    }

    /// The characteristic function of the even numbers.
    pub fn even_indicator() -> Program {
        prog(1, &[Decjz(1, 3), Decjz(1, 5), Decjz(2, 0), Inc(0), Halt, Halt])
    }

    /// Halts exactly on the given small inputs.
    pub fn finite_set(members: &[u64]) -> Program {
        let top = members.iter().copied().max().unwrap_or(0) as usize;
        let stop = top + 3;
        let lp = top + 2;
        let mut v: Vec<Instr> = (0..=top)
            .map(|k| Decjz(1, if members.contains(&(k as u64)) { stop } else { lp }))
            .collect();
        v.push(Decjz(2, lp));
        v.push(Decjz(2, lp));
        v.push(Halt);
        if members.is_empty() {
            return self_loop();
        }
        prog(1, &v)
    }

    /// Halts exactly on the inputs not listed.
    pub fn cofinite_set(excluded: &[u64]) -> Program {
        let top = excluded.iter().copied().max().unwrap_or(0) as usize;
        let (lp, stop) = (top + 2, top + 3);
        let mut v: Vec<Instr> = (0..=top)
            .map(|k| Decjz(1, if excluded.contains(&(k as u64)) { lp } else { stop }))
            .collect();
        v.extend([Decjz(2, stop), Decjz(2, lp), Halt]);
        prog(1, &v)
    }

    /// `x ↦ φ_x(x)`; its domain is K.
    pub fn diagonal() -> Program {
        prog(1, &[Sim { dst: 0, prog: 1, arg: 1 }, Halt])
    }

    /// Halts iff `φ_x(x) = 0`.
    pub fn k_zero() -> Program {
        prog(1, &[Sim { dst: 0, prog: 1, arg: 1 }, Decjz(0, 3), Decjz(2, 2), Halt])
    }

    /// Halts iff `φ_x(x) = 1`.
    pub fn k_one() -> Program {
        prog(
            1,
            &[
                Sim { dst: 0, prog: 1, arg: 1 },
                Decjz(0, 5),
                Decjz(0, 4),
                Decjz(2, 3),
                Halt,
                Decjz(2, 5),
            ],
        )
    }

    /// `(i, j, x) ↦ race` verdict: 1 if `x` enters `W_i` first, 0 if `W_j`.
    pub fn race3() -> Program {
        prog(3, &[Race { dst: 0, left: 1, right: 2, arg: 3 }, Halt])
    }

    /// Halts on `(i, j, x)` iff `x` enters `W_i` strictly before `W_j`.
    pub fn dominance3() -> Program {
        prog(
            3,
            &[
                Race { dst: 0, left: 1, right: 2, arg: 3 },
                Decjz(0, 3),
                Decjz(0, 4),
                Decjz(4, 3),
                Halt,
            ],
        )
    }

    /// Zero steps of work: `x ↦ 0`. Useful as a constant reduction.
    pub fn zero() -> Program {
        prog(1, &[Halt])
    }
}

#[cfg(test)]
mod tests {
    use super::programs::*;
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn halt_only_round_trip_and_run() {
        let p = halt_only();
        let i = p.encode();
        assert_eq!(Program::decode(&i), p);
        assert_eq!(run(&i, &[], 1), Outcome::Halted(big(0)));
        assert_eq!(run(&i, &[], 0), Outcome::Running);
    }

    #[test]
    fn zero_decodes_to_the_diverging_program() {
        assert_eq!(Program::decode(&Index::from(0)), Program::diverging());
        assert_eq!(run_program(&Program::diverging(), &[], 1_000_000), Outcome::Running);
    }

    #[test]
    fn small_programs_compute_what_they_should() {
        assert_eq!(run_u64(&successor().encode(), &[4], 100), Outcome::Halted(big(5)));
        assert_eq!(run_u64(&identity().encode(), &[9], 100), Outcome::Halted(big(9)));
        assert_eq!(run_u64(&addition().encode(), &[3, 4], 100), Outcome::Halted(big(7)));
        assert_eq!(run_u64(&constant(6).encode(), &[1], 100), Outcome::Halted(big(6)));
        assert_eq!(run_u64(&self_loop().encode(), &[0], 1_000_000), Outcome::Running);
        for x in 0..30u64 {
            assert_eq!(run_u64(&evens().encode(), &[x], 1000).halted(), x % 2 == 0);
            assert_eq!(run_u64(&odds().encode(), &[x], 1000).halted(), x % 2 == 1);
            assert_eq!(run_u64(&residue(3, 1).encode(), &[x], 1000).halted(), x % 3 == 1);
            assert_eq!(
                run_u64(&finite_set(&[2, 5]).encode(), &[x], 1000).halted(),
                x == 2 || x == 5
            );
            assert_eq!(
                run_u64(&cofinite_set(&[2, 5]).encode(), &[x], 1000).halted(),
                x != 2 && x != 5
            );
        }
    }

    #[test]
    fn missing_arguments_are_zero() {
        assert_eq!(run_u64(&addition().encode(), &[3], 100), Outcome::Halted(big(3)));
    }

    #[test]
    fn text_format_round_trips() {
        for p in [addition(), k_one(), dominance3(), constant(12345678901234)] {
            let text = p.to_string();
            assert_eq!(text.parse::<Program>().unwrap(), p);
        }
        let p: Program = "# successor\ndecjz 1 3\ninc 0\ndecjz 2 0\ninc 0\nhalt\n".parse().unwrap();
        assert_eq!(p, successor());
        assert!("decjz 1 9\nhalt".parse::<Program>().is_err());
        assert!("jump 3".parse::<Program>().is_err());
    }

    #[test]
    fn diagonal_programs() {
        let total = zero().encode();
        let k = diagonal().encode();
        assert!(run(&k, &[total.0.clone()], 10_000).halted());
        let k0 = k_zero().encode();
        let k1 = k_one().encode();
        let c0 = constant(0).encode();
        let c1 = constant(1).encode();
        assert!(run(&k0, &[c0.0.clone()], 1000).halted());
        assert!(!run(&k1, &[c0.0.clone()], 1000).halted());
        assert!(run(&k1, &[c1.0.clone()], 1000).halted());
        assert!(!run(&k0, &[c1.0.clone()], 1000).halted());
    }

    #[test]
    fn traces_check_and_corruptions_fail() {
        let i = addition().encode();
        let x = big(3);
        let t = trace(&i, &x, 1000).unwrap();
        let y = t.code();
        assert!(kleene_T(&i, &x, &y));
        assert!(!kleene_T(&i, &x, &(&y + 1u32)));
        assert!(!kleene_T(&i, &big(4), &y));
        assert!(y >= pow2(t.cost));
        assert!(y <= trace_code_bound(&i, &x, t.cost));
    }

    #[test]
    fn smn_addition_example() {
        let c = addition().encode();
        let s = smn_u64(1, 1, &c, &[3]);
        assert_eq!(run_u64(&s, &[4], smn_inflation(1, 100)), Outcome::Halted(big(7)));
        assert_ne!(smn_u64(1, 1, &c, &[0]), smn_u64(1, 1, &c, &[1]));
    }

    #[test]
    fn dom_enum_examples() {
        assert!(dom_enum(&self_loop().encode(), 100_000).is_empty());
        let ids = dom_enum(&identity().encode(), 50);
        assert!(ids.contains(&0) && ids.contains(&10));
        assert!(dom_enum(&evens().encode(), 1000).iter().all(|x| x % 2 == 0));
    }

    #[test]
    fn race_prefers_the_earlier_trace() {
        let r = race3().encode();
        let fast = halt_only().encode();
        let slow = identity().encode();
        let never = self_loop().encode();
        let go = |a: &Index, b: &Index, x: u64| {
            run(&r, &[a.0.clone(), b.0.clone(), big(x)], 1_000_000)
        };
        assert_eq!(go(&fast, &slow, 5), Outcome::Halted(big(1)));
        assert_eq!(go(&slow, &fast, 5), Outcome::Halted(big(0)));
        assert_eq!(go(&slow, &never, 5), Outcome::Halted(big(1)));
        assert_eq!(go(&never, &slow, 5), Outcome::Halted(big(0)));
        assert_eq!(go(&slow, &slow, 5), Outcome::Halted(big(2)));
        assert_eq!(go(&never, &never, 5), Outcome::Running);
    }

    #[test]
    fn deep_self_simulation_does_not_overflow() {
        // x ↦ φ_x(x) applied to itself recurses until the budget runs out.
        let k = diagonal().encode();
        assert_eq!(run(&k, &[k.0.clone()], 50_000), Outcome::Running);
    }
}
