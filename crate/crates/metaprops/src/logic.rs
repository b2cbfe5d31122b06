//! First-order syntax: terms, formulas, the prefix text format, numerals,
//! classification into Δ₀ / Σ₁, evaluation in the standard model and Gödel
//! numbering.
//!
//! Concrete syntax:
//!
//! ```text
//! term    := 0 | var | (S t) | (+ t u) | (* t u) | (f t ...)
//! formula := (= t u) | (<= t u) | (R t ...)
//!          | (not φ) | (and φ ψ) | (or φ ψ) | (imp φ ψ)
//!          | (exists x φ) | (forall x φ) | (existsle x t φ) | (foralle x t φ)
//! ```
//!
//! Printing is the exact inverse of parsing on canonical text (single spaces,
//! no extra whitespace).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::coding::{decode_bytes, encode_bytes};

pub type Var = String;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    ExistsLe(Var, Term, Box<Formula>),
    ForallLe(Var, Term, Box<Formula>),
}

pub type Sentence = Formula;

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
    pub fn zero() -> Term {
        Term::App("0".into(), vec![])
    }
    pub fn s(t: Term) -> Term {
        Term::App("S".into(), vec![t])
    }
    pub fn add(a: Term, b: Term) -> Term {
        Term::App("+".into(), vec![a, b])
    }
    pub fn mul(a: Term, b: Term) -> Term {
        Term::App("*".into(), vec![a, b])
    }
    /// `S^k t`.
    pub fn succ_n(k: u64, mut t: Term) -> Term {
        for _ in 0..k {
            t = Term::s(t);
        }
        t
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| a.mentions(x)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn subst(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => t.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(x, t)).collect()),
        }
    }

    /// `Some(n)` when the term is literally `S^n 0`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::App(f, a) if f == "S" && a.len() == 1 => {
                    n += 1;
                    t = &a[0];
                }
                Term::App(f, a) if f == "0" && a.is_empty() => return Some(n),
                _ => return None,
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, a) => 1 + a.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }
    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Rel("<=".into(), vec![a, b])
    }
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name.into(), args)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn exists(x: &str, a: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(a))
    }
    pub fn forall(x: &str, a: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(a))
    }
    pub fn exists_le(x: &str, t: Term, a: Formula) -> Formula {
        Formula::ExistsLe(x.into(), t, Box::new(a))
    }
    pub fn forall_le(x: &str, t: Term, a: Formula) -> Formula {
        Formula::ForallLe(x.into(), t, Box::new(a))
    }
    /// `a ↔ b` as `(and (imp a b) (imp b a))`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }
    /// Right-nested conjunction; `None` when empty.
    pub fn conj(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().rev().reduce(|acc, f| Formula::and(f, acc))
    }
    /// Right-nested disjunction; `None` when empty.
    pub fn disj(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().rev().reduce(|acc, f| Formula::or(f, acc))
    }
    /// `∃x₁…∃x_k φ`.
    pub fn exists_block(vars: &[&str], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, x| Formula::exists(x, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Formula::Not(a) => a.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
            Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
                t.free_vars(out);
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Formula::Not(a) => a.all_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                out.insert(x.clone());
                a.all_vars(out);
            }
            Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
                out.insert(x.clone());
                t.free_vars(out);
                a.all_vars(out);
            }
        }
    }

    /// Capture-avoiding substitution `φ[x := t]`.
    pub fn subst(&self, x: &str, t: &Term) -> Formula {
        let mut tv = BTreeSet::new();
        t.free_vars(&mut tv);
        self.subst_inner(x, t, &tv)
    }

    fn subst_inner(&self, x: &str, t: &Term, tv: &BTreeSet<Var>) -> Formula {
        let bind = |y: &Var, body: &Formula| -> (Var, Formula) {
            if tv.contains(y) {
                let mut used = tv.clone();
                body.all_vars(&mut used);
                used.insert(x.to_string());
                let fresh = fresh_var(y, &used);
                let renamed = body.subst_inner(y, &Term::Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                (fresh, renamed.subst_inner(x, t, tv))
            } else {
                (y.clone(), body.subst_inner(x, t, tv))
            }
        };
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.subst(x, t), b.subst(x, t)),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| a.subst(x, t)).collect()),
            Formula::Not(a) => Formula::not(a.subst_inner(x, t, tv)),
            Formula::And(a, b) => Formula::and(a.subst_inner(x, t, tv), b.subst_inner(x, t, tv)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(x, t, tv), b.subst_inner(x, t, tv)),
            Formula::Imp(a, b) => Formula::imp(a.subst_inner(x, t, tv), b.subst_inner(x, t, tv)),
            Formula::Exists(y, _) | Formula::Forall(y, _) if y == x => self.clone(),
            Formula::Exists(y, a) => {
                let (y, a) = bind(y, a);
                Formula::Exists(y, Box::new(a))
            }
            Formula::Forall(y, a) => {
                let (y, a) = bind(y, a);
                Formula::Forall(y, Box::new(a))
            }
            Formula::ExistsLe(y, b, a) if y == x => Formula::ExistsLe(y.clone(), b.subst(x, t), a.clone()),
            Formula::ForallLe(y, b, a) if y == x => Formula::ForallLe(y.clone(), b.subst(x, t), a.clone()),
            Formula::ExistsLe(y, b, a) => {
                let b = b.subst(x, t);
                let (y, a) = bind(y, a);
                Formula::ExistsLe(y, b, Box::new(a))
            }
            Formula::ForallLe(y, b, a) => {
                let b = b.subst(x, t);
                let (y, a) = bind(y, a);
                Formula::ForallLe(y, b, Box::new(a))
            }
        }
    }

    /// Instantiates free variables with numerals.
    pub fn instantiate(&self, vals: &[(&str, u64)]) -> Formula {
        vals.iter().fold(self.clone(), |f, (x, n)| f.subst(x, &numeral(*n)))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::Rel(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.size(),
            Formula::ExistsLe(_, t, a) | Formula::ForallLe(_, t, a) => 1 + t.size() + a.size(),
        }
    }

    /// Quantifier rank, counting bounded quantifiers too.
    pub fn rank(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => 0,
            Formula::Not(a) => a.rank(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.rank().max(b.rank()),
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.rank(),
            Formula::ExistsLe(_, _, a) | Formula::ForallLe(_, _, a) => 1 + a.rank(),
        }
    }

    /// Negation normal form: `imp` is unfolded and negations sit on atoms.
    pub fn nnf(&self) -> Formula {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, pos: bool) -> Formula {
        match (self, pos) {
            (Formula::Eq(..) | Formula::Rel(..), true) => self.clone(),
            (Formula::Eq(..) | Formula::Rel(..), false) => Formula::not(self.clone()),
            (Formula::Not(a), _) => a.nnf_pol(!pos),
            (Formula::And(a, b), true) => Formula::and(a.nnf_pol(true), b.nnf_pol(true)),
            (Formula::And(a, b), false) => Formula::or(a.nnf_pol(false), b.nnf_pol(false)),
            (Formula::Or(a, b), true) => Formula::or(a.nnf_pol(true), b.nnf_pol(true)),
            (Formula::Or(a, b), false) => Formula::and(a.nnf_pol(false), b.nnf_pol(false)),
            (Formula::Imp(a, b), true) => Formula::or(a.nnf_pol(false), b.nnf_pol(true)),
            (Formula::Imp(a, b), false) => Formula::and(a.nnf_pol(true), b.nnf_pol(false)),
            (Formula::Exists(x, a), true) => Formula::exists(x, a.nnf_pol(true)),
            (Formula::Exists(x, a), false) => Formula::forall(x, a.nnf_pol(false)),
            (Formula::Forall(x, a), true) => Formula::forall(x, a.nnf_pol(true)),
            (Formula::Forall(x, a), false) => Formula::exists(x, a.nnf_pol(false)),
            (Formula::ExistsLe(x, t, a), true) => Formula::exists_le(x, t.clone(), a.nnf_pol(true)),
            (Formula::ExistsLe(x, t, a), false) => Formula::forall_le(x, t.clone(), a.nnf_pol(false)),
            (Formula::ForallLe(x, t, a), true) => Formula::forall_le(x, t.clone(), a.nnf_pol(true)),
            (Formula::ForallLe(x, t, a), false) => Formula::exists_le(x, t.clone(), a.nnf_pol(false)),
        }
    }

    /// Bounded quantifiers whose bound mentions their own variable.
    pub fn well_scoped(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.well_scoped(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.well_scoped() && b.well_scoped(),
            Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => !t.mentions(x) && a.well_scoped(),
        }
    }
}

fn fresh_var(base: &str, used: &BTreeSet<Var>) -> Var {
    std::iter::once(base.to_string())
        .chain((0..).map(|k| format!("{base}_{k}")))
        .find(|v| !used.contains(v))
        .expect("an unused name exists")
}

/// `n̄ = S^n 0`.
pub fn numeral(n: u64) -> Term {
    Term::succ_n(n, Term::zero())
}

// ---------------------------------------------------------------------------
// Signatures

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub constants: Vec<String>,
    pub functions: Vec<(String, usize)>,
    pub relations: Vec<(String, usize)>,
    /// Relation families such as `P0, P1, …`: every name `prefix<digits>`
    /// is a relation of the given arity.
    pub relation_families: Vec<(String, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` is not in the signature")]
    MissingSymbol(String),
    #[error("symbol `{0}` used with {1} arguments")]
    WrongArity(String, usize),
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("a bounded quantifier's bound mentions its own variable")]
    BadBound,
}

impl Signature {
    pub fn new(
        constants: &[&str],
        functions: &[(&str, usize)],
        relations: &[(&str, usize)],
    ) -> Result<Signature, SignatureError> {
        let sig = Signature {
            constants: constants.iter().map(|s| s.to_string()).collect(),
            functions: functions.iter().map(|(s, a)| (s.to_string(), *a)).collect(),
            relations: relations.iter().map(|(s, a)| (s.to_string(), *a)).collect(),
            relation_families: vec![],
        };
        let mut seen = BTreeSet::new();
        for name in sig
            .constants
            .iter()
            .chain(sig.functions.iter().map(|f| &f.0))
            .chain(sig.relations.iter().map(|r| &r.0))
        {
            if !seen.insert(name.clone()) {
                return Err(SignatureError::Duplicate(name.clone()));
            }
        }
        Ok(sig)
    }

    /// `{0, S, +, ×, ≤}`.
    pub fn arithmetic() -> Signature {
        Signature::new(&["0"], &[("S", 1), ("+", 2), ("*", 2)], &[("<=", 2)]).expect("distinct")
    }

    /// `{0, S}`.
    pub fn successor() -> Signature {
        Signature::new(&["0"], &[("S", 1)], &[]).expect("distinct")
    }

    /// `{E}`.
    pub fn janiczak() -> Signature {
        Signature::new(&[], &[], &[("E", 2)]).expect("distinct")
    }

    pub fn with_family(mut self, prefix: &str, arity: usize) -> Signature {
        self.relation_families.push((prefix.to_string(), arity));
        self
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Signature {
        self.relations.push((name.to_string(), arity));
        self
    }

    pub fn has_constant(&self, c: &str) -> bool {
        self.constants.iter().any(|k| k == c)
    }

    pub fn has_function(&self, f: &str, arity: usize) -> bool {
        self.functions.iter().any(|(g, a)| g == f && *a == arity)
    }

    fn relation_arity(&self, r: &str) -> Option<usize> {
        if let Some((_, a)) = self.relations.iter().find(|(s, _)| s == r) {
            return Some(*a);
        }
        self.relation_families.iter().find_map(|(p, a)| {
            let rest = r.strip_prefix(p.as_str())?;
            (!rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())).then_some(*a)
        })
    }

    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) if args.is_empty() => {
                if self.has_constant(f) {
                    Ok(())
                } else {
                    Err(SignatureError::MissingSymbol(f.clone()))
                }
            }
            Term::App(f, args) => {
                match self.functions.iter().find(|(g, _)| g == f) {
                    None => return Err(SignatureError::MissingSymbol(f.clone())),
                    Some((_, a)) if *a != args.len() => {
                        return Err(SignatureError::WrongArity(f.clone(), args.len()))
                    }
                    _ => {}
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn check(&self, phi: &Formula) -> Result<(), SignatureError> {
        match phi {
            Formula::Eq(a, b) => {
                self.check_term(a)?;
                self.check_term(b)
            }
            Formula::Rel(r, args) => {
                match self.relation_arity(r) {
                    None => return Err(SignatureError::MissingSymbol(r.clone())),
                    Some(a) if a != args.len() => return Err(SignatureError::WrongArity(r.clone(), args.len())),
                    _ => {}
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => self.check(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
                if t.mentions(x) {
                    return Err(SignatureError::BadBound);
                }
                self.check_term(t)?;
                self.check(a)
            }
        }
    }

    /// `n̄` over this signature.
    pub fn numeral(&self, n: u64) -> Result<Term, SignatureError> {
        if !self.has_constant("0") {
            return Err(SignatureError::MissingSymbol("0".into()));
        }
        if n > 0 && !self.has_function("S", 1) {
            return Err(SignatureError::MissingSymbol("S".into()));
        }
        Ok(numeral(n))
    }
}

// ---------------------------------------------------------------------------
// Printing and parsing

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(g, args) if args.is_empty() => f.write_str(g),
            Term::App(g, args) => {
                write!(f, "({g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Rel(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Exists(x, a) => write!(f, "(exists {x} {a})"),
            Formula::Forall(x, a) => write!(f, "(forall {x} {a})"),
            Formula::ExistsLe(x, t, a) => write!(f, "(existsle {x} {t} {a})"),
            Formula::ForallLe(x, t, a) => write!(f, "(foralle {x} {t} {a})"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected `{0}`")]
    Unexpected(String),
    #[error("trailing input after the formula")]
    Trailing,
    #[error("`{0}` is not a variable name")]
    BadVariable(String),
    #[error("`{0}` is not a valid term")]
    BadTerm(String),
    #[error("a bounded quantifier's bound mentions its own variable")]
    BadBound,
}

const KEYWORDS: &[&str] = &["=", "not", "and", "or", "imp", "exists", "forall", "existsle", "foralle"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(s: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push(Tok::Open);
                i += 1;
            }
            b')' => {
                out.push(Tok::Close);
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b'(' | b')') && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                out.push(Tok::Atom(&s[start..i]));
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

fn is_var_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
        && s != "S"
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<Tok<'a>, ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or(ParseError::Eof)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            Tok::Close => Ok(()),
            Tok::Open => Err(ParseError::Unexpected("(".into())),
            Tok::Atom(a) => Err(ParseError::Unexpected(a.into())),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.next()? {
            Tok::Atom(a) if is_var_name(a) => Ok(a.to_string()),
            Tok::Atom(a) => Err(ParseError::BadVariable(a.into())),
            Tok::Open => Err(ParseError::BadVariable("(".into())),
            Tok::Close => Err(ParseError::BadVariable(")".into())),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.next()? {
            Tok::Atom("0") => Ok(Term::zero()),
            Tok::Atom(a) if is_var_name(a) => Ok(Term::Var(a.to_string())),
            Tok::Atom(a) => Err(ParseError::BadTerm(a.into())),
            Tok::Close => Err(ParseError::Unexpected(")".into())),
            Tok::Open => {
                let head = match self.next()? {
                    Tok::Atom(a) if !KEYWORDS.contains(&a) && a != "0" => a.to_string(),
                    Tok::Atom(a) => return Err(ParseError::BadTerm(a.into())),
                    _ => return Err(ParseError::BadTerm("(".into())),
                };
                let mut args = Vec::new();
                while self.toks.get(self.pos) != Some(&Tok::Close) {
                    args.push(self.term()?);
                }
                self.pos += 1;
                if args.is_empty() {
                    return Err(ParseError::BadTerm(format!("({head})")));
                }
                Ok(Term::App(head, args))
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.next()? {
            Tok::Open => {}
            Tok::Close => return Err(ParseError::Unexpected(")".into())),
            Tok::Atom(a) => return Err(ParseError::Unexpected(a.into())),
        }
        let head = match self.next()? {
            Tok::Atom(a) => a,
            Tok::Open => return Err(ParseError::Unexpected("(".into())),
            Tok::Close => return Err(ParseError::Unexpected(")".into())),
        };
        let f = match head {
            "=" => {
                let a = self.term()?;
                Formula::Eq(a, self.term()?)
            }
            "not" => Formula::not(self.formula()?),
            "and" | "or" | "imp" => {
                let a = self.formula()?;
                let b = self.formula()?;
                match head {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::imp(a, b),
                }
            }
            "exists" | "forall" => {
                let x = self.var()?;
                let a = self.formula()?;
                if head == "exists" {
                    Formula::exists(&x, a)
                } else {
                    Formula::forall(&x, a)
                }
            }
            "existsle" | "foralle" => {
                let x = self.var()?;
                let t = self.term()?;
                if t.mentions(&x) {
                    return Err(ParseError::BadBound);
                }
                let a = self.formula()?;
                if head == "existsle" {
                    Formula::exists_le(&x, t, a)
                } else {
                    Formula::forall_le(&x, t, a)
                }
            }
            rel => {
                if rel == "0" || rel == "S" {
                    return Err(ParseError::Unexpected(rel.into()));
                }
                let mut args = Vec::new();
                while self.toks.get(self.pos) != Some(&Tok::Close) {
                    args.push(self.term()?);
                }
                Formula::Rel(rel.to_string(), args)
            }
        };
        self.expect_close()?;
        Ok(f)
    }
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Formula, ParseError> {
        let mut p = Parser { toks: tokenize(s), pos: 0 };
        let f = p.formula()?;
        if p.pos != p.toks.len() {
            return Err(ParseError::Trailing);
        }
        Ok(f)
    }
}

impl FromStr for Term {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Term, ParseError> {
        let mut p = Parser { toks: tokenize(s), pos: 0 };
        let t = p.term()?;
        if p.pos != p.toks.len() {
            return Err(ParseError::Trailing);
        }
        Ok(t)
    }
}

// ---------------------------------------------------------------------------
// Classification and evaluation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Delta0,
    Sigma1,
    Other,
}

pub fn is_delta0(phi: &Formula) -> bool {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::Not(a) => is_delta0(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => is_delta0(a) && is_delta0(b),
        Formula::Exists(..) | Formula::Forall(..) => false,
        Formula::ExistsLe(_, _, a) | Formula::ForallLe(_, _, a) => is_delta0(a),
    }
}

/// Strips a leading block of unbounded `∃`.
pub fn sigma1_parts(phi: &Formula) -> Option<(Vec<Var>, &Formula)> {
    let mut vars = Vec::new();
    let mut cur = phi;
    while let Formula::Exists(x, a) = cur {
        vars.push(x.clone());
        cur = a;
    }
    is_delta0(cur).then_some((vars, cur))
}

pub fn classify(phi: &Formula) -> Class {
    if is_delta0(phi) {
        Class::Delta0
    } else if sigma1_parts(phi).is_some() {
        Class::Sigma1
    } else {
        Class::Other
    }
}

/// `∃y₁…∃y_k M` ↦ `∃w ∃y₁≤w … ∃y_k≤w M`, a single unbounded `∃` over a Δ₀
/// matrix. Formulas with at most one leading `∃` are returned unchanged.
pub fn pack_sigma1(phi: &Formula) -> Option<Formula> {
    let (vars, matrix) = sigma1_parts(phi)?;
    if vars.len() <= 1 {
        return Some(phi.clone());
    }
    let mut used = BTreeSet::new();
    phi.all_vars(&mut used);
    let w = fresh_var("w", &used);
    let inner = vars
        .iter()
        .rev()
        .fold(matrix.clone(), |acc, y| Formula::exists_le(y, Term::Var(w.clone()), acc));
    Some(Formula::exists(&w, inner))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("symbol `{0}` has no standard interpretation")]
    UnsupportedSymbol(String),
    #[error("unbounded quantifier in a Δ₀ evaluation")]
    NotDelta0,
    #[error("arithmetic overflow")]
    Overflow,
}

pub type Env = BTreeMap<Var, u64>;

pub fn eval_term(t: &Term, env: &Env) -> Result<u64, EvalError> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::App(f, args) => {
            let vals = args.iter().map(|a| eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
            match (f.as_str(), vals.as_slice()) {
                ("0", []) => Ok(0),
                ("S", [a]) => a.checked_add(1).ok_or(EvalError::Overflow),
                ("+", [a, b]) => a.checked_add(*b).ok_or(EvalError::Overflow),
                ("*", [a, b]) => a.checked_mul(*b).ok_or(EvalError::Overflow),
                _ => Err(EvalError::UnsupportedSymbol(f.clone())),
            }
        }
    }
}

/// Truth in ⟨ℕ, 0, S, +, ×, ≤⟩. Bounded quantifiers enumerate `0..=bound`.
pub fn eval_delta0(phi: &Formula, env: &Env) -> Result<bool, EvalError> {
    let mut env = env.clone();
    eval_rec(phi, &mut env)
}

fn eval_rec(phi: &Formula, env: &mut Env) -> Result<bool, EvalError> {
    match phi {
        Formula::Eq(a, b) => Ok(eval_term(a, env)? == eval_term(b, env)?),
        Formula::Rel(r, args) if r == "<=" && args.len() == 2 => {
            Ok(eval_term(&args[0], env)? <= eval_term(&args[1], env)?)
        }
        Formula::Rel(r, _) => Err(EvalError::UnsupportedSymbol(r.clone())),
        Formula::Not(a) => Ok(!eval_rec(a, env)?),
        Formula::And(a, b) => Ok(eval_rec(a, env)? && eval_rec(b, env)?),
        Formula::Or(a, b) => Ok(eval_rec(a, env)? || eval_rec(b, env)?),
        Formula::Imp(a, b) => Ok(!eval_rec(a, env)? || eval_rec(b, env)?),
        Formula::Exists(..) | Formula::Forall(..) => Err(EvalError::NotDelta0),
        Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
            let bound = eval_term(t, env)?;
            let want = matches!(phi, Formula::ExistsLe(..));
            let saved = env.get(x).copied();
            let mut result = !want;
            for v in 0..=bound {
                env.insert(x.clone(), v);
                if eval_rec(a, env)? == want {
                    result = want;
                    break;
                }
            }
            match saved {
                Some(v) => env.insert(x.clone(), v),
                None => env.remove(x),
            };
            Ok(result)
        }
    }
}

/// The witness tuples of length `k` with entries `<= b`, ordered by their
/// largest entry first and lexicographically within one largest entry.
pub fn witness_tuples(k: usize, b: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..=b).flat_map(move |m| tuples_with_max(k, m))
}

fn tuples_with_max(k: usize, m: u64) -> Vec<Vec<u64>> {
    if k == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; k];
    loop {
        if cur.iter().any(|&c| c == m) {
            out.push(cur.clone());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < m {
                cur[pos] += 1;
                for c in cur.iter_mut().skip(pos + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sigma1Result {
    True(Vec<u64>),
    Unknown,
}

/// Searches witnesses with entries `<= b` for a Σ₁ sentence. The first hit in
/// `witness_tuples` order is returned, so the answer is monotone in `b`.
pub fn eval_sigma1(phi: &Formula, b: u64) -> Result<Sigma1Result, EvalError> {
    let (vars, matrix) = sigma1_parts(phi).ok_or(EvalError::NotDelta0)?;
    let mut env = Env::new();
    for w in witness_tuples(vars.len(), b) {
        for (x, v) in vars.iter().zip(&w) {
            env.insert(x.clone(), *v);
        }
        if eval_rec(matrix, &mut env)? {
            return Ok(Sigma1Result::True(w));
        }
    }
    Ok(Sigma1Result::Unknown)
}

// ---------------------------------------------------------------------------
// Gödel numbering

/// `⌜φ⌝`.
///
/// The sentences `A_n` and `χ_m` of the derived theories get the compact
/// codes `3n` and `3m+1`; every other formula is coded as `3c+2`, where `c`
/// is the sequence code of the bytes of its canonical text.
pub fn goedel(phi: &Formula) -> BigUint {
    crate::theories::family_goedel(phi)
        .unwrap_or_else(|| encode_bytes(phi.to_string().as_bytes()) * 3u32 + 2u32)
}

/// Inverse of `goedel`; `None` on naturals that are not codes, and on family
/// codes too large to write out.
pub fn ungoedel(code: &BigUint) -> Option<Formula> {
    let (q, r) = code.div_rem(&BigUint::from(3u32));
    let r = r.to_u32().expect("remainder below 3");
    if r < 2 {
        return crate::theories::family_ungoedel(r, &q);
    }
    let bytes = decode_bytes(&q, 1 << 20)?;
    let text = String::from_utf8(bytes).ok()?;
    let phi: Formula = text.parse().ok()?;
    (phi.to_string() == text && goedel(&phi) == *code).then_some(phi)
}
