//! Propositional combinations of the atoms `p_n`.
//!
//! Text syntax: `p3`, `top`, `bot`, `(not c)`, `(and c ...)`, `(or c ...)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BooleanCombo {
    Top,
    Bot,
    Atom(u64),
    Not(Box<BooleanCombo>),
    And(Vec<BooleanCombo>),
    Or(Vec<BooleanCombo>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComboParseError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected token `{0}`")]
    Token(String),
    #[error("trailing input after combination")]
    Trailing,
}

impl BooleanCombo {
    pub fn atom(n: u64) -> BooleanCombo {
        BooleanCombo::Atom(n)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: BooleanCombo) -> BooleanCombo {
        BooleanCombo::Not(Box::new(c))
    }

    /// The support: atoms that occur.
    pub fn atoms(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<u64>) {
        match self {
            BooleanCombo::Top | BooleanCombo::Bot => {}
            BooleanCombo::Atom(n) => {
                out.insert(*n);
            }
            BooleanCombo::Not(c) => c.collect(out),
            BooleanCombo::And(cs) | BooleanCombo::Or(cs) => cs.iter().for_each(|c| c.collect(out)),
        }
    }

    pub fn eval(&self, v: &dyn Fn(u64) -> bool) -> bool {
        match self {
            BooleanCombo::Top => true,
            BooleanCombo::Bot => false,
            BooleanCombo::Atom(n) => v(*n),
            BooleanCombo::Not(c) => !c.eval(v),
            BooleanCombo::And(cs) => cs.iter().all(|c| c.eval(v)),
            BooleanCombo::Or(cs) => cs.iter().any(|c| c.eval(v)),
        }
    }

    /// Truth table over `vars`, first variable most significant: entry `k`
    /// is the value when `vars[i]` is bit `len-1-i` of `k`.
    pub fn truth_table(&self, vars: &[u64]) -> Vec<bool> {
        let k = vars.len();
        (0..1usize << k)
            .map(|row| {
                self.eval(&|n| {
                    let pos = vars.iter().position(|&v| v == n).expect("atom in vars");
                    row >> (k - 1 - pos) & 1 == 1
                })
            })
            .collect()
    }

    /// The simplest combination with the given table: a constant, a literal,
    /// or a disjunction of minterms over the variables the table depends on.
    pub fn from_table(vars: &[u64], table: &[bool]) -> BooleanCombo {
        let k = vars.len();
        assert_eq!(table.len(), 1 << k);
        let essential: Vec<usize> = (0..k)
            .filter(|&i| {
                let bit = 1 << (k - 1 - i);
                (0..table.len()).any(|r| table[r] != table[r ^ bit])
            })
            .collect();
        let row_of = |assign: usize| -> usize {
            let mut row = 0;
            for (j, &i) in essential.iter().enumerate() {
                if assign >> (essential.len() - 1 - j) & 1 == 1 {
                    row |= 1 << (k - 1 - i);
                }
            }
            row
        };
        let rows: Vec<usize> = (0..1usize << essential.len()).filter(|&a| table[row_of(a)]).collect();
        match (essential.len(), rows.as_slice()) {
            (0, []) => BooleanCombo::Bot,
            (0, _) => BooleanCombo::Top,
            (1, [1]) => BooleanCombo::Atom(vars[essential[0]]),
            (1, [0]) => BooleanCombo::not(BooleanCombo::Atom(vars[essential[0]])),
            _ => {
                let e = essential.len();
                let minterm = |a: usize| {
                    BooleanCombo::And(
                        essential
                            .iter()
                            .enumerate()
                            .map(|(j, &i)| {
                                let lit = BooleanCombo::Atom(vars[i]);
                                if a >> (e - 1 - j) & 1 == 1 {
                                    lit
                                } else {
                                    BooleanCombo::not(lit)
                                }
                            })
                            .collect(),
                    )
                };
                match rows.as_slice() {
                    [a] => minterm(*a),
                    _ => BooleanCombo::Or(rows.iter().map(|&a| minterm(a)).collect()),
                }
            }
        }
    }
}

impl fmt::Display for BooleanCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanCombo::Top => write!(f, "top"),
            BooleanCombo::Bot => write!(f, "bot"),
            BooleanCombo::Atom(n) => write!(f, "p{n}"),
            BooleanCombo::Not(c) => write!(f, "(not {c})"),
            BooleanCombo::And(cs) | BooleanCombo::Or(cs) => {
                write!(f, "({}", if matches!(self, BooleanCombo::And(_)) { "and" } else { "or" })?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokens(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn parse_at(toks: &[String], pos: &mut usize) -> Result<BooleanCombo, ComboParseError> {
    let tok = toks.get(*pos).ok_or(ComboParseError::Eof)?.clone();
    *pos += 1;
    match tok.as_str() {
        "top" => Ok(BooleanCombo::Top),
        "bot" => Ok(BooleanCombo::Bot),
        "(" => {
            let head = toks.get(*pos).ok_or(ComboParseError::Eof)?.clone();
            *pos += 1;
            let mut args = Vec::new();
            while toks.get(*pos).map(String::as_str) != Some(")") {
                if *pos >= toks.len() {
                    return Err(ComboParseError::Eof);
                }
                args.push(parse_at(toks, pos)?);
            }
            *pos += 1;
            match (head.as_str(), args.len()) {
                ("not", 1) => Ok(BooleanCombo::not(args.pop().expect("one"))),
                ("and", n) if n >= 1 => Ok(BooleanCombo::And(args)),
                ("or", n) if n >= 1 => Ok(BooleanCombo::Or(args)),
                _ => Err(ComboParseError::Token(head)),
            }
        }
        t => t
            .strip_prefix('p')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
            .map(BooleanCombo::Atom)
            .ok_or_else(|| ComboParseError::Token(t.to_string())),
    }
}

impl FromStr for BooleanCombo {
    type Err = ComboParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokens(s);
        let mut pos = 0;
        let c = parse_at(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(ComboParseError::Trailing);
        }
        Ok(c)
    }
}

/// All assignments to `vars`, as predicates, in truth-table row order.
pub(crate) fn assignments(vars: &[u64]) -> impl Iterator<Item = Vec<(u64, bool)>> + '_ {
    let k = vars.len();
    (0..1usize << k).map(move |row| {
        vars.iter().enumerate().map(|(i, &v)| (v, row >> (k - 1 - i) & 1 == 1)).collect()
    })
}

pub(crate) fn lookup(assign: &[(u64, bool)], n: u64) -> bool {
    assign.iter().find(|(v, _)| *v == n).map(|(_, b)| *b).unwrap_or(false)
}
