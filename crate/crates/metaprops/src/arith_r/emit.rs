//! Certificate emission. Proofs are built as trees while deciding each
//! formula and flattened into the cited axiom set at the end.

use std::collections::BTreeSet;

use super::{
    arithmetize, instances, witness_compare, ArithError, AxKey, CertKind, Certificate, Scheme,
    WitnessComparison, SCHEMA,
};
use crate::logic::{eval_sigma1, numeral, sigma1_parts, Env, Formula, Sigma1Result, Term};
use crate::machine::Index;
use crate::resets::DisjointPair;

enum Proof {
    Ax(Scheme, Vec<u64>),
    All(Vec<Proof>),
}

impl Proof {
    fn none() -> Proof {
        Proof::All(vec![])
    }

    fn flatten(&self, out: &mut BTreeSet<AxKey>) {
        match self {
            Proof::Ax(s, p) => {
                out.insert((*s, p.clone()));
            }
            Proof::All(ps) => ps.iter().for_each(|p| p.flatten(out)),
        }
    }
}

fn eval_err(e: impl std::fmt::Display) -> ArithError {
    ArithError::Eval(e.to_string())
}

fn term(t: &Term, env: &Env) -> Result<(u64, Proof), ArithError> {
    match t {
        Term::Var(v) => env.get(v).map(|&n| (n, Proof::none())).ok_or_else(|| eval_err(format!("unbound {v}"))),
        Term::App(f, args) => {
            let mut vals = Vec::new();
            let mut proofs = Vec::new();
            for a in args {
                let (n, p) = term(a, env)?;
                vals.push(n);
                proofs.push(p);
            }
            let n = match (f.as_str(), vals.as_slice()) {
                ("0", []) => 0,
                ("S", [a]) => a.checked_add(1).ok_or_else(|| eval_err("overflow"))?,
                ("+", [a, b]) => {
                    proofs.push(Proof::Ax(Scheme::Ax1, vec![*a, *b]));
                    a.checked_add(*b).ok_or_else(|| eval_err("overflow"))?
                }
                ("*", [a, b]) => {
                    proofs.push(Proof::Ax(Scheme::Ax2, vec![*a, *b]));
                    a.checked_mul(*b).ok_or_else(|| eval_err("overflow"))?
                }
                _ => return Err(eval_err(format!("symbol {f}"))),
            };
            Ok((n, Proof::All(proofs)))
        }
    }
}

/// Decides a Δ₀ formula under `env` and returns the proof of its value.
fn decide(phi: &Formula, env: &mut Env) -> Result<(bool, Proof), ArithError> {
    Ok(match phi {
        Formula::Eq(a, b) => {
            let ((x, pa), (y, pb)) = (term(a, env)?, term(b, env)?);
            let mut ps = vec![pa, pb];
            if x != y {
                ps.push(Proof::Ax(Scheme::Ax3, vec![x, y]));
            }
            (x == y, Proof::All(ps))
        }
        Formula::Rel(r, args) if r == "<=" && args.len() == 2 => {
            let ((x, pa), (y, pb)) = (term(&args[0], env)?, term(&args[1], env)?);
            let mut ps = vec![pa, pb];
            if x <= y {
                ps.push(Proof::Ax(Scheme::Ax1, vec![y - x, x]));
            } else {
                ps.push(Proof::Ax(Scheme::Ax4, vec![y]));
                ps.extend((0..=y).map(|i| Proof::Ax(Scheme::Ax3, vec![x, i])));
            }
            (x <= y, Proof::All(ps))
        }
        Formula::Rel(r, _) => return Err(eval_err(format!("relation {r}"))),
        Formula::Not(a) => {
            let (v, p) = decide(a, env)?;
            (!v, p)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            // The left value that settles the connective on its own.
            let settles = match phi {
                Formula::And(..) => false,
                Formula::Or(..) => true,
                _ => false,
            };
            let (va, pa) = decide(a, env)?;
            if va == settles {
                let value = !matches!(phi, Formula::And(..));
                return Ok((value, pa));
            }
            let (vb, pb) = decide(b, env)?;
            (vb, Proof::All(vec![pa, pb]))
        }
        Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
            let want = matches!(phi, Formula::ExistsLe(..));
            let (bound, pt) = term(t, env)?;
            let saved = env.get(x).copied();
            let mut hit = None;
            let mut all = vec![pt, Proof::Ax(Scheme::Ax4, vec![bound])];
            for i in 0..=bound {
                env.insert(x.clone(), i);
                let (v, p) = decide(a, env)?;
                if v == want {
                    hit = Some((i, p));
                    break;
                }
                all.push(p);
            }
            match saved {
                Some(v) => env.insert(x.clone(), v),
                None => env.remove(x),
            };
            match hit {
                Some((i, p)) => {
                    let pt = all.swap_remove(0);
                    (want, Proof::All(vec![pt, p, Proof::Ax(Scheme::Ax1, vec![bound - i, i])]))
                }
                None => (!want, Proof::All(all)),
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => return Err(eval_err("unbounded quantifier")),
    })
}

fn prove_true(phi: &Formula, env: &mut Env) -> Result<Proof, ArithError> {
    match decide(phi, env)? {
        (true, p) => Ok(p),
        (false, _) => Err(eval_err(format!("not true: {phi}"))),
    }
}

fn prove_false(phi: &Formula, env: &mut Env) -> Result<Proof, ArithError> {
    match decide(phi, env)? {
        (false, p) => Ok(p),
        (true, _) => Err(eval_err(format!("not false: {phi}"))),
    }
}

/// Values of `v` compatible with an NNF formula in which atoms mentioning
/// `y` are read as true: a finite set, or the complement of one.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Values {
    Only(BTreeSet<u64>),
    Except(BTreeSet<u64>),
}

impl Values {
    fn everything() -> Values {
        Values::Except(BTreeSet::new())
    }
    fn nothing() -> Values {
        Values::Only(BTreeSet::new())
    }
    fn meet(self, other: Values) -> Values {
        use Values::*;
        match (self, other) {
            (Only(a), Only(b)) => Only(a.intersection(&b).copied().collect()),
            (Only(a), Except(b)) | (Except(b), Only(a)) => Only(a.difference(&b).copied().collect()),
            (Except(a), Except(b)) => Except(a.union(&b).copied().collect()),
        }
    }
    fn join(self, other: Values) -> Values {
        use Values::*;
        match (self, other) {
            (Only(a), Only(b)) => Only(a.union(&b).copied().collect()),
            (Only(a), Except(b)) | (Except(b), Only(a)) => Except(b.difference(&a).copied().collect()),
            (Except(a), Except(b)) => Except(a.intersection(&b).copied().collect()),
        }
    }
}

fn literal_values(atom: &Formula, positive: bool, v: &str, y: &str, env: &mut Env) -> Result<(Values, Proof), ArithError> {
    let mentions = |x: &str| match atom {
        Formula::Eq(a, b) => a.mentions(x) || b.mentions(x),
        Formula::Rel(_, args) => args.iter().any(|t| t.mentions(x)),
        _ => false,
    };
    if mentions(y) {
        return Ok((Values::everything(), Proof::none()));
    }
    if mentions(v) {
        let other = match atom {
            Formula::Eq(Term::Var(a), t) | Formula::Eq(t, Term::Var(a)) if a == v && !t.mentions(v) => t,
            _ => return Err(eval_err(format!("unsupported atom {atom}"))),
        };
        let (n, p) = term(other, env)?;
        let set = BTreeSet::from([n]);
        return Ok((if positive { Values::Only(set) } else { Values::Except(set) }, p));
    }
    let (truth, p) = decide(atom, env)?;
    Ok((if truth == positive { Values::everything() } else { Values::nothing() }, p))
}

fn values(phi: &Formula, v: &str, y: &str, env: &mut Env) -> Result<(Values, Proof), ArithError> {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => literal_values(phi, true, v, y, env),
        Formula::Not(a) if matches!(**a, Formula::Eq(..) | Formula::Rel(..)) => literal_values(a, false, v, y, env),
        Formula::And(a, b) => {
            let (sa, pa) = values(a, v, y, env)?;
            if sa == Values::nothing() {
                return Ok((sa, pa));
            }
            let (sb, pb) = values(b, v, y, env)?;
            Ok((sa.meet(sb), Proof::All(vec![pa, pb])))
        }
        Formula::Or(a, b) => {
            let (sa, pa) = values(a, v, y, env)?;
            if sa == Values::everything() {
                return Ok((sa, pa));
            }
            let (sb, pb) = values(b, v, y, env)?;
            Ok((sa.join(sb), Proof::All(vec![pa, pb])))
        }
        Formula::ExistsLe(k, t, a) | Formula::ForallLe(k, t, a) => {
            let exists = matches!(phi, Formula::ExistsLe(..));
            let (bound, pt) = term(t, env)?;
            let mut acc = if exists { Values::nothing() } else { Values::everything() };
            let mut ps = vec![pt, Proof::Ax(Scheme::Ax4, vec![bound])];
            let saved = env.get(k).copied();
            for i in 0..=bound {
                env.insert(k.clone(), i);
                let (s, p) = values(a, v, y, env)?;
                acc = if exists { acc.join(s) } else { acc.meet(s) };
                ps.push(p);
            }
            match saved {
                Some(x) => env.insert(k.clone(), x),
                None => env.remove(k),
            };
            Ok((acc, Proof::All(ps)))
        }
        _ => Err(eval_err(format!("not a bounded NNF formula: {phi}"))),
    }
}

fn flat(p: &Proof) -> BTreeSet<AxKey> {
    let mut out = BTreeSet::new();
    p.flatten(&mut out);
    out
}

fn cert(
    kind: CertKind,
    conclusion: &Formula,
    premises: Vec<String>,
    witnesses: Vec<u64>,
    axioms: BTreeSet<AxKey>,
) -> Result<Certificate, ArithError> {
    Ok(Certificate {
        schema: SCHEMA.to_string(),
        kind,
        conclusion: conclusion.to_string(),
        premises,
        witnesses,
        cited_axioms: instances(axioms)?,
    })
}

/// A `sigma1_truth` certificate when a witness with entries `<= b` exists.
pub fn sigma1_prove(phi: &Formula, b: u64) -> Result<Option<Certificate>, ArithError> {
    let (vars, matrix) = sigma1_parts(phi).ok_or(ArithError::NotSigma1)?;
    if !phi.is_sentence() {
        return Err(ArithError::NotSigma1);
    }
    let w = match eval_sigma1(phi, b).map_err(eval_err)? {
        Sigma1Result::True(w) => w,
        Sigma1Result::Unknown => return Ok(None),
    };
    let mut env: Env = vars.iter().cloned().zip(w.iter().copied()).collect();
    let p = prove_true(matrix, &mut env)?;
    cert(CertKind::Sigma1Truth, phi, vec![], w, flat(&p)).map(Some)
}

/// Splits `∃y(φ₀ ∧ ∀z≤y ¬φ₁)` into `(y, φ₀, z, φ₁)`.
pub(super) fn split_lt(lt: &Formula) -> Option<(&str, &Formula, &str, &Formula)> {
    let Formula::Exists(y, body) = lt else { return None };
    let Formula::And(phi0, rest) = &**body else { return None };
    let Formula::ForallLe(z, Term::Var(bound), neg) = &**rest else { return None };
    let Formula::Not(phi1) = &**neg else { return None };
    (bound == y).then_some((y.as_str(), &**phi0, z.as_str(), &**phi1))
}

/// Certifies `R ⊢ ¬(σ(n̄) < σ′(n̄))` when `σ′(n̄) ≤ σ(n̄)` holds with a
/// witness `<= b`.
pub fn comparison_refute(wc: &WitnessComparison, n: u64, b: u64) -> Option<Certificate> {
    let m = match eval_sigma1(&wc.le_at(n), b).ok()? {
        Sigma1Result::True(w) => w[0],
        Sigma1Result::Unknown => return None,
    };
    let lt = wc.lt_at(n);
    let (y, phi0, z, phi1) = split_lt(&lt)?;
    let mut env = Env::new();
    let mut ps = Vec::new();
    env.insert(z.to_string(), m);
    ps.push(prove_true(phi1, &mut env).ok()?);
    env.clear();
    for i in 0..m {
        env.insert(y.to_string(), i);
        ps.push(prove_false(phi0, &mut env).ok()?);
    }
    ps.push(Proof::Ax(Scheme::Ax4, vec![m]));
    ps.push(Proof::Ax(Scheme::Ax5, vec![m]));
    ps.push(Proof::Ax(Scheme::Ax1, vec![0, m]));
    cert(CertKind::ComparisonRefutation, &Formula::not(lt), vec![], vec![m], flat(&Proof::All(ps))).ok()
}

/// `ψ(x) := σ(x) < σ′(x)` built from the domain formulas of the pair's
/// programs.
pub fn rosser_separator(pair: &DisjointPair) -> Result<Formula, ArithError> {
    let left = arithmetize(&pair.left.index.program())?;
    let right = arithmetize(&pair.right.index.program())?;
    Ok(rosser_separator_for(&left.domain_formula(), &right.domain_formula())?.lt)
}

pub fn rosser_separator_for(sigma: &Formula, sigma_prime: &Formula) -> Result<WitnessComparison, ArithError> {
    witness_compare(sigma, sigma_prime)
}

/// `φ(x, v) := ∃y H(x, y, v)`, the graph of a total one-input program.
pub fn define_function_formula(f: &Index, arity: usize) -> Result<Formula, ArithError> {
    if arity != 1 {
        return Err(ArithError::NotArithmetizable(format!("arity {arity}")));
    }
    let a = arithmetize(&f.program())?;
    if let Some(n) = a.first_divergence() {
        return Err(ArithError::NonTotalObserved(n));
    }
    Ok(a.graph_formula())
}

fn graph_parts(phi: &Formula) -> Result<(&str, &Formula), ArithError> {
    let fv = phi.free_vars();
    if fv != BTreeSet::from(["v".to_string(), "x".to_string()]) {
        return Err(ArithError::ArityMismatch("x, v".into()));
    }
    match phi {
        Formula::Exists(y, h) if sigma1_parts(h).map(|(vs, _)| vs.is_empty()).unwrap_or(false) => Ok((y, h)),
        _ => Err(ArithError::NotSigma1),
    }
}

/// Value `m` and least step witness `y` of `φ(n̄, ·)` within budget `b`.
fn graph_point(h: &Formula, y: &str, n: u64, b: u64) -> Result<Option<(u64, u64)>, ArithError> {
    let inst = Formula::exists_block(&["v", y], h.subst("x", &numeral(n)));
    match eval_sigma1(&inst, b).map_err(eval_err)? {
        Sigma1Result::True(w) => {
            let m = w[0];
            let at_m = Formula::exists(y, h.subst("x", &numeral(n)).subst("v", &numeral(m)));
            match eval_sigma1(&at_m, b).map_err(eval_err)? {
                Sigma1Result::True(w) => Ok(Some((m, w[0]))),
                Sigma1Result::Unknown => Ok(None),
            }
        }
        Sigma1Result::Unknown => Ok(None),
    }
}

/// Proof that `φ(n̄, m̄)` holds with witness `wy`, plus the uniqueness
/// replay for `φ(n̄, v) → v = m̄`.
fn graph_proofs(h: &Formula, y: &str, n: u64, m: u64, wy: u64) -> Result<Proof, ArithError> {
    let hn = h.subst("x", &numeral(n));
    let mut env = Env::from([("v".to_string(), m), (y.to_string(), wy)]);
    let exist = prove_true(&hn, &mut env)?;
    let (vals, uniq) = values(&hn.nnf(), "v", y, &mut Env::new())?;
    match vals {
        Values::Only(s) if s.iter().all(|&k| k == m) => Ok(Proof::All(vec![exist, uniq])),
        _ => Err(eval_err(format!("the formula does not pin the value at {n}"))),
    }
}

/// Certifies `R ⊢ ∀v[(φ(n̄,v) → v = m̄) ∧ (v = m̄ → φ(n̄,v))]`.
pub fn function_certificate(phi: &Formula, n: u64, b: u64) -> Result<Option<Certificate>, ArithError> {
    let (y, h) = graph_parts(phi)?;
    let Some((m, wy)) = graph_point(h, y, n, b)? else { return Ok(None) };
    let p = graph_proofs(h, y, n, m, wy)?;
    let at = phi.subst("x", &numeral(n));
    let eq = Formula::eq(Term::var("v"), numeral(m));
    let conclusion = Formula::forall(
        "v",
        Formula::and(Formula::imp(at.clone(), eq.clone()), Formula::imp(eq, at)),
    );
    cert(CertKind::FunctionDefinition, &conclusion, vec![], vec![m, wy], flat(&p)).map(Some)
}

/// `ψ(x) := φ(x, 1̄)`.
pub fn strong_rep_from_function(phi: &Formula) -> Result<Formula, ArithError> {
    graph_parts(phi)?;
    Ok(phi.subst("v", &numeral(1)))
}

/// Certifies `R ⊢ ψ(n̄)` or `R ⊢ ¬ψ(n̄)` for `ψ = φ(x, 1̄)`, according to
/// the value of the defined function at `n`.
pub fn strong_rep_certificate(phi: &Formula, n: u64, b: u64) -> Result<Option<Certificate>, ArithError> {
    let (y, h) = graph_parts(phi)?;
    let Some((m, wy)) = graph_point(h, y, n, b)? else { return Ok(None) };
    let psi_n = strong_rep_from_function(phi)?.subst("x", &numeral(n));
    if m == 1 {
        let mut env = Env::from([(y.to_string(), wy)]);
        let (_, matrix) = sigma1_parts(&psi_n).ok_or(ArithError::NotSigma1)?;
        let p = prove_true(matrix, &mut env)?;
        return cert(CertKind::StrongRep, &psi_n, vec![], vec![wy], flat(&p)).map(Some);
    }
    let p = Proof::All(vec![graph_proofs(h, y, n, m, wy)?, Proof::Ax(Scheme::Ax3, vec![1, m])]);
    let premise = phi.subst("x", &numeral(n)).to_string();
    cert(CertKind::StrongRep, &Formula::not(psi_n), vec![premise], vec![m, wy], flat(&p)).map(Some)
}
