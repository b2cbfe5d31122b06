//! Certificate checking. Every certificate is replayed from its conclusion:
//! bound variables are eliminated by substituting numerals, the required
//! axiom set is recomputed and must equal the cited set exactly, and
//! witnesses must be the least ones.

use std::collections::BTreeSet;

use super::{axiom, AxKey, CertKind, Certificate, Scheme, SCHEMA};
use crate::logic::{numeral, sigma1_parts, witness_tuples, Formula, Term};

type Axioms = BTreeSet<AxKey>;
type Check<T> = Result<T, String>;

fn value(t: &Term, ax: &mut Axioms) -> Check<u64> {
    let Term::App(f, args) = t else { return Err(format!("free variable in {t}")) };
    let vals = args.iter().map(|a| value(a, ax)).collect::<Check<Vec<u64>>>()?;
    let overflow = || "overflow".to_string();
    match (f.as_str(), vals.as_slice()) {
        ("0", []) => Ok(0),
        ("S", &[a]) => a.checked_add(1).ok_or_else(overflow),
        ("+", &[a, b]) => {
            ax.insert((Scheme::Ax1, vec![a, b]));
            a.checked_add(b).ok_or_else(overflow)
        }
        ("*", &[a, b]) => {
            ax.insert((Scheme::Ax2, vec![a, b]));
            a.checked_mul(b).ok_or_else(overflow)
        }
        _ => Err(format!("unknown symbol {f}")),
    }
}

/// Truth of a ground Δ₀ sentence; the axioms its replay needs go to `ax`.
fn truth(phi: &Formula, ax: &mut Axioms) -> Check<bool> {
    match phi {
        Formula::Eq(a, b) => {
            let (x, y) = (value(a, ax)?, value(b, ax)?);
            if x != y {
                ax.insert((Scheme::Ax3, vec![x, y]));
            }
            Ok(x == y)
        }
        Formula::Rel(r, args) if r == "<=" && args.len() == 2 => {
            let (x, y) = (value(&args[0], ax)?, value(&args[1], ax)?);
            if x <= y {
                ax.insert((Scheme::Ax1, vec![y - x, x]));
            } else {
                ax.insert((Scheme::Ax4, vec![y]));
                for i in 0..=y {
                    ax.insert((Scheme::Ax3, vec![x, i]));
                }
            }
            Ok(x <= y)
        }
        Formula::Not(a) => Ok(!truth(a, ax)?),
        Formula::And(a, b) => {
            let mut left = Axioms::new();
            if !truth(a, &mut left)? {
                ax.extend(left);
                return Ok(false);
            }
            ax.extend(left);
            truth(b, ax)
        }
        Formula::Or(a, b) => {
            let mut left = Axioms::new();
            if truth(a, &mut left)? {
                ax.extend(left);
                return Ok(true);
            }
            ax.extend(left);
            truth(b, ax)
        }
        Formula::Imp(a, b) => truth(&Formula::or(Formula::not((**a).clone()), (**b).clone()), ax),
        Formula::ExistsLe(x, t, a) | Formula::ForallLe(x, t, a) => {
            let exists = matches!(phi, Formula::ExistsLe(..));
            let bound = value(t, ax)?;
            let mut failures = Axioms::new();
            for i in 0..=bound {
                let mut inst = Axioms::new();
                if truth(&a.subst(x, &numeral(i)), &mut inst)? == exists {
                    ax.extend(inst);
                    ax.insert((Scheme::Ax1, vec![bound - i, i]));
                    return Ok(exists);
                }
                failures.extend(inst);
            }
            ax.extend(failures);
            ax.insert((Scheme::Ax4, vec![bound]));
            Ok(!exists)
        }
        _ => Err(format!("not a ground Δ₀ sentence: {phi}")),
    }
}

fn holds(phi: &Formula) -> Check<bool> {
    truth(phi, &mut Axioms::new())
}

/// `(complemented, set)`: the values of `v` allowed by an NNF formula whose
/// atoms mentioning `y` are read as true.
type Allowed = (bool, BTreeSet<u64>);

fn and_allowed(a: Allowed, b: Allowed) -> Allowed {
    match (a, b) {
        ((false, s), (false, t)) => (false, &s & &t),
        ((false, s), (true, t)) | ((true, t), (false, s)) => (false, &s - &t),
        ((true, s), (true, t)) => (true, &s | &t),
    }
}

fn or_allowed(a: Allowed, b: Allowed) -> Allowed {
    let flip = |(c, s): Allowed| (!c, s);
    flip(and_allowed(flip(a), flip(b)))
}

fn allowed(phi: &Formula, v: &str, y: &str, ax: &mut Axioms) -> Check<Allowed> {
    let all = (true, BTreeSet::new());
    let none = (false, BTreeSet::new());
    let (atom, positive) = match phi {
        Formula::Not(a) => (&**a, false),
        other => (other, true),
    };
    if let Formula::Eq(..) | Formula::Rel(..) = atom {
        let vars = atom.free_vars();
        if vars.contains(y) {
            return Ok(all);
        }
        if vars.contains(v) {
            let t = match atom {
                Formula::Eq(Term::Var(a), t) if a == v => t,
                Formula::Eq(t, Term::Var(a)) if a == v => t,
                _ => return Err(format!("unsupported atom {atom}")),
            };
            let k = value(t, ax)?;
            return Ok((!positive, BTreeSet::from([k])));
        }
        return Ok(if truth(atom, ax)? == positive { all } else { none });
    }
    match phi {
        Formula::And(a, b) => {
            let l = allowed(a, v, y, ax)?;
            if l == none {
                return Ok(l);
            }
            Ok(and_allowed(l, allowed(b, v, y, ax)?))
        }
        Formula::Or(a, b) => {
            let l = allowed(a, v, y, ax)?;
            if l == all {
                return Ok(l);
            }
            Ok(or_allowed(l, allowed(b, v, y, ax)?))
        }
        Formula::ExistsLe(k, t, a) | Formula::ForallLe(k, t, a) => {
            let exists = matches!(phi, Formula::ExistsLe(..));
            let bound = value(t, ax)?;
            ax.insert((Scheme::Ax4, vec![bound]));
            let mut acc = if exists { none } else { all };
            for i in 0..=bound {
                let s = allowed(&a.subst(k, &numeral(i)), v, y, ax)?;
                acc = if exists { or_allowed(acc, s) } else { and_allowed(acc, s) };
            }
            Ok(acc)
        }
        _ => Err(format!("not a bounded NNF formula: {phi}")),
    }
}

fn sigma1_truth(conclusion: &Formula, w: &[u64], ax: &mut Axioms) -> Check<()> {
    if !conclusion.is_sentence() {
        return Err("conclusion is not a sentence".into());
    }
    let (vars, matrix) = sigma1_parts(conclusion).ok_or("conclusion is not Σ₁")?;
    if vars.len() != w.len() {
        return Err("witness count differs from the ∃ block".into());
    }
    let inst = |t: &[u64]| vars.iter().zip(t).fold(matrix.clone(), |f, (x, n)| f.subst(x, &numeral(*n)));
    if !truth(&inst(w), ax)? {
        return Err("witness does not satisfy the matrix".into());
    }
    let top = w.iter().copied().max().unwrap_or(0);
    for t in witness_tuples(w.len(), top) {
        if t == w {
            break;
        }
        if holds(&inst(&t))? {
            return Err(format!("witness {w:?} is not least: {t:?} works"));
        }
    }
    Ok(())
}

/// `φ(n̄, m̄)` with least `y`, and `φ(n̄, v) → v = m̄`. `phi` is `∃y H` with
/// free variable `v` only.
fn graph_replay(phi: &Formula, v: &str, m: u64, wy: u64, ax: &mut Axioms) -> Check<()> {
    let Formula::Exists(y, h) = phi else { return Err("graph formula is not ∃y H".into()) };
    if phi.free_vars() != BTreeSet::from([v.to_string()]) {
        return Err("graph formula has the wrong free variables".into());
    }
    let at_m = h.subst(v, &numeral(m));
    if !truth(&at_m.subst(y, &numeral(wy)), ax)? {
        return Err("value witness fails".into());
    }
    for i in 0..wy {
        if holds(&at_m.subst(y, &numeral(i)))? {
            return Err("step witness is not least".into());
        }
    }
    match allowed(&h.nnf(), v, y, ax)? {
        (false, s) if s.iter().all(|&k| k == m) => Ok(()),
        _ => Err("uniqueness does not follow".into()),
    }
}

fn split_lt(lt: &Formula) -> Check<(String, Formula, String, Formula)> {
    if let Formula::Exists(y, body) = lt {
        if let Formula::And(a, rest) = &**body {
            if let Formula::ForallLe(z, Term::Var(b), neg) = &**rest {
                if let (true, Formula::Not(c)) = (b == y, &**neg) {
                    return Ok((y.clone(), (**a).clone(), z.clone(), (**c).clone()));
                }
            }
        }
    }
    Err("conclusion does not have the comparison shape".into())
}

fn required(c: &Certificate, conclusion: &Formula) -> Check<Axioms> {
    let mut ax = Axioms::new();
    let w = &c.witnesses;
    match c.kind {
        CertKind::Sigma1Truth => sigma1_truth(conclusion, w, &mut ax)?,
        CertKind::ComparisonRefutation => {
            let Formula::Not(lt) = conclusion else { return Err("expected a negation".into()) };
            let (y, phi0, z, phi1) = split_lt(lt)?;
            let [m] = w[..] else { return Err("expected one witness".into()) };
            if !lt.is_sentence() {
                return Err("conclusion is not a sentence".into());
            }
            if !truth(&phi1.subst(&z, &numeral(m)), &mut ax)? {
                return Err("σ′ witness fails".into());
            }
            for i in 0..m {
                if holds(&phi1.subst(&z, &numeral(i)))? {
                    return Err("σ′ witness is not least".into());
                }
                if truth(&phi0.subst(&y, &numeral(i)), &mut ax)? {
                    return Err(format!("σ holds below the witness at {i}"));
                }
            }
            ax.insert((Scheme::Ax4, vec![m]));
            ax.insert((Scheme::Ax5, vec![m]));
            ax.insert((Scheme::Ax1, vec![0, m]));
        }
        CertKind::FunctionDefinition => {
            let shape = || "conclusion does not have the definition shape".to_string();
            let Formula::Forall(v, body) = conclusion else { return Err(shape()) };
            let Formula::And(l, r) = &**body else { return Err(shape()) };
            let (Formula::Imp(a1, e1), Formula::Imp(e2, a2)) = (&**l, &**r) else { return Err(shape()) };
            if a1 != a2 || e1 != e2 {
                return Err(shape());
            }
            let Formula::Eq(Term::Var(vv), mt) = &**e1 else { return Err(shape()) };
            let [m, wy] = w[..] else { return Err("expected two witnesses".into()) };
            if vv != v || mt.as_numeral() != Some(m) {
                return Err(shape());
            }
            graph_replay(a1, v, m, wy, &mut ax)?;
        }
        CertKind::StrongRep => match conclusion {
            Formula::Not(psi) => {
                let [premise] = &c.premises[..] else { return Err("expected one premise".into()) };
                let phi: Formula = premise.parse().map_err(|e| format!("premise: {e}"))?;
                let fv = phi.free_vars();
                let v = fv.iter().next().ok_or("premise is closed")?.clone();
                if **psi != phi.subst(&v, &numeral(1)) {
                    return Err("conclusion is not the premise at 1".into());
                }
                let [m, wy] = w[..] else { return Err("expected two witnesses".into()) };
                if m == 1 {
                    return Err("value 1 cannot refute".into());
                }
                graph_replay(&phi, &v, m, wy, &mut ax)?;
                ax.insert((Scheme::Ax3, vec![1, m]));
            }
            positive => sigma1_truth(positive, w, &mut ax)?,
        },
    }
    Ok(ax)
}

fn verify(c: &Certificate) -> Check<()> {
    if c.schema != SCHEMA {
        return Err(format!("unknown schema {}", c.schema));
    }
    let mut cited = Axioms::new();
    for a in &c.cited_axioms {
        let expected = axiom(a.scheme, &a.params).map_err(|e| e.to_string())?;
        if expected.sentence != a.sentence {
            return Err(format!("{} {:?} does not match its template", a.scheme, a.params));
        }
        if !cited.insert((a.scheme, a.params.clone())) {
            return Err("duplicate axiom instance".into());
        }
    }
    let conclusion: Formula = c.conclusion.parse().map_err(|e| format!("conclusion: {e}"))?;
    if conclusion.to_string() != c.conclusion {
        return Err("conclusion is not in canonical form".into());
    }
    let need = required(c, &conclusion)?;
    if need != cited {
        return Err(format!(
            "cited axioms differ from the replay: {} missing, {} extra",
            need.difference(&cited).count(),
            cited.difference(&need).count()
        ));
    }
    Ok(())
}

/// Replays a certificate; `Err` carries the first failed step.
pub fn explain_certificate(c: &Certificate) -> Result<(), String> {
    verify(c)
}

pub fn check_certificate(c: &Certificate) -> bool {
    verify(c).is_ok()
}
