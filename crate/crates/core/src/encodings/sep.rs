//! Separate choice into the asynchronous calculus.

use super::{check_source, finish, EncodeError, EncodingId, Gen};
use crate::term::{CalculusId, Name, Role, Term};

pub fn encode_sep_asyn(s: &Term) -> Result<Term, EncodeError> {
    check_source(s, CalculusId::PiSep)?;
    let mut g = Gen::new(EncodingId::SepToAsyn);
    let t = enc(&mut g, s);
    Ok(finish(t, EncodingId::SepToAsyn))
}

fn enc(g: &mut Gen, s: &Term) -> Term {
    if let Some(bs) = Gen::branches(s) {
        let l = g.name("l", Role::SumLock);
        let mut parts = vec![g.set(l, true)];
        for b in bs {
            parts.push(branch(g, l, b));
        }
        return Term::restrict(l, Term::par_all(parts));
    }
    match s {
        Term::Success => Term::Success,
        Term::Restrict(x, p) => Term::restrict(g.phi(*x), enc(g, p)),
        Term::Par(p, q) => {
            let a = enc(g, p);
            Term::par(a, enc(g, q))
        }
        Term::Match(a, b, p) => Term::Match(g.phi(*a), g.phi(*b), enc(g, p).into()),
        Term::RepInput(ch, xs, p) => {
            let l = g.name("l", Role::SumLock);
            let sl = g.name("s", Role::SenderLock);
            let body = enc(g, p);
            let then_t = Term::par_all([g.set(l, false), Term::output(sl, vec![]), body]);
            let else_t = g.set(l, false);
            let test = g.test(l, then_t, else_t);
            let mut binders = vec![l, sl];
            binders.extend(g.phis(xs));
            Term::rep_input(g.phi(ch.first), binders, test)
        }
        _ => unreachable!("sums are handled above"),
    }
}

fn branch(g: &mut Gen, l: Name, b: &Term) -> Term {
    match b {
        Term::Tau(p) => {
            let body = enc(g, p);
            g.tau(l, body)
        }
        Term::Output(ch, zs, p) => {
            let sl = g.name("s", Role::SenderLock);
            let mut args = vec![l, sl];
            args.extend(g.phis(zs));
            let body = enc(g, p);
            Term::restrict(
                sl,
                Term::par(Term::output(g.phi(ch.first), args), Term::input(sl, vec![], body)),
            )
        }
        Term::Input(ch, xs, p) => {
            let r = g.name("r", Role::ReceiverLock);
            let l2 = g.name("l'", Role::SumLock);
            let sl = g.name("s", Role::SenderLock);
            let y = g.phi(ch.first);
            let xs = g.phis(xs);
            let body = enc(g, p);
            let inner_then =
                Term::par_all([g.set(l, false), g.set(l2, false), Term::output(sl, vec![]), body]);
            let inner_else = Term::par_all([g.set(l, true), g.set(l2, false), Term::output(r, vec![])]);
            let inner = g.test(l2, inner_then, inner_else);
            let mut args = vec![l2, sl];
            args.extend(xs.iter().copied());
            let outer_else = Term::par(g.set(l, false), Term::output(y, args.clone()));
            let outer = g.test(l, inner, outer_else);
            let guarded = Term::input(y, args, outer);
            Term::restrict(
                r,
                Term::par(Term::output(r, vec![]), Term::rep_input(r, vec![], guarded)),
            )
        }
        _ => unreachable!("sum branches are guards"),
    }
}
