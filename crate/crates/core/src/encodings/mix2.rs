//! Mixed choice without replicated input into the asynchronous calculus with
//! two-part channels.

use super::{check_monadic, check_source, finish, reject_rep_input, request_channels, EncodeError, EncodingId, Gen};
use crate::term::{CalculusId, Channel, Name, Role, Term};

#[derive(Clone, Copy)]
struct Req {
    po: Name,
    pi: Name,
}

pub fn encode_mix_asyn2(s: &Term) -> Result<Term, EncodeError> {
    check_source(s, CalculusId::PiMix)?;
    reject_rep_input(s)?;
    check_monadic(s)?;
    let mut g = Gen::new(EncodingId::MixToAsyn2);
    let (po, pi) = request_channels();
    let t = enc(&mut g, s, Req { po, pi });
    Ok(finish(t, EncodingId::MixToAsyn2))
}

fn enc(g: &mut Gen, s: &Term, rq: Req) -> Term {
    if let Some(bs) = Gen::branches(s) {
        let l = g.name("l", Role::SumLock);
        let mut parts = vec![g.set(l, true)];
        for b in bs {
            parts.push(branch(g, l, b, rq));
        }
        return Term::restrict(l, Term::par_all(parts));
    }
    match s {
        Term::Success => Term::Success,
        Term::Restrict(x, p) => Term::restrict(g.phi(*x), enc(g, p, rq)),
        Term::Match(a, b, p) => Term::Match(g.phi(*a), g.phi(*b), enc(g, p, rq).into()),
        Term::Par(p, q) => par(g, p, q, rq),
        _ => unreachable!("sums are handled above; replicated input is rejected"),
    }
}

/// `(new b)(b:=v | P(b))`: a boolean passed as a value.
fn with_bool(g: &mut Gen, value: bool, p: impl FnOnce(Name) -> Term) -> Term {
    let b = g.name("b", Role::None);
    Term::restrict(b, Term::par(g.set(b, value), p(b)))
}

fn branch(g: &mut Gen, l: Name, b: &Term, rq: Req) -> Term {
    match b {
        Term::Tau(p) => {
            let body = enc(g, p, rq);
            g.tau(l, body)
        }
        Term::Output(ch, zs, p) => {
            let s1 = g.name("s1", Role::SenderLock);
            let s2 = g.name("s2", Role::SenderLock);
            let y = g.phi(ch.first);
            let z = zs.first().map_or(y, |z| g.phi(*z));
            let body = enc(g, p, rq);
            Term::restrict_all(
                &[s1, s2],
                Term::par_all([
                    Term::output(s1, vec![]),
                    Term::rep_input(s1, vec![], Term::output(rq.po, vec![y, l, s1, s2, z])),
                    Term::input(s2, vec![], body),
                ]),
            )
        }
        Term::Input(ch, xs, p) => {
            let r = g.name("r", Role::ReceiverLock);
            let y = g.phi(ch.first);
            let (l1, l2, w) = (g.name("l1", Role::SumLock), g.name("l2", Role::SumLock), g.wild());
            let (s1, s2) = (g.name("s1", Role::SenderLock), g.name("s2", Role::SenderLock));
            let x = match xs.first() {
                Some(x) => g.phi(*x),
                None => g.wild(),
            };
            let bb = g.name("b", Role::None);
            let request = || Term::output(rq.pi, vec![y, l, r]);
            let body = enc(g, p, rq);

            let inner_then = Term::par_all([g.set(l1, false), g.set(l2, false), Term::output(s2, vec![]), body]);
            let retry = g.test(bb, request(), Term::output(s1, vec![]));
            let inner_else = Term::par_all([g.set(l1, true), g.set(l2, false), retry]);
            let inner = g.test(l2, inner_then, inner_else);
            let retry = g.test(bb, Term::output(s1, vec![]), request());
            let outer_else = Term::par(g.set(l1, false), retry);
            let outer = g.test(l1, inner, outer_else);
            Term::restrict(
                r,
                Term::par(request(), Term::rep_input(r, vec![l1, l2, w, s1, s2, x, bb], outer)),
            )
        }
        _ => unreachable!("sum branches are guards"),
    }
}

fn par(g: &mut Gen, p: &Term, q: &Term, rq: Req) -> Term {
    let uo = g.name("uo", Role::RequestChannelOut);
    let ui = g.name("ui", Role::RequestChannelIn);
    let itag = g.name("i", Role::None);
    let otag = g.name("o", Role::None);
    let on = |y: Name, tag: Name| Channel::composed(y, tag);

    // Left: publish requests on y@o / y@i and push them up.
    let lrq = Req { po: g.name("po", Role::RequestChannelOut), pi: g.name("pi", Role::RequestChannelIn) };
    let left_body = enc(g, p, lrq);
    let (y, l, s1, s2, z) = (
        g.name("y", Role::TranslatedSource),
        g.name("l", Role::SumLock),
        g.name("s1", Role::SenderLock),
        g.name("s2", Role::SenderLock),
        g.name("z", Role::TranslatedSource),
    );
    let push_out = Term::rep_input(
        lrq.po,
        vec![y, l, s1, s2, z],
        Term::par(Term::output(on(y, otag), vec![l, s1, s2, z]), Term::output(uo, vec![y, l, s1, s2, z])),
    );
    let (y, l, r) = (g.name("y", Role::TranslatedSource), g.name("l", Role::SumLock), g.name("r", Role::ReceiverLock));
    let push_in = Term::rep_input(
        lrq.pi,
        vec![y, l, r],
        Term::par(Term::output(on(y, itag), vec![l, r]), Term::output(ui, vec![y, l, r])),
    );
    let left = Term::restrict_all(&[lrq.po, lrq.pi], Term::par_all([left_body, push_out, push_in]));

    // Right: meet a left request of the opposite direction on y.
    let rrq = Req { po: g.name("po", Role::RequestChannelOut), pi: g.name("pi", Role::RequestChannelIn) };
    let right_body = enc(g, q, rrq);
    let (y, ls, s1, s2, z) = (
        g.name("y", Role::TranslatedSource),
        g.name("ls", Role::SumLock),
        g.name("s1", Role::SenderLock),
        g.name("s2", Role::SenderLock),
        g.name("z", Role::TranslatedSource),
    );
    let (lr, r) = (g.name("lr", Role::SumLock), g.name("r", Role::ReceiverLock));
    let meet = with_bool(g, true, |b| Term::output(r, vec![lr, ls, ls, s1, s2, z, b]));
    let match_out = Term::rep_input(
        rrq.po,
        vec![y, ls, s1, s2, z],
        Term::par(Term::input(on(y, itag), vec![lr, r], meet), Term::output(uo, vec![y, ls, s1, s2, z])),
    );
    let (y, lr, r) = (g.name("y", Role::TranslatedSource), g.name("lr", Role::SumLock), g.name("r", Role::ReceiverLock));
    let (ls, s1, s2, z) = (
        g.name("ls", Role::SumLock),
        g.name("s1", Role::SenderLock),
        g.name("s2", Role::SenderLock),
        g.name("z", Role::TranslatedSource),
    );
    let meet = with_bool(g, false, |b| Term::output(r, vec![ls, lr, ls, s1, s2, z, b]));
    let match_in = Term::rep_input(
        rrq.pi,
        vec![y, lr, r],
        Term::par(Term::input(on(y, otag), vec![ls, s1, s2, z], meet), Term::output(ui, vec![y, lr, r])),
    );
    let right = Term::restrict_all(&[rrq.po, rrq.pi], Term::par_all([right_body, match_out, match_in]));

    let up = Term::par(g.fwd(uo, &[rq.po], 5), g.fwd(ui, &[rq.pi], 3));
    Term::restrict_all(&[uo, ui, itag, otag], Term::par_all([left, right, up]))
}
