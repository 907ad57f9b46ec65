//! Mixed choice into the asynchronous calculus via request routing.

use super::{check_monadic, check_source, finish, request_channels, EncodeError, EncodingId, Gen};
use crate::term::{CalculusId, Name, Role, Term};

#[derive(Clone, Copy)]
struct Req {
    po: Name,
    pi: Name,
}

pub fn encode_mix_asyn(s: &Term) -> Result<Term, EncodeError> {
    check_source(s, CalculusId::PiMix)?;
    check_monadic(s)?;
    let mut g = Gen::new(EncodingId::MixToAsyn);
    let (po, pi) = request_channels();
    let t = enc(&mut g, s, Req { po, pi });
    Ok(finish(t, EncodingId::MixToAsyn))
}

/// Payload of a request: the translated value, or the subject for nullary prefixes.
fn payload(g: &Gen, subject: Name, xs: &[Name]) -> Name {
    xs.first().map_or(g.phi(subject), |x| g.phi(*x))
}

fn binder(g: &mut Gen, xs: &[Name]) -> Name {
    match xs.first() {
        Some(x) => g.phi(*x),
        None => g.wild(),
    }
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
        Term::RepInput(ch, xs, p) => rep(g, ch.first, xs, p, rq),
        _ => unreachable!("sums are handled above"),
    }
}

fn branch(g: &mut Gen, l: Name, b: &Term, rq: Req) -> Term {
    match b {
        Term::Tau(p) => {
            let body = enc(g, p, rq);
            g.tau(l, body)
        }
        Term::Output(ch, zs, p) => {
            let s = g.name("s", Role::SenderLock);
            let req = Term::output(rq.po, vec![g.phi(ch.first), l, s, payload(g, ch.first, zs)]);
            let body = enc(g, p, rq);
            Term::restrict(s, Term::par(req, Term::input(s, vec![], body)))
        }
        Term::Input(ch, xs, p) => {
            let r = g.name("r", Role::ReceiverLock);
            let l1 = g.name("l1", Role::SumLock);
            let l2 = g.name("l2", Role::SumLock);
            let w = g.wild();
            let s = g.name("s", Role::SenderLock);
            let x = binder(g, xs);
            let body = enc(g, p, rq);
            let inner_then = Term::par_all([g.set(l1, false), g.set(l2, false), Term::output(s, vec![]), body]);
            let inner_else = Term::par(g.set(l1, true), g.set(l2, false));
            let inner = g.test(l2, inner_then, inner_else);
            let outer = g.test(l1, inner, g.set(l1, false));
            Term::restrict(
                r,
                Term::par(
                    Term::output(rq.pi, vec![g.phi(ch.first), l, r]),
                    Term::rep_input(r, vec![l1, l2, w, s, x], outer),
                ),
            )
        }
        _ => unreachable!("sum branches are guards"),
    }
}

/// Names of one matching site: where left requests are collected (mo, mi),
/// where processed requests go up (uo, ui), and the chain locks (co, ci).
struct Site {
    mo: Name,
    mi: Name,
    uo: Name,
    ui: Name,
    co: Name,
    ci: Name,
}

impl Site {
    fn new(g: &mut Gen) -> Site {
        Site {
            mo: g.name("mo", Role::RequestChannelOut),
            mi: g.name("mi", Role::RequestChannelIn),
            uo: g.name("uo", Role::RequestChannelOut),
            ui: g.name("ui", Role::RequestChannelIn),
            co: g.name("co", Role::ChainLock),
            ci: g.name("ci", Role::ChainLock),
        }
    }
}

/// The two request chains processing right requests against collected left ones.
/// `flip` writes the match as `[y=y']` instead of `[y'=y]`.
fn chains(g: &mut Gen, inner: Req, site: &Site, flip: bool) -> Term {
    let eq = |a: Name, b: Name, p: Term| if flip { Term::Match(b, a, p.into()) } else { Term::Match(a, b, p.into()) };

    // Output requests of the right side against collected input requests.
    let mi_b = g.name("mi", Role::RequestChannelIn);
    let (y, ls, s, z) = (
        g.name("y", Role::TranslatedSource),
        g.name("ls", Role::SumLock),
        g.name("s", Role::SenderLock),
        g.name("z", Role::TranslatedSource),
    );
    let mui = g.name("mui", Role::RequestChannelIn);
    let (y2, lr, r) = (g.name("y'", Role::TranslatedSource), g.name("lr", Role::SumLock), g.name("r", Role::ReceiverLock));
    let mi2 = g.name("mi", Role::RequestChannelIn);
    let matcher = Term::rep_input(
        mi_b,
        vec![y2, lr, r],
        Term::par(eq(y2, y, Term::output(r, vec![lr, ls, ls, s, z])), Term::output(mui, vec![y2, lr, r])),
    );
    let next = Term::restrict(mi2, Term::par(g.fwd(mui, &[mi2], 3), Term::output(site.co, vec![mi2])));
    let out_chain = Term::par(
        Term::output(site.co, vec![site.mi]),
        Term::rep_input(
            site.co,
            vec![mi_b],
            Term::input(
                inner.po,
                vec![y, ls, s, z],
                Term::par(Term::restrict(mui, Term::par(matcher, next)), Term::output(site.uo, vec![y, ls, s, z])),
            ),
        ),
    );

    // Input requests of the right side against collected output requests.
    let mo_b = g.name("mo", Role::RequestChannelOut);
    let (y, lr, r) = (g.name("y", Role::TranslatedSource), g.name("lr", Role::SumLock), g.name("r", Role::ReceiverLock));
    let muo = g.name("muo", Role::RequestChannelOut);
    let (y2, ls, s, z) = (
        g.name("y'", Role::TranslatedSource),
        g.name("ls", Role::SumLock),
        g.name("s", Role::SenderLock),
        g.name("z", Role::TranslatedSource),
    );
    let mo2 = g.name("mo", Role::RequestChannelOut);
    let matcher = Term::rep_input(
        mo_b,
        vec![y2, ls, s, z],
        Term::par(eq(y2, y, Term::output(r, vec![ls, lr, ls, s, z])), Term::output(muo, vec![y2, ls, s, z])),
    );
    let next = Term::restrict(mo2, Term::par(g.fwd(muo, &[mo2], 4), Term::output(site.ci, vec![mo2])));
    let in_chain = Term::par(
        Term::output(site.ci, vec![site.mo]),
        Term::rep_input(
            site.ci,
            vec![mo_b],
            Term::input(
                inner.pi,
                vec![y, lr, r],
                Term::par(Term::restrict(muo, Term::par(matcher, next)), Term::output(site.ui, vec![y, lr, r])),
            ),
        ),
    );
    Term::par(out_chain, in_chain)
}

fn fresh_req(g: &mut Gen) -> Req {
    Req { po: g.name("po", Role::RequestChannelOut), pi: g.name("pi", Role::RequestChannelIn) }
}

fn par(g: &mut Gen, p: &Term, q: &Term, rq: Req) -> Term {
    let site = Site::new(g);

    let left_rq = fresh_req(g);
    let left_body = enc(g, p, left_rq);
    let left = Term::restrict_all(
        &[left_rq.po, left_rq.pi],
        Term::par_all([
            left_body,
            g.fwd(left_rq.pi, &[site.mi, site.ui], 3),
            g.fwd(left_rq.po, &[site.mo, site.uo], 4),
        ]),
    );

    let right_rq = fresh_req(g);
    let right_body = enc(g, q, right_rq);
    let ch = chains(g, right_rq, &site, false);
    let right = Term::restrict_all(&[right_rq.po, right_rq.pi], Term::par(right_body, ch));

    let up = Term::par(g.fwd(site.uo, &[rq.po], 4), g.fwd(site.ui, &[rq.pi], 3));
    Term::restrict_all(
        &[site.mo, site.mi, site.uo, site.ui, site.co, site.ci],
        Term::par_all([left, right, up]),
    )
}

fn rep(g: &mut Gen, subject: Name, xs: &[Name], p: &Term, rq: Req) -> Term {
    let l = g.name("l", Role::SumLock);
    let r = g.name("r", Role::ReceiverLock);
    let cr1 = g.name("cr1", Role::ChainLock);
    let cr2 = g.name("cr2", Role::ChainLock);
    let mro = g.name("mro", Role::RequestChannelOut);
    let mri = g.name("mri", Role::RequestChannelIn);
    let y = g.phi(subject);
    let arity = xs.len();

    // The receiver: commits a sender and hands the value to the next copy.
    let (w1, w2) = (g.wild(), g.wild());
    let ls = g.name("ls", Role::SumLock);
    let s = g.name("s", Role::SenderLock);
    let x = binder(g, xs);
    let carried: Vec<Name> = if arity == 0 { vec![] } else { vec![x] };
    let then_t = Term::par_all([g.set(ls, false), Term::output(s, vec![]), Term::output(cr1, carried.clone())]);
    let receiver = Term::rep_input(r, vec![w1, w2, ls, s, x], g.test(ls, then_t, g.set(ls, false)));

    // One unfolding of the replicated input.
    let xb: Vec<Name> = xs.iter().map(|n| g.phi(*n)).collect();
    let (mro_b, mri_b) = (g.name("mro", Role::RequestChannelOut), g.name("mri", Role::RequestChannelIn));
    let site = Site::new(g);
    let mruo = g.name("mruo", Role::RequestChannelOut);
    let mrui = g.name("mrui", Role::RequestChannelIn);
    let inner = fresh_req(g);
    let body = enc(g, p, inner);
    let ch = chains(g, inner, &site, true);
    let copy = Term::restrict_all(&[inner.po, inner.pi], Term::par(body, ch));
    let (mro2, mri2) = (g.name("mro", Role::RequestChannelOut), g.name("mri", Role::RequestChannelIn));
    let relink = Term::restrict_all(
        &[mro2, mri2],
        Term::par_all([
            Term::output(cr2, vec![mro2, mri2]),
            g.fwd(site.uo, &[rq.po, mro2], 4),
            g.fwd(mruo, &[mro2], 4),
            g.fwd(site.ui, &[rq.pi, mri2], 3),
            g.fwd(mrui, &[mri2], 3),
        ]),
    );
    let unfolding = Term::restrict_all(
        &[site.mo, site.mi, site.uo, site.ui, mruo, mrui, site.co, site.ci],
        Term::par_all([
            g.fwd(mro_b, &[site.mo, mruo], 4),
            g.fwd(mri_b, &[site.mi, mrui], 3),
            copy,
            relink,
        ]),
    );
    let spawner = Term::rep_input(cr1, xb, Term::input(cr2, vec![mro_b, mri_b], unfolding));

    Term::restrict_all(
        &[l, r, cr1, cr2, mro, mri],
        Term::par_all([
            Term::output(rq.pi, vec![y, l, r]),
            receiver,
            Term::output(mri, vec![y, l, r]),
            g.set(l, true),
            Term::output(cr2, vec![mro, mri]),
            spawner,
        ]),
    )
}
