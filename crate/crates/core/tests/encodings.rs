use std::collections::BTreeSet;

use pical_core::analysis::barbs::state_trans_barbs;
use pical_core::analysis::locks::{instantiations, Polarity};
use pical_core::analysis::{requests, translated_barbs, RequestKind};
use pical_core::corpus::{generate, CorpusConfig};
use pical_core::encodings::{expand_booleans, make_forwarder, renaming_policy, request_channels};
use pical_core::semantics::{explore_reduced, reaches_success, struct_congruent, State};
use pical_core::*;

const SEP: EncodingId = EncodingId::SepToAsyn;
const MIX: EncodingId = EncodingId::MixToAsyn;
const MIX2: EncodingId = EncodingId::MixToAsyn2;

fn p(s: &str) -> Term {
    parse_any(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn lim() -> Limits {
    Limits::new(20_000, 1_000)
}

fn n(s: &str) -> Name {
    Name::new(s)
}

fn corpus() -> Vec<Term> {
    generate(CorpusConfig { count: 15, mixed: true, ..Default::default() })
}

#[test]
fn boolean_and_forwarder_shapes() {
    assert_eq!(pretty(&expand_booleans(n("l"), true)), "l?(t,f).t!<>");
    assert_eq!(pretty(&expand_booleans(n("l"), false)), "l?(t,f).f!<>");
    assert_eq!(pretty(&make_forwarder(n("y"), &[n("y1")], 1)), "!y?(x).y1!<x>");
    assert_eq!(pretty(&make_forwarder(n("y"), &[], 2)), "!y?(x,x1).0");
    assert_eq!(pretty(&make_forwarder(n("y"), &[n("a"), n("b")], 0)), "!y?().(a!<> | b!<>)");
}

#[test]
fn renaming_is_injective_and_avoids_reserved_names() {
    for enc in [SEP, MIX, MIX2] {
        let policy = renaming_policy(enc);
        let images: BTreeSet<Name> = (0..1000).map(|i| policy.apply(n(&format!("v{i}")))).collect();
        assert_eq!(images.len(), 1000);
        for r in &policy.reserved {
            assert!(!policy.is_reserved(policy.apply(n(r))));
        }
    }
}

#[test]
fn separate_choice_clauses() {
    assert_eq!(pretty(&encode(&p("0"), SEP).unwrap()), "new l.(l?(t,f).t!<>)");
    assert_eq!(pretty(&encode(&p("ok"), SEP).unwrap()), "ok");
    let par = encode(&p("a!<> | b?().0"), SEP).unwrap();
    let split = Term::par(encode(&p("a!<>"), SEP).unwrap(), encode(&p("b?().0"), SEP).unwrap());
    assert!(struct_congruent(&par, &split));
    let t = encode(&p("tau.0"), SEP).unwrap();
    let root = State::from_term(&t).0;
    assert_eq!(instantiations(&root).len(), 1);
    assert!(encode(&p("x?(y).0 + z!<a>.0"), SEP).is_err());
}

#[test]
fn mixed_choice_requests() {
    let (po, pi) = request_channels();
    let rs = requests(&encode(&p("x!<z>.0"), MIX).unwrap(), MIX).unwrap();
    assert_eq!(rs.len(), 1);
    assert_eq!((rs[0].kind.clone(), rs[0].channel, rs[0].values.len()), (RequestKind::OutputRequest, po, 4));
    assert_eq!(rs[0].values[1].role(), Role::SumLock);
    assert_eq!(rs[0].values[2].role(), Role::SenderLock);
    assert_eq!(rs[0].values[3].text(), "src_z");

    let rs = requests(&encode(&p("x?(y).0"), MIX).unwrap(), MIX).unwrap();
    assert_eq!(rs.len(), 1);
    assert_eq!((rs[0].kind.clone(), rs[0].channel, rs[0].values.len()), (RequestKind::InputRequest, pi, 3));
    assert!(requests(&encode(&p("0"), MIX).unwrap(), MIX).unwrap().is_empty());
}

#[test]
fn mixed_choice_communication_spends_both_locks() {
    let t = encode(&p("x!<z> | x?(y).0"), MIX).unwrap();
    let g = explore_reduced(&t, lim());
    assert!(g.is_complete());
    let spent = g.states.iter().any(|s| {
        let inst = instantiations(s);
        let negative = inst.values().flatten().filter(|&&p| p == Polarity::Negative).count();
        negative >= 2 && state_trans_barbs(s, MIX).is_empty()
    });
    assert!(spent);
}

#[test]
fn polyadic_clauses() {
    let t = pretty(&encode(&p("x!<z>.0"), MIX2).unwrap());
    assert!(t.contains("!s1?().po!<src_x,l,s1,s2,src_z>"), "{t}");
    assert!(t.contains("s2?().new l1.(l1?(t,f).t!<>)"), "{t}");
    let e = encode(&p("!x?(y).0"), MIX2).unwrap_err();
    assert!(e.to_string().contains("replicated input unsupported"));
}

#[test]
fn polyadic_agrees_with_mixed_on_a_communication() {
    let s = p("x!<z> | x?(y).0");
    let a = encode(&s, MIX).unwrap();
    let b = encode(&s, MIX2).unwrap();
    assert_eq!(reaches_success(&a, CalculusId::PiAsyn, lim()), reaches_success(&b, CalculusId::PiAsyn2, lim()));
    assert_eq!(translated_barbs(&a, MIX, true, lim()), translated_barbs(&b, MIX2, true, lim()));
}

/// Arity used for each role of channel, per encoding.
fn role_arity(role: Role, enc: EncodingId) -> Option<usize> {
    match (role, enc) {
        (Role::SumLock, _) => Some(2),
        (Role::SenderLock, _) => Some(0),
        (Role::ReceiverLock, EncodingId::SepToAsyn) => Some(0),
        (Role::ReceiverLock, EncodingId::MixToAsyn) => Some(5),
        (Role::ReceiverLock, EncodingId::MixToAsyn2) => Some(7),
        _ => None,
    }
}

fn walk(t: &Term, f: &mut impl FnMut(&Channel, usize, bool)) {
    match t {
        Term::Nil | Term::Success => {}
        Term::Restrict(_, q) | Term::Match(_, _, q) | Term::Tau(q) => walk(q, f),
        Term::Par(a, b) => {
            walk(a, f);
            walk(b, f);
        }
        Term::Sum(bs) => bs.iter().for_each(|b| walk(b, f)),
        Term::Output(ch, xs, q) => {
            f(ch, xs.len(), true);
            walk(q, f);
        }
        Term::Input(ch, xs, q) | Term::RepInput(ch, xs, q) => {
            f(ch, xs.len(), false);
            walk(q, f);
        }
    }
}

#[test]
fn encoder_outputs_are_well_formed_and_role_sound() {
    for s in corpus() {
        for enc in [SEP, MIX, MIX2] {
            if well_formed(&s, enc.source()).is_err() {
                continue;
            }
            let t = encode(&s, enc).unwrap();
            assert_eq!(pretty(&t), pretty(&encode(&s, enc).unwrap()), "encoding is deterministic");
            assert!(well_formed(&t, enc.target()).is_ok(), "{}", pretty(&t));
            assert!(check_arity(&t).is_ok());
            if enc.target() == CalculusId::PiAsyn {
                assert!(well_formed(&t, CalculusId::PiAsyn2).is_ok());
            }
            walk(&t, &mut |ch, arity, _| {
                if ch.is_composed() {
                    return;
                }
                if let Some(want) = role_arity(ch.first.role(), enc) {
                    assert_eq!(arity, want, "{} in {}", ch.first, pretty(&t));
                }
            });
        }
    }
}

#[test]
fn mixed_encodings_only_talk_on_request_channels() {
    let (po, pi) = request_channels();
    for s in corpus() {
        let t = encode(&s, MIX).unwrap();
        let free = free_names(&t);
        walk(&t, &mut |ch, _, _| {
            assert!(!free.contains(&ch.first) || ch.first == po || ch.first == pi, "{} in {}", ch.first, pretty(&t));
            assert_ne!(ch.first.role(), Role::TranslatedSource, "{} in {}", ch.first, pretty(&t));
        });
    }
}

#[test]
fn sum_locks_start_positive_and_unique() {
    for s in corpus() {
        for enc in [SEP, MIX, MIX2] {
            if well_formed(&s, enc.source()).is_err() {
                continue;
            }
            let root = State::from_term(&encode(&s, enc).unwrap()).0;
            for (lock, ps) in instantiations(&root) {
                assert_eq!(ps.len(), 1, "{lock}");
                assert_eq!(ps[0], Polarity::Positive, "{lock}");
            }
        }
    }
}
