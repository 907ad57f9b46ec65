use std::collections::BTreeSet;

use pical_core::analysis::barbs::state_trans_barbs;
use pical_core::analysis::locks::{lock_census, lost_requests};
use pical_core::analysis::*;
use pical_core::semantics::{explore_reduced, State};
use pical_core::*;

fn p(s: &str) -> Term {
    parse_any(s).unwrap()
}

fn lim() -> Limits {
    Limits::new(100_000, 10_000)
}

const SEP: EncodingId = EncodingId::SepToAsyn;
const MIX: EncodingId = EncodingId::MixToAsyn;

fn barb_set(t: &Term, enc: EncodingId, weak: bool) -> Vec<String> {
    translated_barbs(t, enc, weak, lim()).unwrap().iter().map(|b| b.to_string()).collect()
}

#[test]
fn requests_of_an_output() {
    let t = encode(&p("x!<z>"), MIX).unwrap();
    let rs = requests(&t, MIX).unwrap();
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0].kind, RequestKind::OutputRequest);
    assert_eq!(rs[0].values[3].text(), "src_z");
    assert!(requests(&encode(&p("0"), MIX).unwrap(), MIX).unwrap().is_empty());
}

#[test]
fn requests_persist_along_every_path() {
    let t = encode(&p("x!<z> | y?(w).0"), MIX).unwrap();
    let g = explore_reduced(&t, lim());
    assert!(g.is_complete());
    assert_eq!(requests(&t, MIX).unwrap().len(), 2);
    assert!(lost_requests(&g, MIX).is_empty());
}

#[test]
fn lock_census_on_a_sum_of_taus() {
    let t = encode(&p("tau.0 + tau.0"), SEP).unwrap();
    let g = explore(&t, CalculusId::PiAsyn, lim());
    assert!(lock_violations(&g).is_empty());
    let census = lock_census(&g, &[]);
    assert_eq!(census.locks.len(), 1);
    assert!(census.locks.values().all(|h| h.counts == vec![1] && h.polarity == vec!["+"]));
    // Follow one path to a terminal state: + then -, never back.
    let mut s = 0u32;
    let mut path = Vec::new();
    while let Some(&e) = g.out[s as usize].first() {
        path.push(e);
        s = g.edges[e as usize].to;
    }
    let census = lock_census(&g, &path);
    assert!(census.violations.is_empty(), "{:?}", census.violations);
    assert!(census.locks.values().any(|h| h.polarity == vec!["+", "-"]));
}

#[test]
fn step_classes() {
    let t = encode(&p("tau.0"), SEP).unwrap();
    let g = explore(&t, CalculusId::PiAsyn, lim());
    let classes = classify_graph(&g);
    assert_eq!(classes.iter().filter(|c| **c == StepClass::NonAdmin).count(), 1);

    // Sep communication on a translated source name is impure.
    let t = encode(&p("x!<> | x?().0"), SEP).unwrap();
    let g = explore(&t, CalculusId::PiAsyn, lim());
    let classes = classify_graph(&g);
    let mut on_source = g.edges.iter().zip(&classes).filter(|(e, _)| {
        e.redex.channel.is_some_and(|c| c.first.role() == Role::TranslatedSource)
    });
    assert!(on_source.clone().count() > 0);
    assert!(on_source.all(|(_, c)| *c == StepClass::ImpureAdmin));

    // Request routing is pure admin.
    let t = encode(&p("x!<z> | x?(y).0"), MIX).unwrap();
    let g = explore_reduced(&t, lim());
    let classes = classify_graph(&g);
    for (e, c) in g.edges.iter().zip(&classes) {
        let ch = e.redex.channel.unwrap();
        if matches!(ch.first.role(), Role::RequestChannelIn | Role::RequestChannelOut) {
            assert_eq!(*c, StepClass::PureAdmin);
        }
    }
}

#[test]
fn translated_barbs_examples() {
    let t = encode(&p("x!<z>"), MIX).unwrap();
    assert_eq!(barb_set(&t, MIX, false), vec!["x!"]);
    let t = encode(&p("new x.(x!<z>)"), MIX).unwrap();
    assert!(barb_set(&t, MIX, false).is_empty());

    // After the committed communication both locks are negative.
    let t = encode(&p("x!<z> | x?(y).0"), MIX).unwrap();
    let g = explore_reduced(&t, lim());
    let terminal: Vec<_> = (0..g.len()).filter(|&s| g.out[s].is_empty()).collect();
    assert_eq!(terminal.len(), 1);
    assert!(state_trans_barbs(&g.states[terminal[0]], MIX).is_empty());
}

#[test]
fn barbs_agree_at_time_zero() {
    for s in ["x!<z> | y?(w).0", "a!<> + b?().0", "new a.(a!<>) | b!<>", "tau.c!<a> | c?(x).x!<>"] {
        let src = p(s);
        let plain: BTreeSet<String> = pical_core::semantics::barbs(&src).iter().map(|b| b.to_string()).collect();
        let t = encode(&src, MIX).unwrap();
        let got: BTreeSet<String> = barb_set(&t, MIX, false).into_iter().collect();
        assert_eq!(plain, got, "{s}");
    }
}

#[test]
fn sep_barbs_after_receiver_locks() {
    for s in ["x!<z> | y?(w).0", "a?().0 + b?().0", "new a.(a!<>) | b!<>"] {
        let src = p(s);
        let plain: BTreeSet<String> = pical_core::semantics::barbs(&src).iter().map(|b| b.to_string()).collect();
        let t = encode(&src, SEP).unwrap();
        // Unfold every receiver lock, which is all the admin work available.
        let g = explore_reduced(&t, lim());
        let settled = (0..g.len()).find(|&s| g.out[s].is_empty()).unwrap();
        let got: BTreeSet<String> =
            state_trans_barbs(&g.states[settled], SEP).iter().map(|b| b.to_string()).collect();
        assert_eq!(plain, got, "{s}");
    }
}

#[test]
fn bisim_examples() {
    let v2 = BisimConfig::new(Variant::V2, lim());
    let v1 = BisimConfig::new(Variant::V1, lim());
    let t = encode(&p("x!<a> | x?(y).0"), SEP).unwrap();
    assert_eq!(bounded_bisim(&t, &t, SEP, v2), Verdict::Yes);
    assert_eq!(bounded_bisim(&t, &t, SEP, v1), Verdict::Yes);
    let ok = encode(&p("ok"), SEP).unwrap();
    let nil = encode(&p("0"), SEP).unwrap();
    assert_eq!(bounded_bisim(&ok, &nil, SEP, v2), Verdict::No);
    assert_eq!(bounded_bisim(&ok, &nil, SEP, v1), Verdict::No);
    let a = encode(&p("x!<a> | 0"), MIX).unwrap();
    let b = encode(&p("x!<a>"), MIX).unwrap();
    assert_eq!(bounded_bisim(&a, &b, MIX, v2), Verdict::Yes);
}

#[test]
fn success_examples() {
    for (s, expect) in [("ok", Verdict::Yes), ("new x.(x!<a>.ok) | x?(y).0", Verdict::No), ("x!<a>.ok | x?(y).0", Verdict::Yes)] {
        for enc in [SEP, MIX] {
            let r = check_success_sensitive(&p(s), enc, lim()).unwrap();
            assert_eq!(r.verdict, Verdict::Yes, "{s} {enc}");
            assert!(r.notes[0].contains(&format!("source: {expect:?}, target: {expect:?}")), "{:?}", r.notes);
        }
    }
}

#[test]
fn completeness_examples() {
    let r = check_completeness(&p("tau.0"), SEP, lim()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    let r = check_completeness(&p("x!<z> | x?(y).0"), MIX, lim()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    for w in &r.witnesses {
        assert_eq!(w.iter().filter(|s| s.class == Some(StepClass::NonAdmin)).count(), 1);
    }
    for enc in [SEP, MIX] {
        let r = check_completeness(&p("(a?().0 + a?().0) | a!<> | a?().0"), enc, lim()).unwrap();
        assert_eq!(r.stats["source_steps"], 3);
        assert_eq!(r.stats["simulated"], 3, "{enc}");
    }
}

#[test]
fn soundness_examples() {
    let r = check_soundness_bounded(&p("tau.0"), SEP, lim()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    let r = check_soundness_bounded(&p("0"), MIX, lim()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert_eq!(r.stats["states"], 1);

    // Distinct continuations make the three one-step derivatives observable.
    let s = p("(a?().b!<> + a?().c!<>) | a!<>.d!<> | a?().e!<>");
    let r = check_soundness_bounded(&s, MIX, lim()).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert!(!r.labels.is_empty());
    for l in &r.labels {
        assert_eq!((l.kind, l.reached, l.of), ("intermediate", 2, 3));
    }
}

#[test]
fn name_invariance_examples() {
    let s = p("a!<a>");
    for enc in [SEP, MIX] {
        assert_eq!(check_name_invariance(&s, &Substitution::identity(), enc).unwrap(), Verdict::Yes);
        let sigma = Substitution::from_pairs([(Name::new("a"), Name::new("b"))]);
        assert_eq!(check_name_invariance(&s, &sigma, enc).unwrap(), Verdict::Yes);
    }
}

#[test]
fn divergence_examples() {
    assert_eq!(check_divergence_reflection(&p("tau.0"), SEP, lim()).unwrap(), Verdict::Yes);
    assert_eq!(check_divergence_reflection(&p("x!<z> | x?(y).0"), MIX, lim()).unwrap(), Verdict::Yes);
    let r = check_divergence_reflection(&p("!x?().x!<> | x!<>"), SEP, lim()).unwrap();
    assert!(r.is_unknown());
}

#[test]
fn junk_examples() {
    let t = encode(&p("0"), SEP).unwrap();
    let items = junk_report(&State::from_term(&t).0, SEP);
    assert_eq!(items.len(), 1);
    assert_eq!(items[0].kind, JunkKind::IsolatedLock);

    // A decided test leaves its other branch behind.
    let l = Name::with("l", 1, Role::SumLock);
    let lock = pical_core::encodings::expand_booleans(l, true);
    let test = pical_core::encodings::build_test(l, Term::Nil, Term::Nil);
    let g = explore(&Term::restrict(l, Term::par(lock, test)), CalculusId::PiAsyn, lim());
    let last = (0..g.len()).find(|&s| g.out[s].is_empty()).unwrap();
    let items = junk_report(&g.states[last], SEP);
    assert_eq!(items.iter().filter(|i| i.kind == JunkKind::TestResidue).count(), 1);

    // The unused branch of a committed sum.
    let t = encode(&p("x!<z> | x?(y).0 + w?(v).0"), SEP).unwrap();
    let g = explore_reduced(&t, lim());
    let last = (0..g.len()).find(|&s| g.out[s].is_empty()).unwrap();
    let items = junk_report(&g.states[last], SEP);
    let dead: Vec<_> = items.iter().filter(|i| i.kind == JunkKind::DeadSum).collect();
    assert_eq!(dead.len(), 1, "{items:?}");
    assert!(dead[0].terms.iter().any(|t| t.contains("src_w")));
}

#[test]
fn distribution_examples() {
    let s = p("(a!<> | b!<>) | (a?().0 | b?().0)");
    let split = vec![vec![0, 2], vec![1, 3]];
    let r = distribution_probe(&s, &split, SEP, lim()).unwrap();
    assert_eq!(r.verdict, DistributionVerdict::Distributable);
    assert!(r.homomorphic);
    assert_eq!(r.independent, vec![true, true]);

    let r = distribution_probe(&s, &split, MIX, lim()).unwrap();
    match &r.verdict {
        DistributionVerdict::Sequentialized { role, .. } => assert_eq!(*role, Role::ChainLock),
        v => panic!("expected sequentialized, got {v:?}"),
    }

    let r = distribution_probe(&s, &[vec![0, 1, 2, 3]], MIX, lim()).unwrap();
    assert_eq!(r.verdict, DistributionVerdict::Distributable);
    assert!(distribution_probe(&s, &[vec![0, 1]], SEP, lim()).is_err());
}
