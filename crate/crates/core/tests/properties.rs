use std::collections::BTreeSet;

use proptest::prelude::*;

use pical_core::analysis::{
    bounded_bisim, check_name_invariance, classify_graph, BisimConfig, GraphSignatures, StepClass, Variant,
};
use pical_core::corpus::{generate, CorpusConfig};
use pical_core::semantics::{explore_reduced, normalize, struct_congruent};
use pical_core::*;

fn term(seed: u64, mixed: bool, replication: bool) -> Term {
    let cfg = CorpusConfig { seed, count: 1, mixed, replication, ..Default::default() };
    generate(cfg).pop().unwrap()
}

fn any_term() -> impl Strategy<Value = Term> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, rep)| term(seed, true, rep))
}

fn small_sep_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(|seed| {
        let cfg = CorpusConfig { seed, count: 1, max_guards: 4, ..Default::default() };
        generate(cfg).pop().unwrap()
    })
}

/// Renames free names through a small pool, possibly merging some.
fn renaming(seed: u64, t: &Term) -> Substitution {
    let pool = ["a", "b", "c", "d", "e"];
    Substitution::from_pairs(
        free_names(t)
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, Name::new(pool[(seed as usize + 3 * i) % pool.len()]))),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_round_trips(t in any_term()) {
        let text = pretty(&t);
        let back = parse(&text, CalculusId::PiMix).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{text}");
        prop_assert_eq!(pretty(&back), text);
    }

    #[test]
    fn alpha_eq_is_an_equivalence(a in any_term(), b in any_term()) {
        prop_assert!(alpha_eq(&a, &a));
        prop_assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
        let a2 = parse(&pretty(&a), CalculusId::PiMix).unwrap();
        let a3 = substitute(&Substitution::identity(), &a2);
        prop_assert!(alpha_eq(&a, &a2) && alpha_eq(&a2, &a3) && alpha_eq(&a, &a3));
    }

    #[test]
    fn substitution_maps_free_names_pointwise(t in any_term(), seed in any::<u64>()) {
        let sigma = renaming(seed, &t);
        let image: BTreeSet<Name> = free_names(&t).into_iter().map(|n| sigma.apply(n)).collect();
        let after = substitute(&sigma, &t);
        prop_assert_eq!(free_names(&after), image);
        prop_assert_eq!(after.size(), t.size());
    }

    #[test]
    fn normalize_is_idempotent(t in any_term()) {
        let once = normalize(&t, false);
        let twice = normalize(&once.term, false);
        prop_assert_eq!(once.digest, twice.digest);
        prop_assert!(struct_congruent(&t, &once.term));
    }

    #[test]
    fn congruence_is_closed_under_contexts(p in any_term(), q in any_term(), r in any_term()) {
        prop_assert!(struct_congruent(&Term::par(p.clone(), q.clone()), &Term::par(q.clone(), p.clone())));
        let p2 = Term::par(Term::Nil, normalize(&p, false).term);
        let x = Name::new("a");
        prop_assert!(struct_congruent(
            &Term::restrict(x, Term::par(p.clone(), r.clone())),
            &Term::restrict(x, Term::par(p2.clone(), r.clone()))
        ));
        let m = Name::new("b");
        prop_assert!(struct_congruent(&Term::Match(m, m, p.clone().into()), &p2));
    }

    #[test]
    fn asynchronous_targets_are_polyadic_terms(seed in any::<u64>()) {
        let s = term(seed, false, true);
        let t = encode(&s, EncodingId::SepToAsyn).unwrap();
        prop_assert!(well_formed(&t, CalculusId::PiAsyn).is_ok());
        prop_assert!(well_formed(&t, CalculusId::PiAsyn2).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn encodings_commute_with_injective_renaming(t in any_term(), seed in any::<u64>()) {
        let mut pool: Vec<Name> = ["a", "b", "c", "u", "v", "w"].iter().map(|n| Name::new(n)).collect();
        let k = seed as usize % pool.len();
        pool.rotate_left(k);
        let sigma = Substitution::from_pairs(free_names(&t).into_iter().zip(pool));
        for enc in [EncodingId::SepToAsyn, EncodingId::MixToAsyn] {
            if well_formed(&t, enc.source()).is_ok() {
                prop_assert_eq!(check_name_invariance(&t, &sigma, enc).unwrap(), Verdict::Yes);
            }
        }
    }

    #[test]
    fn pure_admin_steps_keep_the_observables(s in small_sep_term()) {
        for enc in [EncodingId::SepToAsyn, EncodingId::MixToAsyn] {
            let g = explore_reduced(&encode(&s, enc).unwrap(), Limits::new(20_000, 1_000));
            prop_assume!(g.is_complete());
            let classes = classify_graph(&g);
            let sigs = GraphSignatures::compute(&g, enc);
            for (e, class) in g.edges.iter().zip(&classes) {
                if *class == StepClass::PureAdmin {
                    prop_assert_eq!(sigs.atom(e.from), sigs.atom(e.to), "{}", pretty(&s));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The stepwise variant is the finer one.
    #[test]
    fn v1_implies_v2(a in small_sep_term(), b in small_sep_term()) {
        let enc = EncodingId::SepToAsyn;
        let lim = Limits::new(3_000, 1_000);
        let (ta, tb) = (encode(&a, enc).unwrap(), encode(&b, enc).unwrap());
        for (p, q) in [(&ta, &ta), (&ta, &tb)] {
            let v1 = bounded_bisim(p, q, enc, BisimConfig::new(Variant::V1, lim));
            let v2 = bounded_bisim(p, q, enc, BisimConfig::new(Variant::V2, lim));
            if v1 == Verdict::Yes {
                prop_assert!(v2 != Verdict::No, "{} vs {}", pretty(&a), pretty(&b));
            }
        }
    }
}
