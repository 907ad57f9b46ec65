//! Run the correctness checks on a handful of terms.

use pical_core::analysis::{
    check_completeness, check_divergence_reflection, check_soundness_bounded, check_success_sensitive,
};
use pical_core::{parse_any, EncodingId, Limits};

fn main() {
    let limits = Limits::new(20_000, 1_000);
    let terms = ["x!<> | x?().ok", "a!<>.ok + b?().0 | a?().0", "tau.ok + tau.0"];
    for src in terms {
        let s = parse_any(src).unwrap();
        for enc in [EncodingId::SepToAsyn, EncodingId::MixToAsyn] {
            if pical_core::well_formed(&s, enc.source()).is_err() {
                continue;
            }
            let reports = [
                check_success_sensitive(&s, enc, limits).unwrap(),
                check_completeness(&s, enc, limits).unwrap(),
                check_soundness_bounded(&s, enc, limits).unwrap(),
            ];
            for r in reports {
                println!("{src:28} {enc:10} {:24} {:?}", r.criterion, r.verdict);
            }
            let div = check_divergence_reflection(&s, enc, limits).unwrap();
            println!("{src:28} {enc:10} {:24} {div:?}", "divergence-reflection");
        }
    }
}
