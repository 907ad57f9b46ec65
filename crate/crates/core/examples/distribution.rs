//! Probe whether two parallel conflicts can be simulated independently.

use pical_core::analysis::distribution_probe;
use pical_core::{parse_any, EncodingId, Limits};

fn main() {
    let s = parse_any("(a!<> | b!<>) | (a?().0 | b?().0)").unwrap();
    let split = [vec![0, 2], vec![1, 3]];
    for enc in [EncodingId::SepToAsyn, EncodingId::MixToAsyn] {
        let report = distribution_probe(&s, &split, enc, Limits::new(50_000, 1_000)).unwrap();
        println!("{enc}: {:?}", report.verdict);
        println!("  commits  {:?}", report.commits);
        println!("  critical {:?}", report.critical);
    }
}
