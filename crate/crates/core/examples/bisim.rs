//! Compare encoded terms up to translated barbed bisimilarity.

use pical_core::analysis::{bounded_bisim, BisimConfig, Variant};
use pical_core::{encode, parse_any, EncodingId, Limits};

fn main() {
    let enc = EncodingId::SepToAsyn;
    let limits = Limits::new(6_000, 1_000);
    let pairs = [
        ("new x.(x!<> | x?().ok)", "tau.ok"),
        ("x!<> | x?().ok", "tau.ok"),
        ("tau.ok + tau.0", "tau.ok"),
        ("a!<> | b!<>", "b!<> | a!<>"),
        ("a!<>", "b!<>"),
    ];
    for (p, q) in pairs {
        let tp = encode(&parse_any(p).unwrap(), enc).unwrap();
        let tq = encode(&parse_any(q).unwrap(), enc).unwrap();
        let v1 = bounded_bisim(&tp, &tq, enc, BisimConfig::new(Variant::V1, limits));
        let v2 = bounded_bisim(&tp, &tq, enc, BisimConfig::new(Variant::V2, limits));
        println!("[[{p}]] vs [[{q}]]: stepwise {v1:?}, weak {v2:?}");
    }
}
