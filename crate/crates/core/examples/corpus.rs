//! Generate a seeded corpus and report which calculi each term belongs to.

use pical_core::corpus::{generate, CorpusConfig};
use pical_core::{pretty, well_formed, CalculusId};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg = CorpusConfig { seed, count: 10, mixed: true, ..Default::default() };
    for (i, t) in generate(cfg).iter().enumerate() {
        let calc = if well_formed(t, CalculusId::PiSep).is_ok() { "sep" } else { "mix" };
        println!("t{i:02} {calc}  {}", pretty(t));
    }
}
