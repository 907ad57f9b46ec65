//! Print every redex of a term, then follow the first one until none is left.

use pical_core::semantics::enabled_steps;
use pical_core::semantics::explore::rule_name;
use pical_core::{parse_any, pretty, CalculusId};

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "x!<a> | x?(y).y!<> | x?(z).0 | a?().ok".to_string());
    let mut term = parse_any(&src).expect("term parses");
    for round in 0..20 {
        let steps = enabled_steps(&term, CalculusId::PiMix);
        println!("[{round}] {}", pretty(&term));
        for (i, (redex, next)) in steps.iter().enumerate() {
            let on = redex.channel.as_ref().map_or(String::new(), |c| format!(" on {c}"));
            println!("    {i}: {}{on} -> {}", rule_name(redex.rule), pretty(next));
        }
        match steps.into_iter().next() {
            Some((_, next)) => term = next,
            None => break,
        }
    }
}
