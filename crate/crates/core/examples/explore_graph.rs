//! Explore the state space of an encoded term and summarise it.

use pical_core::analysis::{classify_graph, StepClass};
use pical_core::semantics::{barbs, explore_reduced};
use pical_core::{encode, explore, parse_any, EncodingId, Limits};

fn main() {
    let source = parse_any("x!<z>.0 + y?(w).0 | x?(v).ok").unwrap();
    let enc = EncodingId::MixToAsyn;
    let target = encode(&source, enc).unwrap();
    let limits = Limits::new(50_000, 1_000);

    let source_graph = explore(&source, enc.source(), limits);
    println!("source: {} states, {} edges", source_graph.len(), source_graph.edges.len());

    let g = explore_reduced(&target, limits);
    let classes = classify_graph(&g);
    let count = |c: StepClass| classes.iter().filter(|&&k| k == c).count();
    println!("target: {} states, {} edges, {:?}", g.len(), g.edges.len(), g.status);
    println!(
        "  non-admin {}, pure admin {}, impure admin {}",
        count(StepClass::NonAdmin),
        count(StepClass::PureAdmin),
        count(StepClass::ImpureAdmin)
    );
    let success = g.states.iter().filter(|s| s.has_success()).count();
    let stuck = (0..g.len()).filter(|&i| g.out[i].is_empty()).count();
    println!("  {success} success states, {stuck} terminal states, cycle: {}", g.has_cycle());
    println!("  barbs of the root: {:?}", barbs(&target));
}
