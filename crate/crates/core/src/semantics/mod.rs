//! Reduction semantics, state canonicalisation and bounded exploration.

pub mod canon;
pub mod explore;
pub mod step;

use serde::{Deserialize, Serialize};

pub use canon::{normalize, struct_congruent, CanonicalForm};
pub use explore::{barbs, divergent, enabled_steps, explore, explore_reduced, explore_until, explore_with, reaches_success, Barb, Status, StateGraph};
pub use step::{redex_successors, reduced_successors, successors, Position, RedexDescriptor, Rule, State, Successor};

/// Exploration bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Limits {
    pub const DEFAULT_STATES: usize = 200_000;
    pub const DEFAULT_DEPTH: usize = 10_000;

    pub fn new(max_states: usize, max_depth: usize) -> Limits {
        Limits { max_states, max_depth }
    }
}

impl Default for Limits {
    /// `PICAL_MAX_STATES` overrides the state bound.
    fn default() -> Self {
        let max_states = std::env::var("PICAL_MAX_STATES")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(Limits::DEFAULT_STATES);
        Limits { max_states, max_depth: Limits::DEFAULT_DEPTH }
    }
}

/// Answer of a bounded check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Yes,
    No,
    UnknownBounded(Limits),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, Verdict::UnknownBounded(_))
    }
}
