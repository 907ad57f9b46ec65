//! Executable checks of the encodings' correctness properties.

pub mod barbs;
pub mod bisim;
pub mod checks;
pub mod classify;
pub mod distribution;
pub mod junk;
pub mod locks;

use serde::{Deserialize, Serialize};

pub use barbs::{translated_barbs, Atom, Direction, GraphSignatures, Signature, TransBarb};
pub use bisim::{bounded_bisim, BisimConfig, Variant};
pub use checks::{
    check_completeness, check_divergence_reflection, check_name_invariance, check_soundness_bounded,
    check_success_sensitive, CheckReport, Target, WitnessStep,
};
pub use classify::{classify_graph, classify_step};
pub use distribution::{distribution_probe, DistributionReport, DistributionVerdict};
pub use junk::{junk_report, JunkItem, JunkKind};
pub use locks::{lock_census, lock_violations, lost_requests, requests, LockCensus, RequestKind, RequestView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepClass {
    NonAdmin,
    PureAdmin,
    ImpureAdmin,
}
