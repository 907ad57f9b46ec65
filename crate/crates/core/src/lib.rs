//! Pi-calculus workbench: four calculi, three choice encodings, and
//! executable checks of the encodings' correctness properties.

pub mod analysis;
pub mod corpus;
pub mod digest;
pub mod encodings;
pub mod parser;
pub mod semantics;
pub mod term;

pub use digest::Digest;
pub use encodings::{encode, EncodeError, EncodingId};
pub use parser::{parse, parse_any, parse_file, pretty, pretty_with, PrettyOptions, Declaration, ParseError, SourceFile};
pub use semantics::{explore, Limits, StateGraph, Verdict};
pub use term::{
    alpha_eq, check_arity, free_names, substitute, well_formed, CalculusId, Channel, Name, Role,
    Substitution, Term,
};
