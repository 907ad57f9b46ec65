//! Choice encodings into the asynchronous calculi.

mod mix;
mod mix2;
mod sep;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::pretty;
use crate::term::{
    check_arity, free_name_set, well_formed, CalculusId, Fresh, Name, Role, Substitution, Term, Violation,
};

pub use mix::encode_mix_asyn;
pub use mix2::encode_mix_asyn2;
pub use sep::encode_sep_asyn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EncodingId {
    SepToAsyn,
    MixToAsyn,
    MixToAsyn2,
}

impl EncodingId {
    pub const ALL: [EncodingId; 3] = [EncodingId::SepToAsyn, EncodingId::MixToAsyn, EncodingId::MixToAsyn2];

    pub fn parse(s: &str) -> Option<EncodingId> {
        Some(match s.to_ascii_lowercase().as_str() {
            "sep-asyn" | "sep" => EncodingId::SepToAsyn,
            "mix-asyn" | "mix" => EncodingId::MixToAsyn,
            "mix-asyn2" | "mix2" => EncodingId::MixToAsyn2,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            EncodingId::SepToAsyn => "sep-asyn",
            EncodingId::MixToAsyn => "mix-asyn",
            EncodingId::MixToAsyn2 => "mix-asyn2",
        }
    }

    pub fn source(self) -> CalculusId {
        match self {
            EncodingId::SepToAsyn => CalculusId::PiSep,
            _ => CalculusId::PiMix,
        }
    }

    pub fn target(self) -> CalculusId {
        match self {
            EncodingId::MixToAsyn2 => CalculusId::PiAsyn2,
            _ => CalculusId::PiAsyn,
        }
    }
}

impl fmt::Display for EncodingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("source is not a {calc} term: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotInSource { calc: CalculusId, violations: Vec<Violation> },
    #[error("replicated input unsupported at `{position}`")]
    ReplicatedInput { position: String },
    #[error("channel `{channel}` has arity {arity}; the mix encodings carry at most one value")]
    Polyadic { channel: String, arity: usize },
    #[error("test names {t} and {f} are not fresh for the branches")]
    Freshness { t: Name, f: Name },
}

/// The positive or negative instantiation of a boolean lock.
pub fn expand_booleans(lock: Name, value: bool) -> Term {
    let t = Name::with("t", 0, Role::BoolTrueBranch);
    let f = Name::with("f", 0, Role::BoolFalseBranch);
    let chosen = if value { t } else { f };
    Term::input(lock, vec![t, f], Term::output(chosen, vec![]))
}

/// `new t,f.(l!<t,f> | t?().P | f?().Q)` with t, f fresh for P and Q.
pub fn build_test(lock: Name, then_t: Term, else_t: Term) -> Term {
    let mut fresh = Fresh::above(&[&then_t, &else_t]);
    let t = Name::with("t", fresh.next(), Role::BoolTrueBranch);
    let f = Name::with("f", fresh.next(), Role::BoolFalseBranch);
    test_term(lock, t, f, then_t, else_t)
}

/// `build_test` with caller-chosen branch names.
pub fn build_test_with(lock: Name, t: Name, f: Name, then_t: Term, else_t: Term) -> Result<Term, EncodeError> {
    let clash = |n: Name| n == lock || free_name_set(&then_t).contains(&n) || free_name_set(&else_t).contains(&n);
    if t == f || clash(t) || clash(f) {
        return Err(EncodeError::Freshness { t, f });
    }
    Ok(test_term(lock, t, f, then_t, else_t))
}

fn test_term(lock: Name, t: Name, f: Name, then_t: Term, else_t: Term) -> Term {
    Term::restrict_all(
        &[t, f],
        Term::par_all([
            Term::output(lock, vec![t, f]),
            Term::input(t, vec![], then_t),
            Term::input(f, vec![], else_t),
        ]),
    )
}

/// `!y?(x1..xn).(t1!<x1..xn> | ...)`.
pub fn make_forwarder(y: Name, targets: &[Name], arity: usize) -> Term {
    let mut fresh = Fresh::starting_at(1);
    for n in targets.iter().chain([&y]) {
        fresh.bump_past(n.uid());
    }
    forwarder(&mut fresh, y, targets, arity)
}

fn forwarder(fresh: &mut Fresh, y: Name, targets: &[Name], arity: usize) -> Term {
    let xs: Vec<Name> = (0..arity).map(|_| Name::with("x", fresh.next(), Role::None)).collect();
    let body = Term::par_all(targets.iter().map(|t| Term::output(*t, xs.clone())));
    Term::rep_input(y, xs, body)
}

/// Injective translation of source names, disjoint from the reserved names.
#[derive(Clone, Debug)]
pub struct RenamingPolicy {
    pub prefix: &'static str,
    pub reserved: Vec<&'static str>,
}

impl RenamingPolicy {
    pub fn apply(&self, n: Name) -> Name {
        if n.text() == "_" {
            return n.with_role(Role::TranslatedSource);
        }
        Name::with(&format!("{}{}", self.prefix, n.text()), n.uid(), Role::TranslatedSource)
    }

    pub fn is_reserved(&self, n: Name) -> bool {
        self.reserved.contains(&n.text())
    }

    /// `phi(sigma)`: the substitution mapping `phi(a)` to `phi(sigma(a))`.
    pub fn lift(&self, sigma: &Substitution) -> Substitution {
        Substitution::from_pairs(sigma.pairs().iter().map(|(a, b)| (self.apply(*a), self.apply(*b))))
    }
}

const SEP_RESERVED: &[&str] = &["l", "l'", "r", "s", "t", "f"];
const MIX_RESERVED: &[&str] = &[
    "po", "pi", "uo", "ui", "mo", "mi", "muo", "mui", "co", "ci", "l", "ls", "lr", "l1", "l2", "s", "r", "cr1",
    "cr2", "mri", "mro", "mrui", "mruo", "y", "y'", "z", "t", "f",
];
const MIX2_RESERVED: &[&str] = &[
    "po", "pi", "uo", "ui", "l", "ls", "lr", "l1", "l2", "s1", "s2", "r", "o", "i", "y", "z", "t", "f", "b",
];

pub fn renaming_policy(enc: EncodingId) -> RenamingPolicy {
    let reserved = match enc {
        EncodingId::SepToAsyn => SEP_RESERVED,
        EncodingId::MixToAsyn => MIX_RESERVED,
        EncodingId::MixToAsyn2 => MIX2_RESERVED,
    };
    RenamingPolicy { prefix: "src_", reserved: reserved.to_vec() }
}

/// The two request channels left free by the mix encodings.
pub fn request_channels() -> (Name, Name) {
    (Name::with("po", 0, Role::RequestChannelOut), Name::with("pi", 0, Role::RequestChannelIn))
}

/// Encode a source term. The result is well formed in the target calculus.
pub fn encode(s: &Term, enc: EncodingId) -> Result<Term, EncodeError> {
    match enc {
        EncodingId::SepToAsyn => encode_sep_asyn(s),
        EncodingId::MixToAsyn => encode_mix_asyn(s),
        EncodingId::MixToAsyn2 => encode_mix_asyn2(s),
    }
}

fn check_source(s: &Term, calc: CalculusId) -> Result<(), EncodeError> {
    well_formed(s, calc).map_err(|violations| EncodeError::NotInSource { calc, violations })
}

fn check_monadic(s: &Term) -> Result<(), EncodeError> {
    let mut err = None;
    visit_prefixes(s, &mut |t| {
        let (ch, n) = match t {
            Term::Output(ch, xs, _) | Term::Input(ch, xs, _) | Term::RepInput(ch, xs, _) => (ch, xs.len()),
            _ => return,
        };
        if n > 1 && err.is_none() {
            err = Some(EncodeError::Polyadic { channel: ch.to_string(), arity: n });
        }
    });
    err.map_or(Ok(()), Err)
}

fn visit_prefixes(t: &Term, f: &mut impl FnMut(&Term)) {
    f(t);
    match t {
        Term::Nil | Term::Success => {}
        Term::Restrict(_, p) | Term::Match(_, _, p) | Term::Tau(p) => visit_prefixes(p, f),
        Term::Output(_, _, p) | Term::Input(_, _, p) | Term::RepInput(_, _, p) => visit_prefixes(p, f),
        Term::Par(a, b) => {
            visit_prefixes(a, f);
            visit_prefixes(b, f);
        }
        Term::Sum(bs) => bs.iter().for_each(|b| visit_prefixes(b, f)),
    }
}

fn reject_rep_input(s: &Term) -> Result<(), EncodeError> {
    let mut err = None;
    visit_prefixes(s, &mut |t| {
        if matches!(t, Term::RepInput(..)) && err.is_none() {
            err = Some(EncodeError::ReplicatedInput { position: pretty(t) });
        }
    });
    err.map_or(Ok(()), Err)
}

/// Fresh-name source shared by the encoders.
struct Gen {
    fresh: Fresh,
    phi: RenamingPolicy,
}

impl Gen {
    fn new(enc: EncodingId) -> Gen {
        Gen { fresh: Fresh::starting_at(1), phi: renaming_policy(enc) }
    }

    fn name(&mut self, text: &str, role: Role) -> Name {
        Name::with(text, self.fresh.next(), role)
    }

    fn wild(&mut self) -> Name {
        self.name("_", Role::None)
    }

    fn phi(&self, n: Name) -> Name {
        self.phi.apply(n)
    }

    fn phis(&self, ns: &[Name]) -> Vec<Name> {
        ns.iter().map(|n| self.phi(*n)).collect()
    }

    fn set(&self, lock: Name, value: bool) -> Term {
        expand_booleans(lock, value)
    }

    fn test(&mut self, lock: Name, then_t: Term, else_t: Term) -> Term {
        let t = self.name("t", Role::BoolTrueBranch);
        let f = self.name("f", Role::BoolFalseBranch);
        test_term(lock, t, f, then_t, else_t)
    }

    fn fwd(&mut self, y: Name, targets: &[Name], arity: usize) -> Term {
        forwarder(&mut self.fresh, y, targets, arity)
    }

    /// The guards of a sum; a bare guard is a sum of one.
    fn branches(t: &Term) -> Option<Vec<&Term>> {
        match t {
            Term::Nil => Some(vec![]),
            Term::Sum(bs) => Some(bs.iter().collect()),
            Term::Output(..) | Term::Input(..) | Term::Tau(_) => Some(vec![t]),
            _ => None,
        }
    }

    /// `test(l, l:=F | P, l:=F)` for a tau branch.
    fn tau(&mut self, l: Name, p: Term) -> Term {
        let then_t = Term::par(self.set(l, false), p);
        self.test(l, then_t, self.set(l, false))
    }
}

fn finish(t: Term, enc: EncodingId) -> Term {
    debug_assert!(well_formed(&t, enc.target()).is_ok(), "encoder output not in target: {}", pretty(&t));
    debug_assert!(check_arity(&t).is_ok(), "encoder output has arity conflicts: {}", pretty(&t));
    t
}
