//! Process terms shared by all four calculi.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Default)]
struct Interner {
    ids: HashMap<&'static str, u32>,
    texts: Vec<&'static str>,
    hashes: Vec<u64>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| RwLock::new(Interner::default()))
}

fn intern(text: &str) -> u32 {
    if let Some(&id) = interner().read().unwrap().ids.get(text) {
        return id;
    }
    let mut guard = interner().write().unwrap();
    if let Some(&id) = guard.ids.get(text) {
        return id;
    }
    let leaked: &'static str = Box::leak(text.to_owned().into_boxed_str());
    let id = guard.texts.len() as u32;
    guard.texts.push(leaked);
    guard.hashes.push(crate::digest::text_hash(leaked));
    guard.ids.insert(leaked, id);
    id
}

fn resolve(sym: u32) -> &'static str {
    interner().read().unwrap().texts[sym as usize]
}

fn resolve_hash(sym: u32) -> u64 {
    interner().read().unwrap().hashes[sym as usize]
}

/// Encoding role attached to a name. Metadata only: never part of equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Role {
    SumLock,
    SenderLock,
    ReceiverLock,
    ChainLock,
    RequestChannelOut,
    RequestChannelIn,
    TranslatedSource,
    BoolTrueBranch,
    BoolFalseBranch,
    #[default]
    None,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::SumLock => "sumlock",
            Role::SenderLock => "senderlock",
            Role::ReceiverLock => "receiverlock",
            Role::ChainLock => "chainlock",
            Role::RequestChannelOut => "reqout",
            Role::RequestChannelIn => "reqin",
            Role::TranslatedSource => "src",
            Role::BoolTrueBranch => "true",
            Role::BoolFalseBranch => "false",
            Role::None => "none",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Role> {
        Some(match s {
            "sumlock" => Role::SumLock,
            "senderlock" => Role::SenderLock,
            "receiverlock" => Role::ReceiverLock,
            "chainlock" => Role::ChainLock,
            "reqout" => Role::RequestChannelOut,
            "reqin" => Role::RequestChannelIn,
            "src" => Role::TranslatedSource,
            "true" => Role::BoolTrueBranch,
            "false" => Role::BoolFalseBranch,
            "none" => Role::None,
            _ => return None,
        })
    }
}

/// A name: interned text plus a freshness disambiguator.
#[derive(Clone, Copy)]
pub struct Name {
    sym: u32,
    uid: u32,
    role: Role,
}

impl Name {
    pub fn new(text: &str) -> Name {
        Name { sym: intern(text), uid: 0, role: Role::None }
    }

    pub fn with(text: &str, uid: u32, role: Role) -> Name {
        Name { sym: intern(text), uid, role }
    }

    pub fn text(&self) -> &'static str {
        resolve(self.sym)
    }

    pub fn uid(&self) -> u32 {
        self.uid
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn sym(&self) -> u32 {
        self.sym
    }

    /// Run-independent hash of the text.
    pub fn text_hash(&self) -> u64 {
        resolve_hash(self.sym)
    }

    pub fn with_role(self, role: Role) -> Name {
        Name { role, ..self }
    }

    pub fn with_uid(self, uid: u32) -> Name {
        Name { uid, ..self }
    }

    /// Same text and role as `self`, different identity.
    pub fn refresh(self, fresh: &mut Fresh) -> Name {
        Name { uid: fresh.next(), ..self }
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.sym == other.sym && self.uid == other.uid
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sym.hash(state);
        self.uid.hash(state);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self == other {
            return std::cmp::Ordering::Equal;
        }
        self.text().cmp(other.text()).then(self.uid.cmp(&other.uid))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.uid == 0 {
            write!(f, "{}", self.text())
        } else {
            write!(f, "{}'{}", self.text(), self.uid)
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl serde::Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Counter for minting fresh uids.
#[derive(Clone, Debug)]
pub struct Fresh {
    next: u32,
}

impl Fresh {
    pub fn starting_at(next: u32) -> Fresh {
        Fresh { next: next.max(1) }
    }

    /// A counter that cannot collide with any uid occurring in `terms`.
    pub fn above(terms: &[&Term]) -> Fresh {
        let mut max = 0;
        for t in terms {
            t.visit_names(&mut |n| max = max.max(n.uid));
        }
        Fresh::starting_at(max + 1)
    }

    pub fn next(&mut self) -> u32 {
        let v = self.next;
        self.next += 1;
        v
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    pub fn bump_past(&mut self, uid: u32) {
        if uid >= self.next {
            self.next = uid + 1;
        }
    }
}

/// Channel subject: a single name, or a composed `first@second` channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Channel {
    pub first: Name,
    pub second: Option<Name>,
}

impl Channel {
    pub fn simple(n: Name) -> Channel {
        Channel { first: n, second: None }
    }

    pub fn composed(a: Name, b: Name) -> Channel {
        Channel { first: a, second: Some(b) }
    }

    pub fn parts(&self) -> impl Iterator<Item = Name> + '_ {
        std::iter::once(self.first).chain(self.second)
    }

    pub fn is_composed(&self) -> bool {
        self.second.is_some()
    }

    /// The name used to key arity checks: the tag of a composed channel.
    pub fn arity_key(&self) -> Name {
        self.second.unwrap_or(self.first)
    }

    fn map(&self, f: &mut impl FnMut(Name) -> Name) -> Channel {
        Channel { first: f(self.first), second: self.second.map(&mut *f) }
    }
}

impl From<Name> for Channel {
    fn from(n: Name) -> Self {
        Channel::simple(n)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            None => write!(f, "{}", self.first),
            Some(s) => write!(f, "{}@{}", self.first, s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CalculusId {
    PiMix,
    PiSep,
    PiAsyn,
    PiAsyn2,
}

impl CalculusId {
    pub fn parse(s: &str) -> Option<CalculusId> {
        Some(match s.to_ascii_lowercase().as_str() {
            "mix" | "pimix" => CalculusId::PiMix,
            "sep" | "pisep" => CalculusId::PiSep,
            "asyn" | "piasyn" => CalculusId::PiAsyn,
            "asyn2" | "piasyn2" => CalculusId::PiAsyn2,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            CalculusId::PiMix => "mix",
            CalculusId::PiSep => "sep",
            CalculusId::PiAsyn => "asyn",
            CalculusId::PiAsyn2 => "asyn2",
        }
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Process term. `Sum` holds only guarded terms (`Output`, `Input`, `Tau`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Nil,
    Success,
    Restrict(Name, Arc<Term>),
    Par(Arc<Term>, Arc<Term>),
    Match(Name, Name, Arc<Term>),
    RepInput(Channel, Vec<Name>, Arc<Term>),
    Sum(Vec<Term>),
    Output(Channel, Vec<Name>, Arc<Term>),
    Input(Channel, Vec<Name>, Arc<Term>),
    Tau(Arc<Term>),
}

pub fn nil() -> Arc<Term> {
    static NIL: OnceLock<Arc<Term>> = OnceLock::new();
    NIL.get_or_init(|| Arc::new(Term::Nil)).clone()
}

impl Term {
    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Nil) || matches!(self, Term::Sum(v) if v.is_empty())
    }

    pub fn is_guard(&self) -> bool {
        matches!(self, Term::Output(..) | Term::Input(..) | Term::Tau(..))
    }

    pub fn output(ch: impl Into<Channel>, args: Vec<Name>) -> Term {
        Term::Output(ch.into(), args, nil())
    }

    pub fn input(ch: impl Into<Channel>, binders: Vec<Name>, body: Term) -> Term {
        Term::Input(ch.into(), binders, Arc::new(body))
    }

    pub fn rep_input(ch: impl Into<Channel>, binders: Vec<Name>, body: Term) -> Term {
        Term::RepInput(ch.into(), binders, Arc::new(body))
    }

    pub fn restrict(n: Name, body: Term) -> Term {
        Term::Restrict(n, Arc::new(body))
    }

    pub fn restrict_all(names: &[Name], body: Term) -> Term {
        names.iter().rev().fold(body, |acc, n| Term::restrict(*n, acc))
    }

    pub fn par(a: Term, b: Term) -> Term {
        Term::Par(Arc::new(a), Arc::new(b))
    }

    /// Left-nested parallel composition; `0` for an empty list.
    pub fn par_all(items: impl IntoIterator<Item = Term>) -> Term {
        let mut it = items.into_iter();
        match it.next() {
            None => Term::Nil,
            Some(first) => it.fold(first, Term::par),
        }
    }

    /// Visit every name occurrence, bound or free.
    pub fn visit_names(&self, f: &mut impl FnMut(Name)) {
        match self {
            Term::Nil | Term::Success => {}
            Term::Restrict(n, b) => {
                f(*n);
                b.visit_names(f);
            }
            Term::Par(a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
            Term::Match(a, b, p) => {
                f(*a);
                f(*b);
                p.visit_names(f);
            }
            Term::RepInput(c, xs, p) | Term::Output(c, xs, p) | Term::Input(c, xs, p) => {
                c.parts().for_each(&mut *f);
                xs.iter().copied().for_each(&mut *f);
                p.visit_names(f);
            }
            Term::Sum(bs) => bs.iter().for_each(|b| b.visit_names(f)),
            Term::Tau(p) => p.visit_names(f),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Term::Nil | Term::Success => 0,
            Term::Restrict(_, b) | Term::Match(_, _, b) | Term::Tau(b) => b.size(),
            Term::Par(a, b) => a.size() + b.size(),
            Term::RepInput(_, _, p) | Term::Output(_, _, p) | Term::Input(_, _, p) => p.size(),
            Term::Sum(bs) => bs.iter().map(Term::size).sum(),
        }
    }

    pub fn contains_rep_input(&self) -> bool {
        match self {
            Term::RepInput(..) => true,
            Term::Nil | Term::Success => false,
            Term::Restrict(_, b) | Term::Match(_, _, b) | Term::Tau(b) => b.contains_rep_input(),
            Term::Par(a, b) => a.contains_rep_input() || b.contains_rep_input(),
            Term::Output(_, _, p) | Term::Input(_, _, p) => p.contains_rep_input(),
            Term::Sum(bs) => bs.iter().any(Term::contains_rep_input),
        }
    }

    pub fn contains_success(&self) -> bool {
        match self {
            Term::Success => true,
            Term::Nil => false,
            Term::Restrict(_, b) | Term::Match(_, _, b) | Term::Tau(b) => b.contains_success(),
            Term::Par(a, b) => a.contains_success() || b.contains_success(),
            Term::RepInput(_, _, p) | Term::Output(_, _, p) | Term::Input(_, _, p) => {
                p.contains_success()
            }
            Term::Sum(bs) => bs.iter().any(Term::contains_success),
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    let see = |n: Name, bound: &Vec<Name>, out: &mut HashSet<Name>| {
        if !bound.contains(&n) {
            out.insert(n);
        }
    };
    match t {
        Term::Nil | Term::Success => {}
        Term::Restrict(n, b) => {
            bound.push(*n);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::Par(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Match(a, b, p) => {
            see(*a, bound, out);
            see(*b, bound, out);
            collect_free(p, bound, out);
        }
        Term::Output(c, xs, p) => {
            for n in c.parts().chain(xs.iter().copied()) {
                see(n, bound, out);
            }
            collect_free(p, bound, out);
        }
        Term::Input(c, xs, p) | Term::RepInput(c, xs, p) => {
            for n in c.parts() {
                see(n, bound, out);
            }
            let depth = bound.len();
            bound.extend(xs.iter().copied());
            collect_free(p, bound, out);
            bound.truncate(depth);
        }
        Term::Sum(bs) => bs.iter().for_each(|b| collect_free(b, bound, out)),
        Term::Tau(p) => collect_free(p, bound, out),
    }
}

/// Free names as an unordered set (fast path).
pub fn free_name_set(term: &Term) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_free(term, &mut Vec::new(), &mut out);
    out
}

/// Free names under the standard binding rules.
pub fn free_names(term: &Term) -> BTreeSet<Name> {
    free_name_set(term).into_iter().collect()
}

/// Finite map from names to names, identity elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pairs: Vec<(Name, Name)>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    /// `{to/from}` for each pair `(from, to)`; later pairs override earlier ones.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Substitution {
        let mut s = Substitution::default();
        for (from, to) in pairs {
            s.insert(from, to);
        }
        s
    }

    pub fn insert(&mut self, from: Name, to: Name) {
        self.pairs.retain(|(f, _)| *f != from);
        if from != to {
            self.pairs.push((from, to));
        }
    }

    pub fn apply(&self, n: Name) -> Name {
        self.pairs.iter().find(|(f, _)| *f == n).map_or(n, |(_, t)| *t)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Name, Name)] {
        &self.pairs
    }

    pub fn domain(&self) -> impl Iterator<Item = Name> + '_ {
        self.pairs.iter().map(|(f, _)| *f)
    }

    fn in_range(&self, n: Name) -> bool {
        self.pairs.iter().any(|(_, t)| *t == n)
    }

    fn without(&self, n: Name) -> Substitution {
        Substitution { pairs: self.pairs.iter().copied().filter(|(f, _)| *f != n).collect() }
    }

    /// Injective on `names ∪ domain`: no two distinct names share an image.
    pub fn is_injective_on(&self, names: impl IntoIterator<Item = Name>) -> bool {
        let mut all: HashSet<Name> = names.into_iter().collect();
        all.extend(self.domain());
        let mut images = HashSet::new();
        all.into_iter().all(|n| images.insert(self.apply(n)))
    }

    pub fn is_injective(&self) -> bool {
        self.is_injective_on(std::iter::empty())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::default();
        for (f, t) in &other.pairs {
            out.insert(*f, self.apply(*t));
        }
        for (f, t) in &self.pairs {
            if !other.pairs.iter().any(|(g, _)| g == f) {
                out.insert(*f, *t);
            }
        }
        out
    }
}

/// Capture-avoiding simultaneous substitution, fresh binders from `fresh`.
pub fn substitute_with(sigma: &Substitution, term: &Arc<Term>, fresh: &mut Fresh) -> Arc<Term> {
    if sigma.is_empty() {
        return term.clone();
    }
    match &**term {
        Term::Nil | Term::Success => term.clone(),
        Term::Restrict(n, b) => {
            let (n2, s2) = enter_binder(sigma, *n, fresh);
            let b2 = substitute_with(&s2, b, fresh);
            if n2 == *n && Arc::ptr_eq(&b2, b) {
                term.clone()
            } else {
                Arc::new(Term::Restrict(n2, b2))
            }
        }
        Term::Par(a, b) => {
            let a2 = substitute_with(sigma, a, fresh);
            let b2 = substitute_with(sigma, b, fresh);
            if Arc::ptr_eq(&a2, a) && Arc::ptr_eq(&b2, b) {
                term.clone()
            } else {
                Arc::new(Term::Par(a2, b2))
            }
        }
        Term::Match(a, b, p) => {
            Arc::new(Term::Match(sigma.apply(*a), sigma.apply(*b), substitute_with(sigma, p, fresh)))
        }
        Term::Output(c, xs, p) => Arc::new(Term::Output(
            c.map(&mut |n| sigma.apply(n)),
            xs.iter().map(|n| sigma.apply(*n)).collect(),
            substitute_with(sigma, p, fresh),
        )),
        Term::Input(c, xs, p) => {
            let (xs2, p2) = subst_binders(sigma, xs, p, fresh);
            Arc::new(Term::Input(c.map(&mut |n| sigma.apply(n)), xs2, p2))
        }
        Term::RepInput(c, xs, p) => {
            let (xs2, p2) = subst_binders(sigma, xs, p, fresh);
            Arc::new(Term::RepInput(c.map(&mut |n| sigma.apply(n)), xs2, p2))
        }
        Term::Sum(bs) => Arc::new(Term::Sum(
            bs.iter()
                .map(|b| (*substitute_with(sigma, &Arc::new(b.clone()), fresh)).clone())
                .collect(),
        )),
        Term::Tau(p) => Arc::new(Term::Tau(substitute_with(sigma, p, fresh))),
    }
}

fn enter_binder(sigma: &Substitution, n: Name, fresh: &mut Fresh) -> (Name, Substitution) {
    let mut s = sigma.without(n);
    if s.in_range(n) {
        let n2 = n.refresh(fresh);
        s.insert(n, n2);
        (n2, s)
    } else {
        (n, s)
    }
}

fn subst_binders(
    sigma: &Substitution,
    xs: &[Name],
    p: &Arc<Term>,
    fresh: &mut Fresh,
) -> (Vec<Name>, Arc<Term>) {
    let mut s = sigma.clone();
    for x in xs {
        s = s.without(*x);
    }
    let mut out = Vec::with_capacity(xs.len());
    let renames: Vec<(Name, Name)> = xs
        .iter()
        .filter(|x| s.in_range(**x))
        .map(|x| (*x, x.refresh(fresh)))
        .collect();
    for x in xs {
        out.push(renames.iter().find(|(f, _)| f == x).map_or(*x, |(_, t)| *t));
    }
    for (f, t) in renames {
        s.insert(f, t);
    }
    (out, substitute_with(&s, p, fresh))
}

/// Capture-avoiding simultaneous substitution.
pub fn substitute(sigma: &Substitution, term: &Term) -> Term {
    let mut extra: Vec<Term> = Vec::new();
    for (f, t) in sigma.pairs() {
        extra.push(Term::output(*f, vec![*t]));
    }
    let mut refs: Vec<&Term> = extra.iter().collect();
    refs.push(term);
    let mut fresh = Fresh::above(&refs);
    (*substitute_with(sigma, &Arc::new(term.clone()), &mut fresh)).clone()
}

/// Equality up to consistent renaming of bound names.
pub fn alpha_eq(p: &Term, q: &Term) -> bool {
    alpha(p, q, &mut Vec::new(), &mut Vec::new())
}

fn same(a: Name, b: Name, lb: &[Name], rb: &[Name]) -> bool {
    let i = lb.iter().rposition(|n| *n == a);
    let j = rb.iter().rposition(|n| *n == b);
    match (i, j) {
        (Some(i), Some(j)) => i == j,
        (None, None) => a == b,
        _ => false,
    }
}

fn same_ch(a: &Channel, b: &Channel, lb: &[Name], rb: &[Name]) -> bool {
    same(a.first, b.first, lb, rb)
        && match (a.second, b.second) {
            (None, None) => true,
            (Some(x), Some(y)) => same(x, y, lb, rb),
            _ => false,
        }
}

fn alpha(p: &Term, q: &Term, lb: &mut Vec<Name>, rb: &mut Vec<Name>) -> bool {
    match (p, q) {
        (a, b) if a.is_nil() && b.is_nil() => true,
        (Term::Success, Term::Success) => true,
        (Term::Restrict(n, a), Term::Restrict(m, b)) => {
            lb.push(*n);
            rb.push(*m);
            let r = alpha(a, b, lb, rb);
            lb.pop();
            rb.pop();
            r
        }
        (Term::Par(a1, a2), Term::Par(b1, b2)) => alpha(a1, b1, lb, rb) && alpha(a2, b2, lb, rb),
        (Term::Match(a, b, p1), Term::Match(c, d, q1)) => {
            same(*a, *c, lb, rb) && same(*b, *d, lb, rb) && alpha(p1, q1, lb, rb)
        }
        (Term::Output(c1, xs, p1), Term::Output(c2, ys, q1)) => {
            same_ch(c1, c2, lb, rb)
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| same(*x, *y, lb, rb))
                && alpha(p1, q1, lb, rb)
        }
        (Term::Input(c1, xs, p1), Term::Input(c2, ys, q1))
        | (Term::RepInput(c1, xs, p1), Term::RepInput(c2, ys, q1)) => {
            if !same_ch(c1, c2, lb, rb) || xs.len() != ys.len() {
                return false;
            }
            let (dl, dr) = (lb.len(), rb.len());
            lb.extend(xs.iter().copied());
            rb.extend(ys.iter().copied());
            let r = alpha(p1, q1, lb, rb);
            lb.truncate(dl);
            rb.truncate(dr);
            r
        }
        (Term::Sum(xs), Term::Sum(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha(x, y, lb, rb))
        }
        (Term::Tau(a), Term::Tau(b)) => alpha(a, b, lb, rb),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule}: {subterm}")]
pub struct Violation {
    pub rule: String,
    pub subterm: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("arity conflict on {name}: {first} vs {second}")]
pub struct ArityConflict {
    pub name: Name,
    pub first: usize,
    pub second: usize,
}

/// Grammar membership for a calculus; arity is checked by [`check_arity`].
pub fn well_formed(term: &Term, calc: CalculusId) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    wf(term, calc, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn wf(term: &Term, calc: CalculusId, out: &mut Vec<Violation>) {
    let asyn = matches!(calc, CalculusId::PiAsyn | CalculusId::PiAsyn2);
    let flag = |rule: &str, t: &Term, out: &mut Vec<Violation>| {
        out.push(Violation { rule: rule.to_string(), subterm: crate::parser::pretty(t) })
    };
    let check_ch = |c: &Channel, t: &Term, out: &mut Vec<Violation>| {
        if c.is_composed() && calc != CalculusId::PiAsyn2 {
            out.push(Violation {
                rule: format!("composed channel not allowed in {calc}"),
                subterm: crate::parser::pretty(t),
            });
        }
    };
    match term {
        Term::Nil | Term::Success => {}
        Term::Restrict(_, b) | Term::Match(_, _, b) | Term::Tau(b) => wf(b, calc, out),
        Term::Par(a, b) => {
            wf(a, calc, out);
            wf(b, calc, out);
        }
        Term::Output(c, _, p) => {
            check_ch(c, term, out);
            if asyn && !p.is_nil() {
                flag("output continuation must be 0 in asynchronous calculi", term, out);
            }
            wf(p, calc, out);
        }
        Term::Input(c, _, p) | Term::RepInput(c, _, p) => {
            check_ch(c, term, out);
            wf(p, calc, out);
        }
        Term::Sum(bs) => {
            if asyn && bs.len() > 1 {
                flag("sums of more than one guard not allowed in asynchronous calculi", term, out);
            }
            if bs.iter().any(|b| !b.is_guard()) {
                flag("sum branches must be guarded", term, out);
            }
            if calc == CalculusId::PiSep {
                let ins = bs.iter().any(|b| matches!(b, Term::Input(..)));
                let outs = bs.iter().any(|b| matches!(b, Term::Output(..)));
                if ins && outs {
                    flag("mixed sum: separate choice forbids input and output guards together", term, out);
                }
            }
            for b in bs {
                wf(b, calc, out);
            }
        }
    }
}

/// Every channel subject is used with a single arity throughout the term.
pub fn check_arity(term: &Term) -> Result<(), Vec<ArityConflict>> {
    let mut seen: HashMap<Name, usize> = HashMap::new();
    let mut out: Vec<ArityConflict> = Vec::new();
    arity_walk(term, &mut seen, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn arity_walk(term: &Term, seen: &mut HashMap<Name, usize>, out: &mut Vec<ArityConflict>) {
    let mut note = |c: &Channel, n: usize, seen: &mut HashMap<Name, usize>| {
        let key = c.arity_key();
        match seen.get(&key) {
            Some(&m) if m != n => {
                if !out.iter().any(|e| e.name == key && e.second == n) {
                    out.push(ArityConflict { name: key, first: m, second: n });
                }
            }
            Some(_) => {}
            None => {
                seen.insert(key, n);
            }
        }
    };
    match term {
        Term::Nil | Term::Success => {}
        Term::Restrict(_, b) | Term::Match(_, _, b) | Term::Tau(b) => arity_walk(b, seen, out),
        Term::Par(a, b) => {
            arity_walk(a, seen, out);
            arity_walk(b, seen, out);
        }
        Term::Output(c, xs, p) | Term::Input(c, xs, p) | Term::RepInput(c, xs, p) => {
            note(c, xs.len(), seen);
            arity_walk(p, seen, out);
        }
        Term::Sum(bs) => bs.iter().for_each(|b| arity_walk(b, seen, out)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_any;

    fn p(s: &str) -> Term {
        parse_any(s).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|s| Name::new(s)).collect()
    }

    #[test]
    fn free_names_follow_binding() {
        assert_eq!(free_names(&p("x!<z>")), names(&["x", "z"]));
        assert_eq!(free_names(&p("new x.(x!<z>)")), names(&["z"]));
        assert!(free_names(&p("ok")).is_empty());
        assert_eq!(free_names(&p("x?(y).y!<w>")), names(&["x", "w"]));
    }

    #[test]
    fn substitution_avoids_capture() {
        let a = Name::new("a");
        let b = Name::new("b");
        let s = Substitution::from_pairs([(a, b)]);
        assert!(alpha_eq(&substitute(&s, &p("a!<a>")), &p("b!<b>")));
        let r = substitute(&s, &p("new b.(b!<a>)"));
        assert!(alpha_eq(&r, &p("new c.(c!<b>)")));
        assert!(!alpha_eq(&r, &p("new b.(b!<b>)")));
        let t = p("x?(y).new z.(y!<z> | q!<>)");
        assert!(alpha_eq(&substitute(&Substitution::identity(), &t), &t));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&p("new x.(x!<a>)"), &p("new y.(y!<a>)")));
        assert!(alpha_eq(&p("x?(y).y!<a>"), &p("x?(z).z!<a>")));
        assert!(!alpha_eq(&p("x!<a>"), &p("x!<b>")));
        assert!(!alpha_eq(&p("x?(y).y!<a>"), &p("x?(z).y!<a>")));
    }

    #[test]
    fn well_formedness_per_calculus() {
        let mixed = p("x?(y).0 + z!<a>.0");
        assert!(well_formed(&mixed, CalculusId::PiSep).is_err());
        assert!(well_formed(&mixed, CalculusId::PiMix).is_ok());
        assert!(well_formed(&p("x!<a>.y!<b>"), CalculusId::PiAsyn).is_err());
        assert!(well_formed(&p("a@o!<l,s>"), CalculusId::PiAsyn).is_err());
        assert!(well_formed(&p("a@o!<l,s>"), CalculusId::PiAsyn2).is_ok());
    }

    #[test]
    fn arity_conflicts() {
        assert!(check_arity(&p("x!<a> | x?(y).0")).is_ok());
        let err = check_arity(&p("x!<a,b> | x?(y).0")).unwrap_err();
        assert_eq!(err[0].name, Name::new("x"));
        assert_eq!((err[0].first, err[0].second), (2, 1));
    }

    #[test]
    fn composition_and_injectivity() {
        let (a, b, c) = (Name::new("a"), Name::new("b"), Name::new("c"));
        let s1 = Substitution::from_pairs([(a, b)]);
        let s2 = Substitution::from_pairs([(b, c)]);
        let comp = s2.compose(&s1);
        assert_eq!(comp.apply(a), c);
        assert_eq!(comp.apply(b), c);
        assert!(s1.is_injective());
        assert!(!s1.is_injective_on([b]));
    }
}
