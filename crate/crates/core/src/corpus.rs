//! Seeded random source terms.
//!
//! Free channels are `a` and `b` (nullary) and `c` (carrying one nullary
//! name). Received names are used as nullary channels or as values.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::term::{well_formed, CalculusId, Name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Prefix nesting depth.
    pub max_depth: usize,
    /// Top-level parallel components.
    pub max_components: usize,
    /// Guards per sum.
    pub max_width: usize,
    /// Guards in the whole term; larger draws are discarded.
    pub max_guards: usize,
    /// Allow sums mixing inputs and outputs.
    pub mixed: bool,
    /// Allow replicated inputs at top level.
    pub replication: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 7,
            count: 30,
            max_depth: 3,
            max_components: 4,
            max_width: 3,
            max_guards: 6,
            mixed: false,
            replication: false,
        }
    }
}

impl CorpusConfig {
    pub fn calculus(&self) -> CalculusId {
        if self.mixed {
            CalculusId::PiMix
        } else {
            CalculusId::PiSep
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    cfg: CorpusConfig,
    binders: u32,
}

impl Gen {
    fn nullary(&mut self, scope: &[Name]) -> Name {
        let mut pool = vec![Name::new("a"), Name::new("b")];
        pool.extend_from_slice(scope);
        *pool.choose(&mut self.rng).unwrap()
    }

    fn guard(&mut self, depth: usize, scope: &[Name], dir: Option<bool>) -> Term {
        let roll = self.rng.gen_range(0..10);
        let output = match dir {
            Some(o) if roll >= 2 => o,
            None if roll >= 2 => self.rng.gen_bool(0.5),
            _ => {
                let body = self.process(depth - 1, scope);
                return Term::Tau(body.into());
            }
        };
        let on_c = self.rng.gen_bool(0.3);
        if output {
            let body = self.process(depth - 1, scope);
            if on_c {
                let v = self.nullary(scope);
                Term::Output(Name::new("c").into(), vec![v], body.into())
            } else {
                Term::Output(self.nullary(scope).into(), vec![], body.into())
            }
        } else if on_c {
            self.binders += 1;
            let x = Name::new(&format!("x{}", self.binders));
            let mut inner = scope.to_vec();
            inner.push(x);
            let body = self.process(depth - 1, &inner);
            Term::Input(Name::new("c").into(), vec![x], body.into())
        } else {
            let ch = self.nullary(scope);
            let body = self.process(depth - 1, scope);
            Term::Input(ch.into(), vec![], body.into())
        }
    }

    fn sum(&mut self, depth: usize, scope: &[Name]) -> Term {
        let width = match self.rng.gen_range(0..20) {
            0..=9 => 1,
            10..=16 => 2,
            _ => 3,
        }
        .min(self.cfg.max_width);
        let dir = if self.cfg.mixed { None } else { Some(self.rng.gen_bool(0.5)) };
        let mut bs: Vec<Term> = (0..width).map(|_| self.guard(depth, scope, dir)).collect();
        if bs.len() == 1 {
            bs.pop().unwrap()
        } else {
            Term::Sum(bs)
        }
    }

    fn process(&mut self, depth: usize, scope: &[Name]) -> Term {
        if depth == 0 {
            return if self.rng.gen_bool(0.2) { Term::Success } else { Term::Nil };
        }
        match self.rng.gen_range(0..20) {
            0..=8 => Term::Nil,
            9..=11 => Term::Success,
            12 => Term::par(self.sum(depth, scope), self.sum(depth, scope)),
            _ => self.sum(depth, scope),
        }
    }

    fn top(&mut self) -> Term {
        let depth = self.cfg.max_depth;
        let k = self.rng.gen_range(2..=self.cfg.max_components.max(2));
        let mut parts: Vec<Term> = (0..k).map(|_| self.sum(depth, &[])).collect();
        if self.cfg.replication && self.rng.gen_bool(0.3) {
            let ch = self.nullary(&[]);
            let body = self.process(1, &[]);
            parts[0] = Term::RepInput(ch.into(), vec![], body.into());
        }
        let t = Term::par_all(parts);
        if self.rng.gen_bool(0.2) {
            Term::restrict(Name::new("b"), t)
        } else {
            t
        }
    }
}

/// Deterministic corpus for a configuration.
pub fn generate(cfg: CorpusConfig) -> Vec<Term> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(cfg.seed), cfg, binders: 0 };
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        g.binders = 0;
        let t = g.top();
        if guards(&t) > cfg.max_guards {
            continue;
        }
        debug_assert!(well_formed(&t, cfg.calculus()).is_ok());
        out.push(t);
    }
    out
}

/// Number of prefixes in a term.
pub fn guards(t: &Term) -> usize {
    match t {
        Term::Nil | Term::Success => 0,
        Term::Restrict(_, p) | Term::Match(_, _, p) => guards(p),
        Term::Par(a, b) => guards(a) + guards(b),
        Term::Sum(bs) => bs.iter().map(guards).sum(),
        Term::Output(_, _, p) | Term::Input(_, _, p) | Term::RepInput(_, _, p) | Term::Tau(p) => 1 + guards(p),
    }
}
