//! Structural-congruence normal forms.
//!
//! A level (the top of a state, or the body under a prefix) is flattened into
//! restricted names plus parallel components. Its digest is computed by
//! colour refinement over the restricted names, followed by individualisation
//! when refinement leaves ties. Components that share no restricted name are
//! hashed as independent groups, which keeps the search small.

use std::collections::HashSet;
use std::sync::Arc;

use crate::digest::{Digest, H};
use crate::term::{alpha_eq, free_name_set, Fresh, Name, Substitution, Term};

/// Upper bound on individualisation leaves explored per group.
pub const LEAF_BUDGET: usize = 256;

mod tag {
    pub const FREE: u8 = 1;
    pub const LABEL: u8 = 2;
    pub const WILD: u8 = 3;
    pub const NESTED: u8 = 4;
    pub const NIL: u8 = 10;
    pub const OK: u8 = 11;
    pub const OUT: u8 = 12;
    pub const IN: u8 = 13;
    pub const REP: u8 = 14;
    pub const TAU: u8 = 15;
    pub const SUM: u8 = 16;
    pub const MATCH: u8 = 17;
    pub const LEVEL: u8 = 18;
    pub const GROUP: u8 = 19;
    pub const PATH: u8 = 20;
    pub const COLOUR: u8 = 21;
    pub const INDIV: u8 = 22;
    pub const COMP: u8 = 23;
}

#[derive(Clone, Copy, Debug)]
enum Tok {
    Label(u32),
    /// Restricted name of the level being refined, by index.
    Wild(u32),
    Nested,
}

#[derive(Clone, Copy)]
struct Entry {
    name: Name,
    tok: Tok,
}

/// Which restricted names of a level scope over a component.
#[derive(Clone, Debug)]
enum Scope {
    All,
    Some(Vec<u32>),
}

struct Level<'a> {
    rs: Vec<Name>,
    comps: Vec<(&'a Term, Scope)>,
}

/// Flatten a term into one level without renaming: nested restrictions get
/// their own entries and per-component scopes.
fn flatten_level(t: &Term) -> Level<'_> {
    let mut lv = Level { rs: Vec::new(), comps: Vec::new() };
    let mut scope = Vec::new();
    flat(t, &mut lv, &mut scope);
    lv
}

fn flat<'a>(t: &'a Term, lv: &mut Level<'a>, scope: &mut Vec<u32>) {
    match t {
        Term::Nil => {}
        Term::Sum(bs) if bs.is_empty() => {}
        Term::Sum(bs) if bs.len() == 1 => flat(&bs[0], lv, scope),
        Term::Par(a, b) => {
            flat(a, lv, scope);
            flat(b, lv, scope);
        }
        Term::Restrict(n, b) => {
            lv.rs.push(*n);
            scope.push(lv.rs.len() as u32 - 1);
            flat(b, lv, scope);
            scope.pop();
        }
        Term::Match(a, b, p) if a == b => flat(p, lv, scope),
        _ => lv.comps.push((t, Scope::Some(scope.clone()))),
    }
}

/// Terms that stay whole as parallel components of a level.
pub fn is_component(t: &Term) -> bool {
    match t {
        Term::Nil | Term::Par(..) | Term::Restrict(..) => false,
        Term::Sum(bs) => bs.len() >= 2,
        Term::Match(a, b, _) => a != b,
        _ => true,
    }
}

struct Ctx {
    env: Vec<Entry>,
    /// Occurrences recorded during a shape pass: (restricted index, relative path).
    occ: Vec<(u32, Digest)>,
}

impl Ctx {
    fn lookup(&self, n: Name) -> Option<Tok> {
        self.env.iter().rev().find(|e| e.name == n).map(|e| e.tok)
    }

    fn name(&mut self, h: &mut H, n: Name, pos: u32) {
        match self.lookup(n) {
            None => {
                h.u8(tag::FREE).u64(n.text_hash()).u32(n.uid());
            }
            Some(Tok::Label(k)) => {
                h.u8(tag::LABEL).u32(k);
            }
            Some(Tok::Wild(i)) => {
                h.u8(tag::WILD);
                self.occ.push((i, H::new(tag::PATH).u32(pos).finish()));
            }
            Some(Tok::Nested) => {
                h.u8(tag::NESTED);
            }
        }
    }

    fn prefix_path(&mut self, from: usize, step: Digest) {
        for o in &mut self.occ[from..] {
            o.1 = H::new(tag::PATH).u128(step).u128(o.1).finish();
        }
    }
}

/// Shape hash: restricted names of the refined level are anonymous, names of
/// deeper levels are anonymous and unrefined. Occurrence paths are recorded.
fn shape(t: &Term, cx: &mut Ctx, depth: u32) -> Digest {
    match t {
        Term::Nil => H::new(tag::NIL).finish(),
        Term::Sum(bs) if bs.is_empty() => H::new(tag::NIL).finish(),
        Term::Success => H::new(tag::OK).finish(),
        Term::Output(c, xs, p) => {
            let mut h = H::new(tag::OUT);
            let mut pos = 0;
            for n in c.parts() {
                cx.name(&mut h, n, pos);
                pos += 1;
            }
            h.u32(xs.len() as u32);
            for n in xs {
                cx.name(&mut h, *n, 100 + pos);
                pos += 1;
            }
            let mid = cx.occ.len();
            let k = shape_level(p, cx, depth);
            cx.prefix_path(mid, 7);
            h.u128(k).finish()
        }
        Term::Input(c, xs, p) | Term::RepInput(c, xs, p) => {
            let mut h = H::new(if matches!(t, Term::Input(..)) { tag::IN } else { tag::REP });
            let mut pos = 0;
            for n in c.parts() {
                cx.name(&mut h, n, pos);
                pos += 1;
            }
            h.u32(xs.len() as u32);
            let mark = cx.env.len();
            for (i, x) in xs.iter().enumerate() {
                cx.env.push(Entry { name: *x, tok: Tok::Label(depth + i as u32) });
            }
            let mid = cx.occ.len();
            let k = shape_level(p, cx, depth + xs.len() as u32);
            cx.env.truncate(mark);
            cx.prefix_path(mid, 7);
            h.u128(k).finish()
        }
        Term::Tau(p) => {
            let k = shape_level(p, cx, depth);
            H::new(tag::TAU).u128(k).finish()
        }
        Term::Sum(bs) => {
            let mut h = H::new(tag::SUM);
            h.u32(bs.len() as u32);
            for (i, b) in bs.iter().enumerate() {
                let mid = cx.occ.len();
                let k = shape(b, cx, depth);
                cx.prefix_path(mid, 1000 + i as u128);
                h.u128(k);
            }
            h.finish()
        }
        Term::Match(a, b, p) => {
            let mut h = H::new(tag::MATCH);
            cx.name(&mut h, *a, 0);
            cx.name(&mut h, *b, 1);
            let mid = cx.occ.len();
            let k = shape_level(p, cx, depth);
            cx.prefix_path(mid, 7);
            h.u128(k).finish()
        }
        Term::Par(..) | Term::Restrict(..) => shape_level(t, cx, depth),
    }
}

/// Shape of a nested level: components sorted by shape, own names anonymous.
fn shape_level(t: &Term, cx: &mut Ctx, depth: u32) -> Digest {
    match t {
        t if !is_component(t) => {}
        _ => {
            let h = shape(t, cx, depth);
            return H::new(tag::LEVEL).u32(1).u128(h).finish();
        }
    }
    let lv = flatten_level(t);
    let mut hs = Vec::with_capacity(lv.comps.len());
    for (c, scope) in &lv.comps {
        let mark = cx.env.len();
        if let Scope::Some(ix) = scope {
            for &i in ix {
                cx.env.push(Entry { name: lv.rs[i as usize], tok: Tok::Nested });
            }
        }
        let start = cx.occ.len();
        let h = shape(c, cx, depth);
        cx.env.truncate(mark);
        cx.prefix_path(start, h);
        hs.push(h);
    }
    hs.sort_unstable();
    let mut h = H::new(tag::LEVEL);
    h.u32(hs.len() as u32);
    for x in hs {
        h.u128(x);
    }
    h.finish()
}

/// Exact hash under a fixed labelling of every name in scope.
fn exact(t: &Term, cx: &mut Ctx, depth: u32) -> Digest {
    match t {
        Term::Nil => H::new(tag::NIL).finish(),
        Term::Sum(bs) if bs.is_empty() => H::new(tag::NIL).finish(),
        Term::Success => H::new(tag::OK).finish(),
        Term::Output(c, xs, p) => {
            let mut h = H::new(tag::OUT);
            for n in c.parts() {
                cx.name(&mut h, n, 0);
            }
            h.u32(xs.len() as u32);
            for n in xs {
                cx.name(&mut h, *n, 0);
            }
            let k = exact_level(p, cx, depth);
            h.u128(k).finish()
        }
        Term::Input(c, xs, p) | Term::RepInput(c, xs, p) => {
            let mut h = H::new(if matches!(t, Term::Input(..)) { tag::IN } else { tag::REP });
            for n in c.parts() {
                cx.name(&mut h, n, 0);
            }
            h.u32(xs.len() as u32);
            let mark = cx.env.len();
            for (i, x) in xs.iter().enumerate() {
                cx.env.push(Entry { name: *x, tok: Tok::Label(depth + i as u32) });
            }
            let k = exact_level(p, cx, depth + xs.len() as u32);
            cx.env.truncate(mark);
            h.u128(k).finish()
        }
        Term::Tau(p) => {
            let k = exact_level(p, cx, depth);
            H::new(tag::TAU).u128(k).finish()
        }
        Term::Sum(bs) => {
            let mut h = H::new(tag::SUM);
            h.u32(bs.len() as u32);
            for b in bs {
                let k = exact(b, cx, depth);
                h.u128(k);
            }
            h.finish()
        }
        Term::Match(a, b, p) => {
            let mut h = H::new(tag::MATCH);
            cx.name(&mut h, *a, 0);
            cx.name(&mut h, *b, 1);
            let k = exact_level(p, cx, depth);
            h.u128(k).finish()
        }
        Term::Par(..) | Term::Restrict(..) => exact_level(t, cx, depth),
    }
}

fn exact_level(t: &Term, cx: &mut Ctx, depth: u32) -> Digest {
    match t {
        t if !is_component(t) => {}
        _ => {
            let h = exact(t, cx, depth);
            return H::new(tag::LEVEL).u32(1).u128(H::new(tag::COMP).u128(h).finish()).finish();
        }
    }
    let lv = flatten_level(t);
    canon_level(&lv.rs, &lv.comps, cx, depth).hash
}

struct LevelResult {
    hash: Digest,
    /// Restricted-name indices in canonical order (used ones only).
    rs_order: Vec<u32>,
    /// Component indices in canonical order.
    comp_order: Vec<usize>,
}

struct Group {
    rs: Vec<u32>,
    comps: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn push_scope(cx: &mut Ctx, rs: &[Name], scope: &Scope, tok: impl Fn(u32) -> Option<Tok>) {
    match scope {
        Scope::All => {
            for (i, n) in rs.iter().enumerate() {
                if let Some(t) = tok(i as u32) {
                    cx.env.push(Entry { name: *n, tok: t });
                }
            }
        }
        Scope::Some(ix) => {
            for &i in ix {
                if let Some(t) = tok(i) {
                    cx.env.push(Entry { name: rs[i as usize], tok: t });
                }
            }
        }
    }
}

fn canon_level(rs: &[Name], comps: &[(&Term, Scope)], cx: &mut Ctx, depth: u32) -> LevelResult {
    // Shape pass.
    let saved_occ = std::mem::take(&mut cx.occ);
    let mut shapes = Vec::with_capacity(comps.len());
    let mut occs: Vec<Vec<(u32, Digest)>> = Vec::with_capacity(comps.len());
    for (c, scope) in comps {
        let mark = cx.env.len();
        push_scope(cx, rs, scope, |i| Some(Tok::Wild(i)));
        cx.occ.clear();
        let h = shape(c, cx, depth);
        cx.env.truncate(mark);
        shapes.push(h);
        occs.push(std::mem::take(&mut cx.occ));
    }
    cx.occ = saved_occ;

    // Connected groups through shared restricted names.
    let n = comps.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut owner: Vec<Option<usize>> = vec![None; rs.len()];
    for (j, os) in occs.iter().enumerate() {
        for &(r, _) in os {
            match owner[r as usize] {
                None => owner[r as usize] = Some(j),
                Some(k) => {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut gid = vec![usize::MAX; n];
    for j in 0..n {
        let root = find(&mut parent, j);
        if gid[root] == usize::MAX {
            gid[root] = groups.len();
            groups.push(Group { rs: Vec::new(), comps: Vec::new() });
        }
        groups[gid[root]].comps.push(j);
    }
    for (r, o) in owner.iter().enumerate() {
        if let Some(j) = o {
            let g = gid[find(&mut parent, *j)];
            groups[g].rs.push(r as u32);
        }
    }

    let mut results: Vec<(Digest, Vec<u32>, Vec<usize>)> = groups
        .iter()
        .map(|g| canon_group(g, rs, comps, &shapes, &occs, cx, depth))
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));

    let mut h = H::new(tag::LEVEL);
    h.u32(results.len() as u32);
    for r in &results {
        h.u128(r.0);
    }
    LevelResult {
        hash: h.finish(),
        rs_order: results.iter().flat_map(|r| r.1.iter().copied()).collect(),
        comp_order: results.iter().flat_map(|r| r.2.iter().copied()).collect(),
    }
}

fn canon_group(
    g: &Group,
    rs: &[Name],
    comps: &[(&Term, Scope)],
    shapes: &[Digest],
    occs: &[Vec<(u32, Digest)>],
    cx: &mut Ctx,
    depth: u32,
) -> (Digest, Vec<u32>, Vec<usize>) {
    if g.rs.is_empty() {
        let j = g.comps[0];
        let h = exact_comp(comps[j].0, &comps[j].1, rs, &[], cx, depth);
        return (H::new(tag::COMP).u128(h).finish(), Vec::new(), vec![j]);
    }
    let k = g.rs.len();
    let local: std::collections::HashMap<u32, usize> =
        g.rs.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let gocc: Vec<(usize, Vec<(usize, Digest)>)> = g
        .comps
        .iter()
        .map(|&j| (j, occs[j].iter().map(|(r, p)| (local[r], *p)).collect()))
        .collect();
    let colours = refine(vec![0u128; k], &gocc, shapes);

    let mut best: Option<(Digest, Vec<usize>, Vec<usize>)> = None;
    let mut leaves = 0usize;
    search(colours, &gocc, shapes, &mut leaves, &mut |cols: &[u128]| {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| cols[i]);
        let mut labels = vec![0u32; k];
        for (rank, &i) in order.iter().enumerate() {
            labels[i] = rank as u32;
        }
        let mut lab_global = vec![None; rs.len()];
        for (i, r) in g.rs.iter().enumerate() {
            lab_global[*r as usize] = Some(depth + labels[i]);
        }
        let mut fh: Vec<(Digest, usize)> = g
            .comps
            .iter()
            .map(|&j| (exact_comp(comps[j].0, &comps[j].1, rs, &lab_global, cx, depth + k as u32), j))
            .collect();
        fh.sort();
        let mut h = H::new(tag::GROUP);
        h.u32(k as u32).u32(fh.len() as u32);
        for (x, _) in &fh {
            h.u128(*x);
        }
        let d = h.finish();
        if best.as_ref().map_or(true, |b| d < b.0) {
            best = Some((d, order, fh.into_iter().map(|(_, j)| j).collect()));
        }
    });
    let (d, order, comp_order) = best.expect("at least one leaf");
    (d, order.into_iter().map(|i| g.rs[i]).collect(), comp_order)
}

fn exact_comp(
    t: &Term,
    scope: &Scope,
    rs: &[Name],
    labels: &[Option<u32>],
    cx: &mut Ctx,
    depth: u32,
) -> Digest {
    let mark = cx.env.len();
    push_scope(cx, rs, scope, |i| labels.get(i as usize).copied().flatten().map(Tok::Label));
    let h = exact(t, cx, depth);
    cx.env.truncate(mark);
    h
}

fn refine(mut colours: Vec<u128>, gocc: &[(usize, Vec<(usize, Digest)>)], shapes: &[Digest]) -> Vec<u128> {
    let k = colours.len();
    let mut classes = count_classes(&colours);
    loop {
        let mut per_name: Vec<Vec<(Digest, Digest)>> = vec![Vec::new(); k];
        for (j, os) in gocc {
            let mut items: Vec<(Digest, u128)> = os.iter().map(|(r, p)| (*p, colours[*r])).collect();
            items.sort_unstable();
            let mut h = H::new(tag::COLOUR);
            h.u128(shapes[*j]);
            for (p, c) in &items {
                h.u128(*p).u128(*c);
            }
            let cc = h.finish();
            for (r, p) in os {
                per_name[*r].push((cc, *p));
            }
        }
        let mut next = Vec::with_capacity(k);
        for (r, items) in per_name.iter_mut().enumerate() {
            items.sort_unstable();
            let mut h = H::new(tag::COLOUR);
            h.u128(colours[r]);
            for (c, p) in items.iter() {
                h.u128(*c).u128(*p);
            }
            next.push(h.finish());
        }
        let n = count_classes(&next);
        colours = next;
        if n == classes || n == k {
            return colours;
        }
        classes = n;
    }
}

fn count_classes(c: &[u128]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn search(
    colours: Vec<u128>,
    gocc: &[(usize, Vec<(usize, Digest)>)],
    shapes: &[Digest],
    leaves: &mut usize,
    leaf: &mut dyn FnMut(&[u128]),
) {
    if *leaves >= LEAF_BUDGET {
        return;
    }
    let mut sorted: Vec<(u128, usize)> = colours.iter().copied().zip(0..).collect();
    sorted.sort_unstable();
    // Smallest colour value whose class is not a singleton.
    let mut target = None;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].0 == sorted[i].0 {
            j += 1;
        }
        if j > i {
            target = Some(sorted[i..=j].iter().map(|x| x.1).collect::<Vec<_>>());
            break;
        }
        i = j + 1;
    }
    match target {
        None => {
            *leaves += 1;
            leaf(&colours);
        }
        Some(members) => {
            for m in members {
                if *leaves >= LEAF_BUDGET {
                    return;
                }
                let mut c = colours.clone();
                c[m] = H::new(tag::INDIV).u128(c[m]).finish();
                let c = refine(c, gocc, shapes);
                search(c, gocc, shapes, leaves, leaf);
            }
        }
    }
}

/// Canonical identity of a flattened top level.
pub struct Canonical {
    pub digest: Digest,
    pub rs: Vec<Name>,
    pub comps: Vec<Arc<Term>>,
}

/// Canonicalise a flattened level whose restricted names are pairwise
/// distinct and disjoint from its free names.
pub fn canonicalize(rs: &[Name], comps: &[Arc<Term>]) -> Canonical {
    let items: Vec<(&Term, Scope)> = comps.iter().map(|c| (&**c, Scope::All)).collect();
    let mut cx = Ctx { env: Vec::new(), occ: Vec::new() };
    let res = canon_level(rs, &items, &mut cx, 0);
    Canonical {
        digest: res.hash,
        rs: res.rs_order.iter().map(|&i| rs[i as usize]).collect(),
        comps: res.comp_order.iter().map(|&j| comps[j].clone()).collect(),
    }
}

/// Flatten a term onto a top level, renaming restricted names that would clash
/// with `taken`. Guarded subterms are left untouched.
pub fn flatten_into(
    t: &Arc<Term>,
    rs: &mut Vec<Name>,
    comps: &mut Vec<Arc<Term>>,
    taken: &mut HashSet<Name>,
    fresh: &mut Fresh,
) {
    match &**t {
        Term::Nil => {}
        Term::Sum(bs) if bs.is_empty() => {}
        Term::Sum(bs) if bs.len() == 1 => flatten_into(&Arc::new(bs[0].clone()), rs, comps, taken, fresh),
        Term::Par(a, b) => {
            flatten_into(a, rs, comps, taken, fresh);
            flatten_into(b, rs, comps, taken, fresh);
        }
        Term::Restrict(n, b) => {
            if taken.contains(n) {
                let n2 = n.refresh(fresh);
                let body = crate::term::substitute_with(&Substitution::from_pairs([(*n, n2)]), b, fresh);
                taken.insert(n2);
                rs.push(n2);
                flatten_into(&body, rs, comps, taken, fresh);
            } else {
                taken.insert(*n);
                rs.push(*n);
                flatten_into(b, rs, comps, taken, fresh);
            }
        }
        Term::Match(a, b, p) if a == b => flatten_into(p, rs, comps, taken, fresh),
        _ => comps.push(t.clone()),
    }
}

/// Normal form of a term: a digest plus a representative term.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub term: Term,
    pub digest: Digest,
}

/// Structural-congruence normal form. With `rep_split`, duplicate top-level
/// replicated inputs are merged (`!P | !P` collapses to `!P`).
pub fn normalize(term: &Term, rep_split: bool) -> CanonicalForm {
    let root = Arc::new(term.clone());
    let mut taken = free_name_set(term);
    let mut fresh = Fresh::above(&[term]);
    let (mut rs, mut comps) = (Vec::new(), Vec::new());
    flatten_into(&root, &mut rs, &mut comps, &mut taken, &mut fresh);
    if rep_split {
        let mut kept: Vec<Arc<Term>> = Vec::new();
        for c in comps {
            let dup = matches!(&*c, Term::RepInput(..)) && kept.iter().any(|k| alpha_eq(k, &c));
            if !dup {
                kept.push(c);
            }
        }
        comps = kept;
    }
    let c = canonicalize(&rs, &comps);
    CanonicalForm { term: rebuild(&c.rs, &c.comps), digest: c.digest }
}

/// `new rs.(c1 | ... | cn)` as a term.
pub fn rebuild(rs: &[Name], comps: &[Arc<Term>]) -> Term {
    let body = Term::par_all(comps.iter().map(|c| (**c).clone()));
    Term::restrict_all(rs, body)
}

pub fn struct_congruent(p: &Term, q: &Term) -> bool {
    normalize(p, false).digest == normalize(q, false).digest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_any;

    fn cong(a: &str, b: &str) -> bool {
        struct_congruent(&parse_any(a).unwrap(), &parse_any(b).unwrap())
    }

    #[test]
    fn congruence_laws() {
        assert!(cong("a!<b> | 0", "a!<b>"));
        assert!(cong("new n.0", "0"));
        assert!(cong("[a=a]x!<>", "x!<>"));
        assert!(cong("a!<> | new n.n!<c>", "new n.(a!<> | n!<c>)"));
        assert!(cong("a!<> | b!<>", "b!<> | a!<>"));
        assert!(cong("(a!<> | b!<>) | c!<>", "a!<> | (b!<> | c!<>)"));
        assert!(cong("new n,m.(n!<m>)", "new m,n.(n!<m>)"));
        assert!(cong("new x.(x!<a>)", "new y.(y!<a>)"));
        assert!(cong("x?(y).(a!<> | b!<>)", "x?(z).(b!<> | a!<>)"));
        assert!(cong("x?().new n.(n!<> | a!<n>)", "x?().(new m.0 | 0 | new k.(a!<k> | k!<>)) | 0"));
        assert!(cong("a?().0", "a?().(0 | new n.0)"));
        assert!(!cong("x!<a>", "x!<b>"));
        assert!(!cong("new n.(n!<> | a!<n>)", "a!<n> | n!<>"));
        assert!(!cong("a?().0 + b?().0", "b?().0 + a?().0"));
        assert!(!cong("new x.(x!<> | x!<>)", "new x,y.(x!<> | y!<>)"));
        assert!(!cong("[a=b]c!<>", "c!<>"));
    }

    #[test]
    fn symmetric_names() {
        assert!(cong("new x,y.(x!<y> | y!<x>)", "new u,v.(v!<u> | u!<v>)"));
        assert!(cong(
            "new a,b,c.(a!<b> | b!<c> | c!<a>)",
            "new p,q,r.(q!<r> | r!<p> | p!<q>)"
        ));
        assert!(!cong(
            "new a,b,c.(a!<b> | b!<c> | c!<a>)",
            "new p,q,r.(q!<r> | r!<q> | p!<p>)"
        ));
        assert!(cong("new x,y.(x!<> | y!<> | z!<x,y>)", "new y,x.(x!<> | y!<> | z!<y,x>)"));
    }

    #[test]
    fn shadowing_in_nested_levels() {
        assert!(!cong("a?().(new x.(x!<>) | x!<>)", "a?().new x.(x!<> | x!<>)"));
        assert!(cong("a?().(new x.(x!<>) | new x.(x?().0))", "a?().(new y.(y?().0) | new z.(z!<>))"));
    }

    #[test]
    fn rep_split_merges_copies() {
        let t = parse_any("!x?(y).y!<> | !x?(z).z!<> | a!<>").unwrap();
        let u = parse_any("!x?(y).y!<> | a!<>").unwrap();
        assert_ne!(normalize(&t, false).digest, normalize(&u, false).digest);
        assert_eq!(normalize(&t, true).digest, normalize(&u, true).digest);
    }

    #[test]
    fn normalize_is_idempotent() {
        let t = parse_any("new a.(a!<b> | new c.(c?(x).x!<a>) | 0)").unwrap();
        let n1 = normalize(&t, false);
        let n2 = normalize(&n1.term, false);
        assert_eq!(n1.digest, n2.digest);
        assert!(alpha_eq(&n1.term, &n2.term));
    }
}
