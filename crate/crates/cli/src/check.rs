//! The `check` subcommand: criterion reports over declarations.

use std::path::Path;

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use pical_core::analysis::distribution::top_components;
use pical_core::analysis::{
    check_completeness, check_divergence_reflection, check_name_invariance, check_soundness_bounded,
    check_success_sensitive, distribution_probe, lock_violations, lost_requests, CheckReport, DistributionVerdict,
};
use pical_core::parser::Declaration;
use pical_core::semantics::explore_reduced;
use pical_core::{encode, free_names, EncodingId, Limits, Name, Substitution, Term, Verdict};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Success,
    Completeness,
    Soundness,
    Divergence,
    NameInvariance,
    Locks,
    Requests,
    Distribution,
}

impl Criterion {
    /// What `--all` runs. The distribution probe needs a meaningful split and
    /// is only run on request.
    pub const ALL: [Criterion; 7] = [
        Criterion::Success,
        Criterion::Completeness,
        Criterion::Soundness,
        Criterion::Divergence,
        Criterion::NameInvariance,
        Criterion::Locks,
        Criterion::Requests,
    ];
}

pub struct RunConfig {
    pub enc: EncodingId,
    pub limits: Limits,
    pub seed: u64,
    pub split: Option<String>,
}

const SUBSTITUTIONS: usize = 10;

fn ill(decl: &Declaration, e: impl std::fmt::Display) -> CliError {
    CliError::IllFormed(format!("{}: {e}", decl.name))
}

fn from_verdict(criterion: &'static str, verdict: Verdict, limits: Limits) -> CheckReport {
    let mut r = CheckReport::new(criterion, limits);
    r.verdict = verdict;
    r
}

fn name_invariance(s: &Term, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<CheckReport, String> {
    let mut r = CheckReport::new("name-invariance", cfg.limits);
    let mut pool: Vec<Name> = ["a", "b", "c", "d", "e", "u", "v", "w"].iter().map(|n| Name::new(n)).collect();
    pool.extend(free_names(s));
    pool.sort();
    pool.dedup();
    for _ in 0..SUBSTITUTIONS {
        pool.shuffle(rng);
        let sigma = Substitution::from_pairs(free_names(s).into_iter().zip(pool.iter().copied()));
        let v = check_name_invariance(s, &sigma, cfg.enc).map_err(|e| e.to_string())?;
        if v != Verdict::Yes {
            r.verdict = v;
            r.notes.push(format!("{:?}", sigma.pairs()));
            return Ok(r);
        }
    }
    r.stats.insert("substitutions", SUBSTITUTIONS);
    Ok(r)
}

fn locks(s: &Term, cfg: &RunConfig) -> Result<CheckReport, String> {
    let mut r = CheckReport::new("lock-invariants", cfg.limits);
    let g = explore_reduced(&encode(s, cfg.enc).map_err(|e| e.to_string())?, cfg.limits);
    r.stats.insert("states", g.len());
    let v = lock_violations(&g);
    r.notes.extend(v.iter().map(|x| format!("{x:?}")));
    r.verdict = if !v.is_empty() {
        Verdict::No
    } else if g.is_complete() {
        Verdict::Yes
    } else {
        Verdict::UnknownBounded(cfg.limits)
    };
    Ok(r)
}

fn requests(s: &Term, cfg: &RunConfig) -> Result<CheckReport, String> {
    let mut r = CheckReport::new("request-preservation", cfg.limits);
    if cfg.enc == EncodingId::SepToAsyn {
        r.notes.push("no requests in the separate-choice encoding".into());
        return Ok(r);
    }
    let g = explore_reduced(&encode(s, cfg.enc).map_err(|e| e.to_string())?, cfg.limits);
    r.stats.insert("states", g.len());
    let lost = lost_requests(&g, cfg.enc);
    r.notes.extend(lost.iter().map(|l| format!("state {}: {}", l.digest, l.request)));
    r.verdict = if !lost.is_empty() {
        Verdict::No
    } else if g.is_complete() {
        Verdict::Yes
    } else {
        Verdict::UnknownBounded(cfg.limits)
    };
    Ok(r)
}

/// Groups of top-level components: explicit `0,2;1,3`, or components
/// connected by shared free names.
fn split_of(s: &Term, text: Option<&str>) -> Result<Vec<Vec<usize>>, String> {
    if let Some(text) = text {
        return text
            .split(';')
            .map(|g| g.split(',').map(|i| i.trim().parse::<usize>().map_err(|e| format!("split `{text}`: {e}"))).collect())
            .collect();
    }
    let comps = top_components(s);
    let names: Vec<_> = comps.iter().map(free_names).collect();
    let mut group: Vec<usize> = (0..comps.len()).collect();
    fn root(g: &mut [usize], i: usize) -> usize {
        if g[i] == i {
            i
        } else {
            let r = root(g, g[i]);
            g[i] = r;
            r
        }
    }
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            if !names[i].is_disjoint(&names[j]) {
                let (a, b) = (root(&mut group, i), root(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..comps.len() {
        let r = root(&mut group, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => out[k].push(i),
            None => {
                roots.push(r);
                out.push(vec![i]);
            }
        }
    }
    Ok(out)
}

fn distribution(s: &Term, cfg: &RunConfig) -> Result<CheckReport, String> {
    let mut r = CheckReport::new("degree-of-distribution", cfg.limits);
    let split = split_of(s, cfg.split.as_deref())?;
    let probe = distribution_probe(s, &split, cfg.enc, cfg.limits).map_err(|e| e.to_string())?;
    r.notes.push(format!("split {split:?}: {:?}", probe.verdict));
    if let DistributionVerdict::Undetermined { reason } = &probe.verdict {
        r.verdict = Verdict::UnknownBounded(cfg.limits);
        r.notes.push(reason.clone());
    }
    r.notes.push(serde_json::to_string(&probe).expect("probe serialises"));
    Ok(r)
}

fn one(s: &Term, c: Criterion, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<CheckReport, String> {
    let (enc, lim) = (cfg.enc, cfg.limits);
    let e = |e: pical_core::EncodeError| e.to_string();
    match c {
        Criterion::Success => check_success_sensitive(s, enc, lim).map_err(e),
        Criterion::Completeness => check_completeness(s, enc, lim).map_err(e),
        Criterion::Soundness => check_soundness_bounded(s, enc, lim).map_err(e),
        Criterion::Divergence => {
            check_divergence_reflection(s, enc, lim).map(|v| from_verdict("divergence-reflection", v, lim)).map_err(e)
        }
        Criterion::NameInvariance => name_invariance(s, cfg, rng),
        Criterion::Locks => locks(s, cfg),
        Criterion::Requests => requests(s, cfg),
        Criterion::Distribution => distribution(s, cfg),
    }
}

/// Exit 0 if every verdict is Yes, 4 on any failure, else 3 if a bound was hit.
pub fn exit_code(reports: &[CheckReport]) -> u8 {
    if reports.iter().any(|r| r.verdict == Verdict::No) {
        4
    } else if reports.iter().any(|r| r.verdict.is_unknown()) {
        3
    } else {
        0
    }
}

pub fn run_checks(
    decls: &[&Declaration],
    criteria: &[Criterion],
    cfg: &RunConfig,
    json_out: Option<&Path>,
) -> Result<u8, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reports = Vec::new();
    let mut entries = Vec::new();
    for decl in decls {
        for &c in criteria {
            let r = one(&decl.term, c, cfg, &mut rng).map_err(|e| ill(decl, e))?;
            let verdict = match r.verdict {
                Verdict::Yes => "pass".to_string(),
                Verdict::No => "FAIL".to_string(),
                Verdict::UnknownBounded(l) => format!("unknown (bounds {} states, depth {})", l.max_states, l.max_depth),
            };
            let note = r.notes.first().map_or(String::new(), |n| format!("  {n}"));
            println!("{} {} {}: {verdict}{note}", decl.name, cfg.enc, r.criterion);
            entries.push(json!({ "declaration": decl.name, "encoding": cfg.enc.keyword(), "report": r.to_json() }));
            reports.push(r);
        }
    }
    if let Some(path) = json_out {
        let text = serde_json::to_string_pretty(&entries).expect("reports serialise");
        std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok(exit_code(&reports))
}
