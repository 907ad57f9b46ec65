//! `pical`: encode, step, explore and check pi-calculus terms.

mod check;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use pical_core::analysis::barbs::lock_instantiation;
use pical_core::analysis::{classify_graph, classify_step};
use pical_core::corpus::{generate, CorpusConfig};
use pical_core::parser::{pretty_with, Declaration, PrettyOptions, SourceFile};
use pical_core::semantics::explore::rule_name;
use pical_core::semantics::{explore_with, redex_successors, State};
use pical_core::{encode, parse_file, pretty, CalculusId, EncodingId, Limits, Name, Term};

use check::{run_checks, Criterion};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    IllFormed(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::NotFound(_) | CliError::Io { .. } => 1,
            CliError::IllFormed(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "pical", version, about = "Pi-calculus choice encodings workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    /// State bound; defaults to PICAL_MAX_STATES or 200000.
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long, default_value_t = Limits::DEFAULT_DEPTH)]
    max_depth: usize,
}

impl LimitArgs {
    fn limits(self) -> Limits {
        let d = Limits::default();
        Limits::new(self.max_states.unwrap_or(d.max_states).max(1), self.max_depth.max(1))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the encoding of a declaration.
    Encode {
        file: PathBuf,
        name: String,
        #[arg(long, value_parser = parse_enc)]
        enc: EncodingId,
        /// Print lock instantiations as `l?(t,f).t!<>`; `false` abbreviates them to `l!<true>`.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        expand_booleans: bool,
        /// Annotate names with their encoding roles.
        #[arg(long)]
        show_roles: bool,
    },
    /// Step through reductions, interactively or from a script.
    Step {
        file: PathBuf,
        name: String,
        /// Step the encoding instead of the source.
        #[arg(long, value_parser = parse_enc)]
        enc: Option<EncodingId>,
        /// Comma-separated redex indices to replay.
        #[arg(long, value_delimiter = ',')]
        script: Option<Vec<usize>>,
    },
    /// Print a shortest path to a success state.
    Trace {
        file: PathBuf,
        name: String,
        #[arg(long, value_parser = parse_enc)]
        enc: Option<EncodingId>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Export the reachable state graph as JSON.
    Graph {
        file: PathBuf,
        name: String,
        #[arg(long, value_parser = parse_enc)]
        enc: Option<EncodingId>,
        /// Keep one confluent administrative step per state.
        #[arg(long)]
        reduced: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run correctness checks; exit 0 pass, 3 bound reached, 4 failure.
    Check {
        file: PathBuf,
        /// Declaration to check; all declarations when omitted.
        name: Option<String>,
        #[arg(long, value_parser = parse_enc)]
        enc: EncodingId,
        /// Every criterion except the distribution probe.
        #[arg(long)]
        all: bool,
        #[arg(long = "criterion", value_enum)]
        criteria: Vec<Criterion>,
        /// Component groups for the distribution probe, e.g. `0,2;1,3`.
        #[arg(long)]
        split: Option<String>,
        /// Seed for the random substitutions of the name-invariance check.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Generate a seeded corpus of source terms.
    Corpus {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_width: usize,
        #[arg(long, default_value_t = 4)]
        max_components: usize,
        #[arg(long, default_value_t = 6)]
        max_guards: usize,
        /// Separate choice only.
        #[arg(long)]
        sep_only: bool,
        #[arg(long)]
        replication: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reprint a `.pi` file in canonical layout.
    Fmt {
        file: PathBuf,
        /// Exit 1 instead of printing when the file is not formatted.
        #[arg(long)]
        check: bool,
    },
}

fn parse_enc(s: &str) -> Result<EncodingId, String> {
    EncodingId::parse(s).ok_or_else(|| format!("unknown encoding `{s}` (sep-asyn, mix-asyn, mix-asyn2)"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load(path: &Path) -> Result<SourceFile, CliError> {
    parse_file(&read(path)?).map_err(|e| CliError::IllFormed(format!("{}: {e}", path.display())))
}

fn declaration<'a>(file: &'a SourceFile, name: &str) -> Result<&'a Declaration, CliError> {
    file.get(name).ok_or_else(|| CliError::NotFound(format!("no declaration `{name}`")))
}

/// The declaration's term, or its encoding.
fn subject(decl: &Declaration, enc: Option<EncodingId>) -> Result<(Term, Option<EncodingId>), CliError> {
    match enc {
        None => Ok((decl.term.clone(), None)),
        Some(e) => {
            let t = encode(&decl.term, e).map_err(|err| CliError::IllFormed(format!("{}: {err}", decl.name)))?;
            Ok((t, Some(e)))
        }
    }
}

/// Replace expanded lock instantiations by `l!<true>` / `l!<false>`.
fn abbreviate(t: &Term) -> Term {
    if let Some((l, v)) = lock_instantiation(t) {
        return Term::output(l, vec![Name::new(if v { "true" } else { "false" })]);
    }
    match t {
        Term::Nil | Term::Success => t.clone(),
        Term::Restrict(n, p) => Term::Restrict(*n, abbreviate(p).into()),
        Term::Par(a, b) => Term::Par(abbreviate(a).into(), abbreviate(b).into()),
        Term::Match(a, b, p) => Term::Match(*a, *b, abbreviate(p).into()),
        Term::RepInput(c, xs, p) => Term::RepInput(c.clone(), xs.clone(), abbreviate(p).into()),
        Term::Sum(bs) => Term::Sum(bs.iter().map(abbreviate).collect()),
        Term::Output(c, xs, p) => Term::Output(c.clone(), xs.clone(), abbreviate(p).into()),
        Term::Input(c, xs, p) => Term::Input(c.clone(), xs.clone(), abbreviate(p).into()),
        Term::Tau(p) => Term::Tau(abbreviate(p).into()),
    }
}

fn cmd_encode(file: &Path, name: &str, enc: EncodingId, expand: bool, roles: bool) -> Result<u8, CliError> {
    let src = load(file)?;
    let (t, _) = subject(declaration(&src, name)?, Some(enc))?;
    let t = if expand { t } else { abbreviate(&t) };
    println!("{}", pretty_with(&t, PrettyOptions { show_roles: roles }));
    Ok(0)
}

fn cmd_step(file: &Path, name: &str, enc: Option<EncodingId>, script: Option<Vec<usize>>) -> Result<u8, CliError> {
    let src = load(file)?;
    let (t, _) = subject(declaration(&src, name)?, enc)?;
    let (mut state, free) = State::from_term(&t);
    let mut script = script.map(|s| s.into_iter());
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let mut out = std::io::stdout();
    let mut n = 0;
    loop {
        println!("[{n}] {}", pretty(&state.to_term()));
        let succs = redex_successors(&state, &free);
        if succs.is_empty() {
            println!("no redex");
            return Ok(0);
        }
        for (i, sc) in succs.iter().enumerate() {
            let class = match enc {
                Some(_) => classify_step(&state, &sc.redex).map_or(" [-]".to_string(), |c| format!(" [{c:?}]")),
                None => String::new(),
            };
            let channel = sc.redex.channel.as_ref().map_or("-".to_string(), |c| c.to_string());
            println!("  {i}: {} on {channel}{class} -> {}", rule_name(sc.redex.rule), pretty(&sc.state.to_term()));
        }
        let pick = match script.as_mut() {
            Some(it) => match it.next() {
                Some(i) if i < succs.len() => i,
                Some(i) => return Err(CliError::NotFound(format!("script index {i} out of range at step {n}"))),
                None => return Ok(0),
            },
            None => loop {
                print!("choose 0-{} or q: ", succs.len() - 1);
                let _ = out.flush();
                let Some(Ok(line)) = lines.next() else { return Ok(0) };
                let line = line.trim();
                if line == "q" {
                    return Ok(0);
                }
                match line.parse::<usize>() {
                    Ok(i) if i < succs.len() => break i,
                    _ => println!("invalid choice `{line}`"),
                }
            },
        };
        state = succs.into_iter().nth(pick).expect("index checked").state;
        n += 1;
    }
}

fn cmd_trace(file: &Path, name: &str, enc: Option<EncodingId>, json: bool, limits: Limits) -> Result<u8, CliError> {
    let src = load(file)?;
    let (t, enc) = subject(declaration(&src, name)?, enc)?;
    let g = explore_with(&t, limits, enc.is_some(), |s| s.has_success());
    let hit = (0..g.len() as u32).find(|&s| g.states[s as usize].has_success());
    let Some(path) = hit.and_then(|s| g.path_to(s)) else {
        if g.is_complete() {
            println!("no success state is reachable");
            return Ok(0);
        }
        println!("no success state found within {limits:?}");
        return Ok(3);
    };
    let classes = enc.map(|_| classify_graph(&g));
    if json {
        let steps = pical_core::analysis::checks::witness_trace(&g, classes.as_deref(), &path);
        println!("{}", serde_json::to_string_pretty(&steps).expect("trace serialises"));
        return Ok(0);
    }
    println!("{}", pretty(&g.states[0].to_term()));
    for &e in &path {
        let edge = &g.edges[e as usize];
        let class = classes.as_ref().map_or(String::new(), |c| format!(" [{:?}]", c[e as usize]));
        let channel = edge.redex.channel.as_ref().map_or("-".to_string(), |c| c.to_string());
        println!("--{} on {channel}{class}-->", rule_name(edge.redex.rule));
        println!("{}", pretty(&g.states[edge.to as usize].to_term()));
    }
    Ok(0)
}

fn cmd_graph(file: &Path, name: &str, enc: Option<EncodingId>, reduced: bool, limits: Limits) -> Result<u8, CliError> {
    let src = load(file)?;
    let (t, enc) = subject(declaration(&src, name)?, enc)?;
    let g = explore_with(&t, limits, reduced, |_| false);
    let classes = enc.map(|_| classify_graph(&g));
    println!("{}", serde_json::to_string_pretty(&g.to_json_with(classes.as_deref())).expect("graph serialises"));
    Ok(if g.is_complete() { 0 } else { 3 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_corpus(
    seed: u64,
    size: usize,
    max_depth: usize,
    max_width: usize,
    max_components: usize,
    max_guards: usize,
    sep_only: bool,
    replication: bool,
    output: Option<PathBuf>,
) -> Result<u8, CliError> {
    let cfg = CorpusConfig {
        seed,
        count: size,
        max_depth,
        max_components,
        max_width,
        max_guards,
        mixed: !sep_only,
        replication,
    };
    let calc = if sep_only { CalculusId::PiSep } else { CalculusId::PiMix };
    let declarations = generate(cfg)
        .into_iter()
        .enumerate()
        .map(|(i, term)| Declaration { name: format!("t{i:02}"), calc, term, comments: Vec::new() })
        .collect();
    let mut file = SourceFile { declarations };
    if let Some(first) = file.declarations.first_mut() {
        first.comments.push(format!("pical corpus --seed {seed} --size {size}"));
    }
    let text = file.render();
    match output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_fmt(file: &Path, check: bool) -> Result<u8, CliError> {
    let text = read(file)?;
    let rendered = load(file)?.render();
    if check {
        if rendered != text {
            eprintln!("{} is not formatted", file.display());
            return Ok(1);
        }
        return Ok(0);
    }
    print!("{rendered}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Encode { file, name, enc, expand_booleans, show_roles } => {
            cmd_encode(&file, &name, enc, expand_booleans, show_roles)
        }
        Command::Step { file, name, enc, script } => cmd_step(&file, &name, enc, script),
        Command::Trace { file, name, enc, json, limits } => cmd_trace(&file, &name, enc, json, limits.limits()),
        Command::Graph { file, name, enc, reduced, limits } => cmd_graph(&file, &name, enc, reduced, limits.limits()),
        Command::Check { file, name, enc, all, criteria, split, seed, json, limits } => {
            let src = load(&file)?;
            let decls: Vec<&Declaration> = match &name {
                Some(n) => vec![declaration(&src, n)?],
                None => src.declarations.iter().collect(),
            };
            let criteria = if all || criteria.is_empty() { Criterion::ALL.to_vec() } else { criteria };
            let cfg = check::RunConfig { enc, limits: limits.limits(), seed, split };
            run_checks(&decls, &criteria, &cfg, json.as_deref())
        }
        Command::Corpus {
            seed,
            size,
            max_depth,
            max_width,
            max_components,
            max_guards,
            sep_only,
            replication,
            output,
        } => cmd_corpus(seed, size, max_depth, max_width, max_components, max_guards, sep_only, replication, output),
        Command::Fmt { file, check } => cmd_fmt(&file, check),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
