//! Surface syntax, `.pi` files and the pretty-printer.
//!
//! ```text
//! P ::= 0 | ok | tau.P | x!<a,b>.P | x?(y,z).P | !x?(y).P | new x,y.P
//!     | [a=b]P | P | Q | P + Q | (P)
//! ```
//! Channels may be composed as `x@y`; binders may be the wildcard `_`.
//! `+` binds looser than `.`, and `|` looser than `+`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{free_name_set, well_formed, CalculusId, Channel, Name, Role, Term, Violation};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("term is not well-formed in {calc}: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed { calc: CalculusId, violations: Vec<Violation> },
    #[error("duplicate declaration `{0}`")]
    Duplicate(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String, u32, Role),
    Zero,
    Ok,
    Tau,
    New,
    Bang,
    Query,
    Lt,
    Gt,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eq,
    Dot,
    Comma,
    Bar,
    Plus,
    At,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.src.len() {
                let c = self.src[self.pos];
                if c.is_ascii_whitespace() {
                    self.bump();
                } else if c == b'#' {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            if self.pos >= self.src.len() {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            }
            let c = self.bump();
            let tok = match c {
                b'!' => Tok::Bang,
                b'?' => Tok::Query,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'=' => Tok::Eq,
                b'.' => Tok::Dot,
                b',' => Tok::Comma,
                b'|' => Tok::Bar,
                b'+' => Tok::Plus,
                b'@' => Tok::At,
                b'0' => Tok::Zero,
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos - 1;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                    let mut uid = 0;
                    if self.pos < self.src.len() && self.src[self.pos] == b'\'' {
                        self.bump();
                        let s = self.pos;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.bump();
                        }
                        uid = std::str::from_utf8(&self.src[s..self.pos])
                            .unwrap()
                            .parse()
                            .map_err(|_| self.err("expected digits after `'`"))?;
                    }
                    let mut role = Role::None;
                    if self.pos < self.src.len() && self.src[self.pos] == b':' {
                        self.bump();
                        let s = self.pos;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                            self.bump();
                        }
                        let r = std::str::from_utf8(&self.src[s..self.pos]).unwrap();
                        role = Role::from_str_opt(r).ok_or_else(|| self.err(format!("unknown role `{r}`")))?;
                    }
                    match text.as_str() {
                        "ok" => Tok::Ok,
                        "tau" => Tok::Tau,
                        "new" => Tok::New,
                        _ => Tok::Ident(text, uid, role),
                    }
                }
                other => return Err(self.err(format!("unexpected character `{}`", other as char))),
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    wild: u32,
}

const WILD_BASE: u32 = 1 << 30;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {:?}", self.peek())))
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(t, uid, role) if t != "_" => {
                self.pos += 1;
                Ok(Name::with(&t, uid, role))
            }
            other => Err(self.err(format!("expected a name, found {other:?}"))),
        }
    }

    fn binder(&mut self) -> Result<Name, ParseError> {
        if let Tok::Ident(t, _, role) = self.peek().clone() {
            if t == "_" {
                self.pos += 1;
                self.wild += 1;
                return Ok(Name::with("_", WILD_BASE + self.wild, role));
            }
        }
        self.name()
    }

    fn channel(&mut self) -> Result<Channel, ParseError> {
        let a = self.name()?;
        if *self.peek() == Tok::At {
            self.pos += 1;
            let b = self.name()?;
            Ok(Channel::composed(a, b))
        } else {
            Ok(Channel::simple(a))
        }
    }

    fn list(&mut self, close: Tok, binders: bool) -> Result<Vec<Name>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == close {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(if binders { self.binder()? } else { self.name()? });
            match self.peek() {
                Tok::Comma => self.pos += 1,
                t if *t == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or end of list")),
            }
        }
    }

    fn par(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.sum()?;
        while *self.peek() == Tok::Bar {
            self.pos += 1;
            let rhs = self.sum()?;
            acc = Term::par(acc, rhs);
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let first = self.prefixed()?;
        if *self.peek() != Tok::Plus {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut push = |t: Term, p: &Parser| -> Result<(), ParseError> {
            match t {
                Term::Sum(bs) => branches.extend(bs),
                t if t.is_guard() => branches.push(t),
                _ => return Err(p.err("operands of `+` must be guarded by a prefix")),
            }
            Ok(())
        };
        push(first, self)?;
        while *self.peek() == Tok::Plus {
            self.pos += 1;
            let t = self.prefixed()?;
            push(t, self)?;
        }
        Ok(Term::Sum(branches))
    }

    fn cont(&mut self) -> Result<Arc<Term>, ParseError> {
        if *self.peek() == Tok::Dot {
            self.pos += 1;
            Ok(Arc::new(self.prefixed()?))
        } else {
            Ok(crate::term::nil())
        }
    }

    fn prefixed(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Zero => {
                self.pos += 1;
                Ok(Term::Nil)
            }
            Tok::Ok => {
                self.pos += 1;
                Ok(Term::Success)
            }
            Tok::Tau => {
                self.pos += 1;
                self.expect(Tok::Dot, "`.` after tau")?;
                Ok(Term::Tau(Arc::new(self.prefixed()?)))
            }
            Tok::New => {
                self.pos += 1;
                let mut names = vec![self.name()?];
                while *self.peek() == Tok::Comma {
                    self.pos += 1;
                    names.push(self.name()?);
                }
                self.expect(Tok::Dot, "`.` after restricted names")?;
                let body = self.prefixed()?;
                Ok(Term::restrict_all(&names, body))
            }
            Tok::LBrack => {
                self.pos += 1;
                let a = self.name()?;
                self.expect(Tok::Eq, "`=` in match")?;
                let b = self.name()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Term::Match(a, b, Arc::new(self.prefixed()?)))
            }
            Tok::Bang => {
                self.pos += 1;
                let ch = self.channel()?;
                self.expect(Tok::Query, "`?` after replicated channel")?;
                self.expect(Tok::LParen, "`(`")?;
                let xs = self.list(Tok::RParen, true)?;
                Ok(Term::RepInput(ch, xs, self.cont()?))
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(..) => {
                let ch = self.channel()?;
                match self.peek() {
                    Tok::Bang => {
                        self.pos += 1;
                        self.expect(Tok::Lt, "`<`")?;
                        let args = self.list(Tok::Gt, false)?;
                        Ok(Term::Output(ch, args, self.cont()?))
                    }
                    Tok::Query => {
                        self.pos += 1;
                        self.expect(Tok::LParen, "`(`")?;
                        let xs = self.list(Tok::RParen, true)?;
                        Ok(Term::Input(ch, xs, self.cont()?))
                    }
                    _ => Err(self.err("expected `!` or `?` after channel")),
                }
            }
            other => Err(self.err(format!("unexpected {other:?}"))),
        }
    }
}

fn parse_at(text: &str, line: usize) -> Result<Term, ParseError> {
    let toks = Lexer::new(text, line).tokens()?;
    let mut p = Parser { toks, pos: 0, wild: 0 };
    let t = p.par()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

/// Parse without a calculus check.
pub fn parse_any(text: &str) -> Result<Term, ParseError> {
    parse_at(text, 1)
}

/// Parse and check membership in `calc`.
pub fn parse(text: &str, calc: CalculusId) -> Result<Term, ParseError> {
    let t = parse_any(text)?;
    well_formed(&t, calc).map_err(|violations| ParseError::IllFormed { calc, violations })?;
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: String,
    pub calc: CalculusId,
    pub term: Term,
    pub comments: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub declarations: Vec<Declaration>,
}

impl SourceFile {
    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, d) in self.declarations.iter().enumerate() {
            if i > 0 && !d.comments.is_empty() {
                out.push('\n');
            }
            for c in &d.comments {
                let _ = writeln!(out, "# {c}");
            }
            let _ = writeln!(out, "def {} : {} = {}", d.name, d.calc, pretty(&d.term));
        }
        out
    }
}

/// Parse a `.pi` file of `def <name> : <calc> = <term>` blocks.
pub fn parse_file(text: &str) -> Result<SourceFile, ParseError> {
    let mut decls = Vec::new();
    let mut pending_comments = Vec::new();
    let mut current: Option<(String, CalculusId, String, usize, Vec<String>)> = None;
    let mut seen = HashSet::new();

    let finish = |cur: Option<(String, CalculusId, String, usize, Vec<String>)>,
                      decls: &mut Vec<Declaration>|
     -> Result<(), ParseError> {
        if let Some((name, calc, body, line, comments)) = cur {
            let term = parse_at(&body, line)?;
            well_formed(&term, calc).map_err(|violations| ParseError::IllFormed { calc, violations })?;
            decls.push(Declaration { name, calc, term, comments });
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix("def ") {
            finish(current.take(), &mut decls)?;
            let syntax = |msg: &str| ParseError::Syntax { line: lineno, col: 1, msg: msg.to_string() };
            let (head, body) = rest.split_once('=').ok_or_else(|| syntax("expected `=` in declaration"))?;
            let (name, calc) = head.split_once(':').ok_or_else(|| syntax("expected `name : calculus`"))?;
            let name = name.trim().to_string();
            let calc = CalculusId::parse(calc.trim()).ok_or_else(|| syntax("unknown calculus"))?;
            if !seen.insert(name.clone()) {
                return Err(ParseError::Duplicate(name));
            }
            current = Some((name, calc, body.to_string(), lineno, std::mem::take(&mut pending_comments)));
        } else if let Some(c) = trimmed.strip_prefix('#') {
            // A comment belongs to the declaration after it.
            pending_comments.push(c.trim().to_string());
        } else if let Some(cur) = current.as_mut() {
            cur.2.push('\n');
            cur.2.push_str(raw);
        } else if !trimmed.is_empty() {
            return Err(ParseError::Syntax { line: lineno, col: 1, msg: "text outside a declaration".into() });
        }
    }
    finish(current.take(), &mut decls)?;
    Ok(SourceFile { declarations: decls })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PrettyOptions {
    pub show_roles: bool,
}

/// Deterministic surface syntax for a term.
pub fn pretty(term: &Term) -> String {
    pretty_with(term, PrettyOptions::default())
}

pub fn pretty_with(term: &Term, opts: PrettyOptions) -> String {
    let free = free_name_set(term);
    let mut taken: HashMap<String, usize> = HashMap::new();
    let mut free_disp = HashMap::new();
    for n in &free {
        let d = n.to_string();
        *taken.entry(d.clone()).or_default() += 1;
        free_disp.insert(*n, d);
    }
    let mut pp = Pretty { opts, out: String::new(), scope: Vec::new(), free_disp, taken };
    pp.term(term, 0);
    pp.out
}

struct Pretty {
    opts: PrettyOptions,
    out: String,
    scope: Vec<(Name, String)>,
    free_disp: HashMap<Name, String>,
    taken: HashMap<String, usize>,
}

impl Pretty {
    fn display(&self, n: Name) -> String {
        let base = self
            .scope
            .iter()
            .rev()
            .find(|(m, _)| *m == n)
            .map(|(_, d)| d.clone())
            .or_else(|| self.free_disp.get(&n).cloned())
            .unwrap_or_else(|| n.to_string());
        self.annotate(base, n)
    }

    fn annotate(&self, base: String, n: Name) -> String {
        if self.opts.show_roles && n.role() != Role::None {
            format!("{base}:{}", n.role().as_str())
        } else {
            base
        }
    }

    fn bind(&mut self, n: Name) -> String {
        let disp = if n.text() == "_" {
            "_".to_string()
        } else {
            let text = n.text();
            let mut cand = text.to_string();
            let mut k = 0;
            while self.taken.get(&cand).copied().unwrap_or(0) > 0 {
                k += 1;
                cand = format!("{text}{k}");
            }
            cand
        };
        *self.taken.entry(disp.clone()).or_default() += 1;
        self.scope.push((n, disp.clone()));
        self.annotate(disp, n)
    }

    fn unbind(&mut self, count: usize) {
        for _ in 0..count {
            let (_, d) = self.scope.pop().unwrap();
            if let Some(c) = self.taken.get_mut(&d) {
                *c -= 1;
            }
        }
    }

    fn channel(&mut self, c: &Channel) {
        let s = self.display(c.first);
        self.out.push_str(&s);
        if let Some(b) = c.second {
            self.out.push('@');
            let s = self.display(b);
            self.out.push_str(&s);
        }
    }

    fn names(&mut self, xs: &[Name]) {
        let parts: Vec<String> = xs.iter().map(|n| self.display(*n)).collect();
        self.out.push_str(&parts.join(","));
    }

    /// `level`: 0 parallel, 1 sum operand, 2 prefix continuation.
    fn term(&mut self, t: &Term, level: u8) {
        match t {
            t if t.is_nil() => self.out.push('0'),
            Term::Success => self.out.push_str("ok"),
            Term::Par(a, b) => {
                let wrap = level > 0;
                if wrap {
                    self.out.push('(');
                }
                self.term(a, 0);
                self.out.push_str(" | ");
                self.term(b, 1);
                if wrap {
                    self.out.push(')');
                }
            }
            Term::Sum(bs) => {
                let wrap = level > 1;
                if wrap {
                    self.out.push('(');
                }
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(" + ");
                    }
                    self.term(b, 2);
                }
                if wrap {
                    self.out.push(')');
                }
            }
            Term::Restrict(..) => {
                let mut names = Vec::new();
                let mut body = t;
                while let Term::Restrict(n, b) = body {
                    names.push(*n);
                    body = b;
                }
                self.out.push_str("new ");
                let shown: Vec<String> = names.iter().map(|n| self.bind(*n)).collect();
                self.out.push_str(&shown.join(","));
                self.out.push_str(".(");
                self.term(body, 0);
                self.out.push(')');
                self.unbind(names.len());
            }
            Term::Match(a, b, p) => {
                let (a, b) = (self.display(*a), self.display(*b));
                let _ = write!(self.out, "[{a}={b}]");
                self.term(p, 2);
            }
            Term::Tau(p) => {
                self.out.push_str("tau.");
                self.term(p, 2);
            }
            Term::Output(c, xs, p) => {
                self.channel(c);
                self.out.push_str("!<");
                self.names(xs);
                self.out.push('>');
                if !p.is_nil() {
                    self.out.push('.');
                    self.term(p, 2);
                }
            }
            Term::Input(c, xs, p) | Term::RepInput(c, xs, p) => {
                if matches!(t, Term::RepInput(..)) {
                    self.out.push('!');
                }
                self.channel(c);
                self.out.push_str("?(");
                let shown: Vec<String> = xs.iter().map(|n| self.bind(*n)).collect();
                self.out.push_str(&shown.join(","));
                self.out.push_str(").");
                self.term(p, 2);
                self.unbind(xs.len());
            }
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::alpha_eq;

    #[test]
    fn parses_examples() {
        let t = parse("x!<z> | x?(y).0", CalculusId::PiAsyn).unwrap();
        let (x, y, z) = (Name::new("x"), Name::new("y"), Name::new("z"));
        assert_eq!(t, Term::par(Term::output(x, vec![z]), Term::input(x, vec![y], Term::Nil)));
        let s = parse("tau.ok + x?(y).0", CalculusId::PiMix).unwrap();
        assert_eq!(s, Term::Sum(vec![Term::Tau(Arc::new(Term::Success)), Term::input(x, vec![y], Term::Nil)]));
        let c = parse("a@o!<l,s>", CalculusId::PiAsyn2).unwrap();
        assert_eq!(
            c,
            Term::output(Channel::composed(Name::new("a"), Name::new("o")), vec![Name::new("l"), Name::new("s")])
        );
    }

    #[test]
    fn precedence() {
        let t = parse_any("a?().b!<> + c!<> | d!<>").unwrap();
        match t {
            Term::Par(l, _) => assert!(matches!(&*l, Term::Sum(bs) if bs.len() == 2)),
            _ => panic!("expected par"),
        }
        assert!(parse_any("0 + a!<>").is_err());
    }

    #[test]
    fn pretty_basics() {
        assert_eq!(pretty(&Term::Nil), "0");
        assert_eq!(pretty(&Term::Success), "ok");
        assert_eq!(pretty(&parse_any("new l.l?(t,f).t!<>").unwrap()), "new l.(l?(t,f).t!<>)");
        assert_eq!(pretty(&parse_any("a!<> | (b!<> | c!<>)").unwrap()), "a!<> | (b!<> | c!<>)");
        assert_eq!(pretty(&parse_any("x?(y).(a!<> | b!<>)").unwrap()), "x?(y).(a!<> | b!<>)");
    }

    #[test]
    fn pretty_round_trips() {
        for s in [
            "x!<z> | x?(y).0",
            "a!<> | (b!<> | c?().0)",
            "new x,y.(x!<y> | y?(x).x!<x>)",
            "(a?().0 + b!<>.ok) | tau.[a=b]ok",
            "!x?(_,y).y!<> | x@o!<a,b>",
            "x?(y).new y.(y!<y>)",
        ] {
            let t = parse_any(s).unwrap();
            let back = parse_any(&pretty(&t)).unwrap();
            assert!(alpha_eq(&t, &back), "{s} -> {}", pretty(&t));
        }
    }

    #[test]
    fn shadowed_binders_get_fresh_display() {
        let x = Name::new("x");
        let x2 = Name::with("x", 7, Role::None);
        let t = Term::input(x, vec![x2], Term::output(x2, vec![x]));
        let s = pretty(&t);
        assert_eq!(s, "x?(x1).x1!<x>");
        assert!(alpha_eq(&parse_any(&s).unwrap(), &t));
    }

    #[test]
    fn files() {
        let src = "# sample\ndef a : mix = x!<z>\n  | x?(y).0\ndef b : sep = 0\n";
        let f = parse_file(src).unwrap();
        assert_eq!(f.declarations.len(), 2);
        assert_eq!(f.declarations[0].comments, vec!["sample".to_string()]);
        assert!(parse_file("def a : mix = 0\ndef a : mix = 0\n").is_err());
        match parse_file("def a : asyn = x!<a>.0 + y!<b>\n") {
            Err(ParseError::IllFormed { .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_any("x!<a") {
            Err(ParseError::Syntax { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
