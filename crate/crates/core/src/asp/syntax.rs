//! Non-ground rules in a clingo-like syntax. Variables start with an
//! uppercase letter; `% (tag)` lines label the rules that follow.

use std::fmt;

use super::{AspError, GroundAtom, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermPat {
    Var(String),
    Const(String),
    Func(String, Vec<TermPat>),
}

impl TermPat {
    pub fn c(s: impl Into<String>) -> TermPat {
        TermPat::Const(s.into())
    }

    pub fn to_ground(&self) -> Option<Term> {
        match self {
            TermPat::Var(_) => None,
            TermPat::Const(s) => Some(Term::Const(s.clone())),
            TermPat::Func(n, args) => Some(Term::Func(
                n.clone(),
                args.iter().map(|a| a.to_ground()).collect::<Option<_>>()?,
            )),
        }
    }

    pub fn vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            TermPat::Var(v) => out.push(v),
            TermPat::Const(_) => {}
            TermPat::Func(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }
}

/// Whether `s` can be written bare in clingo text.
pub fn is_plain_constant(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => {
            s.len() == 1 || (c != '0' && s.chars().all(|c| c.is_ascii_digit()))
        }
        _ => false,
    }
}

pub fn quote_constant(s: &str) -> String {
    if is_plain_constant(s) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

impl fmt::Display for TermPat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPat::Var(v) => f.write_str(v),
            TermPat::Const(s) => f.write_str(&quote_constant(s)),
            TermPat::Func(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomPat {
    pub pred: String,
    pub args: Vec<TermPat>,
}

impl AtomPat {
    pub fn new(pred: impl Into<String>, args: Vec<TermPat>) -> Self {
        AtomPat {
            pred: pred.into(),
            args,
        }
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        Some(GroundAtom::new(
            self.pred.clone(),
            self.args
                .iter()
                .map(|a| a.to_ground())
                .collect::<Option<_>>()?,
        ))
    }

    pub fn vars(&self) -> Vec<&str> {
        let mut v = Vec::new();
        self.args.iter().for_each(|a| a.vars(&mut v));
        v
    }
}

impl fmt::Display for AtomPat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lit {
    Pos(AtomPat),
    Neg(AtomPat),
    Neq(TermPat, TermPat),
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Pos(a) => write!(f, "{a}"),
            Lit::Neg(a) => write!(f, "not {a}"),
            Lit::Neq(l, r) => write!(f, "{l} != {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub tag: String,
    pub head: Option<AtomPat>,
    pub body: Vec<Lit>,
}

impl Rule {
    pub fn fact(tag: impl Into<String>, head: AtomPat) -> Rule {
        Rule {
            tag: tag.into(),
            head: Some(head),
            body: Vec::new(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        if !self.body.is_empty() {
            f.write_str(if self.head.is_some() { " :- " } else { ":- " })?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    /// Rules grouped under their tag comments, in order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut last: Option<&str> = None;
        for r in &self.rules {
            if last != Some(r.tag.as_str()) && !r.tag.is_empty() {
                out.push_str(&format!("% ({})\n", r.tag));
            }
            last = Some(&r.tag);
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Punct(&'static str),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AspError> {
        Err(AspError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
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

    /// A tag comment becomes `Punct("%tag")` followed by the tag as an `Ident`.
    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, AspError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let (line, col) = (self.line, self.col);
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'%' {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.bump();
                }
                let text = std::str::from_utf8(&self.src[start + 1..self.pos])
                    .unwrap_or("")
                    .trim();
                if let Some(tag) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                    out.push((Tok::Punct("%tag"), line, col));
                    out.push((Tok::Ident(tag.to_string()), line, col));
                }
            } else if c == b'"' {
                self.bump();
                let mut s = Vec::new();
                loop {
                    if self.pos >= self.src.len() {
                        return self.err("unterminated string");
                    }
                    match self.bump() {
                        b'"' => break,
                        b'\\' if self.pos < self.src.len() => s.push(self.bump()),
                        b => s.push(b),
                    }
                }
                out.push((
                    Tok::Quoted(String::from_utf8_lossy(&s).into_owned()),
                    line,
                    col,
                ));
            } else if c.is_ascii_alphanumeric() || c == b'_' {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.bump();
                }
                out.push((
                    Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()),
                    line,
                    col,
                ));
            } else {
                let rest = &self.src[self.pos..];
                let p = if rest.starts_with(b":-") {
                    ":-"
                } else if rest.starts_with(b"!=") {
                    "!="
                } else {
                    match c {
                        b'(' => "(",
                        b')' => ")",
                        b',' => ",",
                        b'.' => ".",
                        _ => return self.err(format!("unexpected character `{}`", c as char)),
                    }
                };
                for _ in 0..p.len() {
                    self.bump();
                }
                out.push((Tok::Punct(p), line, col));
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AspError> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|t| (t.1, t.2))
            .unwrap_or((1, 1));
        Err(AspError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), AspError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn term(&mut self) -> Result<TermPat, AspError> {
        match self.peek().cloned() {
            Some(Tok::Quoted(s)) => {
                self.pos += 1;
                Ok(TermPat::Const(s))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                let first = s.chars().next().unwrap_or('a');
                if first.is_ascii_uppercase() || first == '_' {
                    return Ok(TermPat::Var(s));
                }
                if self.eat("(") {
                    let args = self.args()?;
                    return Ok(TermPat::Func(s, args));
                }
                Ok(TermPat::Const(s))
            }
            _ => self.err("expected a term"),
        }
    }

    fn args(&mut self) -> Result<Vec<TermPat>, AspError> {
        let mut args = vec![self.term()?];
        while self.eat(",") {
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<AtomPat, AspError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s.starts_with(|c: char| c.is_ascii_lowercase()) => {
                self.pos += 1;
                let args = if self.eat("(") {
                    self.args()?
                } else {
                    Vec::new()
                };
                Ok(AtomPat::new(s, args))
            }
            _ => self.err("expected an atom"),
        }
    }

    fn literal(&mut self) -> Result<Lit, AspError> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "not") {
            let next_is_term_start =
                matches!(self.toks.get(self.pos + 1), Some((Tok::Ident(_), _, _)));
            if next_is_term_start {
                self.pos += 1;
                return Ok(Lit::Neg(self.atom()?));
            }
        }
        let save = self.pos;
        let lhs = self.term()?;
        if self.eat("!=") {
            let rhs = self.term()?;
            return Ok(Lit::Neq(lhs, rhs));
        }
        self.pos = save;
        Ok(Lit::Pos(self.atom()?))
    }

    fn program(&mut self) -> Result<Program, AspError> {
        let mut rules = Vec::new();
        let mut tag = String::new();
        while self.peek().is_some() {
            if self.eat("%tag") {
                match self.peek().cloned() {
                    Some(Tok::Ident(t)) => {
                        self.pos += 1;
                        tag = t;
                    }
                    _ => return self.err("expected tag"),
                }
                continue;
            }
            let head = if matches!(self.peek(), Some(Tok::Punct(":-"))) {
                None
            } else {
                Some(self.atom()?)
            };
            let mut body = Vec::new();
            if self.eat(":-") {
                body.push(self.literal()?);
                while self.eat(",") {
                    body.push(self.literal()?);
                }
            }
            self.expect(".")?;
            rules.push(Rule {
                tag: tag.clone(),
                head,
                body,
            });
        }
        Ok(Program { rules })
    }
}

pub fn parse_program(text: &str) -> Result<Program, AspError> {
    let toks = Lexer {
        src: text.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
    }
    .tokens()?;
    Parser { toks, pos: 0 }.program()
}
