//! Line-oriented DSL for sCKRs.
//!
//! ```text
//! relation c.
//! context c_world.
//! c_local < c_world [c].
//! c_world: D[c](S subClassOf E).
//! c_local: S(i).   % comment
//! ```

use std::collections::{BTreeMap, HashMap};

use super::{
    Axiom, Category, ContextKb, ContextStructure, DefeasibleAxiom, KbError, Relation, Sckr,
};
use super::{Vocabulary, BOT, TOP};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: &[&str] = &["!=", ".", ":", "<", "[", "]", "(", ")", ",", "=", "{", "}"];

fn lex(text: &str) -> Result<Vec<Token>, KbError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('%').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, ch) = chars[i];
            let col = line[..chars[i].0].chars().count() + 1;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            if ch.is_alphanumeric() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: lineno + 1,
                    col,
                });
                continue;
            }
            let rest = &line[chars[i].0..];
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    out.push(Token {
                        tok: Tok::Punct(p),
                        line: lineno + 1,
                        col,
                    });
                    i += p.chars().count();
                }
                None => {
                    return Err(KbError::Syntax {
                        line: lineno + 1,
                        col,
                        msg: format!("unexpected character `{ch}`"),
                    })
                }
            }
        }
    }
    let (line, col) = out.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Pos {
    line: usize,
    col: usize,
}

enum Stmt {
    Relation(String, Pos),
    Context(String),
    Declare(Category, String, Pos),
    Edge {
        lower: String,
        upper: String,
        rel: String,
        rel_pos: Pos,
    },
    Axiom {
        ctx: String,
        relation: Option<(String, Pos)>,
        axiom: Axiom,
        pos: Pos,
    },
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        let t = &self.toks[self.at.min(self.toks.len() - 1)];
        Pos {
            line: t.line,
            col: t.col,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, KbError> {
        let p = self.pos();
        Err(KbError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn is_punct(&self, k: usize, p: &str) -> bool {
        matches!(self.peek(k), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, k: usize, w: &str) -> bool {
        matches!(self.peek(k), Tok::Ident(s) if s == w)
    }

    fn punct(&mut self, p: &str) -> Result<(), KbError> {
        if self.is_punct(0, p) {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek(0));
            self.err(format!("expected `{p}`, found {found}"))
        }
    }

    fn word(&mut self, w: &str) -> Result<(), KbError> {
        if self.is_word(0, w) {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek(0));
            self.err(format!("expected `{w}`, found {found}"))
        }
    }

    fn ident(&mut self) -> Result<String, KbError> {
        match self.peek(0).clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected a name, found {}", describe(&other))),
        }
    }

    fn statement(&mut self) -> Result<Stmt, KbError> {
        let first = self.ident()?;
        let decl = match first.as_str() {
            "relation" | "context" | "concept" | "role" | "individual" => {
                matches!(self.peek(0), Tok::Ident(_)) && self.is_punct(1, ".")
            }
            _ => false,
        };
        if decl {
            let npos = self.pos();
            let name = self.ident()?;
            self.punct(".")?;
            return Ok(match first.as_str() {
                "relation" => Stmt::Relation(name, npos),
                "context" => Stmt::Context(name),
                "concept" => Stmt::Declare(Category::Concept, name, npos),
                "role" => Stmt::Declare(Category::Role, name, npos),
                _ => Stmt::Declare(Category::Individual, name, npos),
            });
        }
        if self.is_punct(0, "<") {
            self.bump();
            let upper = self.ident()?;
            self.punct("[")?;
            let rel_pos = self.pos();
            let rel = self.ident()?;
            self.punct("]")?;
            self.punct(".")?;
            return Ok(Stmt::Edge {
                lower: first,
                upper,
                rel,
                rel_pos,
            });
        }
        if !self.is_punct(0, ":") {
            let found = describe(self.peek(0));
            return self.err(format!("expected `:`, `<` or a declaration, found {found}"));
        }
        self.bump();
        let apos = self.pos();
        if self.is_word(0, "D") && self.is_punct(1, "[") {
            self.bump();
            self.bump();
            let rpos = self.pos();
            let rel = self.ident()?;
            self.punct("]")?;
            self.punct("(")?;
            let axiom = self.axiom()?;
            self.punct(")")?;
            self.punct(".")?;
            return Ok(Stmt::Axiom {
                ctx: first,
                relation: Some((rel, rpos)),
                axiom,
                pos: apos,
            });
        }
        let axiom = self.axiom()?;
        self.punct(".")?;
        Ok(Stmt::Axiom {
            ctx: first,
            relation: None,
            axiom,
            pos: apos,
        })
    }

    fn axiom(&mut self) -> Result<Axiom, KbError> {
        if self.is_punct(0, "{") {
            self.bump();
            let a = self.ident()?;
            self.punct("}")?;
            self.word("subClassOf")?;
            let b = self.ident()?;
            return Ok(Axiom::NomSubClass(a, b));
        }
        let paren = self.is_punct(1, "(");
        if paren && self.is_word(0, "eval") {
            self.bump();
            self.bump();
            let x = self.ident()?;
            self.punct(",")?;
            let c = self.ident()?;
            self.punct(")")?;
            if self.is_word(0, "subClassOf") {
                self.bump();
                return Ok(Axiom::SubEvalC(x, c, self.ident()?));
            }
            self.word("subRoleOf")?;
            return Ok(Axiom::SubEvalR(x, c, self.ident()?));
        }
        if paren && (self.is_word(0, "disjoint") || self.is_word(0, "inverse")) {
            let dis = self.is_word(0, "disjoint");
            self.bump();
            self.bump();
            let r = self.ident()?;
            self.punct(",")?;
            let s = self.ident()?;
            self.punct(")")?;
            return Ok(if dis {
                Axiom::Dis(r, s)
            } else {
                Axiom::Inv(r, s)
            });
        }
        if paren && self.is_word(0, "irreflexive") {
            self.bump();
            self.bump();
            let r = self.ident()?;
            self.punct(")")?;
            return Ok(Axiom::Irr(r));
        }
        if self.is_word(0, "exists") && self.is_punct(2, ".") {
            self.bump();
            let r = self.ident()?;
            self.punct(".")?;
            let a = self.ident()?;
            self.word("subClassOf")?;
            let b = self.ident()?;
            return Ok(Axiom::SubEx(r, a, b));
        }
        let name = self.ident()?;
        match self.peek(0).clone() {
            Tok::Punct("(") => {
                self.bump();
                let a = self.ident()?;
                if self.is_punct(0, ",") {
                    self.bump();
                    let b = self.ident()?;
                    self.punct(")")?;
                    Ok(Axiom::RoleAssertion(name, a, b))
                } else {
                    self.punct(")")?;
                    Ok(Axiom::ClassAssertion(name, a))
                }
            }
            Tok::Punct("=") => {
                self.bump();
                Ok(Axiom::Eq(name, self.ident()?))
            }
            Tok::Punct("!=") => {
                self.bump();
                Ok(Axiom::Neq(name, self.ident()?))
            }
            Tok::Ident(w) if w == "and" => {
                self.bump();
                let b = self.ident()?;
                self.word("subClassOf")?;
                Ok(Axiom::SubConj(name, b, self.ident()?))
            }
            Tok::Ident(w) if w == "o" => {
                self.bump();
                let s = self.ident()?;
                self.word("subRoleOf")?;
                Ok(Axiom::SubRChain(name, s, self.ident()?))
            }
            Tok::Ident(w) if w == "subRoleOf" => {
                self.bump();
                Ok(Axiom::SubRole(name, self.ident()?))
            }
            Tok::Ident(w) if w == "subClassOf" => {
                self.bump();
                self.class_rhs(name)
            }
            other => self.err(format!("unexpected {} in axiom", describe(&other))),
        }
    }

    fn class_rhs(&mut self, sub: String) -> Result<Axiom, KbError> {
        if self.is_word(0, "exists") && self.is_punct(2, ".") && self.is_punct(3, "{") {
            self.bump();
            let r = self.ident()?;
            self.punct(".")?;
            self.punct("{")?;
            let a = self.ident()?;
            self.punct("}")?;
            return Ok(Axiom::SupEx(sub, r, a));
        }
        if self.is_word(0, "forall") && self.is_punct(2, ".") {
            self.bump();
            let r = self.ident()?;
            self.punct(".")?;
            let b = self.ident()?;
            return Ok(Axiom::SupForall(sub, r, b));
        }
        if self.is_word(0, "atmost1") && matches!(self.peek(1), Tok::Ident(_)) {
            self.bump();
            return Ok(Axiom::SupLeqOne(sub, self.ident()?));
        }
        let b = self.ident()?;
        if self.is_word(0, "or") {
            self.bump();
            return Ok(Axiom::Disjunction(sub, b, self.ident()?));
        }
        Ok(Axiom::SubClass(sub, b))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a DSL document into an sCKR.
pub fn parse_sckr(text: &str) -> Result<Sckr, KbError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let mut stmts = Vec::new();
    while p.peek(0) != &Tok::Eof {
        stmts.push(p.statement()?);
    }

    let mut relations: Vec<Relation> = Vec::new();
    for s in &stmts {
        if let Stmt::Relation(name, pos) = s {
            if relations.iter().any(|r| &r.name == name) {
                return Err(KbError::DuplicateRelation {
                    line: pos.line,
                    col: pos.col,
                    name: name.clone(),
                });
            }
            relations.push(Relation {
                name: name.clone(),
                edges: Vec::new(),
            });
        }
    }

    let mut contexts: Vec<String> = Vec::new();
    let add_ctx = |c: &str, contexts: &mut Vec<String>| {
        if !contexts.iter().any(|x| x == c) {
            contexts.push(c.to_string());
        }
    };
    for s in &stmts {
        match s {
            Stmt::Context(c) => add_ctx(c, &mut contexts),
            Stmt::Edge { lower, upper, .. } => {
                add_ctx(lower, &mut contexts);
                add_ctx(upper, &mut contexts);
            }
            Stmt::Axiom { ctx, .. } => add_ctx(ctx, &mut contexts),
            _ => {}
        }
    }

    let mut declared: HashMap<String, Category> = HashMap::new();
    for s in &stmts {
        if let Stmt::Declare(cat, name, pos) = s {
            if let Some(prev) = declared.get(name) {
                if prev != cat {
                    return Err(conflict(pos, name, *prev, *cat));
                }
            }
            declared.insert(name.clone(), *cat);
        }
    }

    let mut inferred: HashMap<String, Category> = declared.clone();
    let mut kbs: BTreeMap<String, ContextKb> = BTreeMap::new();
    for s in stmts {
        match s {
            Stmt::Edge {
                lower,
                upper,
                rel,
                rel_pos,
            } => {
                let r = relations.iter_mut().find(|r| r.name == rel).ok_or(
                    KbError::UnknownRelation {
                        line: rel_pos.line,
                        col: rel_pos.col,
                        name: rel,
                    },
                )?;
                r.edges.push((lower, upper));
            }
            Stmt::Axiom {
                ctx,
                relation,
                axiom,
                pos,
            } => {
                for (name, cat) in axiom.symbols() {
                    if matches!(name, TOP | BOT) && cat == Category::Concept {
                        continue;
                    }
                    match inferred.get(name) {
                        Some(prev) if *prev != cat => return Err(conflict(&pos, name, *prev, cat)),
                        Some(_) => {}
                        None => {
                            inferred.insert(name.to_string(), cat);
                        }
                    }
                }
                if let Some(target) = axiom.eval_target() {
                    if !contexts.iter().any(|c| c == target) {
                        return Err(KbError::Undeclared {
                            line: pos.line,
                            col: pos.col,
                            name: target.to_string(),
                        });
                    }
                }
                let kb = kbs.entry(ctx).or_default();
                match relation {
                    Some((rel, rpos)) => {
                        if !relations.iter().any(|r| r.name == rel) {
                            return Err(KbError::UnknownRelation {
                                line: rpos.line,
                                col: rpos.col,
                                name: rel,
                            });
                        }
                        kb.defeasible.push(DefeasibleAxiom {
                            relation: rel,
                            body: axiom,
                        });
                    }
                    None => kb.strict.push(axiom),
                }
            }
            _ => {}
        }
    }

    let mut vocabulary = Vocabulary {
        contexts: contexts.iter().cloned().collect(),
        ..Default::default()
    };
    for (name, cat) in inferred {
        let set = match cat {
            Category::Concept => &mut vocabulary.concepts,
            Category::Role => &mut vocabulary.roles,
            Category::Individual => &mut vocabulary.individuals,
        };
        set.insert(name);
    }
    for c in &contexts {
        if let Some(cat) = vocabulary.category(c) {
            if cat != Category::Individual {
                return Err(KbError::CategoryConflict {
                    line: 1,
                    col: 1,
                    name: c.clone(),
                    first: "a context",
                    second: cat.describe(),
                });
            }
        }
    }

    Ok(Sckr {
        structure: ContextStructure {
            contexts,
            relations,
        },
        kbs,
        vocabulary,
    })
}

fn conflict(pos: &Pos, name: &str, first: Category, second: Category) -> KbError {
    KbError::CategoryConflict {
        line: pos.line,
        col: pos.col,
        name: name.to_string(),
        first: first.describe(),
        second: second.describe(),
    }
}
