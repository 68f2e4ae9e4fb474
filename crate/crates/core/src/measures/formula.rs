//! Weighted formulas: `k | v | ¬v | α ⊕ α | α ⊗ α`, with sums and products
//! stored flat.
//!
//! Text syntax: numbers or `[text]` are constants, `p(a,b)` is an atom,
//! `~p(a)` its negation, `+` and `*` the operations, `*` binding tighter.

use crate::asp::{GroundAtom, Term};

use super::{MeasureError, Semiring};

#[derive(Clone, Debug, PartialEq)]
pub enum Formula<V> {
    Const(V),
    Lit(GroundAtom),
    Neg(GroundAtom),
    Sum(Vec<Formula<V>>),
    Prod(Vec<Formula<V>>),
}

impl<V: Clone> Formula<V> {
    pub fn sum(items: Vec<Formula<V>>) -> Self {
        Formula::Sum(items)
    }

    pub fn prod(items: Vec<Formula<V>>) -> Self {
        Formula::Prod(items)
    }

    /// `v ⊗ k ⊕ ¬v`: `k` when `v` holds, the unit otherwise.
    pub fn guarded(v: GroundAtom, k: V) -> Self {
        Formula::Sum(vec![
            Formula::Prod(vec![Formula::Lit(v.clone()), Formula::Const(k)]),
            Formula::Neg(v),
        ])
    }

    pub fn eval<S: Semiring<V = V>>(&self, r: &S, holds: &dyn Fn(&GroundAtom) -> bool) -> V {
        match self {
            Formula::Const(k) => k.clone(),
            Formula::Lit(a) => {
                if holds(a) {
                    r.one()
                } else {
                    r.zero()
                }
            }
            Formula::Neg(a) => {
                if holds(a) {
                    r.zero()
                } else {
                    r.one()
                }
            }
            Formula::Sum(items) => items
                .iter()
                .fold(r.zero(), |acc, f| r.add(&acc, &f.eval(r, holds))),
            Formula::Prod(items) => items
                .iter()
                .fold(r.one(), |acc, f| r.mul(&acc, &f.eval(r, holds))),
        }
    }
}

struct Parser<'a, S> {
    src: &'a [u8],
    pos: usize,
    r: &'a S,
}

impl<'a, S: Semiring> Parser<'a, S> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, MeasureError> {
        Err(MeasureError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Formula<S::V>, MeasureError> {
        let mut items = vec![self.prod()?];
        while self.eat(b'+') {
            items.push(self.prod()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Sum(items)
        })
    }

    fn prod(&mut self) -> Result<Formula<S::V>, MeasureError> {
        let mut items = vec![self.unary()?];
        while self.eat(b'*') {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Prod(items)
        })
    }

    fn unary(&mut self) -> Result<Formula<S::V>, MeasureError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(f)
            }
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::Neg(self.atom()?))
            }
            Some(b'[') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b']' {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return self.err("unterminated `[`");
                }
                let text = String::from_utf8_lossy(&self.src[start..self.pos])
                    .trim()
                    .to_string();
                self.pos += 1;
                Ok(Formula::Const(self.r.parse(&text)?))
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.src.len()
                    && matches!(self.src[self.pos], b'0'..=b'9' | b'.' | b'/')
                {
                    self.pos += 1;
                }
                let text = String::from_utf8_lossy(&self.src[start..self.pos]).to_string();
                Ok(Formula::Const(self.r.parse(&text)?))
            }
            Some(_) => Ok(Formula::Lit(self.atom()?)),
            None => self.err("unexpected end of formula"),
        }
    }

    fn name(&mut self) -> Result<String, MeasureError> {
        self.skip();
        if self.peek() == Some(b'"') {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                self.pos += 1;
            }
            if self.pos == self.src.len() {
                return self.err("unterminated string");
            }
            let s = String::from_utf8_lossy(&self.src[start..self.pos]).to_string();
            self.pos += 1;
            return Ok(s);
        }
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).to_string())
    }

    fn args(&mut self) -> Result<Vec<Term>, MeasureError> {
        let mut args = Vec::new();
        if self.eat(b'(') {
            loop {
                let n = self.name()?;
                let sub = self.args()?;
                args.push(if sub.is_empty() {
                    Term::Const(n)
                } else {
                    Term::Func(n, sub)
                });
                if self.eat(b')') {
                    break;
                }
                if !self.eat(b',') {
                    return self.err("expected `,` or `)`");
                }
            }
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<GroundAtom, MeasureError> {
        let pred = self.name()?;
        Ok(GroundAtom::new(pred, self.args()?))
    }
}

pub fn parse_formula<S: Semiring>(r: &S, text: &str) -> Result<Formula<S::V>, MeasureError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        r,
    };
    let f = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}
