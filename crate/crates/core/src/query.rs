//! Queries over the preferred models: instance checks, boolean conjunctive
//! queries, cautious and brave consequences, epistemic aggregates.
//!
//! Syntax follows the KB language: `c : A(a)`, `c : R(a,b)`, identifiers
//! starting with an uppercase letter are variables. Atoms are separated by
//! `,`. Aggregates read `q(X, count(Y)) <- K X,Y. X : S(Y)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::depgraph::{is_eval_disconnected, Connectivity};
use crate::kb::{Axiom, Category, Sckr};
use crate::measures::parse_rational;
use crate::preferences::RelMode;
use crate::translator::{
    preferred_indices, solve_ckr, CkrError, CkrOptions, CkrSolution, JustifiedModel,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("query syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is {1}, expected {2}")]
    WrongCategory(String, &'static str, &'static str),
    #[error("unsupported aggregate `{0}`")]
    UnsupportedAggregate(String),
    #[error("unsafe variable `{0}`")]
    UnsafeVariable(String),
    #[error("`{0}` is not a number")]
    NotNumeric(String),
    #[error(transparent)]
    Ckr(#[from] CkrError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QTerm {
    Var(String),
    Const(String),
}

impl QTerm {
    fn of(s: &str) -> QTerm {
        if s.starts_with(|c: char| c.is_ascii_uppercase()) {
            QTerm::Var(s.to_string())
        } else {
            QTerm::Const(s.to_string())
        }
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTerm::Var(v) | QTerm::Const(v) => f.write_str(v),
        }
    }
}

/// `c : P(t1)` or `c : P(t1,t2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QAtom {
    pub context: QTerm,
    pub pred: String,
    pub args: Vec<QTerm>,
}

impl QAtom {
    fn vars(&self) -> impl Iterator<Item = &String> {
        std::iter::once(&self.context)
            .chain(&self.args)
            .filter_map(|t| match t {
                QTerm::Var(v) => Some(v),
                QTerm::Const(_) => None,
            })
    }

    /// The ground assertion and its context, if no variables remain.
    pub fn ground(&self) -> Option<(String, Axiom)> {
        let c = match &self.context {
            QTerm::Const(c) => c.clone(),
            QTerm::Var(_) => return None,
        };
        let args: Option<Vec<String>> = self
            .args
            .iter()
            .map(|t| match t {
                QTerm::Const(a) => Some(a.clone()),
                QTerm::Var(_) => None,
            })
            .collect();
        let args = args?;
        let a = match args.as_slice() {
            [x] => Axiom::ClassAssertion(self.pred.clone(), x.clone()),
            [x, y] => Axiom::RoleAssertion(self.pred.clone(), x.clone(), y.clone()),
            _ => return None,
        };
        Some((c, a))
    }
}

impl fmt::Display for QAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|t| t.to_string()).collect();
        write!(f, "{} : {}({})", self.context, self.pred, args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bcq {
    pub atoms: Vec<QAtom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AggFn {
    Count,
    CountDistinct,
    Sum,
    Min,
    Max,
}

impl AggFn {
    pub fn parse(s: &str) -> Result<AggFn, QueryError> {
        Ok(match s {
            "count" => AggFn::Count,
            "countd" => AggFn::CountDistinct,
            "sum" => AggFn::Sum,
            "min" => AggFn::Min,
            "max" => AggFn::Max,
            other => return Err(QueryError::UnsupportedAggregate(other.to_string())),
        })
    }
}

/// `q(x̄, α(ȳ)) <- K x̄,ȳ,z̄. φ`. Without a `K` list all body variables
/// are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateQuery {
    pub group: Vec<String>,
    pub func: AggFn,
    pub agg: Vec<String>,
    pub known: Vec<String>,
    pub body: Vec<QAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AggValue {
    Number(BigRational),
    Name(String),
}

impl fmt::Display for AggValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggValue::Number(n) => write!(f, "{n}"),
            AggValue::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggRow {
    pub group: Vec<String>,
    pub value: AggValue,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip();
        self.pos == self.src.len()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), QueryError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        self.skip();
        let rest = &self.src[self.pos..];
        let n = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if n == 0 {
            return self.err("expected a name");
        }
        self.pos += n;
        Ok(rest[..n].to_string())
    }

    fn atom(&mut self) -> Result<QAtom, QueryError> {
        let context = QTerm::of(&self.ident()?);
        self.expect(":")?;
        let pred = self.ident()?;
        self.expect("(")?;
        let mut args = vec![QTerm::of(&self.ident()?)];
        while self.eat(",") {
            args.push(QTerm::of(&self.ident()?));
        }
        self.expect(")")?;
        if args.len() > 2 {
            return self.err("at most two arguments");
        }
        Ok(QAtom {
            context,
            pred,
            args,
        })
    }

    fn atoms(&mut self) -> Result<Vec<QAtom>, QueryError> {
        let mut out = Vec::new();
        if self.at_end() {
            return Ok(out);
        }
        out.push(self.atom()?);
        while self.eat(",") {
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<(), QueryError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

/// `c : A(a)` or `c : R(a,b)`, ground.
pub fn parse_instance_query(text: &str) -> Result<QAtom, QueryError> {
    let mut lx = Lexer { src: text, pos: 0 };
    let a = lx.atom()?;
    lx.finish()?;
    if let Some(v) = a.vars().next() {
        return Err(QueryError::Syntax {
            pos: 0,
            msg: format!("variable `{v}` in an instance query"),
        });
    }
    Ok(a)
}

/// Comma-separated atoms, optionally prefixed by `exists X,Y.`.
pub fn parse_bcq(text: &str) -> Result<Bcq, QueryError> {
    let mut lx = Lexer { src: text, pos: 0 };
    if lx.eat("exists ") {
        loop {
            lx.ident()?;
            if !lx.eat(",") {
                break;
            }
        }
        lx.expect(".")?;
    }
    let atoms = lx.atoms()?;
    lx.finish()?;
    Ok(Bcq { atoms })
}

pub fn parse_aggregate(text: &str) -> Result<AggregateQuery, QueryError> {
    let mut lx = Lexer { src: text, pos: 0 };
    lx.ident()?;
    lx.expect("(")?;
    let mut group = Vec::new();
    let (func, agg) = loop {
        let name = lx.ident()?;
        if lx.eat("(") {
            let func = AggFn::parse(&name)?;
            let mut agg = vec![lx.ident()?];
            while lx.eat(",") {
                agg.push(lx.ident()?);
            }
            lx.expect(")")?;
            lx.expect(")")?;
            break (func, agg);
        }
        group.push(name);
        lx.expect(",")?;
    };
    if !lx.eat("<-") {
        lx.expect(":-")?;
    }
    let mut known = Vec::new();
    if lx.eat("K ") {
        loop {
            known.push(lx.ident()?);
            if !lx.eat(",") {
                break;
            }
        }
        lx.expect(".")?;
    }
    let body = lx.atoms()?;
    lx.finish()?;
    let body_vars: BTreeSet<&String> = body.iter().flat_map(|a| a.vars()).collect();
    if known.is_empty() {
        known = body_vars.iter().map(|v| v.to_string()).collect();
    }
    for v in group.iter().chain(&agg).chain(&known) {
        if !body_vars.contains(v) {
            return Err(QueryError::UnsafeVariable(v.clone()));
        }
    }
    for v in group.iter().chain(&agg) {
        if !known.contains(v) {
            return Err(QueryError::UnsafeVariable(v.clone()));
        }
    }
    Ok(AggregateQuery {
        group,
        func,
        agg,
        known,
        body,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConsequenceMode {
    Cautious,
    Brave,
}

/// A solved sCKR with its preferred models, shared by all queries.
pub struct Reasoner {
    pub kb: Sckr,
    pub solution: CkrSolution,
    pub preferred: Vec<usize>,
    pub connectivity: Connectivity,
}

type Binding = BTreeMap<String, String>;

impl Reasoner {
    pub fn new(kb: Sckr, opts: &CkrOptions) -> Result<Reasoner, CkrError> {
        Reasoner::with_mode(kb, opts, RelMode::Mp)
    }

    pub fn with_mode(kb: Sckr, opts: &CkrOptions, mode: RelMode) -> Result<Reasoner, CkrError> {
        let solution = solve_ckr(&kb, opts)?;
        let preferred = preferred_indices(&kb, &solution.models, mode)?;
        let connectivity = is_eval_disconnected(&kb);
        Ok(Reasoner {
            kb,
            solution,
            preferred,
            connectivity,
        })
    }

    pub fn preferred_models(&self) -> impl Iterator<Item = &JustifiedModel> {
        self.preferred.iter().map(|&i| &self.solution.models[i])
    }

    fn check_context(&self, c: &str) -> Result<(), QueryError> {
        if self.kb.structure.context_index(c).is_none() {
            return Err(QueryError::UnknownContext(c.to_string()));
        }
        Ok(())
    }

    fn check_symbol(&self, name: &str, want: Category) -> Result<(), QueryError> {
        match self.kb.vocabulary.category(name) {
            None => Err(QueryError::UnknownSymbol(name.to_string())),
            Some(c) if c != want => Err(QueryError::WrongCategory(
                name.to_string(),
                c.describe(),
                want.describe(),
            )),
            _ => Ok(()),
        }
    }

    fn check_atom(&self, a: &QAtom) -> Result<(), QueryError> {
        if let QTerm::Const(c) = &a.context {
            self.check_context(c)?;
        }
        self.check_symbol(
            &a.pred,
            if a.args.len() == 1 {
                Category::Concept
            } else {
                Category::Role
            },
        )?;
        for t in &a.args {
            if let QTerm::Const(x) = t {
                self.check_symbol(x, Category::Individual)?;
            }
        }
        Ok(())
    }

    /// Holds in every preferred model.
    pub fn c_entails(&self, q: &QAtom) -> Result<bool, QueryError> {
        self.check_atom(q)?;
        let (c, a) = q.ground().ok_or_else(|| QueryError::Syntax {
            pos: 0,
            msg: "query is not ground".into(),
        })?;
        Ok(self.preferred_models().all(|m| m.holds(&c, &a)))
    }

    pub fn consequences(
        &self,
        c: &str,
        mode: ConsequenceMode,
    ) -> Result<BTreeSet<Axiom>, QueryError> {
        self.check_context(c)?;
        let mut views = self.preferred_models().map(|m| m.view(c).clone());
        let first = views.next().unwrap_or_default();
        Ok(views.fold(first, |acc, v| match mode {
            ConsequenceMode::Cautious => acc.intersection(&v).cloned().collect(),
            ConsequenceMode::Brave => acc.union(&v).cloned().collect(),
        }))
    }

    /// All bindings of the atoms' variables that hold in `m`.
    fn matches(&self, m: &JustifiedModel, atoms: &[QAtom]) -> Vec<Binding> {
        let mut out = vec![Binding::new()];
        for a in atoms {
            let mut next = Vec::new();
            for b in &out {
                let contexts: Vec<&String> = match &a.context {
                    QTerm::Const(c) => vec![c],
                    QTerm::Var(v) => match b.get(v) {
                        Some(c) => vec![c],
                        None => self.kb.structure.contexts.iter().collect(),
                    },
                };
                for c in contexts {
                    for ax in m.view(c) {
                        let vals: Vec<&String> = match (ax, a.args.len()) {
                            (Axiom::ClassAssertion(p, x), 1) if *p == a.pred => vec![x],
                            (Axiom::RoleAssertion(p, x, y), 2) if *p == a.pred => vec![x, y],
                            _ => continue,
                        };
                        let mut nb = b.clone();
                        let ok = std::iter::once((&a.context, c))
                            .chain(a.args.iter().zip(vals))
                            .all(|(t, v)| match t {
                                QTerm::Const(k) => k == v,
                                QTerm::Var(x) => {
                                    nb.entry(x.clone()).or_insert_with(|| v.clone()) == v
                                }
                            });
                        if ok {
                            next.push(nb);
                        }
                    }
                }
            }
            out = next;
        }
        out
    }

    pub fn bcq_entails(&self, q: &Bcq) -> Result<bool, QueryError> {
        for a in &q.atoms {
            self.check_atom(a)?;
        }
        Ok(self
            .preferred_models()
            .all(|m| !self.matches(m, &q.atoms).is_empty()))
    }

    /// Tuples over `vars` that are answers in every preferred model.
    pub fn certain_answers(
        &self,
        atoms: &[QAtom],
        vars: &[String],
    ) -> Result<BTreeSet<Vec<String>>, QueryError> {
        for a in atoms {
            self.check_atom(a)?;
        }
        let mut acc: Option<BTreeSet<Vec<String>>> = None;
        for m in self.preferred_models() {
            let here: BTreeSet<Vec<String>> = self
                .matches(m, atoms)
                .into_iter()
                .map(|b| vars.iter().map(|v| b[v].clone()).collect())
                .collect();
            acc = Some(match acc {
                None => here,
                Some(prev) => prev.intersection(&here).cloned().collect(),
            });
        }
        Ok(acc.unwrap_or_default())
    }

    /// Certain answers over the known variables, grouped and aggregated.
    /// Empty groups give 0 for count, countd and sum and no row for min and
    /// max.
    pub fn epistemic_aggregate(&self, q: &AggregateQuery) -> Result<Vec<AggRow>, QueryError> {
        let tuples = self.certain_answers(&q.body, &q.known)?;
        let idx = |v: &String| {
            q.known
                .iter()
                .position(|k| k == v)
                .expect("checked by the parser")
        };
        let gi: Vec<usize> = q.group.iter().map(idx).collect();
        let ai: Vec<usize> = q.agg.iter().map(idx).collect();
        let mut groups: BTreeMap<Vec<String>, Vec<Vec<String>>> = BTreeMap::new();
        for t in &tuples {
            let g = gi.iter().map(|&i| t[i].clone()).collect();
            groups
                .entry(g)
                .or_default()
                .push(ai.iter().map(|&i| t[i].clone()).collect());
        }
        if q.group.is_empty() && groups.is_empty() {
            groups.insert(Vec::new(), Vec::new());
        }
        let number =
            |s: &String| parse_rational("number", s).map_err(|_| QueryError::NotNumeric(s.clone()));
        let mut rows = Vec::new();
        for (group, ys) in groups {
            let value = match q.func {
                AggFn::Count => Some(AggValue::Number(BigRational::from_integer(ys.len().into()))),
                AggFn::CountDistinct => {
                    let d: BTreeSet<&Vec<String>> = ys.iter().collect();
                    Some(AggValue::Number(BigRational::from_integer(d.len().into())))
                }
                AggFn::Sum => {
                    let mut s = BigRational::zero();
                    for y in &ys {
                        s += number(&y[0])?;
                    }
                    Some(AggValue::Number(s))
                }
                AggFn::Min | AggFn::Max => {
                    let vals: Vec<AggValue> = ys
                        .iter()
                        .map(|y| {
                            number(&y[0])
                                .map(AggValue::Number)
                                .unwrap_or_else(|_| AggValue::Name(y[0].clone()))
                        })
                        .collect();
                    if q.func == AggFn::Min {
                        vals.into_iter().min()
                    } else {
                        vals.into_iter().max()
                    }
                }
            };
            if let Some(value) = value {
                rows.push(AggRow { group, value });
            }
        }
        Ok(rows)
    }
}
