//! Dependency graph over (expression, context) pairs and the
//! eval-disconnectedness check.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::kb::{Axiom, Sckr, TOP};

/// Concept or role expression as it occurs on one side of an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Name(String),
    Nominal(String),
    Conj(String, String),
    Exists(String, String),
    ExistsNom(String, String),
    Forall(String, String),
    AtMostOne(String),
    Chain(String, String),
    Eval(String, String),
}

impl Expr {
    fn name(s: &str) -> Expr {
        Expr::Name(s.to_string())
    }

    /// Direct subexpressions.
    pub fn children(&self) -> Vec<Expr> {
        use Expr::*;
        match self {
            Name(_) | Nominal(_) | Eval(..) => vec![],
            Conj(a, b) | Chain(a, b) => vec![Expr::name(a), Expr::name(b)],
            Exists(r, a) | Forall(r, a) => vec![Expr::name(r), Expr::name(a)],
            ExistsNom(r, x) => vec![Expr::name(r), Nominal(x.clone())],
            AtMostOne(r) => vec![Expr::name(r)],
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Name(a) => write!(f, "{a}"),
            Nominal(x) => write!(f, "{{{x}}}"),
            Conj(a, b) => write!(f, "{a}⊓{b}"),
            Exists(r, a) => write!(f, "∃{r}.{a}"),
            ExistsNom(r, x) => write!(f, "∃{r}.{{{x}}}"),
            Forall(r, a) => write!(f, "∀{r}.{a}"),
            AtMostOne(r) => write!(f, "≤1{r}.⊤"),
            Chain(r, s) => write!(f, "{r}∘{s}"),
            Eval(x, c) => write!(f, "eval({x},{c})"),
        }
    }
}

/// Top-level expressions of an axiom, left side first.
pub fn sides(a: &Axiom) -> Vec<Expr> {
    use Axiom::*;
    let n = Expr::name;
    match a {
        ClassAssertion(c, _) => vec![n(c)],
        RoleAssertion(r, _, _) => vec![n(r)],
        Eq(..) | Neq(..) => vec![],
        SubClass(x, y) | SubRole(x, y) | Dis(x, y) | Inv(x, y) => vec![n(x), n(y)],
        NomSubClass(i, b) => vec![Expr::Nominal(i.clone()), n(b)],
        SubConj(x, y, z) => vec![Expr::Conj(x.clone(), y.clone()), n(z)],
        SubEx(r, x, y) => vec![Expr::Exists(r.clone(), x.clone()), n(y)],
        SupEx(x, r, i) => vec![n(x), Expr::ExistsNom(r.clone(), i.clone())],
        SupForall(x, r, y) => vec![n(x), Expr::Forall(r.clone(), y.clone())],
        SupLeqOne(x, r) => vec![n(x), Expr::AtMostOne(r.clone())],
        SubRChain(r, s, t) => vec![Expr::Chain(r.clone(), s.clone()), n(t)],
        Irr(r) => vec![n(r)],
        SubEvalC(x, c, y) | SubEvalR(x, c, y) => vec![Expr::Eval(x.clone(), c.clone()), n(y)],
        Disjunction(x, y, z) => vec![n(x), n(y), n(z)],
    }
}

/// Concept and role names mentioned by an axiom, including inside eval.
pub fn names(a: &Axiom) -> BTreeSet<String> {
    fn walk(e: &Expr, out: &mut BTreeSet<String>) {
        match e {
            Expr::Name(s) => {
                out.insert(s.clone());
            }
            Expr::Eval(x, _) => {
                out.insert(x.clone());
            }
            Expr::Nominal(_) => {}
            other => other.children().iter().for_each(|c| walk(c, out)),
        }
    }
    let mut out = BTreeSet::new();
    sides(a).iter().for_each(|e| walk(e, &mut out));
    out.remove(TOP);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub expr: Expr,
    pub context: String,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.expr, self.context)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// To a subexpression.
    Sub,
    /// Between expressions of one axiom.
    CoOccur,
    /// From an eval expression to its target.
    Eval,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepGraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<(Vertex, Vertex, EdgeKind)>,
}

impl DepGraph {
    fn add_expr(&mut self, e: &Expr, c: &str) -> Vertex {
        let v = Vertex {
            expr: e.clone(),
            context: c.to_string(),
        };
        self.vertices.insert(v.clone());
        for child in e.children() {
            let w = self.add_expr(&child, c);
            self.edges.insert((v.clone(), w, EdgeKind::Sub));
        }
        if let Expr::Eval(x, target) = e {
            let w = Vertex {
                expr: Expr::Name(x.clone()),
                context: target.clone(),
            };
            self.vertices.insert(w.clone());
            self.edges.insert((v.clone(), w, EdgeKind::Eval));
        }
        v
    }

    fn add_axiom(&mut self, a: &Axiom, c: &str) {
        let vs: Vec<Vertex> = sides(a).iter().map(|e| self.add_expr(e, c)).collect();
        for (i, v) in vs.iter().enumerate() {
            for w in &vs[i + 1..] {
                self.edges.insert((v.clone(), w.clone(), EdgeKind::CoOccur));
            }
        }
    }

    fn adjacency(&self) -> BTreeMap<&Vertex, Vec<&Vertex>> {
        let mut adj: BTreeMap<&Vertex, Vec<&Vertex>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (a, b, _) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        adj
    }

    /// Shortest undirected path from `from` to any vertex accepted by
    /// `goal`.
    pub fn path<'a>(
        &'a self,
        from: &'a Vertex,
        goal: impl Fn(&Vertex) -> bool,
    ) -> Option<Vec<Vertex>> {
        let adj = self.adjacency();
        let mut parent: BTreeMap<&Vertex, &Vertex> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(v) = queue.pop_front() {
            if v != from && goal(v) {
                let mut out = vec![v.clone()];
                let mut cur = v;
                while let Some(p) = parent.get(cur) {
                    out.push((*p).clone());
                    cur = p;
                }
                out.reverse();
                return Some(out);
            }
            for w in adj.get(v).into_iter().flatten() {
                if seen.insert(*w) {
                    parent.insert(*w, v);
                    queue.push_back(*w);
                }
            }
        }
        None
    }

    pub fn has_edge(&self, a: &Vertex, b: &Vertex) -> bool {
        self.edges
            .iter()
            .any(|(x, y, _)| (x == a && y == b) || (x == b && y == a))
    }
}

pub fn build_dep_graph(k: &Sckr) -> DepGraph {
    let mut g = DepGraph::default();
    for (c, a) in k.strict_axioms() {
        g.add_axiom(a, c);
    }
    for (c, d) in k.defeasible_axioms() {
        g.add_axiom(&d.body, c);
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Disconnected,
    Connected(Vec<Vertex>),
}

impl Connectivity {
    pub fn is_disconnected(&self) -> bool {
        matches!(self, Connectivity::Disconnected)
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::Disconnected => f.write_str("DISCONNECTED"),
            Connectivity::Connected(p) => {
                let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "CONNECTED: {}", parts.join(" -- "))
            }
        }
    }
}

/// No undirected path links names of defeasible axioms across two distinct
/// contexts. Otherwise returns a shortest witness path.
pub fn is_eval_disconnected(k: &Sckr) -> Connectivity {
    let g = build_dep_graph(k);
    let defeasible: BTreeSet<String> = k
        .defeasible_axioms()
        .flat_map(|(_, d)| names(&d.body))
        .collect();
    let relevant = |v: &Vertex| matches!(&v.expr, Expr::Name(n) if defeasible.contains(n));
    for v in g.vertices.iter().filter(|v| relevant(v)) {
        if let Some(p) = g.path(v, |w| relevant(w) && w.context != v.context) {
            return Connectivity::Connected(p);
        }
    }
    Connectivity::Disconnected
}
