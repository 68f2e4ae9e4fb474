//! Multi-relational simple CKRs: vocabulary, normal-form axioms, context
//! structure with named strict orders, and their closures.

mod closure;
mod parse;
mod print;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use closure::{compute_closures, OrderClosures};
pub use parse::parse_sckr;
pub use validate::{validate_normal_form, Diagnostic};

use thiserror::Error;

/// Concept names with a fixed meaning.
pub const TOP: &str = "top";
pub const BOT: &str = "bot";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KbError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: undeclared symbol `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: duplicate relation `{name}`")]
    DuplicateRelation {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: unknown relation `{name}`")]
    UnknownRelation {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: `{name}` used as {first} and as {second}")]
    CategoryConflict {
        line: usize,
        col: usize,
        name: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("relation `{relation}` has a cycle: {}", .cycle.join(" < "))]
    Cycle {
        relation: String,
        cycle: Vec<String>,
    },
    #[error("unknown relation `{0}` in priority list")]
    BadPriority(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Concept,
    Role,
    Individual,
}

impl Category {
    pub fn describe(self) -> &'static str {
        match self {
            Category::Concept => "a concept",
            Category::Role => "a role",
            Category::Individual => "an individual",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
    pub contexts: BTreeSet<String>,
}

impl Vocabulary {
    pub fn category(&self, name: &str) -> Option<Category> {
        if self.concepts.contains(name) {
            Some(Category::Concept)
        } else if self.roles.contains(name) {
            Some(Category::Role)
        } else if self.individuals.contains(name) {
            Some(Category::Individual)
        } else {
            None
        }
    }
}

/// Axiom shapes. Operand order follows the textual form left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `A(a)`
    ClassAssertion(String, String),
    /// `R(a,b)`
    RoleAssertion(String, String, String),
    /// `a = b`
    Eq(String, String),
    /// `a != b`
    Neq(String, String),
    /// `A subClassOf B`
    SubClass(String, String),
    /// `{a} subClassOf B`
    NomSubClass(String, String),
    /// `A and B subClassOf C`
    SubConj(String, String, String),
    /// `exists R.A subClassOf B`
    SubEx(String, String, String),
    /// `A subClassOf exists R.{a}`
    SupEx(String, String, String),
    /// `A subClassOf forall R.B`
    SupForall(String, String, String),
    /// `A subClassOf atmost1 R`
    SupLeqOne(String, String),
    /// `R subRoleOf S`
    SubRole(String, String),
    /// `R o S subRoleOf T`
    SubRChain(String, String, String),
    /// `disjoint(R,S)`
    Dis(String, String),
    /// `inverse(R,S)`
    Inv(String, String),
    /// `irreflexive(R)`
    Irr(String),
    /// `eval(A,c) subClassOf B`
    SubEvalC(String, String, String),
    /// `eval(R,c) subRoleOf S`
    SubEvalR(String, String, String),
    /// `A subClassOf B or C`: accepted by the parser, rejected by validation.
    Disjunction(String, String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomKind {
    ClassAssertion,
    RoleAssertion,
    Eq,
    Neq,
    SubClass,
    NomSubClass,
    SubConj,
    SubEx,
    SupEx,
    SupForall,
    SupLeqOne,
    SubRole,
    SubRChain,
    Dis,
    Inv,
    Irr,
    SubEvalC,
    SubEvalR,
    Disjunction,
}

impl AxiomKind {
    pub fn is_defeasible_shape(self) -> bool {
        use AxiomKind::*;
        matches!(
            self,
            SubClass
                | SubConj
                | SubEx
                | SupEx
                | SupForall
                | SupLeqOne
                | SubRole
                | SubRChain
                | Dis
                | Inv
                | Irr
        )
    }

    /// Tag used for this shape in overriding atoms.
    pub fn ovr_tag(self) -> Option<&'static str> {
        use AxiomKind::*;
        Some(match self {
            SubClass => "subClass",
            SubConj => "subConj",
            SubEx => "subEx",
            SupEx => "supEx",
            SupForall => "supForall",
            SupLeqOne => "supLeqOne",
            SubRole => "subRole",
            SubRChain => "subRChain",
            Dis => "dis",
            Inv => "inv",
            Irr => "irr",
            _ => return None,
        })
    }

    pub fn from_ovr_tag(tag: &str) -> Option<AxiomKind> {
        use AxiomKind::*;
        Some(match tag {
            "subClass" => SubClass,
            "subConj" => SubConj,
            "subEx" => SubEx,
            "supEx" => SupEx,
            "supForall" => SupForall,
            "supLeqOne" => SupLeqOne,
            "subRole" => SubRole,
            "subRChain" => SubRChain,
            "dis" => Dis,
            "inv" => Inv,
            "irr" => Irr,
            _ => return None,
        })
    }
}

impl Axiom {
    pub fn kind(&self) -> AxiomKind {
        use Axiom::*;
        match self {
            ClassAssertion(..) => AxiomKind::ClassAssertion,
            RoleAssertion(..) => AxiomKind::RoleAssertion,
            Eq(..) => AxiomKind::Eq,
            Neq(..) => AxiomKind::Neq,
            SubClass(..) => AxiomKind::SubClass,
            NomSubClass(..) => AxiomKind::NomSubClass,
            SubConj(..) => AxiomKind::SubConj,
            SubEx(..) => AxiomKind::SubEx,
            SupEx(..) => AxiomKind::SupEx,
            SupForall(..) => AxiomKind::SupForall,
            SupLeqOne(..) => AxiomKind::SupLeqOne,
            SubRole(..) => AxiomKind::SubRole,
            SubRChain(..) => AxiomKind::SubRChain,
            Dis(..) => AxiomKind::Dis,
            Inv(..) => AxiomKind::Inv,
            Irr(..) => AxiomKind::Irr,
            SubEvalC(..) => AxiomKind::SubEvalC,
            SubEvalR(..) => AxiomKind::SubEvalR,
            Disjunction(..) => AxiomKind::Disjunction,
        }
    }

    /// Operands in textual order.
    pub fn operands(&self) -> Vec<&str> {
        use Axiom::*;
        match self {
            Irr(a) => vec![a],
            ClassAssertion(a, b)
            | Eq(a, b)
            | Neq(a, b)
            | SubClass(a, b)
            | NomSubClass(a, b)
            | SupLeqOne(a, b)
            | SubRole(a, b)
            | Dis(a, b)
            | Inv(a, b) => vec![a, b],
            RoleAssertion(a, b, c)
            | SubConj(a, b, c)
            | SubEx(a, b, c)
            | SupEx(a, b, c)
            | SupForall(a, b, c)
            | SubRChain(a, b, c)
            | SubEvalC(a, b, c)
            | SubEvalR(a, b, c)
            | Disjunction(a, b, c) => vec![a, b, c],
        }
    }

    /// Rebuilds an axiom of `kind` from operands in textual order.
    pub fn from_parts(kind: AxiomKind, ops: &[String]) -> Option<Axiom> {
        let o = |i: usize| ops.get(i).cloned();
        let n = ops.len();
        use AxiomKind as K;
        let want = match kind {
            K::Irr => 1,
            K::ClassAssertion
            | K::Eq
            | K::Neq
            | K::SubClass
            | K::NomSubClass
            | K::SupLeqOne
            | K::SubRole
            | K::Dis
            | K::Inv => 2,
            _ => 3,
        };
        if n != want {
            return None;
        }
        Some(match kind {
            K::ClassAssertion => Axiom::ClassAssertion(o(0)?, o(1)?),
            K::RoleAssertion => Axiom::RoleAssertion(o(0)?, o(1)?, o(2)?),
            K::Eq => Axiom::Eq(o(0)?, o(1)?),
            K::Neq => Axiom::Neq(o(0)?, o(1)?),
            K::SubClass => Axiom::SubClass(o(0)?, o(1)?),
            K::NomSubClass => Axiom::NomSubClass(o(0)?, o(1)?),
            K::SubConj => Axiom::SubConj(o(0)?, o(1)?, o(2)?),
            K::SubEx => Axiom::SubEx(o(0)?, o(1)?, o(2)?),
            K::SupEx => Axiom::SupEx(o(0)?, o(1)?, o(2)?),
            K::SupForall => Axiom::SupForall(o(0)?, o(1)?, o(2)?),
            K::SupLeqOne => Axiom::SupLeqOne(o(0)?, o(1)?),
            K::SubRole => Axiom::SubRole(o(0)?, o(1)?),
            K::SubRChain => Axiom::SubRChain(o(0)?, o(1)?, o(2)?),
            K::Dis => Axiom::Dis(o(0)?, o(1)?),
            K::Inv => Axiom::Inv(o(0)?, o(1)?),
            K::Irr => Axiom::Irr(o(0)?),
            K::SubEvalC => Axiom::SubEvalC(o(0)?, o(1)?, o(2)?),
            K::SubEvalR => Axiom::SubEvalR(o(0)?, o(1)?, o(2)?),
            K::Disjunction => Axiom::Disjunction(o(0)?, o(1)?, o(2)?),
        })
    }

    /// Symbols mentioned by the axiom with the category implied by their
    /// position. Eval target contexts are not included.
    pub fn symbols(&self) -> Vec<(&str, Category)> {
        use Axiom::*;
        use Category::*;
        match self {
            ClassAssertion(a, x) => vec![(a, Concept), (x, Individual)],
            RoleAssertion(r, a, b) => vec![(r, Role), (a, Individual), (b, Individual)],
            Eq(a, b) | Neq(a, b) => vec![(a, Individual), (b, Individual)],
            SubClass(a, b) => vec![(a, Concept), (b, Concept)],
            NomSubClass(a, b) => vec![(a, Individual), (b, Concept)],
            SubConj(a, b, c) => vec![(a, Concept), (b, Concept), (c, Concept)],
            SubEx(r, a, b) => vec![(r, Role), (a, Concept), (b, Concept)],
            SupEx(a, r, x) => vec![(a, Concept), (r, Role), (x, Individual)],
            SupForall(a, r, b) => vec![(a, Concept), (r, Role), (b, Concept)],
            SupLeqOne(a, r) => vec![(a, Concept), (r, Role)],
            SubRole(r, s) | Dis(r, s) | Inv(r, s) => vec![(r, Role), (s, Role)],
            SubRChain(r, s, t) => vec![(r, Role), (s, Role), (t, Role)],
            Irr(r) => vec![(r, Role)],
            SubEvalC(a, _, b) => vec![(a, Concept), (b, Concept)],
            SubEvalR(r, _, s) => vec![(r, Role), (s, Role)],
            Disjunction(a, b, c) => vec![(a, Concept), (b, Concept), (c, Concept)],
        }
    }

    pub fn eval_target(&self) -> Option<&str> {
        match self {
            Axiom::SubEvalC(_, c, _) | Axiom::SubEvalR(_, c, _) => Some(c),
            _ => None,
        }
    }

    /// Description-logic rendering, e.g. `S⊑E` or `∃R.A⊑B`.
    pub fn dl(&self) -> String {
        use Axiom::*;
        let c = |s: &str| match s {
            TOP => "⊤".to_string(),
            BOT => "⊥".to_string(),
            _ => s.to_string(),
        };
        match self {
            ClassAssertion(a, x) => format!("{}({x})", c(a)),
            RoleAssertion(r, a, b) => format!("{r}({a},{b})"),
            Eq(a, b) => format!("{a}={b}"),
            Neq(a, b) => format!("{a}≠{b}"),
            SubClass(a, b) => format!("{}⊑{}", c(a), c(b)),
            NomSubClass(a, b) => format!("{{{a}}}⊑{}", c(b)),
            SubConj(a, b, d) => format!("{}⊓{}⊑{}", c(a), c(b), c(d)),
            SubEx(r, a, b) => format!("∃{r}.{}⊑{}", c(a), c(b)),
            SupEx(a, r, x) => format!("{}⊑∃{r}.{{{x}}}", c(a)),
            SupForall(a, r, b) => format!("{}⊑∀{r}.{}", c(a), c(b)),
            SupLeqOne(a, r) => format!("{}⊑≤1{r}.⊤", c(a)),
            SubRole(r, s) => format!("{r}⊑{s}"),
            SubRChain(r, s, t) => format!("{r}∘{s}⊑{t}"),
            Dis(r, s) => format!("Dis({r},{s})"),
            Inv(r, s) => format!("Inv({r},{s})"),
            Irr(r) => format!("Irr({r})"),
            SubEvalC(a, k, b) => format!("eval({},{k})⊑{}", c(a), c(b)),
            SubEvalR(r, k, s) => format!("eval({r},{k})⊑{s}"),
            Disjunction(a, b, d) => format!("{}⊑{}⊔{}", c(a), c(b), c(d)),
        }
    }
}

/// DSL rendering.
impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Axiom::*;
        match self {
            ClassAssertion(a, x) => write!(f, "{a}({x})"),
            RoleAssertion(r, a, b) => write!(f, "{r}({a},{b})"),
            Eq(a, b) => write!(f, "{a} = {b}"),
            Neq(a, b) => write!(f, "{a} != {b}"),
            SubClass(a, b) => write!(f, "{a} subClassOf {b}"),
            NomSubClass(a, b) => write!(f, "{{{a}}} subClassOf {b}"),
            SubConj(a, b, c) => write!(f, "{a} and {b} subClassOf {c}"),
            SubEx(r, a, b) => write!(f, "exists {r}.{a} subClassOf {b}"),
            SupEx(a, r, x) => write!(f, "{a} subClassOf exists {r}.{{{x}}}"),
            SupForall(a, r, b) => write!(f, "{a} subClassOf forall {r}.{b}"),
            SupLeqOne(a, r) => write!(f, "{a} subClassOf atmost1 {r}"),
            SubRole(r, s) => write!(f, "{r} subRoleOf {s}"),
            SubRChain(r, s, t) => write!(f, "{r} o {s} subRoleOf {t}"),
            Dis(r, s) => write!(f, "disjoint({r},{s})"),
            Inv(r, s) => write!(f, "inverse({r},{s})"),
            Irr(r) => write!(f, "irreflexive({r})"),
            SubEvalC(a, c, b) => write!(f, "eval({a},{c}) subClassOf {b}"),
            SubEvalR(r, c, s) => write!(f, "eval({r},{c}) subRoleOf {s}"),
            Disjunction(a, b, c) => write!(f, "{a} subClassOf {b} or {c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefeasibleAxiom {
    pub relation: String,
    pub body: Axiom,
}

impl fmt::Display for DefeasibleAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D[{}]({})", self.relation, self.body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    /// Input edges `(lower, upper)`; the strict order is their transitive closure.
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContextStructure {
    pub contexts: Vec<String>,
    /// Priority order: index 0 is the most important relation.
    pub relations: Vec<Relation>,
}

impl ContextStructure {
    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn context_index(&self, name: &str) -> Option<usize> {
        self.contexts.iter().position(|c| c == name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContextKb {
    pub strict: Vec<Axiom>,
    pub defeasible: Vec<DefeasibleAxiom>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sckr {
    pub structure: ContextStructure,
    pub kbs: BTreeMap<String, ContextKb>,
    pub vocabulary: Vocabulary,
}

impl Sckr {
    pub fn kb(&self, ctx: &str) -> Option<&ContextKb> {
        self.kbs.get(ctx)
    }

    /// All axioms with their context, strict ones first per context, in
    /// context order.
    pub fn strict_axioms(&self) -> impl Iterator<Item = (&str, &Axiom)> {
        self.structure.contexts.iter().flat_map(move |c| {
            self.kbs
                .get(c)
                .into_iter()
                .flat_map(move |kb| kb.strict.iter().map(move |a| (c.as_str(), a)))
        })
    }

    pub fn defeasible_axioms(&self) -> impl Iterator<Item = (&str, &DefeasibleAxiom)> {
        self.structure.contexts.iter().flat_map(move |c| {
            self.kbs
                .get(c)
                .into_iter()
                .flat_map(move |kb| kb.defeasible.iter().map(move |a| (c.as_str(), a)))
        })
    }

    pub fn has_eval(&self) -> bool {
        self.strict_axioms().any(|(_, a)| a.eval_target().is_some())
            || self
                .defeasible_axioms()
                .any(|(_, d)| d.body.eval_target().is_some())
    }

    /// Reorders relations so that `order` comes first, in that order.
    pub fn with_priority(mut self, order: &[String]) -> Result<Sckr, KbError> {
        let mut rels = Vec::new();
        for name in order {
            let idx = self
                .structure
                .relations
                .iter()
                .position(|r| &r.name == name)
                .ok_or_else(|| KbError::BadPriority(name.clone()))?;
            rels.push(self.structure.relations.remove(idx));
        }
        rels.append(&mut self.structure.relations);
        self.structure.relations = rels;
        Ok(self)
    }
}
