//! Ground normal programs and their answer-set semantics.

mod ground;
mod solve;
pub mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use ground::{ground_program, GroundStats, GroundingOptions};
pub use solve::{solve_with_guess, stratification_domain, SolveOptions, SolveStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AspError {
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("rule has a negative body: {0}")]
    NotPositive(String),
    #[error("{what} cap exceeded: {count} > {cap}")]
    CapExceeded {
        what: &'static str,
        count: usize,
        cap: usize,
    },
    #[error("unsafe variable `{var}` in rule {rule}")]
    Unsafe { rule: String, var: String },
    #[error("program is not stratified once the guessed atoms are fixed: {0}")]
    NotStratified(String),
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Func(String, Vec<Term>),
}

impl Term {
    pub fn constant(s: impl Into<String>) -> Term {
        Term::Const(s.into())
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(s) => Some(s),
            Term::Func(..) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) => f.write_str(s),
            Term::Func(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        GroundAtom {
            pred: pred.into(),
            args,
        }
    }

    /// Atom whose arguments are all constants.
    pub fn consts(pred: &str, args: &[&str]) -> Self {
        GroundAtom::new(pred, args.iter().map(|a| Term::constant(*a)).collect())
    }
}

/// Debug rendering: constants unquoted, no spaces.
impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_list(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundRule {
    /// `None` is a constraint.
    pub head: Option<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

pub type Interpretation = BTreeSet<AtomId>;

/// A ground program. The Herbrand base is the set of interned atoms.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    pub rules: Vec<GroundRule>,
}

impl GroundProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }

    pub fn lookup(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn base_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn add_rule(&mut self, rule: GroundRule) {
        self.rules.push(rule);
    }

    /// Parses ground rules in clingo syntax without any simplification.
    pub fn from_text(text: &str) -> Result<GroundProgram, AspError> {
        let prog = syntax::parse_program(text)?;
        let mut gp = GroundProgram::new();
        for r in &prog.rules {
            let mut conv = |a: &syntax::AtomPat| -> Result<AtomId, AspError> {
                let g = a.to_ground().ok_or_else(|| AspError::Unsafe {
                    rule: r.to_string(),
                    var: a.to_string(),
                })?;
                Ok(gp.intern(g))
            };
            let head = r.head.as_ref().map(&mut conv).transpose()?;
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for l in &r.body {
                match l {
                    syntax::Lit::Pos(a) => pos.push(conv(a)?),
                    syntax::Lit::Neg(a) => neg.push(conv(a)?),
                    syntax::Lit::Neq(..) => {
                        return Err(AspError::Syntax {
                            line: 0,
                            col: 0,
                            msg: "comparison in ground program".into(),
                        })
                    }
                }
            }
            gp.add_rule(GroundRule { head, pos, neg });
        }
        Ok(gp)
    }

    pub fn render_rule(&self, r: &GroundRule) -> String {
        let mut s = String::new();
        if let Some(h) = r.head {
            s.push_str(&self.atom(h).to_string());
        }
        if !r.pos.is_empty() || !r.neg.is_empty() || r.head.is_none() {
            s.push_str(" :- ");
            let lits: Vec<String> = r
                .pos
                .iter()
                .map(|&a| self.atom(a).to_string())
                .chain(r.neg.iter().map(|&a| format!("not {}", self.atom(a))))
                .collect();
            s.push_str(&lits.join(", "));
        }
        s.push('.');
        s
    }

    /// One atom per line, sorted.
    pub fn dump(&self, i: &Interpretation) -> String {
        let mut lines: Vec<String> = i.iter().map(|&a| self.atom(a).to_string()).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    pub fn interpretation<'a>(
        &self,
        atoms: impl IntoIterator<Item = &'a GroundAtom>,
    ) -> Option<Interpretation> {
        atoms.into_iter().map(|a| self.lookup(a)).collect()
    }

    fn rule_violated_by(&self, r: &GroundRule, i: &Interpretation) -> bool {
        r.pos.iter().all(|a| i.contains(a)) && !r.neg.iter().any(|a| i.contains(a))
    }
}

/// Counter-based least fixpoint of definite rules. Returns the truth vector
/// and the first constraint whose body holds in it.
pub(crate) fn definite_closure<'a>(
    n_atoms: usize,
    rules: impl Iterator<Item = (Option<AtomId>, &'a [AtomId])> + Clone,
) -> (Vec<bool>, Option<usize>) {
    let mut truth = vec![false; n_atoms];
    let mut missing: Vec<usize> = Vec::new();
    let mut heads: Vec<Option<AtomId>> = Vec::new();
    let mut watch: Vec<Vec<u32>> = vec![Vec::new(); n_atoms];
    let mut queue: Vec<AtomId> = Vec::new();
    for (ri, (head, pos)) in rules.clone().enumerate() {
        let mut distinct: Vec<AtomId> = pos.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        missing.push(distinct.len());
        heads.push(head);
        for a in &distinct {
            watch[a.index()].push(ri as u32);
        }
        if distinct.is_empty() {
            if let Some(h) = head {
                if !truth[h.index()] {
                    truth[h.index()] = true;
                    queue.push(h);
                }
            }
        }
    }
    while let Some(a) = queue.pop() {
        for &ri in &watch[a.index()] {
            let ri = ri as usize;
            missing[ri] -= 1;
            if missing[ri] == 0 {
                if let Some(h) = heads[ri] {
                    if !truth[h.index()] {
                        truth[h.index()] = true;
                        queue.push(h);
                    }
                }
            }
        }
    }
    let violated = heads
        .iter()
        .zip(&missing)
        .position(|(h, m)| h.is_none() && *m == 0);
    (truth, violated)
}

fn to_interpretation(truth: &[bool]) -> Interpretation {
    truth
        .iter()
        .enumerate()
        .filter(|(_, t)| **t)
        .map(|(i, _)| AtomId(i as u32))
        .collect()
}

/// Least model of a program without negation; constraints are checked after
/// the fixpoint.
pub fn least_model(p: &GroundProgram) -> Result<Interpretation, AspError> {
    if let Some(r) = p.rules.iter().find(|r| !r.neg.is_empty()) {
        return Err(AspError::NotPositive(p.render_rule(r)));
    }
    let (truth, violated) = definite_closure(
        p.base_size(),
        p.rules.iter().map(|r| (r.head, r.pos.as_slice())),
    );
    if let Some(ri) = violated {
        return Err(AspError::ConstraintViolation(p.render_rule(&p.rules[ri])));
    }
    Ok(to_interpretation(&truth))
}

/// Gelfond-Lifschitz reduct: drops rules blocked by `i`, strips negation.
pub fn gl_reduct(p: &GroundProgram, i: &Interpretation) -> GroundProgram {
    GroundProgram {
        atoms: p.atoms.clone(),
        index: p.index.clone(),
        rules: p
            .rules
            .iter()
            .filter(|r| !r.neg.iter().any(|a| i.contains(a)))
            .map(|r| GroundRule {
                head: r.head,
                pos: r.pos.clone(),
                neg: Vec::new(),
            })
            .collect(),
    }
}

pub fn is_answer_set(p: &GroundProgram, i: &Interpretation) -> bool {
    if i.iter().any(|a| a.index() >= p.base_size()) {
        return false;
    }
    let reduct = p
        .rules
        .iter()
        .filter(|r| !r.neg.iter().any(|a| i.contains(a)));
    let (truth, _) = definite_closure(p.base_size(), reduct.map(|r| (r.head, r.pos.as_slice())));
    if to_interpretation(&truth) != *i {
        return false;
    }
    !p.rules
        .iter()
        .any(|r| r.head.is_none() && p.rule_violated_by(r, i))
}

pub const DEFAULT_BRUTEFORCE_CAP: usize = 22;

/// Every subset of the Herbrand base that is an answer set. Exhaustive.
pub fn enumerate_answer_sets_bruteforce(
    p: &GroundProgram,
    cap: usize,
) -> Result<Vec<Interpretation>, AspError> {
    let n = p.base_size();
    if n > cap || n > 30 {
        return Err(AspError::CapExceeded {
            what: "Herbrand base",
            count: n,
            cap: cap.min(30),
        });
    }
    let masks: Vec<(Option<u32>, u32, u32)> = p
        .rules
        .iter()
        .map(|r| {
            let m = |v: &[AtomId]| v.iter().fold(0u32, |acc, a| acc | 1 << a.0);
            (r.head.map(|h| h.0), m(&r.pos), m(&r.neg))
        })
        .collect();
    let mut out = Vec::new();
    for cand in 0u32..(1u32 << n) {
        let mut lm = 0u32;
        loop {
            let mut next = lm;
            for &(h, pos, neg) in &masks {
                if neg & cand == 0 && pos & lm == pos {
                    if let Some(h) = h {
                        next |= 1 << h;
                    }
                }
            }
            if next == lm {
                break;
            }
            lm = next;
        }
        if lm != cand {
            continue;
        }
        let violated = masks
            .iter()
            .any(|&(h, pos, neg)| h.is_none() && pos & cand == pos && neg & cand == 0);
        if !violated {
            out.push(
                (0..n)
                    .filter(|i| cand >> i & 1 == 1)
                    .map(|i| AtomId(i as u32))
                    .collect(),
            );
        }
    }
    out.sort();
    Ok(out)
}

pub const DEFAULT_NEGATION_GUESS_CAP: usize = 18;

/// Answer sets by guessing the truth of every atom that occurs under `not`
/// and checking each guess against the least model of the reduct. Uses a
/// plain repeated-pass fixpoint so that it shares no code with the solver.
pub fn enumerate_answer_sets_by_negation_guess(
    p: &GroundProgram,
    cap: usize,
) -> Result<Vec<Interpretation>, AspError> {
    let mut neg_atoms: Vec<AtomId> = p.rules.iter().flat_map(|r| r.neg.iter().copied()).collect();
    neg_atoms.sort_unstable();
    neg_atoms.dedup();
    let k = neg_atoms.len();
    if k > cap || k > 30 {
        return Err(AspError::CapExceeded {
            what: "negated atoms",
            count: k,
            cap: cap.min(30),
        });
    }
    let slot: HashMap<AtomId, usize> = neg_atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let n = p.base_size();
    let mut out = Vec::new();
    for guess in 0u32..(1u32 << k) {
        let holds = |a: &AtomId| guess >> slot[a] & 1 == 1;
        let active: Vec<&GroundRule> = p
            .rules
            .iter()
            .filter(|r| !r.neg.iter().any(holds))
            .collect();
        let mut truth = vec![false; n];
        loop {
            let mut changed = false;
            for r in &active {
                if let Some(h) = r.head {
                    if !truth[h.index()] && r.pos.iter().all(|a| truth[a.index()]) {
                        truth[h.index()] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if neg_atoms.iter().any(|a| truth[a.index()] != holds(a)) {
            continue;
        }
        let violated = active
            .iter()
            .any(|r| r.head.is_none() && r.pos.iter().all(|a| truth[a.index()]));
        if !violated {
            out.push(to_interpretation(&truth));
        }
    }
    out.sort();
    Ok(out)
}
