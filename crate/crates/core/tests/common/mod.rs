//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ckr_core::asp::{AtomId, GroundProgram, Interpretation};
use ckr_core::kb::{compute_closures, parse_sckr, Axiom, Sckr, BOT, TOP};
use ckr_core::translator::{individuals, solve_ckr, CkrOptions, CkrSolution, JustifiedModel};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Sckr {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_sckr(&text).unwrap()
}

pub fn solve(k: &Sckr) -> CkrSolution {
    solve_ckr(k, &CkrOptions::default()).unwrap()
}

/// Two symmetric defaults with incomparable overrides: two preferred
/// models.
pub const TWO_PREFERRED: &str = "\
relation c.
context top_ctx.
context left.
context right.
context leaf.
left < top_ctx [c].
right < top_ctx [c].
leaf < left [c].
leaf < right [c].
top_ctx: B and C subClassOf bot.
left: D[c](A subClassOf B).
right: D[c](A subClassOf C).
leaf: A(x).
";

/// Every fixture used by the model-level checks.
pub fn all_fixtures() -> Vec<(&'static str, Sckr)> {
    vec![
        ("korg", fixture("korg.ckr")),
        ("korg1", fixture("korg1.ckr")),
        ("two_preferred", parse_sckr(TWO_PREFERRED).unwrap()),
    ]
}

// Random sCKRs.

const CONCEPTS: &[&str] = &["A", "B", "C"];
const ROLES: &[&str] = &["R", "S"];

pub struct Shape {
    pub contexts: usize,
    pub relations: usize,
    pub individuals: usize,
    pub defeasible: usize,
    pub eval: bool,
    /// Only conflicting class defaults, always with the disjointness.
    pub conflict: bool,
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn concept_or_bot<R: Rng>(rng: &mut R) -> &'static str {
    if rng.gen_bool(0.25) {
        BOT
    } else {
        pick(rng, CONCEPTS)
    }
}

fn strict_axiom<R: Rng>(rng: &mut R, inds: &[&str], ctxs: &[String], eval: bool) -> String {
    let a = pick(rng, CONCEPTS);
    let b = pick(rng, CONCEPTS);
    let r = pick(rng, ROLES);
    let s = pick(rng, ROLES);
    let x = pick(rng, inds);
    let y = pick(rng, inds);
    match rng.gen_range(0..if eval { 11 } else { 10 }) {
        0 | 1 => format!("{a}({x})"),
        2 => format!("{r}({x},{y})"),
        3 => format!("{a} subClassOf {b}"),
        4 => format!("{a} and {b} subClassOf {}", concept_or_bot(rng)),
        5 => format!("exists {r}.{a} subClassOf {b}"),
        6 => format!("{a} subClassOf forall {r}.{b}"),
        7 => format!("{r} subRoleOf {s}"),
        8 => format!("{{{x}}} subClassOf {a}"),
        9 => format!("{a} subClassOf exists {r}.{{{x}}}"),
        _ => format!("eval({a},{}) subClassOf {b}", ctxs.choose(rng).unwrap()),
    }
}

fn defeasible_body<R: Rng>(rng: &mut R, inds: &[&str]) -> String {
    let a = pick(rng, CONCEPTS);
    let b = pick(rng, CONCEPTS);
    let c = concept_or_bot(rng);
    let r = pick(rng, ROLES);
    let s = pick(rng, ROLES);
    let x = pick(rng, inds);
    match rng.gen_range(0..16) {
        0..=6 => format!("A subClassOf {}", pick(rng, &["B", "C"])),
        7 => format!("{a} and {b} subClassOf {c}"),
        8 => format!("exists {r}.{a} subClassOf {b}"),
        9 => format!("{a} subClassOf forall {r}.{b}"),
        10 => format!("{a} subClassOf atmost1 {r}"),
        11 => format!("{r} subRoleOf {s}"),
        12 => format!("{a} subClassOf exists {r}.{{{x}}}"),
        13 => format!("disjoint({r},{s})"),
        14 => format!("inverse({r},{s})"),
        _ => format!("irreflexive({r})"),
    }
}

/// A random sCKR in the DSL. Edges only point from higher to lower
/// indices, so every relation is acyclic.
pub fn random_kb_text<R: Rng>(rng: &mut R, shape: &Shape) -> String {
    let mut out = String::new();
    let rels: Vec<String> = (0..shape.relations).map(|i| format!("r{i}")).collect();
    let ctxs: Vec<String> = (0..shape.contexts).map(|i| format!("k{i}")).collect();
    let inds: Vec<&str> = ["a", "b", "d"][..shape.individuals].to_vec();
    for r in &rels {
        out.push_str(&format!("relation {r}.\n"));
    }
    for c in &ctxs {
        out.push_str(&format!("context {c}.\n"));
    }
    for r in &rels {
        for hi in 0..ctxs.len() {
            for lo in hi + 1..ctxs.len() {
                if rng.gen_bool(0.6) {
                    out.push_str(&format!("{} < {} [{r}].\n", ctxs[lo], ctxs[hi]));
                }
            }
        }
    }
    if shape.conflict || rng.gen_bool(0.7) {
        out.push_str(&format!("{}: B and C subClassOf bot.\n", ctxs[0]));
    }
    for c in &ctxs {
        for _ in 0..rng.gen_range(0..if shape.conflict { 1 } else { 3 }) {
            out.push_str(&format!(
                "{c}: {}.\n",
                strict_axiom(rng, &inds, &ctxs, shape.eval)
            ));
        }
    }
    for _ in 0..shape.defeasible {
        let c = &ctxs[rng.gen_range(0..ctxs.len() - 1)];
        let r = rels.choose(rng).unwrap();
        let body = if shape.conflict {
            format!("A subClassOf {}", pick(rng, &["B", "C"]))
        } else {
            defeasible_body(rng, &inds)
        };
        out.push_str(&format!("{c}: D[{r}]({body}).\n"));
    }
    // Instances low in the hierarchy so that defaults have something to act on.
    let leaf = ctxs.last().unwrap();
    for x in &inds {
        let a = if rng.gen_bool(0.7) {
            "A"
        } else {
            pick(rng, CONCEPTS)
        };
        out.push_str(&format!("{leaf}: {a}({x}).\n"));
    }
    out
}

pub fn random_shape<R: Rng>(rng: &mut R, eval: bool) -> Shape {
    Shape {
        contexts: rng.gen_range(2..=4),
        relations: rng.gen_range(1..=2),
        individuals: rng.gen_range(1..=3),
        defeasible: rng.gen_range(1..=4),
        eval,
        conflict: rng.gen_bool(0.5),
    }
}

// Answer-set oracle: alternating fixpoint for the well-founded bounds, then
// every guess on the undetermined negated atoms, checked against the least
// model of the reduct.

/// Least model of the reduct by `assumed`, with rule watch lists built
/// once per program.
struct Gamma<'a> {
    p: &'a GroundProgram,
    watch: Vec<Vec<usize>>,
}

impl<'a> Gamma<'a> {
    fn new(p: &'a GroundProgram) -> Self {
        let mut watch = vec![Vec::new(); p.atoms().len()];
        for (i, r) in p.rules.iter().enumerate() {
            for a in &r.pos {
                watch[a.index()].push(i);
            }
        }
        Gamma { p, watch }
    }

    fn run(&self, assumed: &dyn Fn(AtomId) -> bool) -> Vec<bool> {
        let rules = &self.p.rules;
        let mut truth = vec![false; self.watch.len()];
        let mut missing: Vec<usize> = rules.iter().map(|r| r.pos.len()).collect();
        let blocked: Vec<bool> = rules
            .iter()
            .map(|r| r.neg.iter().any(|a| assumed(*a)))
            .collect();
        let mut queue = Vec::new();
        for (i, r) in rules.iter().enumerate() {
            if let (Some(h), 0, false) = (r.head, missing[i], blocked[i]) {
                if !truth[h.index()] {
                    truth[h.index()] = true;
                    queue.push(h);
                }
            }
        }
        while let Some(a) = queue.pop() {
            for &i in &self.watch[a.index()] {
                missing[i] -= 1;
                if let (Some(h), 0, false) = (rules[i].head, missing[i], blocked[i]) {
                    if !truth[h.index()] {
                        truth[h.index()] = true;
                        queue.push(h);
                    }
                }
            }
        }
        truth
    }
}

/// Well-founded true and possibly-true atoms.
pub fn well_founded(p: &GroundProgram) -> (Vec<bool>, Vec<bool>) {
    let g = Gamma::new(p);
    let mut lower = vec![false; p.atoms().len()];
    loop {
        let upper = g.run(&|a| lower[a.index()]);
        let next = g.run(&|a| upper[a.index()]);
        if next == lower {
            return (lower, upper);
        }
        lower = next;
    }
}

pub enum Oracle {
    AnswerSets(BTreeSet<Interpretation>),
    TooLarge(usize),
}

pub fn oracle_answer_sets(p: &GroundProgram, cap: usize) -> Oracle {
    let g = Gamma::new(p);
    let (lower, upper) = well_founded(p);
    let mut negs: Vec<AtomId> = p.rules.iter().flat_map(|r| r.neg.iter().copied()).collect();
    negs.sort_unstable();
    negs.dedup();
    let open: Vec<AtomId> = negs
        .iter()
        .copied()
        .filter(|a| upper[a.index()] && !lower[a.index()])
        .collect();
    if open.len() > cap {
        return Oracle::TooLarge(open.len());
    }
    let slot: BTreeMap<AtomId, usize> = open.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut out = BTreeSet::new();
    for guess in 0u64..(1u64 << open.len()) {
        let assumed = |a: AtomId| match slot.get(&a) {
            Some(i) => guess >> i & 1 == 1,
            None => lower[a.index()],
        };
        let m = g.run(&assumed);
        if negs.iter().any(|a| m[a.index()] != assumed(*a)) {
            continue;
        }
        let violated = p.rules.iter().any(|r| {
            r.head.is_none()
                && r.pos.iter().all(|a| m[a.index()])
                && !r.neg.iter().any(|a| m[a.index()])
        });
        if !violated {
            out.insert(
                m.iter()
                    .enumerate()
                    .filter(|(_, t)| **t)
                    .map(|(i, _)| AtomId(i as u32))
                    .collect(),
            );
        }
    }
    Oracle::AnswerSets(out)
}

// Direct semantic check of the CAS-model conditions on the Herbrand
// interpretation read off a justified model.

pub struct Interp<'a> {
    pub model: &'a JustifiedModel,
    pub domain: Vec<String>,
}

impl<'a> Interp<'a> {
    fn concept(&self, c: &str, a: &str, x: &str) -> bool {
        match a {
            TOP => true,
            BOT => false,
            _ => self
                .model
                .holds(c, &Axiom::ClassAssertion(a.into(), x.into())),
        }
    }

    fn role(&self, c: &str, r: &str, x: &str, y: &str) -> bool {
        self.model
            .holds(c, &Axiom::RoleAssertion(r.into(), x.into(), y.into()))
    }

    /// φ_α(d) in context `c`.
    pub fn phi(&self, c: &str, a: &Axiom, d: &[String]) -> bool {
        use Axiom::*;
        let dom = &self.domain;
        match (a, d) {
            (ClassAssertion(a, x), []) => self.concept(c, a, x),
            (RoleAssertion(r, x, y), []) => self.role(c, r, x, y),
            (Neq(x, y), []) => x != y,
            (Eq(x, y), []) => x == y,
            (NomSubClass(x, b), []) => self.concept(c, b, x),
            (SubClass(a, b), [x]) => !self.concept(c, a, x) || self.concept(c, b, x),
            (SubConj(a, b, z), [x]) => {
                !(self.concept(c, a, x) && self.concept(c, b, x)) || self.concept(c, z, x)
            }
            (SubEx(r, a, b), [x]) => {
                !dom.iter()
                    .any(|y| self.role(c, r, x, y) && self.concept(c, a, y))
                    || self.concept(c, b, x)
            }
            (SupEx(a, r, i), [x]) => !self.concept(c, a, x) || self.role(c, r, x, i),
            (SupForall(a, r, b), [x, y]) => {
                !(self.concept(c, a, x) && self.role(c, r, x, y)) || self.concept(c, b, y)
            }
            (SupLeqOne(a, r), [x, y, z]) => {
                !(self.concept(c, a, x) && self.role(c, r, x, y) && self.role(c, r, x, z)) || y == z
            }
            (SubRole(r, s), [x, y]) => !self.role(c, r, x, y) || self.role(c, s, x, y),
            (SubRChain(r, s, t), [x, y, z]) => {
                !(self.role(c, r, x, y) && self.role(c, s, y, z)) || self.role(c, t, x, z)
            }
            (Dis(r, s), [x, y]) => !(self.role(c, r, x, y) && self.role(c, s, x, y)),
            (Inv(r, s), [x, y]) => self.role(c, r, x, y) == self.role(c, s, y, x),
            (Irr(r), [x]) => !self.role(c, r, x, x),
            (SubEvalC(a, k, b), [x]) => !self.concept(k, a, x) || self.concept(c, b, x),
            (SubEvalR(r, k, s), [x, y]) => !self.role(k, r, x, y) || self.role(c, s, x, y),
            (Disjunction(a, b, z), [x]) => {
                !self.concept(c, a, x) || self.concept(c, b, x) || self.concept(c, z, x)
            }
            _ => panic!("instance arity mismatch for {a}"),
        }
    }

    pub fn instances(&self, a: &Axiom) -> Vec<Vec<String>> {
        use Axiom::*;
        let n = match a {
            ClassAssertion(..) | RoleAssertion(..) | Eq(..) | Neq(..) | NomSubClass(..) => 0,
            SubClass(..) | SubConj(..) | SubEx(..) | SupEx(..) | Irr(..) | SubEvalC(..)
            | Disjunction(..) => 1,
            SupForall(..) | SubRole(..) | Dis(..) | Inv(..) | SubEvalR(..) => 2,
            SupLeqOne(..) | SubRChain(..) => 3,
        };
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| {
                    self.domain.iter().map(move |x| {
                        let mut t = t.clone();
                        t.push(x.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn satisfies(&self, c: &str, a: &Axiom) -> bool {
        self.instances(a).iter().all(|d| self.phi(c, a, d))
    }
}

/// Violations of conditions (i) to (iii); empty for a CAS model.
pub fn cas_violations(k: &Sckr, m: &JustifiedModel) -> Vec<String> {
    let cl = compute_closures(&k.structure).unwrap();
    let it = Interp {
        model: m,
        domain: individuals(k),
    };
    let ctxs = &k.structure.contexts;
    let mut out = Vec::new();
    for (c, a) in k.strict_axioms() {
        for c1 in ctxs.iter().filter(|c1| cl.is_preceq_star(c1, c)) {
            if !it.satisfies(c1, a) {
                out.push(format!("(i) {a} from {c} fails at {c1}"));
            }
        }
    }
    for (c, d) in k.defeasible_axioms() {
        let r = &d.relation;
        for c1 in ctxs.iter().filter(|c1| cl.is_preceq_except(r, c1, c)) {
            if !it.satisfies(c1, &d.body) {
                out.push(format!("(ii) {d} from {c} fails at {c1}"));
            }
            for c2 in ctxs.iter().filter(|c2| cl.is_prec(r, c2, c1)) {
                let chi = m.clashes.get(r, c2);
                for e in it.instances(&d.body) {
                    let clashing = chi.iter().any(|ca| ca.axiom == d.body && ca.instance == e);
                    if !clashing && !it.phi(c2, &d.body, &e) {
                        out.push(format!("(iii) {d} from {c} fails at {c2} on {e:?}"));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

// Random clash sets over a random context structure.

use ckr_core::kb::OrderClosures;
use ckr_core::preferences::{ClashSet, ClashingAssumption};

pub struct ClashPool {
    pub closures: OrderClosures,
    pub relation: String,
    pub context: String,
    pub pool: Vec<ClashingAssumption>,
}

/// A structure with `n` contexts and two relations, and every assumption
/// `⟨S⊑X,i⟩` that can clash at some context for the first relation.
pub fn random_clash_pool<R: Rng>(rng: &mut R, n: usize) -> Option<ClashPool> {
    let mut text = String::from("relation r0.\nrelation r1.\n");
    for i in 0..n {
        text.push_str(&format!("context k{i}.\n"));
    }
    for r in ["r0", "r1"] {
        for hi in 0..n {
            for lo in hi + 1..n {
                if rng.gen_bool(0.5) {
                    text.push_str(&format!("k{lo} < k{hi} [{r}].\n"));
                }
            }
        }
    }
    let k = parse_sckr(&text).unwrap();
    let cl = compute_closures(&k.structure).unwrap();
    let c = rng.gen_range(0..n);
    let mut pool = Vec::new();
    for declared in 0..n {
        if cl.witnesses(0, declared, c).is_empty() {
            continue;
        }
        for x in ["E", "M", "R"] {
            pool.push(ClashingAssumption {
                axiom: Axiom::SubClass("S".into(), x.into()),
                instance: vec!["i".into()],
                declared_at: format!("k{declared}"),
                relation: "r0".into(),
            });
        }
    }
    if pool.is_empty() {
        return None;
    }
    Some(ClashPool {
        closures: cl,
        relation: "r0".into(),
        context: format!("k{c}"),
        pool,
    })
}

pub fn random_subset<R: Rng>(rng: &mut R, pool: &[ClashingAssumption]) -> ClashSet {
    pool.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect()
}
