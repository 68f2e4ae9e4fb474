//! Measures over the CKR program: μ_opt over the powerset of possible
//! clashing assumptions, the preferred-model semiring R_one, the per-context
//! semirings R_c and their crossproduct.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::asp::{GroundAtom, GroundProgram, Term};
use crate::kb::{compute_closures, OrderClosures, Sckr, TOP};
use crate::preferences::{ClashMultiset, ClashingAssumption, Preferences};
use crate::translator::{decode_ovr, ovr_domain, relation_constant, CkrError};

use super::{Formula, MeasureError, Powerset, Product, Semiring};

/// The default variable order: atoms sorted by their dump string.
pub fn atom_order(p: &GroundProgram) -> Vec<GroundAtom> {
    let mut v: Vec<(String, GroundAtom)> = p
        .atoms()
        .iter()
        .map(|a| (a.to_string(), a.clone()))
        .collect();
    v.sort();
    v.into_iter().map(|(_, a)| a).collect()
}

/// The possible clashing assumptions: each ground `ovr` atom with its
/// target context and decoded assumption.
pub fn pclash(
    k: &Sckr,
    p: &GroundProgram,
) -> Result<Vec<(GroundAtom, String, ClashingAssumption)>, CkrError> {
    let relations: BTreeMap<String, String> = k
        .structure
        .relations
        .iter()
        .map(|r| (relation_constant(&r.name).to_string(), r.name.clone()))
        .collect();
    ovr_domain(p)
        .into_iter()
        .map(|id| {
            let a = p.atom(id).clone();
            let (target, ca) = decode_ovr(&a, &relations)?;
            Ok((a, target, ca))
        })
        .collect()
}

/// `A(x)` or `R(x,y)` for a `main` assertion atom of context `c`.
pub fn view_atom(a: &GroundAtom, c: &str) -> Option<String> {
    let main = Term::constant("main");
    let ctx = Term::constant(c);
    match (a.pred.as_str(), a.args.as_slice()) {
        ("instd", [x, z, cc, t]) if *cc == ctx && *t == main && z.as_const() != Some(TOP) => {
            Some(format!("{z}({x})"))
        }
        ("tripled", [x, r, y, cc, t]) if *cc == ctx && *t == main => Some(format!("{r}({x},{y})")),
        _ => None,
    }
}

/// `⟨φ, e, c, i⟩`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CaTuple {
    pub target: String,
    pub assumption: ClashingAssumption,
}

impl fmt::Display for CaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.assumption;
        write!(
            f,
            "⟨{},{},{},{}⟩",
            a.axiom.dl(),
            a.instance.join(","),
            self.target,
            a.relation
        )
    }
}

/// μ_opt: the powerset semiring over all possible clashing assumptions and
/// the formula collecting the true ones.
pub fn build_mu_opt(
    k: &Sckr,
    p: &GroundProgram,
) -> Result<(Powerset<CaTuple>, Formula<BTreeSet<CaTuple>>), CkrError> {
    let items = pclash(k, p)?;
    let tuple = |t: &String, ca: &ClashingAssumption| CaTuple {
        target: t.clone(),
        assumption: ca.clone(),
    };
    let universe: BTreeSet<CaTuple> = items.iter().map(|(_, t, ca)| tuple(t, ca)).collect();
    let f = Formula::sum(
        items
            .iter()
            .map(|(a, t, ca)| {
                Formula::prod(vec![
                    Formula::Lit(a.clone()),
                    Formula::Const(BTreeSet::from([tuple(t, ca)])),
                ])
            })
            .collect(),
    );
    Ok((Powerset { universe }, f))
}

fn single_relation_eval_free(k: &Sckr) -> Result<String, CkrError> {
    if k.structure.relations.len() != 1 || k.has_eval() {
        return Err(CkrError::Measure(MeasureError::Unsupported(
            "this semiring needs a single relation and no eval axioms".into(),
        )));
    }
    Ok(k.structure.relations[0].name.clone())
}

fn ms_add(a: &ClashMultiset, b: &ClashMultiset) -> ClashMultiset {
    let mut out = a.clone();
    for (k, n) in b {
        *out.entry(k.clone()).or_insert(0) += n;
    }
    out
}

fn chi_add(
    a: &BTreeMap<String, ClashMultiset>,
    b: &BTreeMap<String, ClashMultiset>,
) -> BTreeMap<String, ClashMultiset> {
    let mut out = a.clone();
    for (c, m) in b {
        let merged = ms_add(out.get(c).unwrap_or(&ClashMultiset::new()), m);
        out.insert(c.clone(), merged);
    }
    out
}

fn render_ms(m: &ClashMultiset) -> String {
    let items: Vec<String> = m
        .iter()
        .flat_map(|(a, n)| std::iter::repeat_n(a.to_string(), *n))
        .collect();
    format!("{{{{{}}}}}", items.join(", "))
}

/// Context data shared by the clash-map semirings.
#[derive(Clone, Debug)]
struct Hierarchy {
    closures: OrderClosures,
    relation: String,
    order: Vec<GroundAtom>,
    rank: HashMap<GroundAtom, usize>,
}

impl Hierarchy {
    fn new(k: &Sckr, p: &GroundProgram, relation: String) -> Result<Self, CkrError> {
        let closures = compute_closures(&k.structure)?;
        let order = atom_order(p);
        let rank = order
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Ok(Hierarchy {
            closures,
            relation,
            order,
            rank,
        })
    }

    fn lp(&self, c: &str, x: &ClashMultiset, y: &ClashMultiset) -> bool {
        Preferences::new(&self.closures)
            .local_gt_multiset(&self.relation, c, x, y)
            .unwrap_or(false)
    }

    fn strict(&self, c: &str, x: &ClashMultiset, y: &ClashMultiset) -> bool {
        self.lp(c, x, y) && !self.lp(c, y, x)
    }

    /// Strict pareto preference of clash maps over all contexts.
    fn map_gt(
        &self,
        a: &BTreeMap<String, ClashMultiset>,
        b: &BTreeMap<String, ClashMultiset>,
    ) -> bool {
        let empty = ClashMultiset::new();
        let ctxs: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
        let mut strict = false;
        for c in ctxs {
            let (x, y) = (a.get(c).unwrap_or(&empty), b.get(c).unwrap_or(&empty));
            if !self.lp(c, x, y) {
                return false;
            }
            strict |= !self.lp(c, y, x);
        }
        strict
    }

    /// Atoms as ground atoms, or as assertions when a context is given.
    fn render_atoms<'a>(
        &self,
        ranks: impl Iterator<Item = (&'a usize, usize)>,
        ctx: Option<&str>,
    ) -> String {
        let items: Vec<String> = ranks
            .flat_map(|(r, n)| {
                let a = &self.order[*r];
                let s = ctx
                    .and_then(|c| view_atom(a, c))
                    .unwrap_or_else(|| a.to_string());
                std::iter::repeat_n(s, n)
            })
            .collect();
        if items.is_empty() {
            "∅".to_string()
        } else {
            format!("{{{}}}", items.join(", "))
        }
    }
}

/// Carrier of R_one: zero, one, or an atom multiset with a clash multiset
/// map. Atoms are stored by their rank in the variable order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PrefValue {
    Zero,
    One,
    Pair {
        atoms: BTreeMap<usize, usize>,
        chi: BTreeMap<String, ClashMultiset>,
    },
}

/// Lexicographic order on multiplicity vectors in the variable order: at
/// the first differing atom, the smaller multiplicity is smaller.
fn lex_multiplicity(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> Ordering {
    let ranks: BTreeSet<&usize> = a.keys().chain(b.keys()).collect();
    for r in ranks {
        let (x, y) = (
            a.get(r).copied().unwrap_or(0),
            b.get(r).copied().unwrap_or(0),
        );
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

/// R_one for a single-relational, eval-free sCKR.
#[derive(Clone, Debug)]
pub struct ROne {
    h: Hierarchy,
}

impl ROne {
    pub fn new(k: &Sckr, p: &GroundProgram) -> Result<Self, CkrError> {
        let rel = single_relation_eval_free(k)?;
        Ok(ROne {
            h: Hierarchy::new(k, p, rel)?,
        })
    }

    pub fn atom_value(&self, a: &GroundAtom) -> PrefValue {
        PrefValue::Pair {
            atoms: BTreeMap::from([(self.h.rank[a], 1)]),
            chi: BTreeMap::new(),
        }
    }

    pub fn clash_value(&self, target: &str, ca: &ClashingAssumption) -> PrefValue {
        let chi = BTreeMap::from([(target.to_string(), ClashMultiset::from([(ca.clone(), 1)]))]);
        PrefValue::Pair {
            atoms: BTreeMap::new(),
            chi,
        }
    }

    /// The answer set and clash multisets of a pair value.
    pub fn decode(
        &self,
        v: &PrefValue,
    ) -> Option<(Vec<GroundAtom>, BTreeMap<String, ClashMultiset>)> {
        match v {
            PrefValue::Pair { atoms, chi } => Some((
                atoms
                    .iter()
                    .flat_map(|(r, n)| std::iter::repeat_n(self.h.order[*r].clone(), *n))
                    .collect(),
                chi.clone(),
            )),
            _ => None,
        }
    }

    /// Strict preference between pair values.
    pub fn gt(&self, a: &PrefValue, b: &PrefValue) -> bool {
        match (a, b) {
            (PrefValue::Pair { chi: x, .. }, PrefValue::Pair { chi: y, .. }) => self.h.map_gt(x, y),
            _ => false,
        }
    }

    fn lex(a: &PrefValue, b: &PrefValue) -> Ordering {
        match (a, b) {
            (PrefValue::Pair { atoms: s1, chi: c1 }, PrefValue::Pair { atoms: s2, chi: c2 }) => {
                lex_multiplicity(s1, s2).then_with(|| c1.cmp(c2))
            }
            _ => a.cmp(b),
        }
    }

    pub fn formula(&self, k: &Sckr, p: &GroundProgram) -> Result<Formula<PrefValue>, CkrError> {
        let mut items: Vec<Formula<PrefValue>> = self
            .h
            .order
            .iter()
            .map(|a| Formula::guarded(a.clone(), self.atom_value(a)))
            .collect();
        for (a, t, ca) in pclash(k, p)? {
            items.push(Formula::guarded(a, self.clash_value(&t, &ca)));
        }
        Ok(Formula::prod(items))
    }
}

impl Semiring for ROne {
    type V = PrefValue;
    fn name(&self) -> &'static str {
        "r_one"
    }
    fn zero(&self) -> PrefValue {
        PrefValue::Zero
    }
    fn one(&self) -> PrefValue {
        PrefValue::One
    }
    fn add(&self, a: &PrefValue, b: &PrefValue) -> PrefValue {
        match (a, b) {
            (PrefValue::Zero, x) | (x, PrefValue::Zero) => x.clone(),
            (PrefValue::One, _) | (_, PrefValue::One) => PrefValue::One,
            _ if self.gt(a, b) => a.clone(),
            _ if self.gt(b, a) => b.clone(),
            _ => {
                if ROne::lex(a, b) == Ordering::Greater {
                    b.clone()
                } else {
                    a.clone()
                }
            }
        }
    }
    fn mul(&self, a: &PrefValue, b: &PrefValue) -> PrefValue {
        match (a, b) {
            (PrefValue::Zero, _) | (_, PrefValue::Zero) => PrefValue::Zero,
            (PrefValue::One, x) | (x, PrefValue::One) => x.clone(),
            (PrefValue::Pair { atoms: s1, chi: c1 }, PrefValue::Pair { atoms: s2, chi: c2 }) => {
                let mut atoms = s1.clone();
                for (r, n) in s2 {
                    *atoms.entry(*r).or_insert(0) += n;
                }
                PrefValue::Pair {
                    atoms,
                    chi: chi_add(c1, c2),
                }
            }
        }
    }
    fn render(&self, v: &PrefValue) -> String {
        match v {
            PrefValue::Zero => "0".into(),
            PrefValue::One => "1".into(),
            PrefValue::Pair { atoms, chi } => {
                let maps: Vec<String> = chi
                    .iter()
                    .map(|(c, m)| format!("{c} ↦ {}", render_ms(m)))
                    .collect();
                format!(
                    "({}, {{{}}})",
                    self.h
                        .render_atoms(atoms.iter().map(|(r, n)| (r, *n)), None),
                    maps.join(", ")
                )
            }
        }
    }
}

/// R_one with sets in place of multisets. Not distributive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetPrefValue {
    Zero,
    One,
    Pair {
        atoms: BTreeSet<usize>,
        chi: BTreeMap<String, BTreeSet<ClashingAssumption>>,
    },
}

#[derive(Clone, Debug)]
pub struct SetROne {
    h: Hierarchy,
}

fn as_ms(s: &BTreeSet<ClashingAssumption>) -> ClashMultiset {
    s.iter().map(|a| (a.clone(), 1)).collect()
}

impl SetROne {
    pub fn new(k: &Sckr, p: &GroundProgram) -> Result<Self, CkrError> {
        let rel = single_relation_eval_free(k)?;
        Ok(SetROne {
            h: Hierarchy::new(k, p, rel)?,
        })
    }

    pub fn atom_value(&self, a: &GroundAtom) -> SetPrefValue {
        SetPrefValue::Pair {
            atoms: BTreeSet::from([self.h.rank[a]]),
            chi: BTreeMap::new(),
        }
    }

    pub fn clash_value(&self, target: &str, ca: &ClashingAssumption) -> SetPrefValue {
        SetPrefValue::Pair {
            atoms: BTreeSet::new(),
            chi: BTreeMap::from([(target.to_string(), BTreeSet::from([ca.clone()]))]),
        }
    }

    fn gt(&self, a: &SetPrefValue, b: &SetPrefValue) -> bool {
        match (a, b) {
            (SetPrefValue::Pair { chi: x, .. }, SetPrefValue::Pair { chi: y, .. }) => {
                let conv = |m: &BTreeMap<String, BTreeSet<ClashingAssumption>>| -> BTreeMap<String, ClashMultiset> {
                    m.iter().map(|(c, s)| (c.clone(), as_ms(s))).collect()
                };
                self.h.map_gt(&conv(x), &conv(y))
            }
            _ => false,
        }
    }
}

impl Semiring for SetROne {
    type V = SetPrefValue;
    fn name(&self) -> &'static str {
        "r_one_sets"
    }
    fn zero(&self) -> SetPrefValue {
        SetPrefValue::Zero
    }
    fn one(&self) -> SetPrefValue {
        SetPrefValue::One
    }
    fn add(&self, a: &SetPrefValue, b: &SetPrefValue) -> SetPrefValue {
        match (a, b) {
            (SetPrefValue::Zero, x) | (x, SetPrefValue::Zero) => x.clone(),
            (SetPrefValue::One, _) | (_, SetPrefValue::One) => SetPrefValue::One,
            _ if self.gt(a, b) => a.clone(),
            _ if self.gt(b, a) => b.clone(),
            (
                SetPrefValue::Pair { atoms: s1, chi: c1 },
                SetPrefValue::Pair { atoms: s2, chi: c2 },
            ) => {
                let first = s1.symmetric_difference(s2).next();
                let a_smaller = match first {
                    Some(r) => !s1.contains(r),
                    None => c1 <= c2,
                };
                if a_smaller {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        }
    }
    fn mul(&self, a: &SetPrefValue, b: &SetPrefValue) -> SetPrefValue {
        match (a, b) {
            (SetPrefValue::Zero, _) | (_, SetPrefValue::Zero) => SetPrefValue::Zero,
            (SetPrefValue::One, x) | (x, SetPrefValue::One) => x.clone(),
            (
                SetPrefValue::Pair { atoms: s1, chi: c1 },
                SetPrefValue::Pair { atoms: s2, chi: c2 },
            ) => {
                let mut chi = c1.clone();
                for (c, s) in c2 {
                    chi.entry(c.clone()).or_default().extend(s.iter().cloned());
                }
                SetPrefValue::Pair {
                    atoms: s1.union(s2).copied().collect(),
                    chi,
                }
            }
        }
    }
    fn render(&self, v: &SetPrefValue) -> String {
        match v {
            SetPrefValue::Zero => "0".into(),
            SetPrefValue::One => "1".into(),
            SetPrefValue::Pair { atoms, chi } => {
                let maps: Vec<String> = chi
                    .iter()
                    .map(|(c, s)| format!("{c} ↦ {}", render_ms(&as_ms(s))))
                    .collect();
                format!(
                    "({}, {{{}}})",
                    self.h.render_atoms(atoms.iter().map(|r| (r, 1)), None),
                    maps.join(", ")
                )
            }
        }
    }
}

/// One element of an R_c value: atoms of the context and the clash
/// multiset at it.
pub type PairSet = (BTreeSet<usize>, ClashMultiset);

/// Carrier of R_c: sets with no element strictly dominated at `c`.
pub type OptSet = BTreeSet<PairSet>;

/// R_c: collects the locally optimal interpretations of one context.
#[derive(Clone, Debug)]
pub struct RContext {
    h: Hierarchy,
    pub context: String,
}

impl RContext {
    pub fn new(k: &Sckr, p: &GroundProgram, context: &str) -> Result<Self, CkrError> {
        let rel = single_relation_eval_free(k)?;
        Ok(RContext {
            h: Hierarchy::new(k, p, rel)?,
            context: context.to_string(),
        })
    }

    pub fn opt(&self, a: OptSet) -> OptSet {
        let dominated: Vec<bool> = a
            .iter()
            .map(|(_, x)| a.iter().any(|(_, y)| self.h.strict(&self.context, y, x)))
            .collect();
        a.into_iter()
            .zip(dominated)
            .filter(|(_, d)| !d)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn atom_value(&self, a: &GroundAtom) -> OptSet {
        BTreeSet::from([(BTreeSet::from([self.h.rank[a]]), ClashMultiset::new())])
    }

    pub fn clash_value(&self, ca: &ClashingAssumption) -> OptSet {
        BTreeSet::from([(BTreeSet::new(), ClashMultiset::from([(ca.clone(), 1)]))])
    }

    /// `{(atoms, χ)}` with atoms rendered as assertions.
    pub fn decode(&self, v: &OptSet) -> BTreeSet<(BTreeSet<String>, ClashMultiset)> {
        v.iter()
            .map(|(s, m)| {
                let atoms = s
                    .iter()
                    .map(|r| {
                        view_atom(&self.h.order[*r], &self.context)
                            .unwrap_or_else(|| self.h.order[*r].to_string())
                    })
                    .collect();
                (atoms, m.clone())
            })
            .collect()
    }

    /// α_all for this context: the context's own assertions and the
    /// assumptions targeted at it.
    pub fn formula(&self, k: &Sckr, p: &GroundProgram) -> Result<Formula<OptSet>, CkrError> {
        let mut items: Vec<Formula<OptSet>> = self
            .h
            .order
            .iter()
            .filter(|a| view_atom(a, &self.context).is_some())
            .map(|a| Formula::guarded(a.clone(), self.atom_value(a)))
            .collect();
        for (a, t, ca) in pclash(k, p)? {
            if t == self.context {
                items.push(Formula::guarded(a, self.clash_value(&ca)));
            }
        }
        Ok(Formula::prod(items))
    }
}

impl Semiring for RContext {
    type V = OptSet;
    fn name(&self) -> &'static str {
        "r_c"
    }
    fn zero(&self) -> OptSet {
        BTreeSet::new()
    }
    fn one(&self) -> OptSet {
        BTreeSet::from([(BTreeSet::new(), ClashMultiset::new())])
    }
    fn add(&self, a: &OptSet, b: &OptSet) -> OptSet {
        self.opt(a.union(b).cloned().collect())
    }
    fn mul(&self, a: &OptSet, b: &OptSet) -> OptSet {
        let mut out = BTreeSet::new();
        for (s1, c1) in a {
            for (s2, c2) in b {
                out.insert((s1.union(s2).copied().collect(), ms_add(c1, c2)));
            }
        }
        self.opt(out)
    }
    fn render(&self, v: &OptSet) -> String {
        let items: Vec<String> = v
            .iter()
            .map(|(s, m)| {
                format!(
                    "({}, {})",
                    self.h
                        .render_atoms(s.iter().map(|r| (r, 1)), Some(&self.context)),
                    render_ms(m)
                )
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// μ_all: the crossproduct of the per-context measures.
pub struct MuAll {
    pub contexts: Vec<String>,
    pub semiring: Product<RContext>,
    pub formulas: Vec<Formula<OptSet>>,
}

impl MuAll {
    /// Overall weight: per answer set the tuple of per-context weights,
    /// summed in the crossproduct.
    pub fn overall_weight(&self, answer_sets: &[super::AtomSet]) -> Vec<OptSet> {
        let mut sorted: Vec<&super::AtomSet> = answer_sets.iter().collect();
        sorted.sort();
        sorted.into_iter().fold(self.semiring.zero(), |acc, i| {
            let w: Vec<OptSet> = self
                .semiring
                .parts
                .iter()
                .zip(&self.formulas)
                .map(|(r, f)| f.eval(r, &|a| i.contains(a)))
                .collect();
            self.semiring.add(&acc, &w)
        })
    }
}

pub fn build_mu_one(k: &Sckr, p: &GroundProgram) -> Result<(ROne, Formula<PrefValue>), CkrError> {
    let r = ROne::new(k, p)?;
    let f = r.formula(k, p)?;
    Ok((r, f))
}

pub fn build_mu_all(k: &Sckr, p: &GroundProgram) -> Result<MuAll, CkrError> {
    let mut parts = Vec::new();
    let mut formulas = Vec::new();
    for c in &k.structure.contexts {
        let r = RContext::new(k, p, c)?;
        formulas.push(r.formula(k, p)?);
        parts.push(r);
    }
    Ok(MuAll {
        contexts: k.structure.contexts.clone(),
        semiring: Product { parts },
        formulas,
    })
}
