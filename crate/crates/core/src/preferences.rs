//! Preference between clashing-assumption maps: the local preference on one
//! context and relation, its pareto and MP liftings per relation, and the
//! lexicographic combination over relations in priority order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kb::{Axiom, OrderClosures};

/// An exception `⟨α, e⟩` to a defeasible axiom, with where the axiom was
/// declared and along which relation it propagates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClashingAssumption {
    pub axiom: Axiom,
    pub instance: Vec<String>,
    pub declared_at: String,
    pub relation: String,
}

impl ClashingAssumption {
    /// `⟨S⊑E,i⟩`
    pub fn pair(&self) -> String {
        format!("⟨{},{}⟩", self.axiom.dl(), self.instance.join(","))
    }
}

/// `ovr(S⊑E,i,c_world)`
impl fmt::Display for ClashingAssumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ovr({},{},{})",
            self.axiom.dl(),
            self.instance.join(","),
            self.declared_at
        )
    }
}

pub type ClashSet = BTreeSet<ClashingAssumption>;

/// Multiplicity map; entries with multiplicity 0 are never stored.
pub type ClashMultiset = BTreeMap<ClashingAssumption, usize>;

pub fn to_multiset(s: &ClashSet) -> ClashMultiset {
    s.iter().map(|a| (a.clone(), 1)).collect()
}

/// Per relation, per target context, the clashing assumptions. Contexts
/// and relations without assumptions are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClashMap {
    pub map: BTreeMap<String, BTreeMap<String, ClashSet>>,
}

static EMPTY: ClashSet = BTreeSet::new();

impl ClashMap {
    pub fn insert(&mut self, target: &str, a: ClashingAssumption) {
        self.map
            .entry(a.relation.clone())
            .or_default()
            .entry(target.to_string())
            .or_default()
            .insert(a);
    }

    pub fn get(&self, relation: &str, context: &str) -> &ClashSet {
        self.map
            .get(relation)
            .and_then(|m| m.get(context))
            .unwrap_or(&EMPTY)
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(|m| m.values().all(|s| s.is_empty()))
    }

    /// All entries as `(relation, target, assumption)`.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &ClashingAssumption)> {
        self.map.iter().flat_map(|(r, m)| {
            m.iter()
                .flat_map(move |(c, s)| s.iter().map(move |a| (r.as_str(), c.as_str(), a)))
        })
    }
}

impl fmt::Display for ClashMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, m) in &self.map {
            for (c, s) in m {
                if s.is_empty() {
                    continue;
                }
                if !first {
                    f.write_str("; ")?;
                }
                first = false;
                let items: Vec<String> = s
                    .iter()
                    .map(|a| format!("{}@{}", a.pair(), a.declared_at))
                    .collect();
                write!(f, "χ_{r}({c}) = {{{}}}", items.join(", "))?;
            }
        }
        if first {
            f.write_str("∅")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrefError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("{assumption} cannot target `{context}`: no context between them along `{relation}`")]
    Guard {
        assumption: String,
        context: String,
        relation: String,
    },
}

/// Which lifting of the local preference decides a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelMode {
    /// Some context strictly better, no context strictly worse.
    Mp,
    /// Some context strictly better, every context at least as good.
    Pareto,
}

/// Why one map beats another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub relation: String,
    pub context: String,
}

pub struct Preferences<'a> {
    closures: &'a OrderClosures,
}

impl<'a> Preferences<'a> {
    pub fn new(closures: &'a OrderClosures) -> Self {
        Preferences { closures }
    }

    pub fn closures(&self) -> &OrderClosures {
        self.closures
    }

    fn rel(&self, r: &str) -> Result<usize, PrefError> {
        self.closures
            .rel(r)
            .ok_or_else(|| PrefError::UnknownRelation(r.to_string()))
    }

    fn ctx(&self, c: &str) -> Result<usize, PrefError> {
        self.closures
            .ctx(c)
            .ok_or_else(|| PrefError::UnknownContext(c.to_string()))
    }

    fn witnesses(
        &self,
        rel: usize,
        c: usize,
        a: &ClashingAssumption,
    ) -> Result<Vec<usize>, PrefError> {
        let d = self.ctx(&a.declared_at)?;
        let w = self.closures.witnesses(rel, d, c);
        if w.is_empty() || a.relation != self.closures.relations[rel] {
            return Err(PrefError::Guard {
                assumption: format!("{}@{}", a.pair(), a.declared_at),
                context: self.closures.contexts[c].clone(),
                relation: self.closures.relations[rel].clone(),
            });
        }
        Ok(w)
    }

    /// `x1 > x2` at `context` for `relation`, over multisets: every element
    /// more frequent in `x1` is beaten by an element more frequent in `x2`
    /// whose witness lies strictly below.
    pub fn local_gt_multiset(
        &self,
        relation: &str,
        context: &str,
        x1: &ClashMultiset,
        x2: &ClashMultiset,
    ) -> Result<bool, PrefError> {
        let rel = self.rel(relation)?;
        let c = self.ctx(context)?;
        let excess = |a: &ClashMultiset, b: &ClashMultiset| -> Vec<ClashingAssumption> {
            a.iter()
                .filter(|(k, n)| **n > b.get(*k).copied().unwrap_or(0))
                .map(|(k, _)| k.clone())
                .collect()
        };
        let d1 = excess(x1, x2);
        let d2 = excess(x2, x1);
        let w2: Vec<Vec<usize>> = d2
            .iter()
            .map(|a| self.witnesses(rel, c, a))
            .collect::<Result<_, _>>()?;
        let prec = &self.closures.prec[rel];
        for a in &d1 {
            let w1 = self.witnesses(rel, c, a)?;
            let beaten = w2
                .iter()
                .any(|ws| ws.iter().any(|&b| w1.iter().any(|&t| prec[b][t])));
            if !beaten {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn local_gt(
        &self,
        relation: &str,
        context: &str,
        x1: &ClashSet,
        x2: &ClashSet,
    ) -> Result<bool, PrefError> {
        self.local_gt_multiset(relation, context, &to_multiset(x1), &to_multiset(x2))
    }

    pub fn local_strict(
        &self,
        relation: &str,
        context: &str,
        x1: &ClashSet,
        x2: &ClashSet,
    ) -> Result<bool, PrefError> {
        Ok(self.local_gt(relation, context, x1, x2)?
            && !self.local_gt(relation, context, x2, x1)?)
    }

    /// The context where `a` is strictly better than `b` for `relation`
    /// under `mode`, if `a` wins.
    pub fn rel_winner(
        &self,
        relation: &str,
        a: &ClashMap,
        b: &ClashMap,
        mode: RelMode,
    ) -> Result<Option<String>, PrefError> {
        let mut better = None;
        for c in &self.closures.contexts {
            let (x, y) = (a.get(relation, c), b.get(relation, c));
            if x == y {
                continue;
            }
            let xy = self.local_gt(relation, c, x, y)?;
            let yx = self.local_gt(relation, c, y, x)?;
            let worse = match mode {
                RelMode::Mp => yx && !xy,
                RelMode::Pareto => !xy,
            };
            if worse {
                return Ok(None);
            }
            if xy && !yx && better.is_none() {
                better = Some(c.clone());
            }
        }
        Ok(better)
    }

    /// Strict preference for one relation under the MP lifting.
    pub fn rel_gt(&self, relation: &str, a: &ClashMap, b: &ClashMap) -> Result<bool, PrefError> {
        Ok(self.rel_winner(relation, a, b, RelMode::Mp)?.is_some())
    }

    /// Pareto form: some context strictly better, all others at least as good.
    pub fn rel_gt_pareto(
        &self,
        relation: &str,
        a: &ClashMap,
        b: &ClashMap,
    ) -> Result<bool, PrefError> {
        Ok(self.rel_winner(relation, a, b, RelMode::Pareto)?.is_some())
    }

    /// Lexicographic over relations: the first relation on which either map
    /// wins decides.
    pub fn explain(
        &self,
        a: &ClashMap,
        b: &ClashMap,
        mode: RelMode,
    ) -> Result<Option<Explanation>, PrefError> {
        for r in &self.closures.relations {
            if let Some(c) = self.rel_winner(r, a, b, mode)? {
                return Ok(Some(Explanation {
                    relation: r.clone(),
                    context: c,
                }));
            }
            if self.rel_winner(r, b, a, mode)?.is_some() {
                return Ok(None);
            }
        }
        Ok(None)
    }

    pub fn global_gt(&self, a: &ClashMap, b: &ClashMap) -> Result<bool, PrefError> {
        Ok(self.explain(a, b, RelMode::Mp)?.is_some())
    }

    pub fn global_gt_pareto(&self, a: &ClashMap, b: &ClashMap) -> Result<bool, PrefError> {
        Ok(self.explain(a, b, RelMode::Pareto)?.is_some())
    }

    /// Indices of the maps no other map beats. Pairwise; no transitivity is
    /// assumed.
    pub fn preferred(&self, maps: &[&ClashMap], mode: RelMode) -> Result<Vec<usize>, PrefError> {
        let mut keep = Vec::new();
        'outer: for (i, m) in maps.iter().enumerate() {
            for (j, other) in maps.iter().enumerate() {
                if i != j && self.explain(other, m, mode)?.is_some() {
                    continue 'outer;
                }
            }
            keep.push(i);
        }
        Ok(keep)
    }
}
