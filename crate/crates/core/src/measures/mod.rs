//! Semirings, weighted formulas and algebraic measures over answer sets.

mod ckr;
mod formula;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::asp::GroundAtom;

pub use ckr::{
    atom_order, build_mu_all, build_mu_one, build_mu_opt, pclash, view_atom, CaTuple, MuAll,
    OptSet, PairSet, PrefValue, RContext, ROne, SetPrefValue, SetROne,
};
pub use formula::{parse_formula, Formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("{0}: bad constant `{1}`")]
    BadConstant(&'static str, String),
    #[error("formula syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown semiring `{0}`")]
    UnknownSemiring(String),
    #[error("{0}")]
    Unsupported(String),
}

pub trait Semiring {
    type V: Clone + PartialEq + fmt::Debug;

    fn name(&self) -> &'static str;
    fn zero(&self) -> Self::V;
    fn one(&self) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;

    /// Reads a formula constant.
    fn parse(&self, text: &str) -> Result<Self::V, MeasureError> {
        Err(MeasureError::BadConstant(self.name(), text.to_string()))
    }

    fn render(&self, v: &Self::V) -> String {
        format!("{v:?}")
    }

    fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Self::V>) -> Self::V
    where
        Self::V: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, v| self.add(&acc, v))
    }
}

/// (ℕ, +, ·, 0, 1)
#[derive(Clone, Copy, Debug, Default)]
pub struct Nat;

impl Semiring for Nat {
    type V = BigUint;
    fn name(&self) -> &'static str {
        "nat"
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn parse(&self, t: &str) -> Result<BigUint, MeasureError> {
        t.parse()
            .map_err(|_| MeasureError::BadConstant("nat", t.to_string()))
    }
    fn render(&self, v: &BigUint) -> String {
        v.to_string()
    }
}

/// ({f, t}, ∨, ∧, f, t)
#[derive(Clone, Copy, Debug, Default)]
pub struct Bool;

impl Semiring for Bool {
    type V = bool;
    fn name(&self) -> &'static str {
        "bool"
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn parse(&self, t: &str) -> Result<bool, MeasureError> {
        match t {
            "1" | "t" | "true" => Ok(true),
            "0" | "f" | "false" => Ok(false),
            _ => Err(MeasureError::BadConstant("bool", t.to_string())),
        }
    }
    fn render(&self, v: &bool) -> String {
        v.to_string()
    }
}

/// (2^A, ∪, ∩, ∅, A)
#[derive(Clone, Debug)]
pub struct Powerset<T: Ord + Clone> {
    pub universe: BTreeSet<T>,
}

impl<T: Ord + Clone + fmt::Debug + fmt::Display> Semiring for Powerset<T> {
    type V = BTreeSet<T>;
    fn name(&self) -> &'static str {
        "powerset"
    }
    fn zero(&self) -> BTreeSet<T> {
        BTreeSet::new()
    }
    fn one(&self) -> BTreeSet<T> {
        self.universe.clone()
    }
    fn add(&self, a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
        a.union(b).cloned().collect()
    }
    fn mul(&self, a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
        a.intersection(b).cloned().collect()
    }
    /// `{a, b}`, each element matched against the universe by its display form.
    fn parse(&self, t: &str) -> Result<BTreeSet<T>, MeasureError> {
        let bad = || MeasureError::BadConstant("powerset", t.to_string());
        let inner = t
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(bad)?;
        split_top(inner)
            .into_iter()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                self.universe
                    .iter()
                    .find(|x| x.to_string() == s)
                    .cloned()
                    .ok_or_else(bad)
            })
            .collect()
    }
    fn render(&self, v: &BTreeSet<T>) -> String {
        let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// Splits at commas outside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '{' | '⟨' | '[' => depth += 1,
            ')' | '}' | '⟩' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub(crate) fn parse_rational(name: &'static str, t: &str) -> Result<BigRational, MeasureError> {
    let bad = || MeasureError::BadConstant(name, t.to_string());
    let t = t.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches('-'), f);
        let n: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_bigint::BigInt::from(10u32).pow(f.len() as u32);
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

/// Value with one infinite point; `None` is the infinity.
pub type Extended = Option<BigRational>;

fn render_ext(v: &Extended, inf: &str) -> String {
    match v {
        None => inf.to_string(),
        Some(r) => r.to_string(),
    }
}

/// (ℚ ∪ {∞}, min, +, ∞, 0)
#[derive(Clone, Copy, Debug, Default)]
pub struct Tropical;

impl Semiring for Tropical {
    type V = Extended;
    fn name(&self) -> &'static str {
        "trop"
    }
    fn zero(&self) -> Extended {
        None
    }
    fn one(&self) -> Extended {
        Some(BigRational::zero())
    }
    fn add(&self, a: &Extended, b: &Extended) -> Extended {
        match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => Some(x.min(y).clone()),
        }
    }
    fn mul(&self, a: &Extended, b: &Extended) -> Extended {
        match (a, b) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        }
    }
    fn parse(&self, t: &str) -> Result<Extended, MeasureError> {
        if t == "inf" {
            return Ok(None);
        }
        parse_rational("trop", t).map(Some)
    }
    fn render(&self, v: &Extended) -> String {
        render_ext(v, "inf")
    }
}

/// (ℚ ∪ {-∞}, max, +, -∞, 0)
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxPlus;

impl Semiring for MaxPlus {
    type V = Extended;
    fn name(&self) -> &'static str {
        "max"
    }
    fn zero(&self) -> Extended {
        None
    }
    fn one(&self) -> Extended {
        Some(BigRational::zero())
    }
    fn add(&self, a: &Extended, b: &Extended) -> Extended {
        match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => Some(x.max(y).clone()),
        }
    }
    fn mul(&self, a: &Extended, b: &Extended) -> Extended {
        match (a, b) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        }
    }
    fn parse(&self, t: &str) -> Result<Extended, MeasureError> {
        if t == "-inf" {
            return Ok(None);
        }
        parse_rational("max", t).map(Some)
    }
    fn render(&self, v: &Extended) -> String {
        render_ext(v, "-inf")
    }
}

/// Componentwise product of copies of one semiring family.
#[derive(Clone, Debug)]
pub struct Product<S> {
    pub parts: Vec<S>,
}

impl<S: Semiring> Semiring for Product<S> {
    type V = Vec<S::V>;
    fn name(&self) -> &'static str {
        "product"
    }
    fn zero(&self) -> Vec<S::V> {
        self.parts.iter().map(|s| s.zero()).collect()
    }
    fn one(&self) -> Vec<S::V> {
        self.parts.iter().map(|s| s.one()).collect()
    }
    fn add(&self, a: &Vec<S::V>, b: &Vec<S::V>) -> Vec<S::V> {
        self.parts
            .iter()
            .zip(a.iter().zip(b))
            .map(|(s, (x, y))| s.add(x, y))
            .collect()
    }
    fn mul(&self, a: &Vec<S::V>, b: &Vec<S::V>) -> Vec<S::V> {
        self.parts
            .iter()
            .zip(a.iter().zip(b))
            .map(|(s, (x, y))| s.mul(x, y))
            .collect()
    }
    fn render(&self, v: &Vec<S::V>) -> String {
        let items: Vec<String> = self.parts.iter().zip(v).map(|(s, x)| s.render(x)).collect();
        format!("({})", items.join(", "))
    }
}

pub type AtomSet = BTreeSet<GroundAtom>;

/// Semiring sum of the weights of `answer_sets`, folded in sorted order.
pub fn overall_weight<S: Semiring>(r: &S, f: &Formula<S::V>, answer_sets: &[AtomSet]) -> S::V {
    let mut sorted: Vec<&AtomSet> = answer_sets.iter().collect();
    sorted.sort();
    sorted.into_iter().fold(r.zero(), |acc, i| {
        r.add(&acc, &f.eval(r, &|a| i.contains(a)))
    })
}

/// One law violation with the values involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawFailure {
    pub law: &'static str,
    pub values: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for LawFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails for [{}]: {} ≠ {}",
            self.law,
            self.values.join(", "),
            self.lhs,
            self.rhs
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub triples: usize,
    /// First counterexample per law.
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failure(&self, law: &str) -> Option<&LawFailure> {
        self.failures.iter().find(|f| f.law == law)
    }
}

/// Checks the semiring axioms on triples drawn from `samples` (with `zero`
/// and `one` added), enumerating at most `max_triples` of them in order.
pub fn check_semiring_laws<S: Semiring>(r: &S, samples: &[S::V], max_triples: usize) -> LawReport {
    let mut vals: Vec<S::V> = vec![r.zero(), r.one()];
    for s in samples {
        if !vals.contains(s) {
            vals.push(s.clone());
        }
    }
    let mut report = LawReport::default();
    let fail = |report: &mut LawReport, law: &'static str, vs: &[&S::V], lhs: &S::V, rhs: &S::V| {
        if lhs != rhs && report.failure(law).is_none() {
            report.failures.push(LawFailure {
                law,
                values: vs.iter().map(|v| r.render(v)).collect(),
                lhs: r.render(lhs),
                rhs: r.render(rhs),
            });
        }
    };
    let (z, o) = (r.zero(), r.one());
    for a in &vals {
        fail(&mut report, "additive identity", &[a], &r.add(a, &z), a);
        fail(&mut report, "additive identity", &[a], &r.add(&z, a), a);
        fail(
            &mut report,
            "multiplicative identity",
            &[a],
            &r.mul(a, &o),
            a,
        );
        fail(
            &mut report,
            "multiplicative identity",
            &[a],
            &r.mul(&o, a),
            a,
        );
        fail(&mut report, "annihilation", &[a], &r.mul(a, &z), &z);
        fail(&mut report, "annihilation", &[a], &r.mul(&z, a), &z);
    }
    let n = vals.len();
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if report.triples >= max_triples {
                    break 'outer;
                }
                report.triples += 1;
                let (a, b, c) = (&vals[i], &vals[j], &vals[k]);
                let t = [a, b, c];
                fail(
                    &mut report,
                    "commutativity of addition",
                    &t[..2],
                    &r.add(a, b),
                    &r.add(b, a),
                );
                fail(
                    &mut report,
                    "associativity of addition",
                    &t,
                    &r.add(&r.add(a, b), c),
                    &r.add(a, &r.add(b, c)),
                );
                fail(
                    &mut report,
                    "associativity of multiplication",
                    &t,
                    &r.mul(&r.mul(a, b), c),
                    &r.mul(a, &r.mul(b, c)),
                );
                fail(
                    &mut report,
                    "left distributivity",
                    &t,
                    &r.mul(a, &r.add(b, c)),
                    &r.add(&r.mul(a, b), &r.mul(a, c)),
                );
                fail(
                    &mut report,
                    "right distributivity",
                    &t,
                    &r.mul(&r.add(b, c), a),
                    &r.add(&r.mul(b, a), &r.mul(c, a)),
                );
            }
        }
    }
    report
}
