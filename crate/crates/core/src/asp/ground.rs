//! Bottom-up grounding. A semi-naive pass over the positive part computes
//! the atoms that can possibly be derived; every rule is then instantiated
//! against that set. Negative literals on impossible atoms are dropped, and
//! so are positive body atoms that are facts.

use std::collections::{HashMap, HashSet};

use super::syntax::{AtomPat, Lit, Program, Rule, TermPat};
use super::{AspError, AtomId, GroundAtom, GroundProgram, GroundRule, Term};

type Tid = u32;

#[derive(Clone, Debug)]
pub struct GroundingOptions {
    pub max_rules: usize,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions {
            max_rules: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundStats {
    pub possible_atoms: usize,
    pub rules: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum TData {
    Const(String),
    Func(String, Vec<Tid>),
}

#[derive(Default)]
struct Terms {
    data: Vec<TData>,
    index: HashMap<TData, Tid>,
}

impl Terms {
    fn intern(&mut self, t: TData) -> Tid {
        if let Some(&id) = self.index.get(&t) {
            return id;
        }
        let id = self.data.len() as Tid;
        self.data.push(t.clone());
        self.index.insert(t, id);
        id
    }

    fn to_term(&self, id: Tid) -> Term {
        match &self.data[id as usize] {
            TData::Const(s) => Term::Const(s.clone()),
            TData::Func(n, args) => {
                Term::Func(n.clone(), args.iter().map(|a| self.to_term(*a)).collect())
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Ct {
    Var(usize),
    Const(Tid),
    Func(String, Vec<Ct>),
}

impl Ct {
    fn ground_under(&self, bound: &[bool]) -> bool {
        match self {
            Ct::Var(v) => bound[*v],
            Ct::Const(_) => true,
            Ct::Func(_, args) => args.iter().all(|a| a.ground_under(bound)),
        }
    }

    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Ct::Var(v) => out.push(*v),
            Ct::Const(_) => {}
            Ct::Func(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }
}

#[derive(Clone, Debug)]
struct CAtom {
    pred: usize,
    args: Vec<Ct>,
}

impl CAtom {
    fn vars(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.args.iter().for_each(|a| a.vars(&mut v));
        v
    }
}

struct Step {
    lit: usize,
    /// Argument positions that are ground when the step starts.
    key: Vec<usize>,
    /// Comparisons that become decidable after this step.
    checks: Vec<usize>,
}

struct Plan {
    steps: Vec<Step>,
    /// Comparisons with no variables.
    pre_checks: Vec<usize>,
}

struct CRule {
    head: Option<CAtom>,
    pos: Vec<CAtom>,
    neg: Vec<CAtom>,
    neqs: Vec<(Ct, Ct)>,
    nvars: usize,
}

#[derive(Default)]
struct Rel {
    tuples: Vec<Vec<Tid>>,
    set: HashSet<Vec<Tid>>,
    indexes: HashMap<Vec<usize>, HashMap<Vec<Tid>, Vec<u32>>>,
}

impl Rel {
    fn insert(&mut self, t: Vec<Tid>) -> bool {
        if self.set.contains(&t) {
            return false;
        }
        let pos = self.tuples.len() as u32;
        for (cols, idx) in self.indexes.iter_mut() {
            let key: Vec<Tid> = cols.iter().map(|&c| t[c]).collect();
            idx.entry(key).or_default().push(pos);
        }
        self.set.insert(t.clone());
        self.tuples.push(t);
        true
    }

    fn ensure_index(&mut self, cols: &[usize]) {
        if cols.is_empty() || self.indexes.contains_key(cols) {
            return;
        }
        let mut idx: HashMap<Vec<Tid>, Vec<u32>> = HashMap::new();
        for (i, t) in self.tuples.iter().enumerate() {
            idx.entry(cols.iter().map(|&c| t[c]).collect())
                .or_default()
                .push(i as u32);
        }
        self.indexes.insert(cols.to_vec(), idx);
    }
}

struct Grounder {
    terms: Terms,
    preds: Vec<(String, usize)>,
    pred_ids: HashMap<(String, usize), usize>,
    rels: Vec<Rel>,
    facts: HashSet<(usize, Vec<Tid>)>,
}

fn unsafe_var(rule: &Rule, var: &str) -> AspError {
    AspError::Unsafe {
        rule: rule.to_string(),
        var: var.to_string(),
    }
}

impl Grounder {
    fn pred(&mut self, name: &str, arity: usize) -> usize {
        let key = (name.to_string(), arity);
        if let Some(&p) = self.pred_ids.get(&key) {
            return p;
        }
        let p = self.preds.len();
        self.preds.push(key.clone());
        self.pred_ids.insert(key, p);
        self.rels.push(Rel::default());
        p
    }

    fn compile_term(&mut self, t: &TermPat, vars: &mut Vec<String>) -> Ct {
        match t {
            TermPat::Var(v) => {
                let i = vars.iter().position(|x| x == v).unwrap_or_else(|| {
                    vars.push(v.clone());
                    vars.len() - 1
                });
                Ct::Var(i)
            }
            TermPat::Const(c) => Ct::Const(self.terms.intern(TData::Const(c.clone()))),
            TermPat::Func(n, args) => Ct::Func(
                n.clone(),
                args.iter().map(|a| self.compile_term(a, vars)).collect(),
            ),
        }
    }

    fn compile_atom(&mut self, a: &AtomPat, vars: &mut Vec<String>) -> CAtom {
        let pred = self.pred(&a.pred, a.args.len());
        CAtom {
            pred,
            args: a.args.iter().map(|t| self.compile_term(t, vars)).collect(),
        }
    }

    fn compile(&mut self, r: &Rule) -> Result<CRule, AspError> {
        let mut vars = Vec::new();
        let mut pos = Vec::new();
        for l in &r.body {
            if let Lit::Pos(a) = l {
                pos.push(self.compile_atom(a, &mut vars));
            }
        }
        let safe = vars.len();
        let mut neg = Vec::new();
        let mut neqs = Vec::new();
        for l in &r.body {
            match l {
                Lit::Neg(a) => neg.push(self.compile_atom(a, &mut vars)),
                Lit::Neq(x, y) => {
                    let x = self.compile_term(x, &mut vars);
                    let y = self.compile_term(y, &mut vars);
                    neqs.push((x, y));
                }
                Lit::Pos(_) => {}
            }
        }
        let head = r.head.as_ref().map(|h| self.compile_atom(h, &mut vars));
        if vars.len() > safe {
            return Err(unsafe_var(r, &vars[safe]));
        }
        Ok(CRule {
            head,
            pos,
            neg,
            neqs,
            nvars: vars.len(),
        })
    }

    fn eval_lookup(&self, t: &Ct, binds: &[Option<Tid>]) -> Option<Tid> {
        match t {
            Ct::Var(v) => binds[*v],
            Ct::Const(c) => Some(*c),
            Ct::Func(n, args) => {
                let ids = args
                    .iter()
                    .map(|a| self.eval_lookup(a, binds))
                    .collect::<Option<Vec<_>>>()?;
                self.terms.index.get(&TData::Func(n.clone(), ids)).copied()
            }
        }
    }

    fn eval_intern(&mut self, t: &Ct, binds: &[Option<Tid>]) -> Tid {
        match t {
            Ct::Var(v) => binds[*v].expect("safe rule"),
            Ct::Const(c) => *c,
            Ct::Func(n, args) => {
                let ids = args.iter().map(|a| self.eval_intern(a, binds)).collect();
                self.terms.intern(TData::Func(n.clone(), ids))
            }
        }
    }

    fn matches(&self, t: &Ct, id: Tid, binds: &mut [Option<Tid>], trail: &mut Vec<usize>) -> bool {
        match t {
            Ct::Var(v) => match binds[*v] {
                Some(b) => b == id,
                None => {
                    binds[*v] = Some(id);
                    trail.push(*v);
                    true
                }
            },
            Ct::Const(c) => *c == id,
            Ct::Func(n, args) => match &self.terms.data[id as usize] {
                TData::Func(m, ids) if m == n && ids.len() == args.len() => args
                    .iter()
                    .zip(ids.clone())
                    .all(|(a, i)| self.matches(a, i, binds, trail)),
                _ => false,
            },
        }
    }

    /// Orders the positive literals greedily by how many argument positions
    /// are already bound; `first` is forced to the front.
    fn plan(rule: &CRule, first: Option<usize>) -> Plan {
        let mut bound = vec![false; rule.nvars];
        let mut left: Vec<usize> = (0..rule.pos.len()).collect();
        let mut steps = Vec::new();
        let mut done_checks = vec![false; rule.neqs.len()];
        let ready = |bound: &[bool], done: &mut [bool]| -> Vec<usize> {
            let mut out = Vec::new();
            for (i, (x, y)) in rule.neqs.iter().enumerate() {
                if !done[i] && x.ground_under(bound) && y.ground_under(bound) {
                    done[i] = true;
                    out.push(i);
                }
            }
            out
        };
        let pre_checks = ready(&bound, &mut done_checks);
        while !left.is_empty() {
            let pick = match first {
                Some(f) if steps.is_empty() => left.iter().position(|&l| l == f).unwrap_or(0),
                _ => {
                    let score = |l: usize| {
                        let a = &rule.pos[l];
                        let b = a.args.iter().filter(|t| t.ground_under(&bound)).count();
                        (
                            b * 2 + usize::from(b == a.args.len()),
                            usize::MAX - a.args.len(),
                        )
                    };
                    let mut best = 0;
                    for i in 1..left.len() {
                        if score(left[i]) > score(left[best]) {
                            best = i;
                        }
                    }
                    best
                }
            };
            let lit = left.remove(pick);
            let atom = &rule.pos[lit];
            let key = (0..atom.args.len())
                .filter(|&i| atom.args[i].ground_under(&bound))
                .collect();
            for v in atom.vars() {
                bound[v] = true;
            }
            let checks = ready(&bound, &mut done_checks);
            steps.push(Step { lit, key, checks });
        }
        Plan { steps, pre_checks }
    }

    fn prepare_indexes(&mut self, rule: &CRule, plan: &Plan) {
        for s in &plan.steps {
            let p = rule.pos[s.lit].pred;
            self.rels[p].ensure_index(&s.key);
        }
    }

    fn check(&self, rule: &CRule, ids: &[usize], binds: &[Option<Tid>]) -> bool {
        ids.iter().all(|&i| {
            let (x, y) = &rule.neqs[i];
            // An uninterned function term differs from everything interned.
            match (self.eval_lookup(x, binds), self.eval_lookup(y, binds)) {
                (Some(a), Some(b)) => a != b,
                _ => true,
            }
        })
    }

    /// Enumerates the bindings of the positive body. `ranges[j]` bounds the
    /// tuple positions visible to step `j`.
    fn join(
        &self,
        rule: &CRule,
        plan: &Plan,
        ranges: &[(u32, u32)],
        j: usize,
        binds: &mut Vec<Option<Tid>>,
        emit: &mut dyn FnMut(&Self, &[Option<Tid>]),
    ) {
        if j == plan.steps.len() {
            emit(self, binds);
            return;
        }
        let step = &plan.steps[j];
        let atom = &rule.pos[step.lit];
        let rel = &self.rels[atom.pred];
        let (lo, hi) = ranges[j];
        let mut visit = |this: &Self, ti: u32, binds: &mut Vec<Option<Tid>>| {
            let tuple = &rel.tuples[ti as usize];
            let mut trail = Vec::new();
            let ok = (0..atom.args.len())
                .filter(|i| !step.key.contains(i))
                .all(|i| this.matches(&atom.args[i], tuple[i], binds, &mut trail));
            if ok && this.check(rule, &step.checks, binds) {
                this.join(rule, plan, ranges, j + 1, binds, emit);
            }
            for v in trail {
                binds[v] = None;
            }
        };
        if step.key.is_empty() {
            for ti in lo..hi.min(rel.tuples.len() as u32) {
                visit(self, ti, binds);
            }
            return;
        }
        let key: Option<Vec<Tid>> = step
            .key
            .iter()
            .map(|&i| self.eval_lookup(&atom.args[i], binds))
            .collect();
        let Some(key) = key else { return };
        let Some(list) = rel.indexes.get(&step.key).and_then(|idx| idx.get(&key)) else {
            return;
        };
        let start = list.partition_point(|&t| t < lo);
        let end = list.partition_point(|&t| t < hi);
        for &ti in &list[start..end] {
            visit(self, ti, binds);
        }
    }

    fn head_tuple(&mut self, h: &CAtom, binds: &[Option<Tid>]) -> Vec<Tid> {
        h.args.iter().map(|t| self.eval_intern(t, binds)).collect()
    }
}

/// Grounds `prog`. Facts come first in the result, then the instantiated
/// rules in program order.
pub fn ground_program(
    prog: &Program,
    opts: &GroundingOptions,
) -> Result<(GroundProgram, GroundStats), AspError> {
    let mut g = Grounder {
        terms: Terms::default(),
        preds: Vec::new(),
        pred_ids: HashMap::new(),
        rels: Vec::new(),
        facts: HashSet::new(),
    };
    let mut fact_order: Vec<(usize, Vec<Tid>)> = Vec::new();
    let mut rules: Vec<(usize, CRule)> = Vec::new();
    for (ri, r) in prog.rules.iter().enumerate() {
        let c = g.compile(r)?;
        if c.pos.is_empty() && c.neg.is_empty() && c.neqs.is_empty() {
            if let Some(h) = &c.head {
                let t = g.head_tuple(&h.clone(), &[]);
                if g.facts.insert((h.pred, t.clone())) {
                    fact_order.push((h.pred, t.clone()));
                }
                g.rels[h.pred].insert(t);
                continue;
            }
        }
        rules.push((ri, c));
    }

    // Possible atoms.
    let delta_plans: Vec<Vec<Plan>> = rules
        .iter()
        .map(|(_, r)| {
            (0..r.pos.len())
                .map(|k| Grounder::plan(r, Some(k)))
                .collect()
        })
        .collect();
    for (_, r) in &rules {
        if r.pos.is_empty() {
            if let Some(h) = &r.head {
                let binds = vec![None; r.nvars];
                if g.check(r, &(0..r.neqs.len()).collect::<Vec<_>>(), &binds) {
                    let t = g.head_tuple(h, &binds);
                    g.rels[h.pred].insert(t);
                }
            }
        }
    }
    for ((_, r), plans) in rules.iter().zip(&delta_plans) {
        for p in plans {
            g.prepare_indexes(r, p);
        }
    }
    let mut prev_end: Vec<u32> = vec![0; g.rels.len()];
    loop {
        let end: Vec<u32> = g.rels.iter().map(|r| r.tuples.len() as u32).collect();
        if end == prev_end {
            break;
        }
        let mut new: Vec<(usize, Vec<Tid>)> = Vec::new();
        for ((_, r), plans) in rules.iter().zip(&delta_plans) {
            let Some(h) = &r.head else { continue };
            for (k, plan) in plans.iter().enumerate() {
                let p = r.pos[k].pred;
                if prev_end[p] == end[p] {
                    continue;
                }
                if !g.check(r, &plan.pre_checks, &vec![None; r.nvars]) {
                    continue;
                }
                let ranges: Vec<(u32, u32)> = plan
                    .steps
                    .iter()
                    .map(|s| {
                        if s.lit == k {
                            (prev_end[p], end[p])
                        } else {
                            (0, end[r.pos[s.lit].pred])
                        }
                    })
                    .collect();
                let mut binds = vec![None; r.nvars];
                let mut heads: Vec<Vec<Option<Tid>>> = Vec::new();
                g.join(r, plan, &ranges, 0, &mut binds, &mut |_, b| {
                    heads.push(b.to_vec())
                });
                for b in heads {
                    let t = g.head_tuple(h, &b);
                    new.push((h.pred, t));
                }
            }
        }
        prev_end = end;
        for (p, t) in new {
            g.rels[p].insert(t);
        }
    }

    // Instantiation.
    let mut gp = GroundProgram::new();
    let mut atom_ids: HashMap<(usize, Vec<Tid>), AtomId> = HashMap::new();
    let mut to_atom = |g: &Grounder, gp: &mut GroundProgram, p: usize, t: &[Tid]| -> AtomId {
        if let Some(&id) = atom_ids.get(&(p, t.to_vec())) {
            return id;
        }
        let atom = GroundAtom::new(
            g.preds[p].0.clone(),
            t.iter().map(|&x| g.terms.to_term(x)).collect(),
        );
        let id = gp.intern(atom);
        atom_ids.insert((p, t.to_vec()), id);
        id
    };
    for (p, t) in &fact_order {
        let h = to_atom(&g, &mut gp, *p, t);
        gp.add_rule(GroundRule {
            head: Some(h),
            pos: Vec::new(),
            neg: Vec::new(),
        });
    }
    let mut seen: HashSet<GroundRule> = HashSet::new();
    let full_plans: Vec<Plan> = rules.iter().map(|(_, r)| Grounder::plan(r, None)).collect();
    for ((_, r), plan) in rules.iter().zip(&full_plans) {
        g.prepare_indexes(r, plan);
    }
    for ((_, r), plan) in rules.iter().zip(&full_plans) {
        if !g.check(r, &plan.pre_checks, &vec![None; r.nvars]) {
            continue;
        }
        let ranges: Vec<(u32, u32)> = plan
            .steps
            .iter()
            .map(|s| (0, g.rels[r.pos[s.lit].pred].tuples.len() as u32))
            .collect();
        let mut bindings: Vec<Vec<Option<Tid>>> = Vec::new();
        g.join(
            r,
            plan,
            &ranges,
            0,
            &mut vec![None; r.nvars],
            &mut |_, b| bindings.push(b.to_vec()),
        );
        for b in bindings {
            let head = match &r.head {
                Some(h) => {
                    let t = g.head_tuple(h, &b);
                    if g.facts.contains(&(h.pred, t.clone())) {
                        continue;
                    }
                    Some((h.pred, t))
                }
                None => None,
            };
            let mut pos = Vec::new();
            for a in &r.pos {
                let t: Vec<Tid> = a
                    .args
                    .iter()
                    .map(|x| g.eval_lookup(x, &b).expect("matched"))
                    .collect();
                if !g.facts.contains(&(a.pred, t.clone())) {
                    pos.push((a.pred, t));
                }
            }
            let mut neg = Vec::new();
            let mut blocked = false;
            for a in &r.neg {
                let t: Option<Vec<Tid>> = a.args.iter().map(|x| g.eval_lookup(x, &b)).collect();
                let Some(t) = t else { continue };
                if !g.rels[a.pred].set.contains(&t) {
                    continue;
                }
                if g.facts.contains(&(a.pred, t.clone())) {
                    blocked = true;
                    break;
                }
                neg.push((a.pred, t));
            }
            if blocked {
                continue;
            }
            let head = head.map(|(p, t)| to_atom(&g, &mut gp, p, &t));
            let pos: Vec<AtomId> = pos
                .iter()
                .map(|(p, t)| to_atom(&g, &mut gp, *p, t))
                .collect();
            let neg: Vec<AtomId> = neg
                .iter()
                .map(|(p, t)| to_atom(&g, &mut gp, *p, t))
                .collect();
            let rule = GroundRule { head, pos, neg };
            if seen.insert(rule.clone()) {
                gp.add_rule(rule);
                if gp.rules.len() > opts.max_rules {
                    return Err(AspError::CapExceeded {
                        what: "ground rules",
                        count: gp.rules.len(),
                        cap: opts.max_rules,
                    });
                }
            }
        }
    }
    let stats = GroundStats {
        possible_atoms: g.rels.iter().map(|r| r.tuples.len()).sum(),
        rules: gp.rules.len(),
    };
    Ok((gp, stats))
}
