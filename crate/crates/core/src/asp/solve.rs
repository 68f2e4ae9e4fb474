//! Answer sets by guessing a designated set of atoms. Once the guessed atoms
//! are fixed under negation, the rest of the program must be stratified; it
//! is evaluated stratum by stratum and the guess is kept iff it reproduces
//! itself. Guesses are enumerated by increasing size, and a guess containing
//! an atom that no rule can support in any superset is never extended.

use std::collections::HashSet;

use super::{is_answer_set, AspError, AtomId, GroundProgram, Interpretation};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Upper bound on evaluated guesses.
    pub max_guesses: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_guesses: 1 << 20,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub domain: usize,
    pub guesses: usize,
    pub dead: usize,
    pub models: usize,
}

const NONE: u32 = u32::MAX;

/// Strongly connected components of the atom dependency graph, emitted
/// dependencies first. `succ` lists the atoms each atom depends on.
fn sccs(succ: &[Vec<u32>]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n = succ.len();
    let mut index = vec![NONE; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut comp = vec![NONE; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut next = 0u32;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(u32, usize)> = vec![(root as u32, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let vu = v as usize;
            if *i < succ[vu].len() {
                let w = succ[vu][*i] as usize;
                *i += 1;
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[vu] = low[vu].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(u, _)) = call.last() {
                low[u as usize] = low[u as usize].min(low[vu]);
            }
            if low[vu] == index[vu] {
                let id = comps.len() as u32;
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    comp[w as usize] = id;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(members);
            }
        }
    }
    (comp, comps)
}

fn dependency_graph(p: &GroundProgram, skip_neg: impl Fn(AtomId) -> bool) -> Vec<Vec<u32>> {
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); p.base_size()];
    for r in &p.rules {
        let Some(h) = r.head else { continue };
        for a in &r.pos {
            succ[h.index()].push(a.0);
        }
        for a in r.neg.iter().filter(|a| !skip_neg(**a)) {
            succ[h.index()].push(a.0);
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }
    succ
}

/// Atoms negated inside their own head's component. Guessing them leaves a
/// stratified remainder.
pub fn stratification_domain(p: &GroundProgram) -> Vec<AtomId> {
    let (comp, _) = sccs(&dependency_graph(p, |_| false));
    let comp = &comp;
    let mut out: Vec<AtomId> = p
        .rules
        .iter()
        .filter_map(|r| r.head.map(|h| (h, r)))
        .flat_map(|(h, r)| {
            r.neg
                .iter()
                .filter(move |a| comp[a.index()] == comp[h.index()])
                .copied()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

struct RuleInfo {
    /// Distinct positive atoms in the head's own component.
    local: Vec<u32>,
    /// Positive atoms in earlier components.
    lower: Vec<u32>,
}

struct Solver<'a> {
    p: &'a GroundProgram,
    slot: Vec<u32>,
    comps: Vec<Vec<u32>>,
    comp_rules: Vec<Vec<usize>>,
    dependent: Vec<bool>,
    info: Vec<RuleInfo>,
    /// For each atom, rules in the same component that use it positively.
    watch: Vec<Vec<u32>>,
    base: Vec<bool>,
    /// Truth can only shrink as the guess grows.
    anti: Vec<bool>,
    /// Truth can only grow as the guess grows.
    mono: Vec<bool>,
    rules_of: Vec<Vec<usize>>,
}

impl<'a> Solver<'a> {
    fn new(p: &'a GroundProgram, domain: &[AtomId]) -> Result<Self, AspError> {
        let n = p.base_size();
        let mut slot = vec![NONE; n];
        for (i, d) in domain.iter().enumerate() {
            slot[d.index()] = i as u32;
        }
        let in_domain = |a: AtomId| slot[a.index()] != NONE;
        let (comp, comps) = sccs(&dependency_graph(p, in_domain));
        let mut comp_rules: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
        let mut rules_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut info = Vec::with_capacity(p.rules.len());
        let mut watch: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (ri, r) in p.rules.iter().enumerate() {
            let Some(h) = r.head else {
                info.push(RuleInfo {
                    local: Vec::new(),
                    lower: Vec::new(),
                });
                continue;
            };
            let hc = comp[h.index()];
            comp_rules[hc as usize].push(ri);
            rules_of[h.index()].push(ri);
            for a in r.neg.iter().filter(|a| !in_domain(**a)) {
                if comp[a.index()] == hc {
                    return Err(AspError::NotStratified(p.render_rule(r)));
                }
            }
            let mut local: Vec<u32> = r
                .pos
                .iter()
                .filter(|a| comp[a.index()] == hc)
                .map(|a| a.0)
                .collect();
            local.sort_unstable();
            local.dedup();
            for &a in &local {
                watch[a as usize].push(ri as u32);
            }
            let lower = r
                .pos
                .iter()
                .filter(|a| comp[a.index()] != hc)
                .map(|a| a.0)
                .collect();
            info.push(RuleInfo { local, lower });
        }

        let mut dependent = vec![false; comps.len()];
        for (c, rules) in comp_rules.iter().enumerate() {
            let d = rules.iter().any(|&ri| {
                let r = &p.rules[ri];
                r.neg
                    .iter()
                    .any(|a| in_domain(*a) || dependent[comp[a.index()] as usize])
                    || r.pos.iter().any(|a| {
                        comp[a.index()] as usize != c && dependent[comp[a.index()] as usize]
                    })
            });
            dependent[c] = d;
        }

        // Parity of the paths from each atom to a guessed atom under `not`.
        let mut dep_pos = vec![false; n];
        let mut dep_neg = vec![false; n];
        loop {
            let mut changed = false;
            for r in &p.rules {
                let Some(h) = r.head else { continue };
                let (mut dp, mut dn) = (dep_pos[h.index()], dep_neg[h.index()]);
                for a in &r.pos {
                    dp |= dep_pos[a.index()];
                    dn |= dep_neg[a.index()];
                }
                for a in &r.neg {
                    if in_domain(*a) {
                        dn = true;
                    } else {
                        dp |= dep_neg[a.index()];
                        dn |= dep_pos[a.index()];
                    }
                }
                if (dp, dn) != (dep_pos[h.index()], dep_neg[h.index()]) {
                    dep_pos[h.index()] = dp;
                    dep_neg[h.index()] = dn;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut s = Solver {
            p,
            slot,
            comps,
            comp_rules,
            dependent,
            info,
            watch,
            base: vec![false; n],
            anti: dep_pos.iter().map(|d| !d).collect(),
            mono: dep_neg.iter().map(|d| !d).collect(),
            rules_of,
        };
        let mut base = vec![false; n];
        for c in 0..s.comps.len() {
            if !s.dependent[c] {
                s.eval_comp(c, 0, &mut base);
            }
        }
        s.base = base;
        Ok(s)
    }

    fn guessed(&self, a: AtomId, g: u128) -> bool {
        g >> self.slot[a.index()] & 1 == 1
    }

    fn blocked(&self, ri: usize, g: u128, truth: &[bool]) -> bool {
        self.p.rules[ri].neg.iter().any(|a| {
            if self.slot[a.index()] != NONE {
                self.guessed(*a, g)
            } else {
                truth[a.index()]
            }
        })
    }

    fn eval_comp(&self, c: usize, g: u128, truth: &mut [bool]) {
        let rules = &self.comp_rules[c];
        let mut missing: Vec<(usize, usize)> = Vec::new();
        let mut queue: Vec<u32> = Vec::new();
        for &ri in rules {
            let inf = &self.info[ri];
            if self.blocked(ri, g, truth) || !inf.lower.iter().all(|a| truth[*a as usize]) {
                continue;
            }
            if inf.local.is_empty() {
                let h = self.p.rules[ri].head.expect("rule with head").index();
                if !truth[h] {
                    truth[h] = true;
                    queue.push(h as u32);
                }
            } else {
                missing.push((ri, inf.local.len()));
            }
        }
        if missing.is_empty() {
            return;
        }
        missing.sort_unstable();
        while let Some(a) = queue.pop() {
            for &ri in &self.watch[a as usize] {
                let Ok(k) = missing.binary_search_by_key(&(ri as usize), |m| m.0) else {
                    continue;
                };
                missing[k].1 -= 1;
                if missing[k].1 == 0 {
                    let h = self.p.rules[ri as usize]
                        .head
                        .expect("rule with head")
                        .index();
                    if !truth[h] {
                        truth[h] = true;
                        queue.push(h as u32);
                    }
                }
            }
        }
    }

    fn evaluate(&self, g: u128) -> Vec<bool> {
        let mut truth = self.base.clone();
        for c in 0..self.comps.len() {
            if self.dependent[c] {
                self.eval_comp(c, g, &mut truth);
            }
        }
        truth
    }

    fn accepts(&self, g: u128, truth: &[bool], domain: &[AtomId]) -> bool {
        let reproduced = domain
            .iter()
            .enumerate()
            .all(|(i, d)| truth[d.index()] == (g >> i & 1 == 1));
        reproduced
            && !self.p.rules.iter().enumerate().any(|(ri, r)| {
                r.head.is_none()
                    && r.pos.iter().all(|a| truth[a.index()])
                    && !self.blocked(ri, g, truth)
            })
    }

    /// True if some guessed atom has no rule that could fire under any
    /// superset of `g`.
    fn dead(&self, g: u128, truth: &[bool], domain: &[AtomId]) -> bool {
        domain
            .iter()
            .enumerate()
            .filter(|(i, _)| g >> i & 1 == 1)
            .any(|(_, d)| {
                !self.rules_of[d.index()].iter().any(|&ri| {
                    let r = &self.p.rules[ri];
                    r.pos
                        .iter()
                        .all(|a| !self.anti[a.index()] || truth[a.index()])
                        && r.neg.iter().all(|a| {
                            if self.slot[a.index()] != NONE {
                                !self.guessed(*a, g)
                            } else {
                                !self.mono[a.index()] || !truth[a.index()]
                            }
                        })
                })
            })
    }
}

/// Answer sets of `p`, sorted. `domain` must contain every atom that occurs
/// negated inside its own component; see [`stratification_domain`].
pub fn solve_with_guess(
    p: &GroundProgram,
    domain: &[AtomId],
    opts: &SolveOptions,
) -> Result<(Vec<Interpretation>, SolveStats), AspError> {
    let mut domain = domain.to_vec();
    domain.sort_unstable();
    domain.dedup();
    if domain.len() > 128 {
        return Err(AspError::CapExceeded {
            what: "guess domain",
            count: domain.len(),
            cap: 128,
        });
    }
    let s = Solver::new(p, &domain)?;
    let mut stats = SolveStats {
        domain: domain.len(),
        ..Default::default()
    };
    let mut models = Vec::new();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    while !level.is_empty() {
        let mut live: Vec<Vec<u8>> = Vec::new();
        for set in &level {
            stats.guesses += 1;
            if stats.guesses > opts.max_guesses {
                return Err(AspError::CapExceeded {
                    what: "guesses",
                    count: stats.guesses,
                    cap: opts.max_guesses,
                });
            }
            let g = set.iter().fold(0u128, |m, &i| m | 1 << i);
            let truth = s.evaluate(g);
            if s.accepts(g, &truth, &domain) {
                let model: Interpretation = truth
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t)
                    .map(|(i, _)| AtomId(i as u32))
                    .collect();
                if !is_answer_set(p, &model) {
                    return Err(AspError::Internal(format!(
                        "guess of size {} is not an answer set",
                        set.len()
                    )));
                }
                models.push(model);
                live.push(set.clone());
            } else if s.dead(g, &truth, &domain) {
                stats.dead += 1;
            } else {
                live.push(set.clone());
            }
        }
        level = next_level(&live, domain.len());
    }
    models.sort();
    stats.models = models.len();
    Ok((models, stats))
}

/// Candidates one element larger whose every subset of the current size is
/// live.
fn next_level(live: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    let Some(first) = live.first() else {
        return Vec::new();
    };
    if first.is_empty() {
        return (0..n as u8).map(|i| vec![i]).collect();
    }
    let k = first.len();
    let known: HashSet<&[u8]> = live.iter().map(|v| v.as_slice()).collect();
    let mut out = Vec::new();
    for (i, a) in live.iter().enumerate() {
        for b in &live[i + 1..] {
            if a[..k - 1] != b[..k - 1] {
                break;
            }
            let mut cand = a.clone();
            cand.push(b[k - 1]);
            if cand[k - 1] > cand[k] {
                cand.swap(k - 1, k);
            }
            let all_live = (0..=k).all(|skip| {
                let sub: Vec<u8> = cand
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, x)| *x)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_live {
                out.push(cand);
            }
        }
    }
    out.sort();
    out
}
