use super::{ContextStructure, KbError};

type Matrix = Vec<Vec<bool>>;

/// Materialized orders over context indices (positions in
/// `ContextStructure::contexts`). `relations` follows priority order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderClosures {
    pub contexts: Vec<String>,
    pub relations: Vec<String>,
    /// `prec[i][a][b]`: a ≺_i b (transitive, irreflexive).
    pub prec: Vec<Matrix>,
    /// a ⪯_i b.
    pub preceq: Vec<Matrix>,
    /// a ⪯_{-i} b: reflexive-transitive closure of the other relations.
    pub preceq_except: Vec<Matrix>,
    /// a ⪯_* b over all relations.
    pub preceq_star: Matrix,
}

#[allow(clippy::needless_range_loop)]
fn transitive(mut m: Matrix) -> Matrix {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

fn reflexive(mut m: Matrix) -> Matrix {
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    m
}

fn union(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| *p || *q).collect())
        .collect()
}

/// Finds a cycle through `start` in the edge relation `edges`.
fn find_cycle(edges: &Matrix, start: usize) -> Vec<usize> {
    let n = edges.len();
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![start];
    let mut seen = vec![false; n];
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if !edges[v][w] {
                continue;
            }
            if w == start {
                let mut path = vec![v];
                let mut cur = v;
                while cur != start {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                path.push(start);
                return path;
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    vec![start, start]
}

pub fn compute_closures(s: &ContextStructure) -> Result<OrderClosures, KbError> {
    let n = s.contexts.len();
    let idx = |c: &str| s.context_index(c).expect("edge endpoints are contexts");
    let empty = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let mut prec = Vec::new();
    for r in &s.relations {
        let mut m = empty.clone();
        for (lo, hi) in &r.edges {
            m[idx(lo)][idx(hi)] = true;
        }
        let t = transitive(m.clone());
        if let Some(c) = (0..n).find(|&c| t[c][c]) {
            let cycle = find_cycle(&m, c)
                .into_iter()
                .map(|i| s.contexts[i].clone())
                .collect();
            return Err(KbError::Cycle {
                relation: r.name.clone(),
                cycle,
            });
        }
        edges.push(m);
        prec.push(t);
    }
    let preceq = prec.iter().map(|m| reflexive(m.clone())).collect();
    let preceq_except = (0..prec.len())
        .map(|i| {
            let others = (0..prec.len())
                .filter(|&j| j != i)
                .fold(empty.clone(), |acc, j| union(&acc, &edges[j]));
            reflexive(transitive(others))
        })
        .collect();
    let all = edges.iter().fold(empty.clone(), |acc, m| union(&acc, m));
    Ok(OrderClosures {
        contexts: s.contexts.clone(),
        relations: s.relations.iter().map(|r| r.name.clone()).collect(),
        prec,
        preceq,
        preceq_except,
        preceq_star: reflexive(transitive(all)),
    })
}

impl OrderClosures {
    pub fn ctx(&self, name: &str) -> Option<usize> {
        self.contexts.iter().position(|c| c == name)
    }

    pub fn rel(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r == name)
    }

    fn lookup(&self, a: &str, b: &str) -> Option<(usize, usize)> {
        Some((self.ctx(a)?, self.ctx(b)?))
    }

    /// a ≺_rel b.
    pub fn is_prec(&self, rel: &str, a: &str, b: &str) -> bool {
        match (self.rel(rel), self.lookup(a, b)) {
            (Some(r), Some((x, y))) => self.prec[r][x][y],
            _ => false,
        }
    }

    pub fn is_preceq(&self, rel: &str, a: &str, b: &str) -> bool {
        match (self.rel(rel), self.lookup(a, b)) {
            (Some(r), Some((x, y))) => self.preceq[r][x][y],
            _ => false,
        }
    }

    pub fn is_preceq_except(&self, rel: &str, a: &str, b: &str) -> bool {
        match (self.rel(rel), self.lookup(a, b)) {
            (Some(r), Some((x, y))) => self.preceq_except[r][x][y],
            _ => false,
        }
    }

    pub fn is_preceq_star(&self, a: &str, b: &str) -> bool {
        self.lookup(a, b)
            .map(|(x, y)| self.preceq_star[x][y])
            .unwrap_or(false)
    }

    /// Contexts `w` with `c ≺_rel w ⪯_{-rel} declared`: the witnesses that
    /// let an axiom of `rel` declared at `declared` reach `c` defeasibly.
    pub fn witnesses(&self, rel: usize, declared: usize, c: usize) -> Vec<usize> {
        (0..self.contexts.len())
            .filter(|&w| self.prec[rel][c][w] && self.preceq_except[rel][w][declared])
            .collect()
    }
}
