//! Bipartite double cover, maximum matching and the Hall-violator
//! certificates that witness the absence of a Hamiltonian decomposition.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Adjacency, Graph, VertexSet};

const NONE: usize = usize::MAX;

/// Left copies `1'..n'`, right copies `1''..n''`, and an edge `(i', j'')`
/// for every arc `(i, j)` of the source (loops give `(i', i'')`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteCover {
    /// `adj[i]` lists right endpoints of left node `i`, both 0-based.
    adj: Vec<Vec<usize>>,
}

impl BipartiteCover {
    pub fn from_adjacency<A: Adjacency>(g: &A) -> Self {
        let adj = (1..=g.node_count())
            .map(|v| {
                let mut row: Vec<usize> = g.successors(v).map(|w| w - 1).collect();
                row.sort_unstable();
                row
            })
            .collect();
        BipartiteCover { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Edges as 1-based `(left, right)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&j| (i + 1, j + 1)))
            .collect()
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj[left - 1].binary_search(&(right - 1)).is_ok()
    }

    /// Hopcroft–Karp: O(E·√V).
    pub fn max_matching(&self) -> Matching {
        let n = self.n();
        let mut mate_l = vec![NONE; n];
        let mut mate_r = vec![NONE; n];
        let mut dist = vec![0usize; n];
        let mut size = 0;
        let mut it = vec![0usize; n];
        let mut queue = VecDeque::new();

        loop {
            // Layering from every free left node.
            queue.clear();
            for u in 0..n {
                if mate_l[u] == NONE {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = NONE;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    let w = mate_r[v];
                    if w == NONE {
                        found = true;
                    } else if dist[w] == NONE {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                break;
            }

            it.fill(0);
            let mut stack: Vec<usize> = Vec::new();
            for root in 0..n {
                if mate_l[root] != NONE {
                    continue;
                }
                stack.clear();
                stack.push(root);
                while let Some(&x) = stack.last() {
                    if it[x] == self.adj[x].len() {
                        dist[x] = NONE;
                        stack.pop();
                        continue;
                    }
                    let v = self.adj[x][it[x]];
                    it[x] += 1;
                    let w = mate_r[v];
                    if w == NONE {
                        // Flip the path root -> ... -> x -> v.
                        let mut right = v;
                        for level in (0..stack.len()).rev() {
                            let left = stack[level];
                            let prev = mate_l[left];
                            mate_l[left] = right;
                            mate_r[right] = left;
                            right = prev;
                        }
                        size += 1;
                        break;
                    } else if dist[w] != NONE && dist[w] == dist[x] + 1 {
                        stack.push(w);
                    }
                }
            }
        }

        Matching {
            mate_l,
            mate_r,
            size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate_l: Vec<usize>,
    mate_r: Vec<usize>,
    size: usize,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_perfect(&self) -> bool {
        self.size == self.mate_l.len()
    }

    /// Matched `(left, right)` pairs, 1-based, ordered by left id.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mate_l
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r != NONE)
            .map(|(l, &r)| (l + 1, r + 1))
            .collect()
    }

    pub fn partner_of_left(&self, left: usize) -> Option<usize> {
        let r = self.mate_l[left - 1];
        (r != NONE).then_some(r + 1)
    }

    /// Injective both ways, uses only cover edges, and `size` is accurate.
    pub fn is_valid_for(&self, cover: &BipartiteCover) -> bool {
        let pairs = self.pairs();
        let mut seen = vec![false; cover.n()];
        pairs.len() == self.size
            && pairs.iter().all(|&(l, r)| {
                let fresh = !seen[r - 1];
                seen[r - 1] = true;
                fresh && cover.has_edge(l, r) && self.mate_r[r - 1] == l - 1
            })
    }
}

/// Node-disjoint cycles; a loop is a cycle of length one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    cycles: Vec<Vec<usize>>,
    covered: VertexSet,
}

impl Decomposition {
    /// Returns `None` when two cycles share a node or a cycle is empty.
    pub fn new(cycles: Vec<Vec<usize>>) -> Option<Self> {
        let mut nodes: Vec<usize> = cycles.iter().flatten().copied().collect();
        let total = nodes.len();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.len() != total || cycles.iter().any(|c| c.is_empty()) || nodes.first() == Some(&0)
        {
            return None;
        }
        Some(Decomposition {
            cycles,
            covered: VertexSet::from_sorted(nodes),
        })
    }

    /// Traces the cycles of a successor permutation over `nodes`, where node
    /// `nodes[i]` is followed by `succ[i]`.
    pub(crate) fn from_permutation(nodes: &[usize], succ: &[usize]) -> Self {
        let pos = |x: usize| nodes.binary_search(&x).expect("successor outside node set");
        let mut done = vec![false; nodes.len()];
        let mut cycles = Vec::new();
        for start in 0..nodes.len() {
            if done[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !done[i] {
                done[i] = true;
                cycle.push(nodes[i]);
                i = pos(succ[i]);
            }
            cycles.push(cycle);
        }
        Decomposition {
            cycles,
            covered: VertexSet::from_sorted(nodes.to_vec()),
        }
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn covered(&self) -> &VertexSet {
        &self.covered
    }

    pub fn size(&self) -> usize {
        self.covered.len()
    }

    /// Every consecutive pair, including the wraparound, is an arc of `g`.
    pub fn validate<A: Adjacency>(&self, g: &A) -> bool {
        let n = g.node_count();
        let disjoint = self.covered.len() == self.cycles.iter().map(Vec::len).sum::<usize>();
        disjoint
            && self.covered.check_range(n).is_ok()
            && self.cycles.iter().all(|c| {
                (0..c.len()).all(|i| {
                    let (u, v) = (c[i], c[(i + 1) % c.len()]);
                    g.successors(u).any(|w| w == v)
                })
            })
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            f.write_str("(")?;
            for (i, v) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Returns the cycle cover read off a perfect matching of the double cover,
/// or `None` when no perfect matching exists.
pub fn hamiltonian_decomposition<A: Adjacency>(g: &A) -> Option<Decomposition> {
    let m = BipartiteCover::from_adjacency(g).max_matching();
    if !m.is_perfect() {
        return None;
    }
    let nodes: Vec<usize> = (1..=g.node_count()).collect();
    let succ: Vec<usize> = m.mate_l.iter().map(|&r| r + 1).collect();
    Some(Decomposition::from_permutation(&nodes, &succ))
}

/// An independent set whose neighbourhood is exactly one node short.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallCertificate {
    pub independent: VertexSet,
    pub neighbors: VertexSet,
}

impl HallCertificate {
    /// Checks independence, `neighbors = N(independent)` and the deficiency.
    pub fn validate(&self, g: &Graph) -> bool {
        !self.independent.is_empty()
            && g.is_independent(&self.independent) == Ok(true)
            && g.neighbor_set(&self.independent).as_ref() == Ok(&self.neighbors)
            && self.neighbors.len() + 1 == self.independent.len()
    }
}

impl fmt::Display for HallCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I={}, N(I)={}", self.independent, self.neighbors)
    }
}

/// Hall violator extracted from a maximum matching.
///
/// The alternating-path closure of a free left node gives `I'` with
/// `|N(I')| < |I'|`. Dropping the members whose right copy lies in `N(I')`
/// leaves an independent set with the same deficiency property, which is
/// then shrunk one vertex at a time (largest id first) until the deficiency
/// is exactly one.
pub fn hall_violator(g: &Graph) -> Option<HallCertificate> {
    let cover = BipartiteCover::from_adjacency(g);
    let m = cover.max_matching();
    if m.is_perfect() {
        return None;
    }
    let n = g.n();
    let root = m.mate_l.iter().position(|&r| r == NONE)?;
    let mut left_seen = vec![false; n];
    let mut right_seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    left_seen[root] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &cover.adj[u] {
            if right_seen[v] {
                continue;
            }
            right_seen[v] = true;
            let w = m.mate_r[v];
            debug_assert!(w != NONE, "augmenting path in a maximum matching");
            if w != NONE && !left_seen[w] {
                left_seen[w] = true;
                queue.push_back(w);
            }
        }
    }

    let mut set: Vec<usize> = (0..n)
        .filter(|&i| left_seen[i] && !right_seen[i])
        .map(|i| i + 1)
        .collect();
    debug_assert!(!set.is_empty());

    let deficient = |s: &[usize]| {
        let vs = VertexSet::from_sorted(s.to_vec());
        g.neighbor_set(&vs).map(|nb| nb.len() < s.len()).unwrap_or(false)
    };
    loop {
        let mut shrunk = false;
        for idx in (0..set.len()).rev() {
            let mut trial = set.clone();
            trial.remove(idx);
            if deficient(&trial) {
                set = trial;
                shrunk = true;
            }
        }
        if !shrunk {
            break;
        }
    }

    let independent = VertexSet::from_sorted(set);
    let neighbors = g.neighbor_set(&independent).ok()?;
    Some(HallCertificate {
        independent,
        neighbors,
    })
}
