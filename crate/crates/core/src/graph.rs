//! Graph values: undirected graphs with loops, digraphs with loops, and the
//! zero-patterns they encode.
//!
//! Node ids are 1-based everywhere in the public API. All values are
//! immutable once built.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of 1-based node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = ids.into_iter().collect();
        for &id in &v {
            check_id(id, n)?;
        }
        v.sort_unstable();
        v.dedup();
        Ok(VertexSet(v))
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// Caller guarantees `ids` is sorted, deduplicated and in range.
    pub(crate) fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        VertexSet((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) => check_id(last, n),
            None => Ok(()),
        }
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

fn check_id(id: usize, n: usize) -> Result<()> {
    if id == 0 || id > n {
        Err(Error::NodeOutOfRange { id, n })
    } else {
        Ok(())
    }
}

/// Successor structure shared by [`Graph`] and [`Digraph`].
///
/// For an undirected graph the successors of `v` are its neighbours; a loop
/// at `v` makes `v` its own successor.
pub trait Adjacency {
    fn node_count(&self) -> usize;

    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_;

    /// N(I): every node reachable by one arc (or edge, or loop) from `set`.
    fn neighbor_set(&self, set: &VertexSet) -> Result<VertexSet> {
        let n = self.node_count();
        set.check_range(n)?;
        let mut hit = vec![false; n + 1];
        for u in set.iter() {
            for v in self.successors(u) {
                hit[v] = true;
            }
        }
        Ok(VertexSet::from_sorted(
            (1..=n).filter(|&v| hit[v]).collect(),
        ))
    }
}

/// Undirected simple graph on nodes `1..=n` plus a set of looped nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted, `u < v`.
    edges: Vec<(usize, usize)>,
    looped: Vec<bool>,
    /// `adj[v - 1]` holds the sorted neighbours of `v`, loops excluded.
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)], loops: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            check_id(u, n)?;
            check_id(v, n)?;
            if u == v {
                return Err(Error::LoopInEdgeList(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        let mut looped = vec![false; n];
        for &l in loops {
            check_id(l, n)?;
            looped[l - 1] = true;
        }
        Ok(Self::from_canonical(n, canon, looped))
    }

    /// `edges` must be sorted, deduplicated, in range, with `u < v`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>, looped: Vec<bool>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u - 1].push(v);
            adj[v - 1].push(u);
        }
        Graph { n, edges, looped, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.looped[v - 1]).collect()
    }

    pub fn loop_count(&self) -> usize {
        self.looped.iter().filter(|&&l| l).count()
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.looped[v - 1]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u - 1].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].len()
    }

    /// Nodes without any non-loop edge.
    pub fn isolated_count(&self) -> usize {
        self.adj.iter().filter(|a| a.is_empty()).count()
    }

    /// True iff no two members are adjacent and no member carries a loop.
    pub fn is_independent(&self, set: &VertexSet) -> Result<bool> {
        set.check_range(self.n)?;
        for u in set.iter() {
            if self.has_loop(u) || self.adj[u - 1].iter().any(|&v| set.contains(v)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Connected components ordered by smallest member. Loops connect nothing.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            label[s] = id;
            queue.push_back(s);
            let mut members = vec![s + 1];
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if label[w - 1] == usize::MAX {
                        label[w - 1] = id;
                        members.push(w);
                        queue.push_back(w - 1);
                    }
                }
            }
            members.sort_unstable();
            comps.push(VertexSet::from_sorted(members));
        }
        comps
    }

    /// Subgraph induced by `set`, relabelled `1..=|set|` in increasing order.
    /// The returned map sends new label `i` to `map[i - 1]`.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        set.check_range(self.n)?;
        let relabel = relabeling(self.n, set);
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if let (Some(a), Some(b)) = (relabel[u], relabel[v]) {
                edges.push((a, b));
            }
        }
        edges.sort_unstable();
        let looped = set.iter().map(|v| self.has_loop(v)).collect();
        Ok((Graph::from_canonical(set.len(), edges, looped), set.as_slice().to_vec()))
    }
}

impl Adjacency for Graph {
    fn node_count(&self) -> usize {
        self.n
    }

    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let own = self.looped[v - 1].then_some(v);
        self.adj[v - 1].iter().copied().chain(own)
    }
}

fn relabeling(n: usize, set: &VertexSet) -> Vec<Option<usize>> {
    let mut relabel = vec![None; n + 1];
    for (i, v) in set.iter().enumerate() {
        relabel[v] = Some(i + 1);
    }
    relabel
}

/// Directed graph on nodes `1..=n`; loops are arcs `(i, i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for &(u, v) in arcs {
            check_id(u, n)?;
            check_id(v, n)?;
        }
        let mut arcs = arcs.to_vec();
        arcs.sort_unstable();
        arcs.dedup();
        Ok(Self::from_canonical(n, arcs))
    }

    fn from_canonical(n: usize, arcs: Vec<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            out[u - 1].push(v);
        }
        Digraph { n, arcs, out }
    }

    /// Symmetric expansion: edge {u,v} becomes arcs (u,v),(v,u); loop v becomes (v,v).
    pub fn from_graph(g: &Graph) -> Self {
        let mut arcs = Vec::with_capacity(2 * g.edge_count() + g.loop_count());
        for &(u, v) in g.edges() {
            arcs.push((u, v));
            arcs.push((v, u));
        }
        arcs.extend(g.loops().into_iter().map(|v| (v, v)));
        arcs.sort_unstable();
        Self::from_canonical(g.n(), arcs)
    }

    /// Collapse a symmetric digraph back to an undirected graph.
    pub fn to_graph(&self) -> Result<Graph> {
        let mut edges = Vec::new();
        let mut looped = vec![false; self.n];
        for &(u, v) in &self.arcs {
            if u == v {
                looped[u - 1] = true;
            } else if !self.has_arc(v, u) {
                return Err(Error::NotSymmetric(u, v));
            } else if u < v {
                edges.push((u, v));
            }
        }
        Ok(Graph::from_canonical(self.n, edges, looped))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u - 1].binary_search(&v).is_ok()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v - 1]
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| self.has_arc(v, u))
    }

    pub fn to_pattern(&self) -> ZeroPattern {
        ZeroPattern {
            n: self.n,
            support: self.arcs.clone(),
        }
    }

    /// Sub-digraph induced by `set`, relabelled like [`Graph::induced_subgraph`].
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(Digraph, Vec<usize>)> {
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        set.check_range(self.n)?;
        let relabel = relabeling(self.n, set);
        let mut arcs: Vec<_> = self
            .arcs
            .iter()
            .filter_map(|&(u, v)| Some((relabel[u]?, relabel[v]?)))
            .collect();
        arcs.sort_unstable();
        Ok((Digraph::from_canonical(set.len(), arcs), set.as_slice().to_vec()))
    }

    /// Strongly connected components (iterative Tarjan), each sorted, ordered
    /// by smallest member.
    pub fn strongly_connected_components(&self) -> Vec<VertexSet> {
        const UNSEEN: usize = usize::MAX;
        let n = self.n;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0;
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w1) = self.out[v].get(*pos) {
                    *pos += 1;
                    let w = w1 - 1;
                    if index[w] == UNSEEN {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut members = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        members.push(w + 1);
                        if w == v {
                            break;
                        }
                    }
                    members.sort_unstable();
                    comps.push(VertexSet::from_sorted(members));
                }
            }
        }
        comps.sort_unstable_by_key(|c| c.as_slice()[0]);
        comps
    }
}

impl Adjacency for Digraph {
    fn node_count(&self) -> usize {
        self.n
    }

    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v - 1].iter().copied()
    }
}

/// 0/∗ sparsity pattern: `(i, j)` is in the support iff entry `(i, j)` is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPattern {
    n: usize,
    support: Vec<(usize, usize)>,
}

impl ZeroPattern {
    pub fn new(n: usize, support: &[(usize, usize)]) -> Result<Self> {
        Ok(Digraph::new(n, support)?.to_pattern())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        self.support.binary_search(&(i, j)).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.support.iter().all(|&(i, j)| self.is_free(j, i))
    }

    pub fn to_digraph(&self) -> Digraph {
        Digraph::from_canonical(self.n, self.support.clone())
    }
}

impl From<&Graph> for ZeroPattern {
    fn from(g: &Graph) -> Self {
        Digraph::from_graph(g).to_pattern()
    }
}
