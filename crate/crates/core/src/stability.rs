//! Stability verdicts.
//!
//! Symmetric patterns get an exact answer: stable iff every connected
//! component carries a loop and the graph has a Hamiltonian decomposition.
//! General digraphs get a three-valued answer from the necessary conditions
//! (a k-decomposition for every k, recursively on strongly connected
//! components) and the sufficient one (a nested chain of decompositions).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Adjacency, Digraph, Graph, VertexSet};
use crate::matching::{hall_violator, hamiltonian_decomposition, Decomposition, HallCertificate};

/// Largest n accepted by [`has_k_decomposition`].
pub const K_DECOMPOSITION_MAX_N: usize = 20;
/// Largest n accepted by [`nested_chain`] and [`check_digraph`].
pub const NESTED_CHAIN_MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    Unstable,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Stable => "STABLE",
            Status::Unstable => "UNSTABLE",
            Status::Unknown => "UNKNOWN",
        })
    }
}

pub const TRACE_REASON: &str =
    "component block has an identically zero diagonal, so its trace is structurally 0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Hamiltonian decomposition plus one looped node per connected component,
    /// listed in component order.
    Decomposition {
        decomposition: Decomposition,
        loop_witnesses: Vec<usize>,
    },
    LooplessComponent {
        component: VertexSet,
        reason: String,
    },
    Hall(HallCertificate),
    /// `chain[k - 1]` covers exactly `k` nodes and the covered sets are nested.
    NestedChain(Vec<Decomposition>),
    /// No decomposition covers exactly `k` nodes of `within`.
    MissingK { k: usize, within: VertexSet },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub status: Status,
    /// Symmetric input: every component has a loop. Digraph: every strongly
    /// connected component has a loop.
    pub l_flag: bool,
    /// A Hamiltonian decomposition exists.
    pub h_flag: bool,
    pub certificates: Vec<Certificate>,
}

impl StabilityVerdict {
    /// Re-checks the verdict from its certificates alone.
    pub fn validate(&self, d: &Digraph) -> bool {
        if !self.certificates.iter().all(|c| c.validate(d)) {
            return false;
        }
        let has = |pred: fn(&Certificate) -> bool| self.certificates.iter().any(pred);
        match self.status {
            Status::Stable => has(|c| {
                matches!(c, Certificate::Decomposition { .. } | Certificate::NestedChain(_))
            }),
            Status::Unstable => has(|c| {
                matches!(
                    c,
                    Certificate::LooplessComponent { .. }
                        | Certificate::Hall(_)
                        | Certificate::MissingK { .. }
                )
            }),
            Status::Unknown => true,
        }
    }

    pub fn validate_graph(&self, g: &Graph) -> bool {
        self.validate(&Digraph::from_graph(g))
    }
}

impl Certificate {
    pub fn validate(&self, d: &Digraph) -> bool {
        let n = d.n();
        match self {
            Certificate::Decomposition {
                decomposition,
                loop_witnesses,
            } => {
                let Ok(g) = d.to_graph() else { return false };
                let comps = g.connected_components();
                decomposition.validate(d)
                    && decomposition.size() == n
                    && loop_witnesses.len() == comps.len()
                    && comps
                        .iter()
                        .zip(loop_witnesses)
                        .all(|(c, &w)| c.contains(w) && g.has_loop(w))
            }
            Certificate::LooplessComponent { component, .. } => {
                let Ok(g) = d.to_graph() else { return false };
                g.connected_components().contains(component)
                    && component.iter().all(|v| !g.has_loop(v))
            }
            Certificate::Hall(cert) => d.to_graph().is_ok_and(|g| cert.validate(&g)),
            Certificate::NestedChain(chain) => {
                chain.len() == n
                    && chain
                        .iter()
                        .enumerate()
                        .all(|(i, dec)| dec.size() == i + 1 && dec.validate(d))
                    && chain
                        .windows(2)
                        .all(|w| w[0].covered().is_subset(w[1].covered()))
            }
            Certificate::MissingK { k, within } => {
                *k >= 1
                    && *k <= within.len()
                    && within.check_range(n).is_ok()
                    && !brute_force_k_cover(d, within.as_slice(), *k)
            }
        }
    }
}

/// Exhaustive check for a set of `k` nodes inside `within` that admits a
/// successor permutation along arcs. Independent of the matching code.
fn brute_force_k_cover(d: &Digraph, within: &[usize], k: usize) -> bool {
    fn assign(d: &Digraph, nodes: &[usize], i: usize, used: &mut Vec<bool>) -> bool {
        if i == nodes.len() {
            return true;
        }
        for (j, &t) in nodes.iter().enumerate() {
            if !used[j] && d.has_arc(nodes[i], t) {
                used[j] = true;
                if assign(d, nodes, i + 1, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    fn choose(d: &Digraph, within: &[usize], start: usize, k: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == k {
            return assign(d, cur, 0, &mut vec![false; k]);
        }
        for i in start..within.len() {
            if within.len() - i < k - cur.len() {
                break;
            }
            cur.push(within[i]);
            if choose(d, within, i + 1, k, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    choose(d, within, 0, k, &mut Vec::new())
}

/// L: every connected component contains a loop. On failure, the first
/// loopless component.
pub fn check_l(g: &Graph) -> (bool, Option<VertexSet>) {
    match g
        .connected_components()
        .into_iter()
        .find(|c| c.iter().all(|v| !g.has_loop(v)))
    {
        Some(c) => (false, Some(c)),
        None => (true, None),
    }
}

pub fn check_symmetric_stability(g: &Graph) -> StabilityVerdict {
    let (l_flag, loopless) = check_l(g);
    let decomposition = hamiltonian_decomposition(g);
    let h_flag = decomposition.is_some();
    let mut certificates = Vec::new();
    if let Some(component) = loopless {
        certificates.push(Certificate::LooplessComponent {
            component,
            reason: TRACE_REASON.to_string(),
        });
    }
    match decomposition {
        Some(decomposition) if l_flag => {
            let loop_witnesses = g
                .connected_components()
                .iter()
                .map(|c| c.iter().find(|&v| g.has_loop(v)).expect("L holds"))
                .collect();
            certificates.push(Certificate::Decomposition {
                decomposition,
                loop_witnesses,
            });
        }
        Some(_) => {}
        None => certificates.push(Certificate::Hall(
            hall_violator(g).expect("no perfect matching implies a Hall violator"),
        )),
    }
    StabilityVerdict {
        status: if l_flag && h_flag {
            Status::Stable
        } else {
            Status::Unstable
        },
        l_flag,
        h_flag,
        certificates,
    }
}

/// Thin-graph class: the smallest k with an independent set `I`, `|I| = k`,
/// `|N(I)| = k - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinClass {
    pub k: usize,
    pub witness: HallCertificate,
}

impl fmt::Display for ThinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}, {}", self.k, self.witness)
    }
}

/// `None` iff `g` has a Hamiltonian decomposition. Otherwise searches sizes
/// in increasing order and subsets lexicographically, so the witness is the
/// lexicographically first minimum-size violator.
pub fn classify_thin(g: &Graph) -> Option<ThinClass> {
    let upper = hall_violator(g)?.independent.len();
    (1..=upper).find_map(|k| {
        first_violator_of_size(g, k).map(|set| {
            let independent = VertexSet::from_sorted(set);
            let neighbors = g.neighbor_set(&independent).expect("ids in range");
            ThinClass {
                k,
                witness: HallCertificate {
                    independent,
                    neighbors,
                },
            }
        })
    })
}

struct ViolatorSearch<'a> {
    g: &'a Graph,
    candidates: Vec<usize>,
    k: usize,
    /// `hits[v]`: chosen members adjacent to `v`.
    hits: Vec<u32>,
    covered: usize,
    chosen: Vec<usize>,
}

impl ViolatorSearch<'_> {
    fn run(&mut self, from: usize) -> bool {
        if self.chosen.len() == self.k {
            return self.covered + 1 == self.k;
        }
        let need = self.k - self.chosen.len();
        for idx in from..self.candidates.len() {
            if self.candidates.len() - idx < need {
                break;
            }
            let v = self.candidates[idx];
            if self.hits[v] > 0 || self.chosen.iter().any(|&u| self.g.has_edge(u, v)) {
                continue;
            }
            self.add(v);
            // N only grows, so a neighbourhood already of size k prunes.
            if self.covered < self.k && self.run(idx + 1) {
                return true;
            }
            self.remove(v);
        }
        false
    }

    fn add(&mut self, v: usize) {
        self.chosen.push(v);
        for &w in self.g.neighbors(v) {
            if self.hits[w] == 0 {
                self.covered += 1;
            }
            self.hits[w] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.chosen.pop();
        for &w in self.g.neighbors(v) {
            self.hits[w] -= 1;
            if self.hits[w] == 0 {
                self.covered -= 1;
            }
        }
    }
}

fn first_violator_of_size(g: &Graph, k: usize) -> Option<Vec<usize>> {
    let mut search = ViolatorSearch {
        g,
        candidates: (1..=g.n()).filter(|&v| !g.has_loop(v)).collect(),
        k,
        hits: vec![0; g.n() + 1],
        covered: 0,
        chosen: Vec::with_capacity(k),
    };
    search.run(0).then_some(search.chosen)
}

/// Exact-cover queries on node subsets of a small digraph, memoized per call.
struct CoverTable {
    n: usize,
    out: Vec<u32>,
    /// 0 unknown, 1 coverable, 2 not coverable.
    cache: Vec<u8>,
}

impl CoverTable {
    fn new(d: &Digraph) -> Self {
        let n = d.n();
        let out = (1..=n)
            .map(|v| d.out_neighbors(v).iter().fold(0u32, |m, &w| m | 1 << (w - 1)))
            .collect();
        CoverTable {
            n,
            out,
            cache: vec![0; 1 << n],
        }
    }

    /// Perfect matching of the double cover restricted to `mask` on both
    /// sides; returns `succ` with `succ[i]` the successor of node `i`.
    fn matching(&self, mask: u32) -> Option<[u8; 32]> {
        fn augment(out: &[u32], mask: u32, i: usize, seen: &mut u32, mate: &mut [u8; 32]) -> bool {
            let mut free = out[i] & mask & !*seen;
            while free != 0 {
                let j = free.trailing_zeros() as usize;
                free &= free - 1;
                *seen |= 1 << j;
                if mate[j] == u8::MAX || augment(out, mask, mate[j] as usize, seen, mate) {
                    mate[j] = i as u8;
                    return true;
                }
            }
            false
        }
        let mut mate = [u8::MAX; 32];
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.out[i] & mask == 0 || !augment(&self.out, mask, i, &mut 0, &mut mate) {
                return None;
            }
        }
        let mut succ = [u8::MAX; 32];
        for j in 0..self.n {
            if mask >> j & 1 == 1 {
                succ[mate[j] as usize] = j as u8;
            }
        }
        Some(succ)
    }

    fn coverable(&mut self, mask: u32) -> bool {
        if self.cache[mask as usize] == 0 {
            self.cache[mask as usize] = if self.matching(mask).is_some() { 1 } else { 2 };
        }
        self.cache[mask as usize] == 1
    }

    fn decomposition(&self, mask: u32) -> Option<Decomposition> {
        let succ = self.matching(mask)?;
        let nodes: Vec<usize> = (0..self.n).filter(|&i| mask >> i & 1 == 1).collect();
        let next: Vec<usize> = nodes.iter().map(|&i| succ[i] as usize + 1).collect();
        let nodes: Vec<usize> = nodes.iter().map(|&i| i + 1).collect();
        Some(Decomposition::from_permutation(&nodes, &next))
    }

    /// First `k`-subset of `within` (lexicographic over its members) that
    /// admits an exact cycle cover.
    fn find_of_size(&mut self, within: u32, k: usize) -> Option<u32> {
        // Nodes with no out-arc or no in-arc inside `within` can never be covered.
        let mut into = 0u32;
        for i in 0..self.n {
            if within >> i & 1 == 1 {
                into |= self.out[i] & within;
            }
        }
        let useful: Vec<usize> = (0..self.n)
            .filter(|&i| within >> i & 1 == 1 && self.out[i] & within != 0 && into >> i & 1 == 1)
            .collect();
        if useful.len() < k {
            return None;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mask = idx.iter().fold(0u32, |m, &i| m | 1 << useful[i]);
            if self.coverable(mask) {
                return Some(mask);
            }
            // Next combination in lexicographic order.
            let mut pos = k;
            loop {
                if pos == 0 {
                    return None;
                }
                pos -= 1;
                if idx[pos] < useful.len() - k + pos {
                    break;
                }
            }
            idx[pos] += 1;
            for p in pos + 1..k {
                idx[p] = idx[p - 1] + 1;
            }
        }
    }
}

fn size_check(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::SizeLimit { what, n, limit })
    } else {
        Ok(())
    }
}

/// A decomposition covering exactly `k` nodes, if any. Exponential subset
/// search, capped at [`K_DECOMPOSITION_MAX_N`] nodes.
pub fn has_k_decomposition(d: &Digraph, k: usize) -> Result<Option<Decomposition>> {
    size_check("k-decomposition search", d.n(), K_DECOMPOSITION_MAX_N)?;
    if k == 0 || k > d.n() {
        return Err(invalid(format!("k = {k} outside [1, {}]", d.n())));
    }
    let mut table = CoverTable::new(d);
    let all = full_mask(d.n());
    Ok(table
        .find_of_size(all, k)
        .and_then(|mask| table.decomposition(mask)))
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Decompositions `D_1 ⊂ D_2 ⊂ ... ⊂ D_n` nested on their node sets, found by
/// depth-first growth one node at a time with failed subsets memoized.
pub fn nested_chain(d: &Digraph) -> Result<Option<Vec<Decomposition>>> {
    size_check("nested chain search", d.n(), NESTED_CHAIN_MAX_N)?;
    let mut table = CoverTable::new(d);
    Ok(chain_from(&mut table))
}

fn chain_from(table: &mut CoverTable) -> Option<Vec<Decomposition>> {
    fn grow(table: &mut CoverTable, mask: u32, dead: &mut [bool], path: &mut Vec<u32>) -> bool {
        if mask == full_mask(table.n) {
            return true;
        }
        for v in 0..table.n {
            let next = mask | 1 << v;
            if next == mask || dead[next as usize] {
                continue;
            }
            if table.coverable(next) {
                path.push(next);
                if grow(table, next, dead, path) {
                    return true;
                }
                path.pop();
            }
            dead[next as usize] = true;
        }
        false
    }
    let mut dead = vec![false; 1 << table.n];
    let mut path = Vec::with_capacity(table.n);
    if !grow(table, 0, &mut dead, &mut path) {
        return None;
    }
    path.iter().map(|&m| table.decomposition(m)).collect()
}

/// Three-valued verdict for a general digraph (at most
/// [`NESTED_CHAIN_MAX_N`] nodes).
pub fn check_digraph(d: &Digraph) -> Result<StabilityVerdict> {
    size_check("digraph stability check", d.n(), NESTED_CHAIN_MAX_N)?;
    let n = d.n();
    let mut table = CoverTable::new(d);
    let all = full_mask(n);
    let sccs = d.strongly_connected_components();
    let l_flag = sccs.iter().all(|c| c.iter().any(|v| d.has_arc(v, v)));
    let h_flag = table.coverable(all);
    let unstable = |k: usize, within: VertexSet| StabilityVerdict {
        status: Status::Unstable,
        l_flag,
        h_flag,
        certificates: vec![Certificate::MissingK { k, within }],
    };

    for k in 1..=n {
        if table.find_of_size(all, k).is_none() {
            return Ok(unstable(k, VertexSet::from_mask(all as u64)));
        }
    }
    if sccs.len() > 1 {
        for scc in &sccs {
            let within = scc.iter().fold(0u32, |m, v| m | 1 << (v - 1));
            for k in 1..=scc.len() {
                if table.find_of_size(within, k).is_none() {
                    return Ok(unstable(k, scc.clone()));
                }
            }
        }
    }
    let (status, certificates) = match chain_from(&mut table) {
        Some(chain) => (Status::Stable, vec![Certificate::NestedChain(chain)]),
        None => (Status::Unknown, Vec::new()),
    };
    Ok(StabilityVerdict {
        status,
        l_flag,
        h_flag,
        certificates,
    })
}
