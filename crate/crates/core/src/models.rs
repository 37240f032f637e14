//! Random graph models with independent edge/loop coins (model A) and with
//! exact edge/loop counts (model B).
//!
//! Randomness comes from ChaCha8. Trial `t` of a run seeded with `seed` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `t`, so every trial
//! is reproducible on its own and trials can run in any order or thread.
//!
//! Model A consumes one 64-bit word per slot in a fixed order: the potential
//! edges `{u, v}`, `u < v`, in row-major order, then the loops `1..=n`. A
//! slot is present iff its word's top 53 bits, read as a uniform in [0, 1),
//! fall below the probability. Two graphs drawn from the same stream thus
//! share every uniform, which is what [`coupled_pair_a`] relies on.

use std::collections::HashMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelAParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelBParams {
    pub n: usize,
    /// Non-loop edge count N.
    pub edges: usize,
    /// Loop count M.
    pub loops: usize,
    pub seed: u64,
}

/// Parameters of either model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Model {
    A(ModelAParams),
    B(ModelBParams),
}

impl Model {
    pub fn n(&self) -> usize {
        match self {
            Model::A(p) => p.n,
            Model::B(p) => p.n,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Model::A(p) => p.seed,
            Model::B(p) => p.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::A(p) => p.validate(),
            Model::B(p) => p.validate(),
        }
    }

    /// Graph for trial `trial`; callers validate first.
    pub fn sample_trial(&self, trial: u64) -> Graph {
        match self {
            Model::A(p) => sample_a_unchecked(p.n, p.p, p.q, &mut trial_rng(p.seed, trial)),
            Model::B(p) => sample_b_unchecked(p, &mut trial_rng(p.seed, trial)),
        }
    }
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {x} outside [0, 1]")))
    }
}

impl ModelAParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        check_probability("p", self.p)?;
        check_probability("q", self.q)
    }
}

impl ModelBParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        let max_edges = pair_count(self.n);
        if self.edges > max_edges {
            return Err(invalid(format!(
                "N = {} exceeds n(n-1)/2 = {max_edges}",
                self.edges
            )));
        }
        if self.loops > self.n {
            return Err(invalid(format!("M = {} exceeds n = {}", self.loops, self.n)));
        }
        Ok(())
    }
}

/// Model A edge probability at the connectivity threshold, `(ln n + c)/n`.
pub fn critical_p(n: usize, c: f64) -> f64 {
    let nf = n as f64;
    (nf.ln() + c) / nf
}

/// Model B edge count at the connectivity threshold,
/// `round(n(ln n + c)/2)`, floored at 0.
pub fn critical_edge_count(n: usize, c: f64) -> usize {
    let nf = n as f64;
    (nf / 2.0 * (nf.ln() + c)).round().max(0.0) as usize
}

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Smallest integer `t` with `u < p ⟺ (word >> 11) < t`, where
/// `u = (word >> 11) · 2⁻⁵³`.
fn threshold(p: f64) -> u64 {
    (p * (1u64 << 53) as f64).ceil() as u64
}

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Maps a row-major index over pairs `u < v` (0-based) back to the pair.
fn index_to_pair(n: usize, idx: usize) -> (usize, usize) {
    // Row u starts at u(2n - u - 1)/2.
    let row_start = |u: usize| u * (2 * n - u - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * idx as f64;
    let mut u = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as usize;
    u = u.min(n - 2);
    while u > 0 && row_start(u) > idx {
        u -= 1;
    }
    while u + 1 < n - 1 && row_start(u + 1) <= idx {
        u += 1;
    }
    (u, u + 1 + idx - row_start(u))
}

pub fn sample_model_a(params: &ModelAParams) -> Result<Graph> {
    params.validate()?;
    Ok(Model::A(*params).sample_trial(0))
}

pub fn sample_model_b(params: &ModelBParams) -> Result<Graph> {
    params.validate()?;
    Ok(Model::B(*params).sample_trial(0))
}

fn sample_a_unchecked(n: usize, p: f64, q: f64, rng: &mut ChaCha8Rng) -> Graph {
    let (tp, tq) = (threshold(p), threshold(q));
    let mut edges = Vec::new();
    for u in 1..n {
        for v in u + 1..=n {
            if rng.next_u64() >> 11 < tp {
                edges.push((u, v));
            }
        }
    }
    let looped = (0..n).map(|_| rng.next_u64() >> 11 < tq).collect();
    Graph::from_canonical(n, edges, looped)
}

/// The first `count` entries of a lazily shuffled `0..len`.
fn partial_shuffle(len: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * count);
    let mut picked = Vec::with_capacity(count);
    for i in 0..count {
        let j = rng.random_range(i as u64..len as u64) as usize;
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        picked.push(at_j);
    }
    picked
}

fn sample_b_unchecked(params: &ModelBParams, rng: &mut ChaCha8Rng) -> Graph {
    let n = params.n;
    let mut edges: Vec<(usize, usize)> = partial_shuffle(pair_count(n), params.edges, rng)
        .into_iter()
        .map(|idx| {
            let (u, v) = index_to_pair(n, idx);
            (u + 1, v + 1)
        })
        .collect();
    edges.sort_unstable();
    let mut looped = vec![false; n];
    for v in partial_shuffle(n, params.loops, rng) {
        looped[v] = true;
    }
    Graph::from_canonical(n, edges, looped)
}

/// Two model A graphs driven by the same uniforms, so the first is a
/// subgraph of the second whenever `p1 <= p2` and `q1 <= q2`.
pub fn coupled_pair_a(
    n: usize,
    (p1, p2): (f64, f64),
    (q1, q2): (f64, f64),
    seed: u64,
    trial: u64,
) -> Result<(Graph, Graph)> {
    ModelAParams { n, p: p1, q: q1, seed }.validate()?;
    ModelAParams { n, p: p2, q: q2, seed }.validate()?;
    if p1 > p2 || q1 > q2 {
        return Err(invalid(format!(
            "coupling needs p1 <= p2 and q1 <= q2, got p = ({p1}, {p2}), q = ({q1}, {q2})"
        )));
    }
    let g1 = sample_a_unchecked(n, p1, q1, &mut trial_rng(seed, trial));
    let g2 = sample_a_unchecked(n, p2, q2, &mut trial_rng(seed, trial));
    Ok((g1, g2))
}
