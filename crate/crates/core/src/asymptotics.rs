//! Limit probabilities of stability for both random models, the loop-coverage
//! conditionals behind them, and the union bound on thin classes.
//!
//! Regimes are declared by the caller: an asymptotic row or column cannot be
//! inferred from one finite `(n, p)` pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// Growth of the edge probability (model A) or edge count (model B)
/// relative to the connectivity threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeRegime {
    /// `p = (ln n − ω(1))/n`, `N = n(ln n − ω(1))/2`.
    Sparse,
    /// `p = (ln n + c + o(1))/n`, `N = n(ln n + c + o(1))/2`.
    Critical(f64),
    /// `p = (ln n + ω(1))/n`, `N = n(ln n + ω(1))/2`.
    Dense,
}

/// Loop probability regime of model A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LoopRegimeA {
    /// `q = (μ + o(1))/n`, `μ ≥ 0`.
    Scaled(f64),
    /// `q = μ + o(1)`, `μ ∈ (0, 1]`.
    Constant(f64),
}

/// Loop count regime of model B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LoopRegimeB {
    /// `M = μ + o(1)`, `μ > 0`.
    Constant(f64),
    /// `M = μn + o(n)`, `μ ∈ (0, 1]`.
    Linear(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeA {
    pub edges: EdgeRegime,
    pub loops: LoopRegimeA,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeB {
    pub edges: EdgeRegime,
    pub loops: LoopRegimeB,
}

/// Where an asymptote value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// A cell of the model's limit table.
    Table,
    /// Every node is looped in the limit, so both conditions hold whenever
    /// loops alone decompose the graph. Not a table cell.
    AllLoops,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub value: f64,
    pub basis: Basis,
}

fn lambda(c: f64) -> f64 {
    (-c).exp()
}

fn table(value: f64) -> Asymptote {
    Asymptote {
        value,
        basis: Basis::Table,
    }
}

const ALL_LOOPS: Asymptote = Asymptote {
    value: 1.0,
    basis: Basis::AllLoops,
};

fn check_finite_c(edges: EdgeRegime) -> Result<()> {
    match edges {
        EdgeRegime::Critical(c) if !c.is_finite() => Err(invalid(format!("c = {c} not finite"))),
        _ => Ok(()),
    }
}

pub fn model_a_asymptote(r: RegimeA) -> Result<Asymptote> {
    check_finite_c(r.edges)?;
    match r.loops {
        LoopRegimeA::Scaled(mu) if !(mu >= 0.0 && mu.is_finite()) => {
            return Err(invalid(format!("scaled mu = {mu} must be >= 0")))
        }
        LoopRegimeA::Constant(mu) if !(mu > 0.0 && mu <= 1.0) => {
            return Err(invalid(format!("constant mu = {mu} outside (0, 1]")))
        }
        LoopRegimeA::Constant(mu) if mu == 1.0 => return Ok(ALL_LOOPS),
        _ => {}
    }
    Ok(table(match (r.edges, r.loops) {
        (EdgeRegime::Sparse, _) => 0.0,
        (EdgeRegime::Critical(c), LoopRegimeA::Scaled(mu)) => {
            (-lambda(c)).exp() * (1.0 - (-mu).exp())
        }
        (EdgeRegime::Critical(c), LoopRegimeA::Constant(mu)) => (-lambda(c) * (1.0 - mu)).exp(),
        (EdgeRegime::Dense, LoopRegimeA::Scaled(mu)) => 1.0 - (-mu).exp(),
        (EdgeRegime::Dense, LoopRegimeA::Constant(_)) => 1.0,
    }))
}

pub fn model_b_asymptote(r: RegimeB) -> Result<Asymptote> {
    check_finite_c(r.edges)?;
    match r.loops {
        LoopRegimeB::Constant(mu) if !(mu > 0.0 && mu.is_finite()) => {
            return Err(invalid(format!("constant mu = {mu} must be > 0")))
        }
        LoopRegimeB::Linear(mu) if !(mu > 0.0 && mu <= 1.0) => {
            return Err(invalid(format!("linear mu = {mu} outside (0, 1]")))
        }
        LoopRegimeB::Linear(mu) if mu == 1.0 => return Ok(ALL_LOOPS),
        _ => {}
    }
    Ok(table(match (r.edges, r.loops) {
        (EdgeRegime::Sparse, _) => 0.0,
        (EdgeRegime::Critical(c), LoopRegimeB::Constant(_)) => (-lambda(c)).exp(),
        (EdgeRegime::Critical(c), LoopRegimeB::Linear(mu)) => (-lambda(c) * (1.0 - mu)).exp(),
        (EdgeRegime::Dense, _) => 1.0,
    }))
}

/// Probability that every component carries a loop, for model A, given `k`
/// isolated nodes and one component on the remaining `n − k`:
/// `q^k (1 − (1 − q)^(n−k))`, or `q^n` when `k = n`.
pub fn loops_cover_given_split_a(n: usize, k: usize, q: f64) -> Result<f64> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("q = {q} outside [0, 1]")));
    }
    let isolated = q.powi(k as i32);
    if k == n {
        return Ok(isolated);
    }
    Ok(isolated * (1.0 - (1.0 - q).powi((n - k) as i32)))
}

/// Model B counterpart with exactly `m` loops placed uniformly:
/// `C(n−k, m−k)/C(n, m)` when `k < m`, otherwise 0 (the big component gets
/// no loop). When `k = n` there is no big component and the value is
/// `[m = n]`.
pub fn loops_cover_given_split_b(n: usize, k: usize, m: usize) -> Result<f64> {
    if k > n || m > n {
        return Err(invalid(format!("need k <= n and M <= n, got n={n} k={k} M={m}")));
    }
    if k == n {
        return Ok(if m == n { 1.0 } else { 0.0 });
    }
    if k >= m {
        return Ok(0.0);
    }
    // C(n−k, m−k)/C(n, m) = Π_{i<k} (m − i)/(n − i).
    Ok((0..k).map(|i| (m - i) as f64 / (n - i) as f64).product())
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Union bound on the probability of the thin class `F_k` in model A:
/// `C(n,k)(1−p)^C(k,2) · C(n−k,k−1)(1−p)^((n−2k+1)k) · (C(k,2)p²)^(k−1)`,
/// evaluated in log space.
pub fn fk_upper_bound(n: usize, k: usize, p: f64) -> Result<f64> {
    let k_max = (n + 2) / 2; // ⌈(n+1)/2⌉
    if k < 2 || k > k_max {
        return Err(invalid(format!("k = {k} outside [2, {k_max}]")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 || n - k < k - 1 {
        return Ok(0.0);
    }
    let pairs = (k * (k - 1) / 2) as f64;
    let ln_q = (-p).ln_1p();
    let log = ln_choose(n, k)
        + pairs * ln_q
        + ln_choose(n - k, k - 1)
        + ((n + 1 - 2 * k) * k) as f64 * ln_q
        + (k - 1) as f64 * (pairs.ln() + 2.0 * p.ln());
    Ok(log.exp())
}

impl fmt::Display for EdgeRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRegime::Sparse => f.write_str("sparse"),
            EdgeRegime::Critical(c) => write!(f, "critical:{c}"),
            EdgeRegime::Dense => f.write_str("dense"),
        }
    }
}

fn split_regime(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((name, arg)) => (name, Some(arg)),
        None => (s, None),
    }
}

fn regime_arg(s: &str, arg: Option<&str>) -> Result<f64> {
    arg.ok_or_else(|| invalid(format!("regime '{s}' needs a value")))?
        .parse::<f64>()
        .map_err(|e| invalid(format!("regime '{s}': {e}")))
}

impl FromStr for EdgeRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_regime(s) {
            ("sparse", None) => Ok(EdgeRegime::Sparse),
            ("dense", None) => Ok(EdgeRegime::Dense),
            ("critical", arg) => Ok(EdgeRegime::Critical(regime_arg(s, arg)?)),
            _ => Err(invalid(format!("unknown edge regime '{s}'"))),
        }
    }
}

impl FromStr for LoopRegimeA {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_regime(s) {
            ("scaled", arg) => Ok(LoopRegimeA::Scaled(regime_arg(s, arg)?)),
            ("constant", arg) => Ok(LoopRegimeA::Constant(regime_arg(s, arg)?)),
            _ => Err(invalid(format!("unknown model A loop regime '{s}'"))),
        }
    }
}

impl FromStr for LoopRegimeB {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_regime(s) {
            ("constant", arg) => Ok(LoopRegimeB::Constant(regime_arg(s, arg)?)),
            ("linear", arg) => Ok(LoopRegimeB::Linear(regime_arg(s, arg)?)),
            _ => Err(invalid(format!("unknown model B loop regime '{s}'"))),
        }
    }
}
