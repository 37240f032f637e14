//! Monte Carlo estimation of P(S), P(L), P(H) and the graph statistics that
//! drive them (isolated nodes, small components, thin classes).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::asymptotics::{
    model_a_asymptote, model_b_asymptote, EdgeRegime, LoopRegimeA, LoopRegimeB, RegimeA, RegimeB,
};
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::matching::BipartiteCover;
use crate::models::{critical_edge_count, critical_p, Model, ModelAParams, ModelBParams};
use crate::stability::{check_l, classify_thin};

/// Thin classification is exponential; runs on larger graphs skip it.
pub const THIN_CLASSIFICATION_MAX_N: usize = 24;

/// What one sampled graph contributes to [`TrialStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub l: bool,
    pub h: bool,
    pub isolated: usize,
    /// Some component has size in (1, n/2].
    pub small_component: bool,
    pub thin_k: Option<usize>,
}

impl TrialOutcome {
    pub fn s(&self) -> bool {
        self.l && self.h
    }
}

pub fn evaluate_graph(g: &Graph, classify: bool) -> TrialOutcome {
    let n = g.n();
    let small_component = g
        .connected_components()
        .iter()
        .any(|c| c.len() > 1 && 2 * c.len() <= n);
    let h = BipartiteCover::from_adjacency(g).max_matching().is_perfect();
    let thin_k = if !h && classify {
        classify_thin(g).map(|c| c.k)
    } else {
        None
    };
    TrialOutcome {
        l: check_l(g).0,
        h,
        isolated: g.isolated_count(),
        small_component,
        thin_k,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub s_count: u64,
    pub l_count: u64,
    pub h_count: u64,
    /// Isolated-node count → number of trials.
    pub isolated_histogram: BTreeMap<usize, u64>,
    pub small_component_count: u64,
    /// Thin class k ≥ 2 → number of trials; `None` when classification was
    /// skipped for size.
    pub fk_counts: Option<BTreeMap<usize, u64>>,
}

impl TrialStats {
    fn empty(classify: bool) -> Self {
        TrialStats {
            fk_counts: classify.then(BTreeMap::new),
            ..Default::default()
        }
    }

    pub fn record(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.s_count += o.s() as u64;
        self.l_count += o.l as u64;
        self.h_count += o.h as u64;
        *self.isolated_histogram.entry(o.isolated).or_insert(0) += 1;
        self.small_component_count += o.small_component as u64;
        if let (Some(fk), Some(k)) = (self.fk_counts.as_mut(), o.thin_k) {
            if k >= 2 {
                *fk.entry(k).or_insert(0) += 1;
            }
        }
    }

    /// Exact counter sum; associative and commutative.
    pub fn merge(mut self, other: TrialStats) -> TrialStats {
        self.trials += other.trials;
        self.s_count += other.s_count;
        self.l_count += other.l_count;
        self.h_count += other.h_count;
        self.small_component_count += other.small_component_count;
        for (k, c) in other.isolated_histogram {
            *self.isolated_histogram.entry(k).or_insert(0) += c;
        }
        self.fk_counts = match (self.fk_counts, other.fk_counts) {
            (Some(mut a), Some(b)) => {
                for (k, c) in b {
                    *a.entry(k).or_insert(0) += c;
                }
                Some(a)
            }
            (a, b) => a.or(b),
        };
        self
    }

    pub fn isolated_mean(&self) -> f64 {
        let sum: f64 = self
            .isolated_histogram
            .iter()
            .map(|(&k, &c)| k as f64 * c as f64)
            .sum();
        sum / self.trials as f64
    }

    /// Unbiased sample variance of the isolated-node count.
    pub fn isolated_variance(&self) -> f64 {
        let mean = self.isolated_mean();
        let ss: f64 = self
            .isolated_histogram
            .iter()
            .map(|(&k, &c)| c as f64 * (k as f64 - mean).powi(2))
            .sum();
        ss / (self.trials as f64 - 1.0)
    }

    fn frac(&self, count: u64) -> f64 {
        count as f64 / self.trials as f64
    }

    pub fn p_s(&self) -> f64 {
        self.frac(self.s_count)
    }

    pub fn p_l(&self) -> f64 {
        self.frac(self.l_count)
    }

    pub fn p_h(&self) -> f64 {
        self.frac(self.h_count)
    }

    /// P̂(S = 0) − P̂(L = 0): trials with every component looped but no
    /// Hamiltonian decomposition.
    pub fn instability_excess(&self) -> f64 {
        self.frac(self.l_count - self.s_count)
    }

    pub fn small_component_frequency(&self) -> f64 {
        self.frac(self.small_component_count)
    }

    pub fn stable_estimate(&self, seed: u64) -> Estimate {
        Estimate::new(self.s_count, self.trials, seed)
    }
}

/// Samples `trials` graphs (trial `t` on stream `t`) and tallies them.
/// Results do not depend on how rayon schedules the trials.
pub fn run_trials(model: &Model, trials: u64) -> Result<TrialStats> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    model.validate()?;
    let classify = model.n() <= THIN_CLASSIFICATION_MAX_N;
    Ok((0..trials)
        .into_par_iter()
        .fold(
            || TrialStats::empty(classify),
            |mut acc, t| {
                acc.record(&evaluate_graph(&model.sample_trial(t), classify));
                acc
            },
        )
        .reduce(|| TrialStats::empty(classify), TrialStats::merge))
}

/// Wilson score interval at confidence `level`.
pub fn wilson_ci(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(invalid(format!("need 0 <= successes <= trials, trials >= 1; got {successes}/{trials}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("confidence level {level} outside (0, 1)")));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (center - half).clamp(0.0, p);
    let high = (center + half).clamp(p, 1.0);
    Ok((low, high))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn new(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_ci(successes, trials, 0.95).expect("valid counts");
        Estimate {
            point: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    A,
    B,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::A => "a",
            ModelKind::B => "b",
        }
    }
}

/// One value on the edge axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeAxis {
    /// `p = (ln n + c)/n` or `N = round(n(ln n + c)/2)`.
    Critical(f64),
    /// Literal `p` (model A) or `N` (model B).
    Direct(f64),
}

/// One value on the loop axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LoopAxis {
    /// Model A, `q = μ/n`.
    Scaled(f64),
    /// Model A `q = μ`; model B `M = round(μ)`.
    Constant(f64),
    /// Model B, `M = ⌊μn⌋`.
    Linear(f64),
    /// Literal `q` (model A) or `M` (model B).
    Direct(f64),
}

impl LoopAxis {
    fn mu(self) -> Option<f64> {
        match self {
            LoopAxis::Scaled(m) | LoopAxis::Constant(m) | LoopAxis::Linear(m) => Some(m),
            LoopAxis::Direct(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelKind,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub edges: Vec<EdgeAxis>,
    pub loops: Vec<LoopAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: ModelKind,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub edges: Option<usize>,
    pub loops: Option<usize>,
    pub mu: Option<f64>,
    pub p_stable: f64,
    pub p_l: f64,
    pub p_h: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub asymptote: Option<f64>,
}

fn as_count(x: f64, what: &str) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x.is_finite() {
        Ok(x as usize)
    } else {
        Err(invalid(format!("{what} = {x} is not a non-negative integer")))
    }
}

/// Concrete model for one grid point, plus its asymptote when both axes
/// name a critical-column regime.
fn grid_point(spec: &SweepSpec, e: EdgeAxis, l: LoopAxis) -> Result<(Model, SweepRow)> {
    let n = spec.n;
    let nf = n as f64;
    let mut row = SweepRow {
        model: spec.model,
        n,
        trials: spec.trials,
        seed: spec.seed,
        c: None,
        p: None,
        q: None,
        edges: None,
        loops: None,
        mu: l.mu(),
        p_stable: 0.0,
        p_l: 0.0,
        p_h: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
        asymptote: None,
    };
    if let EdgeAxis::Critical(c) = e {
        row.c = Some(c);
    }
    let model = match spec.model {
        ModelKind::A => {
            let p = match e {
                EdgeAxis::Critical(c) => critical_p(n, c),
                EdgeAxis::Direct(p) => p,
            };
            let q = match l {
                LoopAxis::Scaled(mu) => mu / nf,
                LoopAxis::Constant(mu) | LoopAxis::Direct(mu) => mu,
                LoopAxis::Linear(_) => return Err(invalid("linear loop regime applies to model B")),
            };
            row.p = Some(p);
            row.q = Some(q);
            let loops = match l {
                LoopAxis::Scaled(mu) => Some(LoopRegimeA::Scaled(mu)),
                LoopAxis::Constant(mu) => Some(LoopRegimeA::Constant(mu)),
                _ => None,
            };
            if let (EdgeAxis::Critical(c), Some(loops)) = (e, loops) {
                let r = RegimeA { edges: EdgeRegime::Critical(c), loops };
                row.asymptote = Some(model_a_asymptote(r)?.value);
            }
            Model::A(ModelAParams { n, p, q, seed: spec.seed })
        }
        ModelKind::B => {
            let edges = match e {
                EdgeAxis::Critical(c) => critical_edge_count(n, c),
                EdgeAxis::Direct(x) => as_count(x, "N")?,
            };
            let loops = match l {
                LoopAxis::Constant(mu) => as_count(mu.round(), "M")?,
                LoopAxis::Linear(mu) => as_count((mu * nf).floor(), "M")?,
                LoopAxis::Direct(m) => as_count(m, "M")?,
                LoopAxis::Scaled(_) => return Err(invalid("scaled loop regime applies to model A")),
            };
            row.edges = Some(edges);
            row.loops = Some(loops);
            let regime = match l {
                LoopAxis::Constant(mu) => Some(LoopRegimeB::Constant(mu)),
                LoopAxis::Linear(mu) => Some(LoopRegimeB::Linear(mu)),
                _ => None,
            };
            if let (EdgeAxis::Critical(c), Some(loops)) = (e, regime) {
                let r = RegimeB { edges: EdgeRegime::Critical(c), loops };
                row.asymptote = Some(model_b_asymptote(r)?.value);
            }
            Model::B(ModelBParams { n, edges, loops, seed: spec.seed })
        }
    };
    model.validate()?;
    Ok((model, row))
}

/// One row per grid point, edge axis outermost. Every row reuses the sweep
/// seed, so neighbouring rows share their random numbers.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.edges.is_empty() || spec.loops.is_empty() {
        return Err(invalid("sweep grid is empty"));
    }
    let mut rows = Vec::with_capacity(spec.edges.len() * spec.loops.len());
    for &e in &spec.edges {
        for &l in &spec.loops {
            let (model, mut row) = grid_point(spec, e, l)?;
            let stats = run_trials(&model, spec.trials)?;
            let est = stats.stable_estimate(spec.seed);
            row.p_stable = est.point;
            row.ci_low = est.ci_low;
            row.ci_high = est.ci_high;
            row.p_l = stats.p_l();
            row.p_h = stats.p_h();
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_a(n: usize, p: f64, q: f64) -> Model {
        Model::A(ModelAParams { n, p, q, seed: 11 })
    }

    #[test]
    fn full_and_empty_graphs() {
        let s = run_trials(&model_a(8, 1.0, 1.0), 40).unwrap();
        assert_eq!(s.s_count, 40);
        let s = run_trials(&model_a(8, 0.0, 0.0), 40).unwrap();
        assert_eq!(s.s_count, 0);
        assert_eq!(s.isolated_histogram, BTreeMap::from([(8, 40)]));
        assert_eq!(s.fk_counts, Some(BTreeMap::new()));
        assert!(run_trials(&model_a(8, 0.5, 0.5), 0).is_err());
    }

    #[test]
    fn classification_skipped_for_large_n() {
        let s = run_trials(&model_a(30, 0.05, 0.5), 5).unwrap();
        assert!(s.fk_counts.is_none());
    }

    #[test]
    fn counts_are_consistent() {
        let s = run_trials(&model_a(12, 0.2, 0.3), 500).unwrap();
        assert!(s.s_count <= s.l_count.min(s.h_count));
        assert_eq!(s.isolated_histogram.values().sum::<u64>(), s.trials);
        let thin = s.trials - s.h_count;
        assert!(s.fk_counts.unwrap().values().sum::<u64>() <= thin);
    }

    #[test]
    fn merge_is_order_independent() {
        let model = model_a(10, 0.25, 0.4);
        let outcomes: Vec<_> = (0..60)
            .map(|t| evaluate_graph(&model.sample_trial(t), true))
            .collect();
        let fold = |xs: &[TrialOutcome]| {
            let mut s = TrialStats::empty(true);
            xs.iter().for_each(|o| s.record(o));
            s
        };
        let whole = fold(&outcomes);
        let split = fold(&outcomes[40..]).merge(fold(&outcomes[..40]));
        assert_eq!(whole, split);
    }

    #[test]
    fn wilson_values() {
        let (lo, _) = wilson_ci(0, 100, 0.95).unwrap();
        assert!(lo.abs() < 1e-12);
        let (_, hi) = wilson_ci(100, 100, 0.95).unwrap();
        assert!((hi - 1.0).abs() < 1e-12);
        // Direct evaluation with z = 1.96: center 0.5, half = 1.96/1.038416 * sqrt(0.0025 + 0.000096040).
        let (lo, hi) = wilson_ci(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3, "{lo} {hi}");
        assert!(wilson_ci(5, 4, 0.95).is_err());
        assert!(wilson_ci(0, 0, 0.95).is_err());
        assert!(wilson_ci(1, 4, 1.0).is_err());
    }

    #[test]
    fn isolated_moments() {
        let mut s = TrialStats::empty(false);
        for k in [0, 1, 1, 2] {
            s.record(&TrialOutcome { l: true, h: true, isolated: k, small_component: false, thin_k: None });
        }
        assert!((s.isolated_mean() - 1.0).abs() < 1e-15);
        assert!((s.isolated_variance() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_shapes() {
        let spec = SweepSpec {
            model: ModelKind::A,
            n: 20,
            trials: 50,
            seed: 1,
            edges: vec![EdgeAxis::Critical(0.0)],
            loops: vec![LoopAxis::Constant(0.5)],
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].asymptote.unwrap() - (-0.5f64).exp()).abs() < 1e-12);

        let empty = SweepSpec { edges: vec![], ..spec.clone() };
        assert!(sweep(&empty).is_err());
        let bad = SweepSpec { loops: vec![LoopAxis::Linear(0.5)], ..spec.clone() };
        assert!(sweep(&bad).is_err());
        let direct = SweepSpec {
            edges: vec![EdgeAxis::Direct(0.3)],
            loops: vec![LoopAxis::Direct(0.2)],
            ..spec
        };
        let rows = sweep(&direct).unwrap();
        assert_eq!(rows[0].asymptote, None);
        assert_eq!(rows[0].c, None);

        let b = SweepSpec {
            model: ModelKind::B,
            n: 40,
            trials: 20,
            seed: 2,
            edges: vec![EdgeAxis::Critical(0.0), EdgeAxis::Direct(10.0)],
            loops: vec![LoopAxis::Linear(0.5), LoopAxis::Constant(2.0)],
        };
        let rows = sweep(&b).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].edges, Some((20.0 * (40f64.ln())).round() as usize));
        assert_eq!(rows[0].loops, Some(20));
        assert_eq!(rows[1].loops, Some(2));
        assert_eq!(rows[2].edges, Some(10));
        let frac = SweepSpec { edges: vec![EdgeAxis::Direct(2.5)], ..b };
        assert!(sweep(&frac).is_err());
    }
}
