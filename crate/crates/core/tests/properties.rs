use proptest::prelude::*;

use structstab::matching::{hall_violator, hamiltonian_decomposition, BipartiteCover};
use structstab::models::{Model, ModelAParams, ModelBParams};
use structstab::stability::{
    check_digraph, check_l, check_symmetric_stability, classify_thin, has_k_decomposition, Status,
};
use structstab::{Digraph, Graph, VertexSet};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(n, emask, lmask)| {
                let all: Vec<(usize, usize)> =
                    (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
                let edges: Vec<_> =
                    all.into_iter().zip(&emask).filter(|(_, &b)| b).map(|(e, _)| e).collect();
                let loops: Vec<_> = (1..=n).filter(|&v| lmask[v - 1]).collect();
                Graph::new(n, &edges, &loops).unwrap()
            })
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Successor permutation along arcs (loops allowed), by enumeration.
fn brute_has_cover(d: &Digraph) -> bool {
    permutations(d.n()).iter().any(|s| (0..d.n()).all(|i| d.has_arc(i + 1, s[i] + 1)))
}

/// Maximum matching of the double cover by enumerating left subsets.
fn brute_max_matching(d: &Digraph) -> usize {
    fn go(d: &Digraph, left: usize, used: &mut Vec<bool>) -> usize {
        if left > d.n() {
            return 0;
        }
        let mut best = go(d, left + 1, used);
        for right in 1..=d.n() {
            if !used[right] && d.has_arc(left, right) {
                used[right] = true;
                best = best.max(1 + go(d, left + 1, used));
                used[right] = false;
            }
        }
        best
    }
    go(d, 1, &mut vec![false; d.n() + 1])
}

/// Smallest independent set with exactly |I| − 1 neighbours, by subset scan.
fn brute_min_violator(g: &Graph) -> Option<usize> {
    let n = g.n();
    (1u32..1 << n)
        .filter_map(|mask| {
            let set: Vec<usize> = (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect();
            let independent = set.iter().all(|&u| !g.has_loop(u))
                && set.iter().all(|&u| set.iter().all(|&v| !g.has_edge(u, v)));
            if !independent {
                return None;
            }
            let mut nb: Vec<usize> = set.iter().flat_map(|&u| g.neighbors(u).to_vec()).collect();
            nb.sort_unstable();
            nb.dedup();
            (nb.len() + 1 == set.len()).then_some(set.len())
        })
        .min()
}

fn supergraph(g: &Graph, extra_edge: Option<(usize, usize)>, extra_loop: Option<usize>) -> Graph {
    let mut edges = g.edges().to_vec();
    edges.extend(extra_edge.filter(|(u, v)| u != v));
    let mut loops = g.loops();
    loops.extend(extra_loop);
    Graph::new(g.n(), &edges, &loops).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn components_partition_nodes(g in graph_strategy(9)) {
        let comps = g.connected_components();
        let mut all: Vec<usize> = comps.iter().flat_map(|c| c.iter()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (1..=g.n()).collect::<Vec<_>>());
        for &(u, v) in g.edges() {
            prop_assert!(comps.iter().any(|c| c.contains(u) && c.contains(v)));
        }
        for c in &comps {
            let (sub, _) = g.induced_subgraph(c).unwrap();
            prop_assert_eq!(sub.connected_components().len(), 1);
        }
    }

    #[test]
    fn digraph_bijection_round_trips(g in graph_strategy(8)) {
        let d = Digraph::from_graph(&g);
        prop_assert!(d.is_symmetric());
        prop_assert_eq!(d.to_graph().unwrap(), g.clone());
        prop_assert_eq!(d.arcs().len(), 2 * g.edge_count() + g.loop_count());
    }

    #[test]
    fn matching_matches_brute_force(g in graph_strategy(6)) {
        let d = Digraph::from_graph(&g);
        let cover = BipartiteCover::from_adjacency(&d);
        let m = cover.max_matching();
        prop_assert!(m.is_valid_for(&cover));
        prop_assert_eq!(m.size(), brute_max_matching(&d));
    }

    #[test]
    fn hall_violator_iff_no_decomposition(g in graph_strategy(7)) {
        let has = hamiltonian_decomposition(&g);
        prop_assert_eq!(has.is_some(), brute_has_cover(&Digraph::from_graph(&g)));
        if let Some(dec) = &has {
            prop_assert!(dec.validate(&g));
        }
        match hall_violator(&g) {
            Some(cert) => {
                prop_assert!(has.is_none());
                prop_assert!(cert.validate(&g));
                prop_assert!(g.is_independent(&cert.independent).unwrap());
                prop_assert_eq!(cert.neighbors.len() + 1, cert.independent.len());
            }
            None => prop_assert!(has.is_some()),
        }
    }

    #[test]
    fn thin_class_is_minimal(g in graph_strategy(8)) {
        let class = classify_thin(&g);
        let brute = brute_min_violator(&g);
        prop_assert_eq!(class.as_ref().map(|c| c.k), brute);
        prop_assert_eq!(class.is_none(), hamiltonian_decomposition(&g).is_some());
        if let Some(c) = class {
            prop_assert!(c.witness.validate(&g));
            prop_assert!(c.k <= (g.n() + 2) / 2);
        }
    }

    #[test]
    fn verdict_is_l_and_h(g in graph_strategy(8)) {
        let v = check_symmetric_stability(&g);
        let l = g.connected_components().iter().all(|c| c.iter().any(|u| g.has_loop(u)));
        let h = hamiltonian_decomposition(&g).is_some();
        prop_assert_eq!(v.l_flag, l);
        prop_assert_eq!(check_l(&g).0, l);
        prop_assert_eq!(v.h_flag, h);
        prop_assert_eq!(v.status == Status::Stable, l && h);
        prop_assert!(v.status != Status::Unknown);
        prop_assert!(v.validate_graph(&g));
    }

    #[test]
    fn properties_are_monotone(
        g in graph_strategy(8),
        u in 1usize..=8, w in 1usize..=8, add_loop in any::<bool>(),
    ) {
        let n = g.n();
        let (u, w) = ((u - 1) % n + 1, (w - 1) % n + 1);
        let bigger = if add_loop {
            supergraph(&g, None, Some(u))
        } else {
            supergraph(&g, Some((u.min(w), u.max(w))), None)
        };
        let (a, b) = (check_symmetric_stability(&g), check_symmetric_stability(&bigger));
        prop_assert!(!a.l_flag || b.l_flag);
        prop_assert!(!a.h_flag || b.h_flag);
        prop_assert!(a.status != Status::Stable || b.status == Status::Stable);
    }

    #[test]
    fn full_k_decomposition_is_hamiltonian(g in graph_strategy(7)) {
        let d = Digraph::from_graph(&g);
        let k = has_k_decomposition(&d, g.n()).unwrap();
        prop_assert_eq!(k.is_some(), hamiltonian_decomposition(&g).is_some());
        if let Some(dec) = k {
            prop_assert!(dec.validate(&d));
            prop_assert_eq!(dec.covered(), &VertexSet::new(g.n(), 1..=g.n()).unwrap());
        }
    }

    #[test]
    fn digraph_check_agrees_on_symmetric_input(g in graph_strategy(7)) {
        let d = Digraph::from_graph(&g);
        let dv = check_digraph(&d).unwrap();
        let sv = check_symmetric_stability(&g);
        prop_assert!(dv.validate(&d));
        match dv.status {
            Status::Stable => prop_assert_eq!(sv.status, Status::Stable),
            Status::Unstable => prop_assert_eq!(sv.status, Status::Unstable),
            Status::Unknown => {}
        }
    }

    #[test]
    fn sampling_is_deterministic(n in 2usize..40, p in 0.0f64..=1.0, q in 0.0f64..=1.0, seed in any::<u64>(), trial in 0u64..50) {
        let a = Model::A(ModelAParams { n, p, q, seed });
        prop_assert_eq!(a.sample_trial(trial), a.sample_trial(trial));
        let pairs = n * (n - 1) / 2;
        let edges = ((pairs as f64) * p) as usize;
        let loops = ((n as f64) * q) as usize;
        let b = Model::B(ModelBParams { n, edges, loops, seed });
        let g = b.sample_trial(trial);
        prop_assert_eq!(g.edge_count(), edges);
        prop_assert_eq!(g.loop_count(), loops);
        prop_assert_eq!(g, b.sample_trial(trial));
    }
}
