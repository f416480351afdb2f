//! Instance generators: the exponential-walk path family, explicit simple
//! paths, and seeded random tree-like games.

use crate::games::{GameSpec, Owner};
use crate::graph::{RotorConfig, RotorGraph, RotorGraphBuilder, VertexId, VertexRole};
use crate::path::PathInstance;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Path-like multigraph whose maximal walk from `u0` takes about `2^(n+2)`
/// steps: interior vertices carry two arcs toward the far end and one
/// toward the sink, rotor order visiting both far arcs first.
pub fn exp_path(n: usize) -> (RotorGraph, RotorConfig, VertexId) {
    assert!(n >= 1);
    let mut b = RotorGraphBuilder::new();
    let sink = b.add_vertex("s", VertexRole::Sink);
    let us: Vec<VertexId> = (0..=n).map(|i| b.add_vertex(format!("u{i}"), VertexRole::Plain)).collect();
    let mut assignment = Vec::new();
    for i in 0..n {
        let left_a = b.add_arc(us[i], us[i + 1]);
        let left_b = b.add_arc(us[i], us[i + 1]);
        let right = b.add_arc(us[i], if i == 0 { sink } else { us[i - 1] });
        b.set_rotor_order(us[i], vec![left_a, left_b, right]);
        assignment.push((us[i], left_a));
    }
    let last = b.add_arc(us[n], us[n - 1]);
    b.set_rotor_order(us[n], vec![last]);
    assignment.push((us[n], last));
    let graph = b.finish().expect("path family is well formed");
    let config = RotorConfig::new(&graph, &assignment).expect("drawn configuration");
    let start = graph.vertex_by_name("u0").unwrap();
    (graph, config, start)
}

/// Simple path graph with the given interior directions.
pub fn simple_path(path: &PathInstance) -> (RotorGraph, RotorConfig) {
    path.to_rotor_graph()
}

#[derive(Clone, Debug)]
pub struct RandomTreeParams {
    pub vertices: usize,
    pub max_multiplicity: u64,
    pub sink_count: usize,
    /// Probability that a plain vertex belongs to the maximizer/minimizer.
    pub p_max: f64,
    pub p_min: f64,
    /// Guarantee a directed path to a sink from everywhere by giving each
    /// plain vertex an arc toward its parent in a sink-rooted tree.
    pub ensure_stopping: bool,
    /// Sink values drawn uniformly from `0..=value_range`.
    pub value_range: u64,
}

impl Default for RandomTreeParams {
    fn default() -> Self {
        RandomTreeParams {
            vertices: 20,
            max_multiplicity: 3,
            sink_count: 3,
            p_max: 0.0,
            p_min: 0.0,
            ensure_stopping: true,
            value_range: 1,
        }
    }
}

/// Seeded random tree-like rotor game; identical seeds give identical
/// instances.
pub fn random_tree_like(params: &RandomTreeParams, seed: u64) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.vertices.max(2);
    // Random attachment tree on vertex indices 0..n.
    let mut parent_of = vec![usize::MAX; n];
    for i in 1..n {
        parent_of[i] = rng.gen_range(0..i);
    }
    let mut degree = vec![0usize; n];
    for i in 1..n {
        degree[i] += 1;
        degree[parent_of[i]] += 1;
    }
    // Sinks go on leaves only.
    let mut leaves: Vec<usize> = (0..n).filter(|i| degree[*i] == 1).collect();
    for i in (1..leaves.len()).rev() {
        leaves.swap(i, rng.gen_range(0..=i));
    }
    let sink_count = params.sink_count.clamp(1, leaves.len());
    let mut is_sink = vec![false; n];
    for &leaf in leaves.iter().take(sink_count) {
        is_sink[leaf] = true;
    }
    // Re-root the attachment tree at a sink so "toward parent" walks
    // toward a sink when stopping is requested.
    let root = (0..n).find(|i| is_sink[*i]).unwrap();
    let mut adjacency = vec![Vec::new(); n];
    for i in 1..n {
        adjacency[i].push(parent_of[i]);
        adjacency[parent_of[i]].push(i);
    }
    let mut toward_sink = vec![usize::MAX; n];
    let mut stack = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &w in &adjacency[u] {
            if !seen[w] {
                seen[w] = true;
                toward_sink[w] = u;
                stack.push(w);
            }
        }
    }

    let mut b = RotorGraphBuilder::new();
    let ids: Vec<VertexId> = (0..n)
        .map(|i| {
            let role = if is_sink[i] { VertexRole::Sink } else { VertexRole::Plain };
            b.add_vertex(format!("v{i}"), role)
        })
        .collect();
    let mut out_arcs: Vec<Vec<crate::graph::ArcId>> = vec![Vec::new(); n];
    for i in 0..n {
        if is_sink[i] {
            continue;
        }
        for &j in &adjacency[i] {
            let lo = if params.ensure_stopping && toward_sink[i] == j { 1 } else { 0 };
            let mult = rng.gen_range(lo..=params.max_multiplicity);
            for _ in 0..mult {
                out_arcs[i].push(b.add_arc(ids[i], ids[j]));
            }
        }
        if out_arcs[i].is_empty() {
            let j = adjacency[i][rng.gen_range(0..adjacency[i].len())];
            out_arcs[i].push(b.add_arc(ids[i], ids[j]));
        }
        for k in (1..out_arcs[i].len()).rev() {
            out_arcs[i].swap(k, rng.gen_range(0..=k));
        }
        b.set_rotor_order(ids[i], out_arcs[i].clone());
    }
    let graph = b.finish().expect("random tree instance is well formed");

    let mut owners = vec![Owner::Random; n];
    let mut values = vec![0u64; n];
    let mut fixed = RotorConfig::empty(&graph);
    for i in 0..n {
        if is_sink[i] {
            values[i] = rng.gen_range(0..=params.value_range);
            continue;
        }
        let draw: f64 = rng.gen();
        owners[i] = if draw < params.p_max {
            Owner::Max
        } else if draw < params.p_max + params.p_min {
            Owner::Min
        } else {
            Owner::Random
        };
        if owners[i] == Owner::Random {
            let arc = out_arcs[i][rng.gen_range(0..out_arcs[i].len())];
            fixed.set(&graph, ids[i], arc).expect("own out-arc");
        }
    }
    GameSpec::new(graph, owners, values, fixed).expect("generator invariants hold")
}

/// Zero-player convenience: random stopping tree-like graph plus a total
/// configuration.
pub fn random_zero_player(params: &RandomTreeParams, seed: u64) -> (RotorGraph, RotorConfig) {
    let mut p = params.clone();
    p.p_max = 0.0;
    p.p_min = 0.0;
    let game = random_tree_like(&p, seed);
    (game.graph, game.fixed)
}
