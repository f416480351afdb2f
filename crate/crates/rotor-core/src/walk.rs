//! Exact rotor-walk semantics (move, then turn), cycle detection and
//! pushing, and the destination forest obtained by maximal cycle pushing.

use crate::count::ExtendedCount;
use crate::graph::{GraphError, RotorConfig, RotorGraph, VertexId};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParticleState {
    pub config: RotorConfig,
    pub position: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkError {
    PositionIsSink(VertexId),
    Graph(GraphError),
    /// A push or walk cap was exhausted before completion.
    CapExhausted,
    ConfigCyclic,
    CycleNotInConfig,
}

impl fmt::Display for WalkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkError::PositionIsSink(v) => write!(f, "particle already rests on sink {v:?}"),
            WalkError::Graph(e) => write!(f, "{e}"),
            WalkError::CapExhausted => write!(f, "step cap exhausted"),
            WalkError::ConfigCyclic => write!(f, "configuration induces a directed cycle"),
            WalkError::CycleNotInConfig => write!(f, "cycle is not in the configuration"),
        }
    }
}

impl std::error::Error for WalkError {}

/// One routing: the particle moves along the current arc, then the rotor
/// at the departed vertex turns.
pub fn routing_step(graph: &RotorGraph, state: &ParticleState) -> Result<ParticleState, WalkError> {
    if graph.is_sink(state.position) {
        return Err(WalkError::PositionIsSink(state.position));
    }
    let mut next = state.clone();
    let a = next.config.arc(state.position);
    next.position = graph.head(a);
    next.config.turn(graph, state.position);
    Ok(next)
}

#[derive(Clone, Debug, Default)]
pub struct WalkOptions {
    /// Upper bound on routing steps; `None` runs until a sink is reached.
    pub cap: Option<u64>,
    pub record_trace: bool,
    pub record_flows: bool,
}

#[derive(Clone, Debug)]
pub struct WalkOutcome {
    pub final_config: RotorConfig,
    /// Sink reached, or `None` when the cap hit first.
    pub exit: Option<VertexId>,
    pub steps: ExtendedCount,
    /// Per-arc crossing counts, when recorded.
    pub flow_counts: Option<Vec<u64>>,
    pub trace: Option<Vec<VertexId>>,
}

impl WalkOutcome {
    pub fn cap_hit(&self) -> bool {
        self.exit.is_none()
    }

    /// Total crossings of arcs from `u` to `v`, from recorded flows.
    pub fn class_flow(&self, graph: &RotorGraph, u: VertexId, v: VertexId) -> Option<BigUint> {
        let flows = self.flow_counts.as_ref()?;
        let mut total = BigUint::from(0u32);
        for (a, arc) in graph.arcs() {
            if arc.tail == u && arc.head == v {
                total += flows[a.index()];
            }
        }
        Some(total)
    }
}

/// Iterate routing steps until a sink or the cap. Finite on stopping
/// graphs; on other inputs the caller supplies a cap.
pub fn run_maximal_walk(
    graph: &RotorGraph,
    state: &ParticleState,
    options: &WalkOptions,
) -> WalkOutcome {
    let mut config = state.config.clone();
    let mut pos = state.position;
    let mut steps: u64 = 0;
    let mut flows = options.record_flows.then(|| vec![0u64; graph.arc_count()]);
    let mut trace = options.record_trace.then(|| vec![pos]);
    while graph.is_plain(pos) {
        if let Some(cap) = options.cap {
            if steps >= cap {
                return WalkOutcome {
                    final_config: config,
                    exit: None,
                    steps: ExtendedCount::from(steps),
                    flow_counts: flows,
                    trace,
                };
            }
        }
        let a = config.arc(pos);
        if let Some(f) = flows.as_mut() {
            f[a.index()] += 1;
        }
        config.turn(graph, pos);
        pos = graph.head(a);
        steps += 1;
        if let Some(t) = trace.as_mut() {
            t.push(pos);
        }
    }
    WalkOutcome {
        final_config: config,
        exit: Some(pos),
        steps: ExtendedCount::from(steps),
        flow_counts: flows,
        trace,
    }
}

/// How `destination_forest_by_pushing` picks the next cycle to push.
#[derive(Clone, Debug)]
pub enum PushOrder {
    FirstFound,
    LowestVertex,
    Random(u64),
}

/// A directed cycle of the graph induced by the configuration, if any.
/// Every vertex has out-degree at most one in that graph, so following the
/// configured arcs from each vertex finds all cycles.
pub fn find_cycle(graph: &RotorGraph, config: &RotorConfig) -> Option<Vec<VertexId>> {
    find_cycle_from(graph, config, graph.vertices())
}

fn find_cycle_from(
    graph: &RotorGraph,
    config: &RotorConfig,
    starts: impl Iterator<Item = VertexId>,
) -> Option<Vec<VertexId>> {
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut mark = vec![0u8; graph.vertex_count()];
    for s in starts {
        if mark[s.index()] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut u = s;
        loop {
            if graph.is_sink(u) || mark[u.index()] == 2 {
                break;
            }
            if mark[u.index()] == 1 {
                let at = path.iter().position(|w| *w == u).unwrap();
                return Some(path[at..].to_vec());
            }
            mark[u.index()] = 1;
            path.push(u);
            u = graph.head(config.arc(u));
        }
        for w in path {
            mark[w.index()] = 2;
        }
    }
    None
}

/// Turn the rotor simultaneously at every vertex of a directed cycle that
/// lies in the configuration.
pub fn cycle_push(
    graph: &RotorGraph,
    config: &RotorConfig,
    cycle: &[VertexId],
) -> Result<RotorConfig, WalkError> {
    for (i, &u) in cycle.iter().enumerate() {
        let next = cycle[(i + 1) % cycle.len()];
        if graph.is_sink(u) || graph.head(config.arc(u)) != next {
            return Err(WalkError::CycleNotInConfig);
        }
    }
    let mut pushed = config.clone();
    for &u in cycle {
        pushed.turn(graph, u);
    }
    Ok(pushed)
}

/// Maximal cycle pushing: the unique acyclic configuration with the same
/// exit pattern. The push order does not change the result; `push_cap`
/// guards against non-stopping inputs.
pub fn destination_forest_by_pushing(
    graph: &RotorGraph,
    config: &RotorConfig,
    order: &PushOrder,
    push_cap: u64,
) -> Result<RotorConfig, WalkError> {
    let mut current = config.clone();
    let mut rng = match order {
        PushOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    for _ in 0..push_cap {
        let cycle = match order {
            PushOrder::FirstFound => find_cycle(graph, &current),
            PushOrder::LowestVertex => {
                let mut ids: Vec<VertexId> = graph.vertices().collect();
                ids.sort();
                find_cycle_from(graph, &current, ids.into_iter())
            }
            PushOrder::Random(_) => {
                let rng = rng.as_mut().unwrap();
                let mut ids: Vec<VertexId> = graph.vertices().collect();
                for i in (1..ids.len()).rev() {
                    ids.swap(i, rng.gen_range(0..=i));
                }
                find_cycle_from(graph, &current, ids.into_iter())
            }
        };
        match cycle {
            None => return Ok(current),
            Some(c) => current = cycle_push(graph, &current, &c)?,
        }
    }
    Err(WalkError::CapExhausted)
}

/// Exit sink of every vertex under an acyclic configuration, by memoized
/// pointer chasing.
pub fn exit_pattern_from_acyclic(
    graph: &RotorGraph,
    config: &RotorConfig,
) -> Result<Vec<VertexId>, WalkError> {
    if find_cycle(graph, config).is_some() {
        return Err(WalkError::ConfigCyclic);
    }
    let n = graph.vertex_count();
    let mut exit: Vec<Option<VertexId>> = vec![None; n];
    for v in graph.vertices() {
        if exit[v.index()].is_some() {
            continue;
        }
        let mut chain = Vec::new();
        let mut u = v;
        let sink = loop {
            if graph.is_sink(u) {
                break u;
            }
            if let Some(s) = exit[u.index()] {
                break s;
            }
            chain.push(u);
            u = graph.head(config.arc(u));
        };
        for w in chain {
            exit[w.index()] = Some(sink);
        }
        exit[v.index()] = Some(sink);
    }
    Ok(exit.into_iter().map(|e| e.unwrap()).collect())
}

/// Walk-step bound for stopping graphs: |V| * prod |A+(u)|; useful as a
/// safe cap for oracles.
pub fn walk_step_bound(graph: &RotorGraph) -> BigUint {
    let mut bound = BigUint::from(graph.vertex_count());
    for u in graph.plain_vertices() {
        bound *= BigUint::from(graph.out_degree(u) as u64);
    }
    bound
}

/// `walk_step_bound` clamped into `u64` for use as a simulation cap.
pub fn clamped_step_bound(graph: &RotorGraph) -> u64 {
    let bound = walk_step_bound(graph);
    bound.try_into().unwrap_or(u64::MAX)
}

impl From<GraphError> for WalkError {
    fn from(e: GraphError) -> Self {
        WalkError::Graph(e)
    }
}
