//! Return flows on tree-like multigraphs: subtree construction, the
//! revolving routine and its division-based variant, propagation and
//! retropropagation, and the linear destination-forest computation.

use crate::count::{ExtendedCount, Finite, Infinite};
use crate::graph::{
    ArcId, GraphError, RotorConfig, RotorGraph, RotorGraphBuilder, VertexId,
};
use crate::walk::{clamped_step_bound, run_maximal_walk, ParticleState, WalkOptions};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowError {
    NotTreeLike,
    NotStopping,
    EdgeNotInTree(VertexId, VertexId),
    AllInfiniteReturnFlows(VertexId),
    InvalidReturnFlow(VertexId),
    MissingTableEntry(VertexId, VertexId),
    OracleCapExhausted,
    Graph(GraphError),
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::NotTreeLike => write!(f, "graph is not tree-like"),
            FlowError::NotStopping => write!(f, "graph is not stopping"),
            FlowError::EdgeNotInTree(u, v) => write!(f, "({u:?},{v:?}) is not a tree arc"),
            FlowError::AllInfiniteReturnFlows(u) => {
                write!(f, "all return flows at {u:?} are infinite")
            }
            FlowError::InvalidReturnFlow(u) => {
                write!(f, "finite return flow below one at {u:?}")
            }
            FlowError::MissingTableEntry(u, v) => {
                write!(f, "return flow of ({u:?},{v:?}) not yet computed")
            }
            FlowError::OracleCapExhausted => {
                write!(f, "simulation cap exhausted on a stopping subtree")
            }
            FlowError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FlowError {}

impl From<GraphError> for FlowError {
    fn from(e: GraphError) -> Self {
        FlowError::Graph(e)
    }
}

/// Rooted view of the undirected shadow of a tree-like graph. Vertex and
/// edge orders come from a BFS whose neighbour order follows first
/// incident arcs, so everything downstream is deterministic.
#[derive(Clone, Debug)]
pub struct TreeIndex {
    pub root: VertexId,
    pub parent: Vec<Option<VertexId>>,
    pub order: Vec<VertexId>,
    /// Away-directed shadow edges (parent, child), in BFS discovery order.
    pub edges: Vec<(VertexId, VertexId)>,
    pub children: Vec<Vec<VertexId>>,
}

pub fn tree_index(graph: &RotorGraph, root: VertexId) -> Result<TreeIndex, FlowError> {
    if !graph.has_tree_shadow() {
        return Err(FlowError::NotTreeLike);
    }
    let n = graph.vertex_count();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[root.index()] = true;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in graph.neighbors(u) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                parent[w.index()] = Some(u);
                children[u.index()].push(w);
                edges.push((u, w));
                queue.push_back(w);
            }
        }
    }
    Ok(TreeIndex { root, parent, order, edges, children })
}

/// Return flows of directed tree edges. Entries exist only for edges whose
/// tail is plain and that carry at least one arc; a sink tail reads as 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReturnFlowTable {
    entries: BTreeMap<(VertexId, VertexId), ExtendedCount>,
}

impl ReturnFlowTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId, r: ExtendedCount) {
        self.entries.insert((u, v), r);
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> Option<&ExtendedCount> {
        self.entries.get(&(u, v))
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.entries.contains_key(&(u, v))
    }

    /// Table lookup with the sink convention applied.
    pub fn flow(&self, graph: &RotorGraph, u: VertexId, v: VertexId) -> Option<ExtendedCount> {
        if graph.is_sink(u) {
            return Some(ExtendedCount::zero());
        }
        self.get(u, v).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(VertexId, VertexId), &ExtendedCount)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Output of a revolving routine at a vertex: the last arc used (the
/// destination-forest arc) and, per out-neighbour slot, the number of
/// crossings including the final settling one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutineResult {
    pub last_arc: ArcId,
    pub flows: Vec<ExtendedCount>,
}

impl RoutineResult {
    pub fn flow_to(&self, graph: &RotorGraph, u: VertexId, w: VertexId) -> Option<&ExtendedCount> {
        graph.neighbor_slot(u, w).map(|s| &self.flows[s])
    }
}

fn check_routine_inputs(
    graph: &RotorGraph,
    u: VertexId,
    r: &[ExtendedCount],
) -> Result<(), FlowError> {
    assert_eq!(r.len(), graph.out_neighbors(u).len(), "one entry per out-neighbour");
    if r.iter().all(|c| c.is_infinite()) {
        return Err(FlowError::AllInfiniteReturnFlows(u));
    }
    if r.iter().any(|c| matches!(c, Finite(v) if v.is_zero())) {
        return Err(FlowError::InvalidReturnFlow(u));
    }
    Ok(())
}

/// Step-by-step revolving routine. Starting from `start`, the rotor turns
/// while the return flow ahead exceeds one; the arc it halts on is the
/// destination-forest arc. Runs in time proportional to the flow values,
/// so it doubles as an oracle for the division-based variant.
pub fn revolving_routine(
    graph: &RotorGraph,
    u: VertexId,
    start: ArcId,
    r: &[ExtendedCount],
) -> Result<RoutineResult, FlowError> {
    check_routine_inputs(graph, u, r)?;
    let mut remaining: Vec<ExtendedCount> = r.to_vec();
    let mut flows = vec![BigUint::zero(); r.len()];
    let mut a = start;
    loop {
        let slot = graph.arc_neighbor_slot(a);
        if remaining[slot].is_one() {
            break;
        }
        remaining[slot].dec();
        flows[slot] += 1u32;
        a = graph.theta_fast(a);
    }
    let dest = graph.arc_neighbor_slot(a);
    flows[dest] += 1u32; // the settling crossing
    Ok(RoutineResult {
        last_arc: a,
        flows: flows.into_iter().map(Finite).collect(),
    })
}

/// Division-based revolving routine: skip whole rotor turns at once, then
/// finish with at most a couple of plain turns. Output contract identical
/// to [`revolving_routine`].
pub fn improved_revolving_routine(
    graph: &RotorGraph,
    u: VertexId,
    start: ArcId,
    r: &[ExtendedCount],
) -> Result<RoutineResult, FlowError> {
    check_routine_inputs(graph, u, r)?;
    let mults: Vec<u64> = (0..r.len()).map(|s| graph.multiplicity_at(u, s)).collect();
    // Full turns survived: each turn consumes m(v) units at v and the
    // routine halts on seeing a remaining value of one, hence the -1.
    let mut turns: Option<BigUint> = None;
    for (slot, count) in r.iter().enumerate() {
        if let Finite(v) = count {
            let q = (v - BigUint::one()) / BigUint::from(mults[slot]);
            turns = Some(match turns {
                None => q,
                Some(t) => t.min(q),
            });
        }
    }
    let turns = turns.expect("checked: at least one finite entry");
    let mut remaining: Vec<ExtendedCount> = r
        .iter()
        .enumerate()
        .map(|(slot, count)| count.sub_finite(&(&turns * BigUint::from(mults[slot]))))
        .collect();
    let mut partial = vec![0u64; r.len()];
    let mut a = start;
    let mut guard = 0usize;
    loop {
        let slot = graph.arc_neighbor_slot(a);
        if remaining[slot].is_one() {
            break;
        }
        remaining[slot].dec();
        partial[slot] += 1;
        a = graph.theta_fast(a);
        guard += 1;
        assert!(
            guard <= 2 * graph.out_degree(u) + 2,
            "revolving finish must halt within two turns"
        );
    }
    let dest = graph.arc_neighbor_slot(a);
    partial[dest] += 1;
    let flows = (0..r.len())
        .map(|slot| Finite(&turns * BigUint::from(mults[slot]) + BigUint::from(partial[slot])))
        .collect();
    Ok(RoutineResult { last_arc: a, flows })
}

/// Per-slot return flows of `u` read from a table, with the slot toward
/// `skip` (if any) replaced by infinity. Within the `(skip,u)`-subtree the
/// vertex `skip` bounces the particle back forever, which is exactly an
/// infinite return flow.
fn slot_flows_with_placeholder(
    graph: &RotorGraph,
    table: &ReturnFlowTable,
    u: VertexId,
    skip: Option<VertexId>,
) -> Result<Vec<ExtendedCount>, FlowError> {
    graph
        .out_neighbors(u)
        .iter()
        .map(|&w| {
            if Some(w) == skip {
                Ok(Infinite)
            } else {
                table
                    .get(u, w)
                    .cloned()
                    .ok_or(FlowError::MissingTableEntry(u, w))
            }
        })
        .collect()
}

/// Return flow of `(u,v)` from the return flows of `v`'s other out-edges.
/// Requires `r(v,w)` in the table for every out-neighbour `w != u` of `v`.
pub fn propagate_return_flow(
    graph: &RotorGraph,
    config: &RotorConfig,
    table: &ReturnFlowTable,
    u: VertexId,
    v: VertexId,
) -> Result<ExtendedCount, FlowError> {
    propagate_with_runs(graph, config, table, u, v).map(|(r, _)| r)
}

fn propagate_with_runs(
    graph: &RotorGraph,
    config: &RotorConfig,
    table: &ReturnFlowTable,
    u: VertexId,
    v: VertexId,
) -> Result<(ExtendedCount, u32), FlowError> {
    if !graph.has_arc_between(u, v) {
        return Err(FlowError::EdgeNotInTree(u, v));
    }
    if !graph.has_arc_between(v, u) {
        return Ok((ExtendedCount::one(), 0));
    }
    let r = slot_flows_with_placeholder(graph, table, v, Some(u))?;
    if r.iter().all(|c| c.is_infinite()) {
        return Ok((Infinite, 0));
    }
    let result = improved_revolving_routine(graph, v, config.arc(v), &r)?;
    let u_slot = graph.neighbor_slot(v, u).expect("checked arc v->u");
    Ok((result.flows[u_slot].add_u64(1), 1))
}

/// Everything retropropagation at `u` yields: the destination arc of `u`
/// and the return flows of all arcs entering `u`.
#[derive(Clone, Debug)]
pub struct RetroResult {
    pub destination: ArcId,
    pub incoming: Vec<(VertexId, ExtendedCount)>,
    /// Number of routine invocations spent (at most two).
    pub routine_runs: u32,
}

/// Compute the return flows of all arcs `(w,u)` from the return flows of
/// all out-edges of `u`, running the routine at most twice.
pub fn retropropagate(
    graph: &RotorGraph,
    config: &RotorConfig,
    table: &ReturnFlowTable,
    u: VertexId,
) -> Result<RetroResult, FlowError> {
    let r = slot_flows_with_placeholder(graph, table, u, None)?;
    let result = improved_revolving_routine(graph, u, config.arc(u), &r)?;
    let mut runs = 1;
    let v0 = graph.head(result.last_arc);
    let mut incoming = Vec::new();
    for &w in graph.in_neighbors(u) {
        if graph.is_sink(w) {
            continue;
        }
        let flow = if w == v0 {
            let (flow, extra) = propagate_with_runs(graph, config, table, w, u)?;
            runs += extra;
            flow
        } else if let Some(slot) = graph.neighbor_slot(u, w) {
            result.flows[slot].add_u64(1)
        } else {
            ExtendedCount::one()
        };
        incoming.push((w, flow));
    }
    Ok(RetroResult { destination: result.last_arc, incoming, routine_runs: runs })
}

/// Routine-invocation accounting for the destination-forest computation.
#[derive(Clone, Debug, Default)]
pub struct CdaCounters {
    pub routine_runs: Vec<u32>,
}

impl CdaCounters {
    pub fn max_per_vertex(&self) -> u32 {
        self.routine_runs.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct DestinationForest {
    pub forest: RotorConfig,
    pub table: ReturnFlowTable,
    pub counters: CdaCounters,
}

/// Complete destination computation on a stopping tree-like multigraph:
/// BFS from `root`, then return flows away from the root in reverse edge
/// order, then back toward the root vertex by vertex. Runs the revolving
/// routine at most three times per vertex.
pub fn compute_destination_forest(
    graph: &RotorGraph,
    config: &RotorConfig,
    root: VertexId,
) -> Result<DestinationForest, FlowError> {
    if !graph.is_stopping() {
        return Err(FlowError::NotStopping);
    }
    let index = tree_index(graph, root)?;
    let mut table = ReturnFlowTable::new();
    let mut counters = CdaCounters { routine_runs: vec![0; graph.vertex_count()] };
    // Arcs into a sink settle immediately.
    for u in graph.plain_vertices() {
        for &w in graph.out_neighbors(u) {
            if graph.is_sink(w) {
                table.insert(u, w, ExtendedCount::one());
            }
        }
    }
    // Phase 1: edges away from the root, reverse BFS order.
    for &(p, c) in index.edges.iter().rev() {
        if graph.is_sink(p) || !graph.has_arc_between(p, c) || table.contains(p, c) {
            continue;
        }
        let (r, runs) = propagate_with_runs(graph, config, &table, p, c)?;
        counters.routine_runs[c.index()] += runs;
        table.insert(p, c, r);
    }
    // Phase 2: vertices in BFS order; fills arcs toward the root and the
    // destination arc of every vertex.
    let mut forest = RotorConfig::empty(graph);
    for &u in &index.order {
        if graph.is_sink(u) {
            continue;
        }
        let retro = retropropagate(graph, config, &table, u)?;
        counters.routine_runs[u.index()] += retro.routine_runs;
        forest
            .set(graph, u, retro.destination)
            .expect("destination arc leaves u");
        for (w, flow) in retro.incoming {
            // Away-directed entries were already computed in phase 1; tree
            // children gain their toward-root entries here.
            if !table.contains(w, u) {
                table.insert(w, u, flow);
            }
        }
    }
    Ok(DestinationForest { forest, table, counters })
}

/// The `(u,v)`-subtree: the side of the tree containing `v`, with `u`
/// retained holding a single self-repeating arc toward `v`.
pub struct Subtree {
    pub graph: RotorGraph,
    pub config: RotorConfig,
    /// original vertex -> subtree vertex
    pub vertex_map: Vec<Option<VertexId>>,
    pub root: VertexId,
    pub kept_arc: ArcId,
}

pub fn build_subtree(
    graph: &RotorGraph,
    config: &RotorConfig,
    u: VertexId,
    v: VertexId,
) -> Result<Subtree, FlowError> {
    if !graph.has_arc_between(u, v) {
        return Err(FlowError::EdgeNotInTree(u, v));
    }
    let n = graph.vertex_count();
    let mut keep = vec![false; n];
    keep[v.index()] = true;
    let mut queue = VecDeque::from([v]);
    while let Some(w) = queue.pop_front() {
        for &x in graph.neighbors(w) {
            if x != u && !keep[x.index()] {
                keep[x.index()] = true;
                queue.push_back(x);
            }
        }
    }
    keep[u.index()] = true;
    let mut b = RotorGraphBuilder::new();
    let mut map: Vec<Option<VertexId>> = vec![None; n];
    for w in graph.vertices() {
        if keep[w.index()] {
            map[w.index()] = Some(b.add_vertex(graph.name(w), graph.role(w)));
        }
    }
    let kept_original = graph
        .rotor_order(u)
        .iter()
        .copied()
        .find(|a| graph.head(*a) == v)
        .expect("checked arc u->v");
    let mut arc_map: Vec<Option<ArcId>> = vec![None; graph.arc_count()];
    for (a, arc) in graph.arcs() {
        let inside = keep[arc.tail.index()] && keep[arc.head.index()];
        if !inside {
            continue;
        }
        if arc.tail == u && a != kept_original {
            continue;
        }
        arc_map[a.index()] = Some(b.add_arc(
            map[arc.tail.index()].unwrap(),
            map[arc.head.index()].unwrap(),
        ));
    }
    for w in graph.plain_vertices() {
        if !keep[w.index()] || w == u {
            continue;
        }
        let order: Vec<ArcId> = graph
            .rotor_order(w)
            .iter()
            .filter_map(|a| arc_map[a.index()])
            .collect();
        b.set_rotor_order(map[w.index()].unwrap(), order);
    }
    let kept_arc = arc_map[kept_original.index()].unwrap();
    let new_graph = b.finish()?;
    let mut new_config = RotorConfig::empty(&new_graph);
    for w in graph.plain_vertices() {
        if !keep[w.index()] {
            continue;
        }
        let arc = if w == u { kept_arc } else { arc_map[config.arc(w).index()].unwrap() };
        new_config.set(&new_graph, map[w.index()].unwrap(), arc)?;
    }
    Ok(Subtree {
        root: map[u.index()].unwrap(),
        graph: new_graph,
        config: new_config,
        vertex_map: map,
        kept_arc,
    })
}

/// Reference return flow: simulate the maximal walk in the `(u,v)`-subtree
/// and count crossings of the kept arc. Infinite exactly when the subtree
/// is not stopping.
pub fn return_flow_oracle(
    graph: &RotorGraph,
    config: &RotorConfig,
    u: VertexId,
    v: VertexId,
    cap: Option<u64>,
) -> Result<ExtendedCount, FlowError> {
    let sub = build_subtree(graph, config, u, v)?;
    if !sub.graph.is_stopping() {
        return Ok(Infinite);
    }
    let cap = cap.unwrap_or_else(|| clamped_step_bound(&sub.graph));
    let outcome = run_maximal_walk(
        &sub.graph,
        &ParticleState { config: sub.config.clone(), position: sub.root },
        &WalkOptions { cap: Some(cap), record_trace: false, record_flows: true },
    );
    if outcome.cap_hit() {
        return Err(FlowError::OracleCapExhausted);
    }
    let flows = outcome.flow_counts.expect("flows recorded");
    Ok(ExtendedCount::from(flows[sub.kept_arc.index()]))
}

/// Per-class crossing counts of the maximal walk started at `root`,
/// computed from the return-flow table in linear time. Classes the walk
/// never touches are absent.
pub fn walk_flow_profile(
    graph: &RotorGraph,
    config: &RotorConfig,
    forest: &DestinationForest,
    root: VertexId,
) -> Result<BTreeMap<(VertexId, VertexId), BigUint>, FlowError> {
    let index = tree_index(graph, root)?;
    let mut out: BTreeMap<(VertexId, VertexId), BigUint> = BTreeMap::new();
    if graph.is_sink(root) {
        return Ok(out);
    }
    // entries[c] = number of times the walk enters the subtree hanging at c
    // from its parent; on_path marks subtrees the walk finally settles in.
    struct Pending {
        vertex: VertexId,
        entries: BigUint,
        settles_inside: bool,
    }
    let r_root = slot_flows_with_placeholder(graph, &forest.table, root, None)?;
    let first = improved_revolving_routine(graph, root, config.arc(root), &r_root)?;
    let mut queue: VecDeque<Pending> = VecDeque::new();
    for (slot, &w) in graph.out_neighbors(root).iter().enumerate() {
        let flow = first.flows[slot]
            .as_finite()
            .cloned()
            .expect("walk from root is finite on stopping graphs");
        if flow.is_zero() {
            continue;
        }
        out.insert((root, w), flow.clone());
        if graph.is_plain(w) {
            queue.push_back(Pending {
                vertex: w,
                entries: flow,
                settles_inside: w == graph.head(first.last_arc),
            });
        }
    }
    while let Some(p) = queue.pop_front() {
        let c = p.vertex;
        let parent = index.parent[c.index()].expect("non-root vertex has a parent");
        let r = slot_flows_with_placeholder(graph, &forest.table, c, Some(parent))?;
        let (class_flows, settle_head): (Vec<BigUint>, Option<VertexId>) = if p.settles_inside {
            // Full subtree walk: routine with the parent side bouncing.
            let res = improved_revolving_routine(graph, c, config.arc(c), &r)?;
            let flows = res
                .flows
                .iter()
                .map(|f| f.as_finite().cloned().expect("settling subtree walk is finite"))
                .collect();
            (flows, Some(graph.head(res.last_arc)))
        } else {
            // Truncated: the walk leaves the subtree on its k-th exit
            // toward the parent, k being the entry count.
            let ps = graph
                .neighbor_slot(c, parent)
                .expect("a bouncing subtree needs an arc back to its parent");
            let m_p = graph.multiplicity_at(c, ps);
            let full_turns = (&p.entries - BigUint::one()) / BigUint::from(m_p);
            let into_turn = &p.entries - &full_turns * BigUint::from(m_p);
            let into_turn: u64 = into_turn.try_into().expect("remainder fits");
            let mut partial = vec![0u64; r.len()];
            let mut seen_parent = 0u64;
            let mut a = config.arc(c);
            loop {
                let slot = graph.arc_neighbor_slot(a);
                if slot == ps {
                    seen_parent += 1;
                    if seen_parent == into_turn {
                        partial[slot] += 1; // the final exit itself
                        break;
                    }
                }
                partial[slot] += 1;
                a = graph.theta_fast(a);
            }
            let flows = (0..r.len())
                .map(|slot| {
                    &full_turns * BigUint::from(graph.multiplicity_at(c, slot))
                        + BigUint::from(partial[slot])
                })
                .collect();
            (flows, None)
        };
        for (slot, &w) in graph.out_neighbors(c).iter().enumerate() {
            let flow = class_flows[slot].clone();
            if flow.is_zero() {
                continue;
            }
            out.insert((c, w), flow.clone());
            if w != parent && graph.is_plain(w) {
                queue.push_back(Pending {
                    vertex: w,
                    entries: flow,
                    settles_inside: settle_head == Some(w),
                });
            }
        }
    }
    Ok(out)
}
