//! Fast paths for simple tree-like graphs: rotor-orbit distances, the
//! min-plus propagation rule replacing the revolving routine, all-vertex
//! binary solving, the root-maximal strategy, and access flows.

use crate::count::{ExtendedCount, Finite, Infinite};
use crate::flows::{tree_index, FlowError, ReturnFlowTable, RoutineResult};
use crate::games::{GameError, GameSpec, Owner, Strategy};
use crate::graph::{ArcId, RotorConfig, RotorGraph, VertexId};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;

/// Steps from `a` to `b` under the rotor order at `u`.
pub fn rotor_distance(graph: &RotorGraph, u: VertexId, a: ArcId, b: ArcId) -> Result<usize, FlowError> {
    if graph.tail(a) != u || graph.tail(b) != u {
        return Err(FlowError::EdgeNotInTree(u, graph.head(a)));
    }
    let len = graph.out_degree(u);
    let pa = graph.rotor_position(a);
    let pb = graph.rotor_position(b);
    Ok((pb + len - pa) % len)
}

/// 1 when `b` is met no later than `c` while turning from `a`.
pub fn b_operator(
    graph: &RotorGraph,
    u: VertexId,
    a: ArcId,
    b: ArcId,
    c: ArcId,
) -> Result<bool, FlowError> {
    Ok(rotor_distance(graph, u, a, b)? <= rotor_distance(graph, u, a, c)?)
}

fn b01(graph: &RotorGraph, u: VertexId, a: ArcId, b: ArcId, c: ArcId) -> u64 {
    u64::from(b_operator(graph, u, a, b, c).expect("arcs share the tail"))
}

/// The unique arc from `u` to `v` in a simple graph.
pub fn arc_to(graph: &RotorGraph, u: VertexId, v: VertexId) -> Option<ArcId> {
    graph.rotor_order(u).iter().copied().find(|a| graph.head(*a) == v)
}

/// First arc with minimal return flow in rotor order from `start`; `None`
/// when every slot is infinite.
fn first_argmin_from(
    graph: &RotorGraph,
    u: VertexId,
    start: ArcId,
    r_of: &dyn Fn(usize) -> Option<ExtendedCount>,
) -> Option<(ArcId, ExtendedCount)> {
    let len = graph.out_degree(u);
    let mut best: Option<(ArcId, ExtendedCount)> = None;
    let mut a = start;
    for _ in 0..len {
        let slot = graph.arc_neighbor_slot(a);
        if let Some(r) = r_of(slot) {
            if r.is_finite() && best.as_ref().map_or(true, |(_, b)| r < *b) {
                best = Some((a, r));
            }
        }
        a = graph.theta_fast(a);
    }
    best
}

/// Destination and flows at a simple vertex straight from the return
/// flows: the destination is the first minimal entry in rotor order from
/// `start`, and every class flow is a B-corrected copy of its value.
pub fn flows_from_return_flows_simple(
    graph: &RotorGraph,
    u: VertexId,
    start: ArcId,
    r: &[ExtendedCount],
) -> Result<RoutineResult, FlowError> {
    assert_eq!(r.len(), graph.out_neighbors(u).len());
    let lookup = |slot: usize| Some(r[slot].clone());
    let (dest, r_min) = first_argmin_from(graph, u, start, &lookup)
        .ok_or(FlowError::AllInfiniteReturnFlows(u))?;
    let r_min = r_min.as_finite().expect("argmin is finite").clone();
    let flows = (0..r.len())
        .map(|slot| {
            let w_arc = graph.rotor_order(u)[slot_position(graph, u, slot)];
            let mut f = &r_min - BigUint::from(b01(graph, u, start, dest, w_arc));
            if graph.arc_neighbor_slot(w_arc) == graph.arc_neighbor_slot(dest) {
                f += BigUint::one();
            }
            Finite(f)
        })
        .collect();
    Ok(RoutineResult { last_arc: dest, flows })
}

/// Arc position of the given out-neighbour slot; simple graphs have a
/// one-to-one slot/arc correspondence.
fn slot_position(graph: &RotorGraph, u: VertexId, slot: usize) -> usize {
    graph
        .rotor_order(u)
        .iter()
        .position(|a| graph.arc_neighbor_slot(*a) == slot)
        .expect("every slot holds an arc")
}

/// Min-plus propagation of the return flow of `(u,v)` over `v`'s other
/// out-edges, without running the routine.
pub fn propagate_return_flow_simple(
    graph: &RotorGraph,
    config: &RotorConfig,
    table: &ReturnFlowTable,
    u: VertexId,
    v: VertexId,
) -> Result<ExtendedCount, FlowError> {
    if !graph.has_arc_between(u, v) {
        return Err(FlowError::EdgeNotInTree(u, v));
    }
    let back = match arc_to(graph, v, u) {
        None => return Ok(ExtendedCount::one()),
        Some(arc) => arc,
    };
    let mut best = Infinite;
    for &a in graph.rotor_order(v) {
        let w = graph.head(a);
        if w == u {
            continue;
        }
        let r = table
            .get(v, w)
            .cloned()
            .ok_or(FlowError::MissingTableEntry(v, w))?;
        let candidate = r.add_u64(b01(graph, v, config.arc(v), back, a));
        if candidate < best {
            best = candidate;
        }
    }
    Ok(best)
}

/// Incoming return flows of a simple vertex, through the shared
/// destination arc plus one extra min-plus evaluation.
pub struct SimpleRetroResult {
    pub destination: ArcId,
    pub incoming: Vec<(VertexId, ExtendedCount)>,
    /// Full min-plus evaluations spent (at most two).
    pub eq_evals: u32,
}

pub fn retropropagate_simple(
    graph: &RotorGraph,
    config: &RotorConfig,
    table: &ReturnFlowTable,
    v: VertexId,
) -> Result<SimpleRetroResult, FlowError> {
    let lookup = |slot: usize| {
        let w = graph.out_neighbors(v)[slot];
        table.get(v, w).cloned()
    };
    for &w in graph.out_neighbors(v) {
        if table.get(v, w).is_none() {
            return Err(FlowError::MissingTableEntry(v, w));
        }
    }
    let (dest, r_min) = first_argmin_from(graph, v, config.arc(v), &lookup)
        .ok_or(FlowError::AllInfiniteReturnFlows(v))?;
    let w0 = graph.head(dest);
    let mut eq_evals = 1; // the shared destination scan
    let mut incoming = Vec::new();
    for &z in graph.in_neighbors(v) {
        if graph.is_sink(z) {
            continue;
        }
        let flow = if z == w0 {
            eq_evals += 1;
            propagate_return_flow_simple(graph, config, table, z, v)?
        } else {
            match arc_to(graph, v, z) {
                Some(back) => r_min.add_u64(b01(graph, v, config.arc(v), back, dest)),
                None => ExtendedCount::one(),
            }
        };
        incoming.push((z, flow));
    }
    Ok(SimpleRetroResult { destination: dest, incoming, eq_evals })
}

#[derive(Clone, Debug, Default)]
pub struct SimpleCounters {
    pub eq_evals: Vec<u32>,
}

impl SimpleCounters {
    pub fn max_retro_evals(&self) -> u32 {
        self.eq_evals.iter().copied().max().unwrap_or(0)
    }
}

pub struct SimpleDestinationForest {
    pub forest: RotorConfig,
    pub table: ReturnFlowTable,
    /// Min-plus evaluations during retropropagation, per vertex.
    pub counters: SimpleCounters,
}

/// Destination forest on a stopping simple tree-like graph using only
/// min-plus propagation: no divisions, linear in the vertex count.
pub fn destination_forest_simple(
    graph: &RotorGraph,
    config: &RotorConfig,
) -> Result<SimpleDestinationForest, FlowError> {
    if !graph.is_simple() {
        return Err(FlowError::NotTreeLike);
    }
    if !graph.is_stopping() {
        return Err(FlowError::NotStopping);
    }
    let root = graph
        .vertices()
        .next()
        .expect("graph has vertices");
    let index = tree_index(graph, root)?;
    let mut table = ReturnFlowTable::new();
    let mut counters = SimpleCounters { eq_evals: vec![0; graph.vertex_count()] };
    for u in graph.plain_vertices() {
        for &w in graph.out_neighbors(u) {
            if graph.is_sink(w) {
                table.insert(u, w, ExtendedCount::one());
            }
        }
    }
    for &(p, c) in index.edges.iter().rev() {
        if graph.is_sink(p) || !graph.has_arc_between(p, c) || table.contains(p, c) {
            continue;
        }
        let r = propagate_return_flow_simple(graph, config, &table, p, c)?;
        table.insert(p, c, r);
    }
    let mut forest = RotorConfig::empty(graph);
    for &u in &index.order {
        if graph.is_sink(u) {
            continue;
        }
        let retro = retropropagate_simple(graph, config, &table, u)?;
        counters.eq_evals[u.index()] = retro.eq_evals;
        forest.set(graph, u, retro.destination)?;
        for (w, flow) in retro.incoming {
            if !table.contains(w, u) {
                table.insert(w, u, flow);
            }
        }
    }
    Ok(SimpleDestinationForest { forest, table, counters })
}

fn require_simple_game(game: &GameSpec) -> Result<(), GameError> {
    if !game.graph.is_simple() || !game.graph.has_tree_shadow() {
        return Err(GameError::NotTreeLike);
    }
    if !game.graph.is_stopping() {
        return Err(GameError::Flow(FlowError::NotStopping));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeOpt {
    value: bool,
    flow: ExtendedCount,
}

/// Anchor arc for scans at a vertex: the fixed configuration on random
/// vertices, the first rotor arc on player vertices.
fn anchor(game: &GameSpec, v: VertexId) -> ArcId {
    match game.owner(v) {
        Owner::Random => game.fixed.arc(v),
        _ => game.graph.rotor_order(v)[0],
    }
}

/// Optimal value and return flow of the edge `(parent, v)` from the child
/// summaries, excluding `exclude` from the candidate children.
fn simple_edge_opt(
    game: &GameSpec,
    opt: &BTreeMap<(VertexId, VertexId), EdgeOpt>,
    parent: Option<VertexId>,
    v: VertexId,
    exclude: Option<VertexId>,
) -> Result<EdgeOpt, GameError> {
    let graph = &game.graph;
    if graph.is_sink(v) {
        return Ok(EdgeOpt { value: game.sink_value(v) != 0, flow: ExtendedCount::one() });
    }
    let back = parent.and_then(|p| arc_to(graph, v, p));
    let start = anchor(game, v);
    let candidates: Vec<(ArcId, &EdgeOpt)> = {
        let mut list = Vec::new();
        let mut a = start;
        for _ in 0..graph.out_degree(v) {
            let w = graph.head(a);
            if Some(w) != parent && Some(w) != exclude {
                let s = opt
                    .get(&(v, w))
                    .ok_or(GameError::Flow(FlowError::MissingTableEntry(v, w)))?;
                list.push((a, s));
            }
            a = graph.theta_fast(a);
        }
        list
    };
    let min_flow = candidates
        .iter()
        .map(|(_, s)| s.flow.clone())
        .min()
        .unwrap_or(Infinite);
    match game.owner(v) {
        Owner::Random => {
            // Destination: first minimal-flow candidate in rotor order.
            let dest = candidates
                .iter()
                .find(|(_, s)| s.flow == min_flow && s.flow.is_finite());
            match dest {
                None => Ok(EdgeOpt {
                    value: false,
                    flow: if back.is_some() { Infinite } else { ExtendedCount::one() },
                }),
                Some((dest_arc, s)) => {
                    let flow = match back {
                        Some(b) => s.flow.add_u64(b01(graph, v, start, b, *dest_arc)),
                        None => ExtendedCount::one(),
                    };
                    Ok(EdgeOpt { value: s.value, flow })
                }
            }
        }
        owner => {
            let good = owner == Owner::Max;
            let winner = candidates
                .iter()
                .find(|(_, s)| s.flow == min_flow && s.flow.is_finite() && s.value == good);
            match winner {
                Some((_, s)) => Ok(EdgeOpt {
                    value: good,
                    flow: if back.is_some() { s.flow.clone() } else { ExtendedCount::one() },
                }),
                None => Ok(EdgeOpt {
                    value: !good,
                    flow: match (back.is_some(), &min_flow) {
                        (false, _) => ExtendedCount::one(),
                        (true, Infinite) => Infinite,
                        (true, Finite(_)) => min_flow.add_u64(1),
                    },
                }),
            }
        }
    }
}

/// Optimal values of every start vertex of a binary game on a simple
/// tree-like graph, in linear time overall. MIN-owned vertices are
/// handled by swapping the roles of the two values, which also covers the
/// two-player binary variant.
pub fn binary_values_all_vertices(game: &GameSpec) -> Result<Vec<bool>, GameError> {
    require_simple_game(game)?;
    if !game.values_are_binary() {
        return Err(GameError::NonBinaryValues);
    }
    let graph = &game.graph;
    let root = graph.vertices().next().expect("graph has vertices");
    let index = tree_index(graph, root)?;
    let mut opt: BTreeMap<(VertexId, VertexId), EdgeOpt> = BTreeMap::new();
    // Leafward pass over edges pointing away from the root.
    for &(p, c) in index.edges.iter().rev() {
        if graph.is_sink(p) || !graph.has_arc_between(p, c) {
            continue;
        }
        let e = simple_edge_opt(game, &opt, Some(p), c, None)?;
        opt.insert((p, c), e);
    }
    // Rootward pass: one shared evaluation per vertex plus one make-up.
    for &v in &index.order {
        if graph.is_sink(v) {
            continue;
        }
        let shared = simple_edge_opt(game, &opt, None, v, None)?;
        let w0 = shared_destination(game, &opt, v)?;
        for &z in graph.in_neighbors(v) {
            if graph.is_sink(z) || opt.contains_key(&(z, v)) {
                continue;
            }
            let e = if Some(z) == w0 {
                simple_edge_opt(game, &opt, Some(z), v, Some(z))?
            } else {
                reuse_shared(game, &opt, v, z, &shared, w0)?
            };
            opt.insert((z, v), e);
        }
    }
    // Fictive incoming edge per start vertex.
    let mut values = vec![false; graph.vertex_count()];
    for x in graph.vertices() {
        values[x.index()] = if graph.is_sink(x) {
            game.sink_value(x) != 0
        } else {
            simple_edge_opt(game, &opt, None, x, None)?.value
        };
    }
    Ok(values)
}

/// The child the shared rootward evaluation settles toward, if any.
fn shared_destination(
    game: &GameSpec,
    opt: &BTreeMap<(VertexId, VertexId), EdgeOpt>,
    v: VertexId,
) -> Result<Option<VertexId>, GameError> {
    let graph = &game.graph;
    let start = anchor(game, v);
    let lookup = |slot: usize| {
        let w = graph.out_neighbors(v)[slot];
        opt.get(&(v, w)).map(|s| s.flow.clone())
    };
    match game.owner(v) {
        Owner::Random => Ok(first_argmin_from(graph, v, start, &lookup).map(|(a, _)| graph.head(a))),
        owner => {
            let good = owner == Owner::Max;
            let mut best: Option<(VertexId, ExtendedCount, bool)> = None;
            let mut a = start;
            for _ in 0..graph.out_degree(v) {
                let w = graph.head(a);
                if let Some(s) = opt.get(&(v, w)) {
                    if s.flow.is_finite() {
                        let better = match &best {
                            None => true,
                            Some((_, bf, bv)) => {
                                s.flow < *bf || (s.flow == *bf && s.value == good && *bv != good)
                            }
                        };
                        if better {
                            best = Some((w, s.flow.clone(), s.value));
                        }
                    }
                }
                a = graph.theta_fast(a);
            }
            Ok(best.map(|(w, _, _)| w))
        }
    }
}

/// Incoming summary for `z != w0`, reusing the shared evaluation.
fn reuse_shared(
    game: &GameSpec,
    opt: &BTreeMap<(VertexId, VertexId), EdgeOpt>,
    v: VertexId,
    z: VertexId,
    shared: &EdgeOpt,
    w0: Option<VertexId>,
) -> Result<EdgeOpt, GameError> {
    let graph = &game.graph;
    let back = arc_to(graph, v, z);
    let value = shared.value;
    let flow = match (back, w0) {
        (None, _) => ExtendedCount::one(),
        (Some(_), None) => Infinite,
        (Some(b), Some(w0)) => {
            let w0_arc = arc_to(graph, v, w0).expect("destination is an out-neighbour");
            let dest_flow = opt.get(&(v, w0)).expect("destination summarized").flow.clone();
            match game.owner(v) {
                Owner::Random => dest_flow.add_u64(b01(graph, v, anchor(game, v), b, w0_arc)),
                Owner::Max | Owner::Min => {
                    if value == (game.owner(v) == Owner::Max) {
                        dest_flow
                    } else {
                        dest_flow.add_u64(1)
                    }
                }
            }
        }
    };
    Ok(EdgeOpt { value, flow })
}

/// Strategy pointing every owned vertex toward the root when an arc back
/// exists: it maximizes every root-edge return flow simultaneously.
pub fn sigma_max(game: &GameSpec, u0: VertexId) -> Result<Strategy, GameError> {
    require_simple_game(game)?;
    let graph = &game.graph;
    let index = tree_index(graph, u0)?;
    let mut strategy = RotorConfig::empty(graph);
    for v in graph.plain_vertices() {
        if game.owner(v) == Owner::Random {
            continue;
        }
        let toward_root = index.parent[v.index()].and_then(|p| arc_to(graph, v, p));
        let arc = toward_root.unwrap_or_else(|| graph.rotor_order(v)[0]);
        strategy.set(graph, v, arc)?;
    }
    Ok(strategy)
}

pub type AccessFlowTable = BTreeMap<(VertexId, VertexId), ExtendedCount>;

/// Access flows of all edges directed away from `u0`: the best number of
/// visits the player can force through each edge when its far end bounces.
/// Positive access flow is exactly reachability.
pub fn access_flows(game: &GameSpec, u0: VertexId) -> Result<AccessFlowTable, GameError> {
    require_simple_game(game)?;
    let graph = &game.graph;
    let index = tree_index(graph, u0)?;
    let mut acc: AccessFlowTable = BTreeMap::new();
    if graph.is_sink(u0) {
        return Ok(acc);
    }
    // Return flows of away edges under the root-maximal strategy.
    let smax = sigma_max(game, u0)?;
    let config = game.fixed.overlaid(&smax);
    let mut rmax = ReturnFlowTable::new();
    for u in graph.plain_vertices() {
        for &w in graph.out_neighbors(u) {
            if graph.is_sink(w) {
                rmax.insert(u, w, ExtendedCount::one());
            }
        }
    }
    for &(p, c) in index.edges.iter().rev() {
        if graph.is_sink(p) || !graph.has_arc_between(p, c) || rmax.contains(p, c) {
            continue;
        }
        let r = propagate_return_flow_simple(graph, &config, &rmax, p, c)?;
        rmax.insert(p, c, r);
    }
    // Access flows around the start vertex.
    let start_anchor = config.get(u0);
    for &vi in graph.out_neighbors(u0) {
        let vi_arc = arc_to(graph, u0, vi).expect("simple out-arc");
        let mut best = Infinite;
        for &vj in graph.out_neighbors(u0) {
            if vj == vi {
                continue;
            }
            let r = rmax
                .get(u0, vj)
                .cloned()
                .ok_or(GameError::Flow(FlowError::MissingTableEntry(u0, vj)))?;
            let candidate = match (game.owner(u0), start_anchor) {
                (Owner::Random, Some(a)) => {
                    let vj_arc = arc_to(graph, u0, vj).expect("simple out-arc");
                    r.sub_finite(&BigUint::from(b01(graph, u0, a, vj_arc, vi_arc)))
                }
                _ => r,
            };
            if candidate < best {
                best = candidate;
            }
        }
        acc.insert((u0, vi), best);
    }
    // Push access flows toward the leaves in BFS edge order.
    for &(u, v) in &index.edges {
        if graph.is_sink(v) {
            continue;
        }
        let upstream = if u == u0 {
            acc.get(&(u0, v)).cloned()
        } else {
            acc.get(&(u, v)).cloned()
        };
        let upstream = match upstream {
            Some(a) => a,
            None => continue, // no arc from the parent side: unreachable
        };
        let back = arc_to(graph, v, u);
        for &w in graph.out_neighbors(v) {
            if w == u {
                continue;
            }
            let w_arc = arc_to(graph, v, w).expect("simple out-arc");
            // Bound through the siblings' return flows.
            let mut best = Infinite;
            for &x in graph.out_neighbors(v) {
                if x == w || x == u {
                    continue;
                }
                let r = rmax
                    .get(v, x)
                    .cloned()
                    .ok_or(GameError::Flow(FlowError::MissingTableEntry(v, x)))?;
                let candidate = match game.owner(v) {
                    Owner::Random => {
                        let x_arc = arc_to(graph, v, x).expect("simple out-arc");
                        r.sub_finite(&BigUint::from(b01(graph, v, config.arc(v), x_arc, w_arc)))
                    }
                    _ => r,
                };
                if candidate < best {
                    best = candidate;
                }
            }
            // Bound through the parent-side supply.
            let parent_bound = match (game.owner(v), &back) {
                (Owner::Random, Some(b)) => {
                    if upstream.is_zero() {
                        ExtendedCount::zero()
                    } else {
                        upstream.sub_finite(&BigUint::from(b01(
                            graph,
                            v,
                            config.arc(v),
                            *b,
                            w_arc,
                        )))
                    }
                }
                (_, Some(_)) => upstream.clone(),
                (_, None) => {
                    // No way back: a single foray, bounded by the siblings.
                    if upstream.is_zero() { ExtendedCount::zero() } else { Infinite }
                }
            };
            let flow = best.min(parent_bound);
            acc.insert((v, w), flow);
        }
    }
    Ok(acc)
}

/// One-player integer game on a simple tree-like graph in linear time:
/// the best value among sinks with positive access flow.
pub fn one_player_integer_simple(game: &GameSpec, u0: VertexId) -> Result<u64, GameError> {
    if !game.is_one_player() {
        return Err(GameError::MinVerticesInOnePlayerGame);
    }
    require_simple_game(game)?;
    if game.graph.is_sink(u0) {
        return Ok(game.sink_value(u0));
    }
    let acc = access_flows(game, u0)?;
    let index = tree_index(&game.graph, u0)?;
    let mut best = 0u64;
    for s in game.graph.sinks() {
        let reachable = match index.parent[s.index()] {
            Some(p) => acc
                .get(&(p, s))
                .map(|a| !a.is_zero())
                .unwrap_or(false),
            None => false,
        };
        if reachable {
            best = best.max(game.sink_value(s));
        }
    }
    Ok(best)
}
