//! One- and two-player rotor games on tree-like multigraphs: subtree
//! summaries, the optimal-strategy scan, bisection for integer values and
//! the alternative strategy sets.

use crate::count::{ExtendedCount, Finite, Infinite};
use crate::flows::{improved_revolving_routine, tree_index, FlowError, TreeIndex};
use crate::graph::{
    contract_sink_components, split_components, ArcId, GraphError, RotorConfig, RotorGraph,
    VertexId,
};
use crate::walk::{run_maximal_walk, ParticleState, WalkOptions};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Random,
    Max,
    Min,
}

/// A strategy is a partial rotor configuration on the owning player's
/// vertices.
pub type Strategy = RotorConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameError {
    OwnerOnSink(VertexId),
    FixedConfigOutsideRandom(VertexId),
    FixedConfigMissing(VertexId),
    MinVerticesInOnePlayerGame,
    NonBinaryValues,
    NotTreeLike,
    StartVertexMissing,
    Flow(FlowError),
    Graph(GraphError),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::OwnerOnSink(v) => write!(f, "sink {v:?} cannot be owned"),
            GameError::FixedConfigOutsideRandom(v) => {
                write!(f, "fixed configuration set on owned vertex {v:?}")
            }
            GameError::FixedConfigMissing(v) => {
                write!(f, "no fixed configuration on random vertex {v:?}")
            }
            GameError::MinVerticesInOnePlayerGame => {
                write!(f, "one-player solver on a game with MIN vertices")
            }
            GameError::NonBinaryValues => write!(f, "binary solver needs 0/1 sink values"),
            GameError::NotTreeLike => write!(f, "game graph is not tree-like"),
            GameError::StartVertexMissing => write!(f, "start vertex not in the graph"),
            GameError::Flow(e) => write!(f, "{e}"),
            GameError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GameError {}

impl From<FlowError> for GameError {
    fn from(e: FlowError) -> Self {
        GameError::Flow(e)
    }
}

impl From<GraphError> for GameError {
    fn from(e: GraphError) -> Self {
        GameError::Graph(e)
    }
}

/// A rotor game: sink values, vertex ownership, and the fixed rotor
/// configuration on the random vertices.
#[derive(Clone, Debug)]
pub struct GameSpec {
    pub graph: RotorGraph,
    pub owners: Vec<Owner>,
    pub sink_values: Vec<u64>,
    pub fixed: RotorConfig,
}

impl GameSpec {
    pub fn new(
        graph: RotorGraph,
        owners: Vec<Owner>,
        sink_values: Vec<u64>,
        fixed: RotorConfig,
    ) -> Result<Self, GameError> {
        assert_eq!(owners.len(), graph.vertex_count());
        assert_eq!(sink_values.len(), graph.vertex_count());
        for v in graph.vertices() {
            if graph.is_sink(v) && owners[v.index()] != Owner::Random {
                return Err(GameError::OwnerOnSink(v));
            }
        }
        for v in graph.plain_vertices() {
            match owners[v.index()] {
                Owner::Random => {
                    if !fixed.is_defined(v) {
                        return Err(GameError::FixedConfigMissing(v));
                    }
                }
                _ => {
                    if fixed.is_defined(v) {
                        return Err(GameError::FixedConfigOutsideRandom(v));
                    }
                }
            }
        }
        Ok(GameSpec { graph, owners, sink_values, fixed })
    }

    /// Zero-player view: everything random.
    pub fn zero_player(graph: RotorGraph, config: RotorConfig) -> Self {
        let n = graph.vertex_count();
        GameSpec {
            owners: vec![Owner::Random; n],
            sink_values: vec![0; n],
            fixed: config,
            graph,
        }
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.owners[v.index()]
    }

    pub fn owned_by(&self, owner: Owner) -> Vec<VertexId> {
        self.graph
            .plain_vertices()
            .filter(|v| self.owners[v.index()] == owner)
            .collect()
    }

    pub fn is_one_player(&self) -> bool {
        self.owned_by(Owner::Min).is_empty()
    }

    pub fn sink_value(&self, s: VertexId) -> u64 {
        self.sink_values[s.index()]
    }

    pub fn values_are_binary(&self) -> bool {
        self.graph.sinks().all(|s| self.sink_value(s) <= 1)
    }

    /// Binary game asking "is a sink of value at least `x` reachable".
    pub fn thresholded(&self, x: u64) -> GameSpec {
        let mut g = self.clone();
        for s in self.graph.sinks() {
            g.sink_values[s.index()] = u64::from(self.sink_value(s) >= x);
        }
        g
    }

    /// Replace sink components by fresh value-0 sinks so the game stops.
    /// Returns the old-to-new vertex map alongside.
    pub fn contracted(&self) -> (GameSpec, Vec<VertexId>) {
        let c = contract_sink_components(&self.graph, &self.fixed);
        let n = c.graph.vertex_count();
        let mut owners = vec![Owner::Random; n];
        let mut values = vec![0u64; n];
        for v in self.graph.vertices() {
            let nv = c.vertex_map[v.index()];
            if c.graph.role(nv) == self.graph.role(v) {
                owners[nv.index()] = self.owners[v.index()];
                values[nv.index()] = self.sink_values[v.index()];
            }
        }
        let game = GameSpec {
            graph: c.graph,
            owners,
            sink_values: values,
            fixed: c.config,
        };
        (game, c.vertex_map)
    }

    /// Restrict to the connected component containing `u0`. Returns the
    /// component game, the new id of `u0`, and the component-to-original
    /// vertex map.
    pub fn component_of(&self, u0: VertexId) -> (GameSpec, VertexId, Vec<VertexId>) {
        for (graph, map) in split_components(&self.graph) {
            if let Some(&(_, nu0)) = map.iter().find(|(old, _)| *old == u0) {
                let n = graph.vertex_count();
                let mut owners = vec![Owner::Random; n];
                let mut values = vec![0u64; n];
                let mut fixed = RotorConfig::empty(&graph);
                let mut back = vec![VertexId(0); n];
                for &(old, new) in &map {
                    back[new.index()] = old;
                    owners[new.index()] = self.owners[old.index()];
                    values[new.index()] = self.sink_values[old.index()];
                    if graph.is_plain(new) && self.fixed.is_defined(old) {
                        // Arc ids inside a component keep their relative
                        // rotor positions; remap through the position.
                        let pos = self.graph.rotor_position(self.fixed.arc(old));
                        let arc = graph.rotor_order(new)[pos];
                        fixed.set(&graph, new, arc).expect("rotor orders align");
                    }
                }
                let game = GameSpec { graph, owners, sink_values: values, fixed };
                return (game, nu0, back);
            }
        }
        unreachable!("u0 belongs to some component");
    }
}

/// A game reduced to stopping form and to the start vertex's component,
/// remembering where its vertices came from.
pub struct PreparedGame {
    pub game: GameSpec,
    pub u0: VertexId,
    /// prepared vertex -> original vertex; `None` for contraction sinks.
    pub origin: Vec<Option<VertexId>>,
}

impl PreparedGame {
    pub fn of(game: &GameSpec, u0: VertexId) -> PreparedGame {
        if game.graph.is_stopping() {
            let origin = game.graph.vertices().map(Some).collect();
            return PreparedGame { game: game.clone(), u0, origin };
        }
        let (contracted, map) = game.contracted();
        // Fresh sinks are exactly the vertices nothing maps onto plainly.
        let mut origin_contracted: Vec<Option<VertexId>> =
            vec![None; contracted.graph.vertex_count()];
        for v in game.graph.vertices() {
            let nv = map[v.index()];
            if contracted.graph.role(nv) == game.graph.role(v) {
                origin_contracted[nv.index()] = Some(v);
            }
        }
        let (component, nu0, back) = contracted.component_of(map[u0.index()]);
        let origin = back
            .iter()
            .map(|cv| origin_contracted[cv.index()])
            .collect();
        PreparedGame { game: component, u0: nu0, origin }
    }

    /// Pull a strategy on the prepared graph back onto the original one.
    /// Owned vertices that vanished (inside sink components) or live in
    /// other components keep their first rotor arc.
    pub fn strategy_to_original(
        &self,
        original: &GameSpec,
        strategy: &Strategy,
        owner: Owner,
    ) -> Strategy {
        let mut out = RotorConfig::empty(&original.graph);
        for v in original.graph.plain_vertices() {
            if original.owner(v) == owner {
                out.set(&original.graph, v, original.graph.rotor_order(v)[0])
                    .expect("first arc exists");
            }
        }
        for v in strategy.defined_vertices() {
            if let Some(orig) = self.origin[v.index()] {
                let pos = self.game.graph.rotor_position(strategy.arc(v));
                let arc = original.graph.rotor_order(orig)[pos];
                out.set(&original.graph, orig, arc).expect("rotor orders align");
            }
        }
        out
    }
}

/// Full rotor configuration inheriting the fixed part and the players'
/// strategies.
pub fn assemble_config(game: &GameSpec, sigma: &Strategy, tau: Option<&Strategy>) -> RotorConfig {
    let mut config = game.fixed.overlaid(sigma);
    if let Some(t) = tau {
        config = config.overlaid(t);
    }
    config
}

/// Value of the game under fixed strategies: the value of the exit sink of
/// the maximal walk from `u0`, or 0 when no sink is reached.
pub fn value_under_strategies(
    game: &GameSpec,
    sigma: &Strategy,
    tau: Option<&Strategy>,
    u0: VertexId,
) -> u64 {
    if game.graph.is_stopping() {
        let config = assemble_config(game, sigma, tau);
        let outcome = run_maximal_walk(
            &game.graph,
            &ParticleState { config, position: u0 },
            &WalkOptions::default(),
        );
        return game.sink_value(outcome.exit.expect("stopping graph walk ends"));
    }
    let (contracted, map) = game.contracted();
    let remap = |s: &Strategy| {
        let mut ns = RotorConfig::empty(&contracted.graph);
        for v in s.defined_vertices() {
            let nv = map[v.index()];
            if contracted.graph.is_plain(nv) {
                let pos = game.graph.rotor_position(s.arc(v));
                let arc = contracted.graph.rotor_order(nv)[pos];
                ns.set(&contracted.graph, nv, arc).expect("rotor orders align");
            }
        }
        ns
    };
    let sigma = remap(sigma);
    let tau = tau.map(remap);
    value_under_strategies(&contracted, &sigma, tau.as_ref(), map[u0.index()])
}

/// Which strategies the controlling player may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyMode {
    /// Choose the initial rotor arc only (the base game).
    InitialArc,
    /// Choose the rotor order and the initial arc.
    FreeRotorOrder,
    /// Choose an outgoing arc at every visit.
    FreePerVisit,
}

/// Per-edge summary: optimal value of the subtree game and the matching
/// optimal return flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGameSummary {
    pub value: bool,
    pub return_flow: ExtendedCount,
}

struct SlotInputs {
    values: Vec<bool>,
    flows: Vec<ExtendedCount>,
    parent_slot: Option<usize>,
}

fn slot_inputs(
    graph: &RotorGraph,
    summaries: &HashMap<(VertexId, VertexId), EdgeGameSummary>,
    v: VertexId,
    parent: Option<VertexId>,
) -> Result<SlotInputs, GameError> {
    let mut values = Vec::new();
    let mut flows = Vec::new();
    let mut parent_slot = None;
    for (slot, &w) in graph.out_neighbors(v).iter().enumerate() {
        if Some(w) == parent {
            parent_slot = Some(slot);
            values.push(false);
            flows.push(Infinite);
        } else {
            let s = summaries
                .get(&(v, w))
                .ok_or(GameError::Flow(FlowError::MissingTableEntry(v, w)))?;
            values.push(s.value);
            flows.push(s.return_flow.clone());
        }
    }
    Ok(SlotInputs { values, flows, parent_slot })
}

/// Scan all candidate start arcs at an owned vertex in one rotor sweep,
/// tracking for each the destination subtree and the flow toward the
/// parent. `good` is the sink value the owner tries to reach.
fn optimal_strategy_scan(
    graph: &RotorGraph,
    v: VertexId,
    inputs: &SlotInputs,
    good: bool,
) -> (ArcId, ExtendedCount, bool) {
    let order = graph.rotor_order(v);
    let a0 = order[0];
    let child_finite = inputs
        .flows
        .iter()
        .enumerate()
        .any(|(s, f)| Some(s) != inputs.parent_slot && f.is_finite());
    let parent_mult = inputs.parent_slot.map_or(0, |s| graph.multiplicity_at(v, s));
    if !child_finite {
        // Entering never settles: the walk has value 0, bouncing back to
        // the parent forever when an arc back exists.
        let r = if parent_mult > 0 { Infinite } else { ExtendedCount::one() };
        return (a0, r, false);
    }
    // Whole turns every start survives before the finish scan.
    let mut turns: Option<BigUint> = None;
    for (slot, f) in inputs.flows.iter().enumerate() {
        if Some(slot) == inputs.parent_slot {
            continue;
        }
        if let Finite(r) = f {
            let q = (r - BigUint::one()) / BigUint::from(graph.multiplicity_at(v, slot));
            turns = Some(match turns {
                None => q,
                Some(t) => t.min(q),
            });
        }
    }
    let turns = turns.expect("some child flow is finite");
    let mut residual: Vec<ExtendedCount> = inputs
        .flows
        .iter()
        .enumerate()
        .map(|(slot, f)| {
            if Some(slot) == inputs.parent_slot {
                Infinite
            } else {
                f.sub_finite(&(&turns * BigUint::from(graph.multiplicity_at(v, slot))))
            }
        })
        .collect();

    let mut best_good: Option<(ArcId, u64)> = None; // minimal parent flow
    let mut best_bad: Option<(ArcId, u64)> = None; // maximal parent flow
    let mut a_start = a0;
    let mut a_end = a0;
    let mut parent_flow: u64 = 0;
    let mut wrapped = false;
    let mut guard = 0usize;
    loop {
        let slot_end = graph.arc_neighbor_slot(a_end);
        if Some(slot_end) == inputs.parent_slot {
            parent_flow += 1;
            a_end = graph.theta_fast(a_end);
        } else if !residual[slot_end].is_one() {
            residual[slot_end].dec();
            a_end = graph.theta_fast(a_end);
        } else {
            // Start `a_start` settles through `a_end`.
            if inputs.values[slot_end] == good {
                if best_good.as_ref().map_or(true, |(_, f)| parent_flow < *f) {
                    best_good = Some((a_start, parent_flow));
                }
            } else if best_bad.as_ref().map_or(true, |(_, f)| parent_flow > *f) {
                best_bad = Some((a_start, parent_flow));
            }
            let slot_start = graph.arc_neighbor_slot(a_start);
            if Some(slot_start) == inputs.parent_slot {
                parent_flow -= 1;
            } else {
                residual[slot_start].inc();
            }
            a_start = graph.theta_fast(a_start);
            if graph.theta_fast(a_start) == a0 {
                wrapped = true;
            }
            if a_start == a0 && wrapped {
                break;
            }
        }
        guard += 1;
        assert!(guard <= 8 * order.len() + 16, "strategy scan must stay within two sweeps");
    }
    let base = turns * BigUint::from(parent_mult);
    let finish = |f: u64| Finite(&base + BigUint::from(f) + BigUint::one());
    match (best_good, best_bad) {
        (Some((arc, f)), _) => (arc, finish(f), good),
        (None, Some((arc, f))) => (arc, finish(f), !good),
        (None, None) => unreachable!("every start produces a candidate"),
    }
}

/// Summary of the `(parent, v)`-subtree game, together with the owner's
/// arc choice at `v` when `v` is a player vertex.
fn propagate_summary(
    game: &GameSpec,
    summaries: &HashMap<(VertexId, VertexId), EdgeGameSummary>,
    parent: Option<VertexId>,
    v: VertexId,
    mode: StrategyMode,
) -> Result<(EdgeGameSummary, Option<ArcId>), GameError> {
    let graph = &game.graph;
    if graph.is_sink(v) {
        return Ok((
            EdgeGameSummary {
                value: game.sink_value(v) != 0,
                return_flow: ExtendedCount::one(),
            },
            None,
        ));
    }
    let inputs = slot_inputs(graph, summaries, v, parent)?;
    let parent_mult = inputs.parent_slot.map_or(0, |s| graph.multiplicity_at(v, s));
    match game.owner(v) {
        Owner::Random => {
            let child_finite = inputs
                .flows
                .iter()
                .enumerate()
                .any(|(s, f)| Some(s) != inputs.parent_slot && f.is_finite());
            if !child_finite {
                let return_flow = if parent_mult > 0 { Infinite } else { ExtendedCount::one() };
                return Ok((EdgeGameSummary { value: false, return_flow }, None));
            }
            let result = improved_revolving_routine(graph, v, game.fixed.arc(v), &inputs.flows)?;
            let dest_slot = graph.arc_neighbor_slot(result.last_arc);
            let value = inputs.values[dest_slot];
            let return_flow = match inputs.parent_slot {
                Some(ps) => result.flows[ps].add_u64(1),
                None => ExtendedCount::one(),
            };
            Ok((EdgeGameSummary { value, return_flow }, None))
        }
        owner => {
            let good = owner == Owner::Max;
            match mode {
                StrategyMode::InitialArc => {
                    let (arc, return_flow, value) =
                        optimal_strategy_scan(graph, v, &inputs, good);
                    Ok((EdgeGameSummary { value, return_flow }, Some(arc)))
                }
                StrategyMode::FreeRotorOrder => {
                    Ok((free_rotor_order_summary(graph, v, &inputs, good, parent_mult), None))
                }
                StrategyMode::FreePerVisit => {
                    Ok((free_per_visit_summary(&inputs, good, parent_mult), None))
                }
            }
        }
    }
}

/// Owner orders the rotor freely: settles race between subtrees, counted
/// in whole turns. `ceil(r/m)` is the turn in which a subtree of return
/// flow `r` fed by `m` parallel arcs runs dry.
fn free_rotor_order_summary(
    graph: &RotorGraph,
    v: VertexId,
    inputs: &SlotInputs,
    good: bool,
    parent_mult: u64,
) -> EdgeGameSummary {
    let exhaust_turn = |slot: usize| -> ExtendedCount {
        match &inputs.flows[slot] {
            Infinite => Infinite,
            Finite(r) => {
                let m = BigUint::from(graph.multiplicity_at(v, slot));
                Finite((r + &m - BigUint::one()) / m)
            }
        }
    };
    let mut best_good: Option<ExtendedCount> = None;
    let mut best_bad: Option<ExtendedCount> = None;
    for slot in 0..inputs.flows.len() {
        if Some(slot) == inputs.parent_slot {
            continue;
        }
        let t = exhaust_turn(slot);
        let best = if inputs.values[slot] == good { &mut best_good } else { &mut best_bad };
        if best.as_ref().map_or(true, |b| t < *b) {
            *best = Some(t);
        }
    }
    let t_good = best_good.unwrap_or(Infinite);
    let t_bad = best_bad.unwrap_or(Infinite);
    if t_good.is_finite() && t_good <= t_bad {
        // Good subtree arcs scheduled first, parent arcs last: the settle
        // happens in turn t with the parent crossed t-1 whole turns.
        let t = t_good.as_finite().unwrap();
        let crossings = (t - BigUint::one()) * BigUint::from(parent_mult);
        EdgeGameSummary { value: good, return_flow: Finite(crossings + BigUint::one()) }
    } else {
        let return_flow = match (&t_bad, parent_mult) {
            (Infinite, 0) => ExtendedCount::one(),
            (Infinite, _) => Infinite,
            (Finite(t), m) => Finite(t * BigUint::from(m) + BigUint::one()),
        };
        EdgeGameSummary { value: !good, return_flow }
    }
}

/// Owner redirects the particle on every visit: either straight into a
/// winning subtree, or endlessly back toward the parent.
fn free_per_visit_summary(inputs: &SlotInputs, good: bool, parent_mult: u64) -> EdgeGameSummary {
    let has_good = inputs
        .values
        .iter()
        .enumerate()
        .any(|(s, val)| Some(s) != inputs.parent_slot && *val == good && inputs.flows[s].is_finite());
    if has_good {
        EdgeGameSummary { value: good, return_flow: ExtendedCount::one() }
    } else if parent_mult > 0 {
        EdgeGameSummary { value: !good, return_flow: Infinite }
    } else {
        EdgeGameSummary { value: !good, return_flow: ExtendedCount::one() }
    }
}

/// Order in which subtree summaries are produced; both satisfy the
/// children-before-parent dependency and must agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummaryOrder {
    ReverseBfs,
    PostOrder,
}

#[derive(Clone, Debug)]
pub struct BinarySolution {
    pub value: bool,
    pub max_strategy: Strategy,
    pub min_strategy: Strategy,
    pub summaries: HashMap<(VertexId, VertexId), EdgeGameSummary>,
}

fn away_edges_postorder(index: &TreeIndex) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    let mut stack = vec![(index.root, false)];
    while let Some((u, expanded)) = stack.pop() {
        if expanded {
            if let Some(p) = index.parent[u.index()] {
                out.push((p, u));
            }
            continue;
        }
        stack.push((u, true));
        for &c in &index.children[u.index()] {
            stack.push((c, false));
        }
    }
    out
}

/// Binary solve on an already stopping, tree-shadowed game: propagates
/// subtree summaries from the leaves to `u0`, then evaluates `u0` through
/// a fictive incoming edge. The witness strategies are the per-vertex
/// choices made on the way.
pub fn solve_binary_prepared(
    game: &GameSpec,
    u0: VertexId,
    mode: StrategyMode,
    order: SummaryOrder,
) -> Result<BinarySolution, GameError> {
    if !game.values_are_binary() {
        return Err(GameError::NonBinaryValues);
    }
    if !game.graph.is_stopping() {
        return Err(GameError::Flow(FlowError::NotStopping));
    }
    let graph = &game.graph;
    if !graph.has_tree_shadow() {
        return Err(GameError::NotTreeLike);
    }
    let mut max_strategy = RotorConfig::empty(graph);
    let mut min_strategy = RotorConfig::empty(graph);
    // Unreachable player vertices still need a defined strategy entry.
    for v in graph.plain_vertices() {
        match game.owner(v) {
            Owner::Max => max_strategy.set(graph, v, graph.rotor_order(v)[0])?,
            Owner::Min => min_strategy.set(graph, v, graph.rotor_order(v)[0])?,
            Owner::Random => {}
        }
    }
    let mut record = |game: &GameSpec, v: VertexId, arc: Option<ArcId>,
                      max_s: &mut Strategy, min_s: &mut Strategy| {
        if let Some(a) = arc {
            match game.owner(v) {
                Owner::Max => max_s.set(&game.graph, v, a).expect("arc at v"),
                Owner::Min => min_s.set(&game.graph, v, a).expect("arc at v"),
                Owner::Random => {}
            }
        }
    };
    let index = tree_index(graph, u0)?;
    let edges = match order {
        SummaryOrder::ReverseBfs => {
            let mut e = index.edges.clone();
            e.reverse();
            e
        }
        SummaryOrder::PostOrder => away_edges_postorder(&index),
    };
    let mut summaries: HashMap<(VertexId, VertexId), EdgeGameSummary> = HashMap::new();
    for (p, c) in edges {
        if graph.is_sink(p) || !graph.has_arc_between(p, c) {
            continue;
        }
        let (summary, choice) = propagate_summary(&game, &summaries, Some(p), c, mode)?;
        record(&game, c, choice, &mut max_strategy, &mut min_strategy);
        summaries.insert((p, c), summary);
    }
    let value = if graph.is_sink(u0) {
        game.sink_value(u0) != 0
    } else {
        let (summary, choice) = propagate_summary(&game, &summaries, None, u0, mode)?;
        record(&game, u0, choice, &mut max_strategy, &mut min_strategy);
        summary.value
    };
    Ok(BinarySolution { value, max_strategy, min_strategy, summaries })
}

/// Prepare (contract and take the start component), solve, and pull the
/// witnesses back onto the original graph.
pub fn solve_binary(
    game: &GameSpec,
    u0: VertexId,
    mode: StrategyMode,
    order: SummaryOrder,
) -> Result<BinarySolution, GameError> {
    let prepared = PreparedGame::of(game, u0);
    let sol = solve_binary_prepared(&prepared.game, prepared.u0, mode, order)?;
    Ok(BinarySolution {
        value: sol.value,
        max_strategy: prepared.strategy_to_original(game, &sol.max_strategy, Owner::Max),
        min_strategy: prepared.strategy_to_original(game, &sol.min_strategy, Owner::Min),
        summaries: sol.summaries,
    })
}

/// Optimal value and witness strategy of a one-player binary game.
pub fn solve_one_player_binary(
    game: &GameSpec,
    u0: VertexId,
) -> Result<(bool, Strategy), GameError> {
    if !game.is_one_player() {
        return Err(GameError::MinVerticesInOnePlayerGame);
    }
    let sol = solve_binary(game, u0, StrategyMode::InitialArc, SummaryOrder::ReverseBfs)?;
    Ok((sol.value, sol.max_strategy))
}

/// Distinct sink values in increasing order.
fn candidate_values(game: &GameSpec) -> Vec<u64> {
    let mut values: Vec<u64> = game.graph.sinks().map(|s| game.sink_value(s)).collect();
    values.push(0); // contraction sinks and endless walks score zero
    values.sort_unstable();
    values.dedup();
    values
}

fn bisect_value<F>(values: &[u64], mut probe: F) -> Result<u64, GameError>
where
    F: FnMut(u64) -> Result<bool, GameError>,
{
    // Largest candidate x with probe(x) true; probe is non-increasing and
    // probe(0) always holds.
    let mut lo = 0usize;
    let mut hi = values.len() - 1;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if probe(values[mid])? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(values[lo])
}

/// One-player game with integer sink values: bisection over the distinct
/// values, each probe a thresholded binary solve. The witness comes from
/// the final probe at the optimal value.
pub fn solve_one_player_integer(
    game: &GameSpec,
    u0: VertexId,
) -> Result<(u64, Strategy), GameError> {
    if !game.is_one_player() {
        return Err(GameError::MinVerticesInOnePlayerGame);
    }
    let values = candidate_values(game);
    let best = bisect_value(&values, |x| {
        Ok(solve_one_player_binary(&game.thresholded(x), u0)?.0)
    })?;
    let (_, witness) = solve_one_player_binary(&game.thresholded(best), u0)?;
    Ok((best, witness))
}

/// Two-player binary game: value plus a pure-strategy equilibrium.
pub fn solve_two_player_binary(
    game: &GameSpec,
    u0: VertexId,
) -> Result<(bool, Strategy, Strategy), GameError> {
    let sol = solve_binary(game, u0, StrategyMode::InitialArc, SummaryOrder::ReverseBfs)?;
    Ok((sol.value, sol.max_strategy, sol.min_strategy))
}

/// Two-player integer value by dichotomy. Equilibrium strategies for the
/// integer game are not produced.
pub fn solve_two_player_integer(game: &GameSpec, u0: VertexId) -> Result<u64, GameError> {
    let values = candidate_values(game);
    bisect_value(&values, |x| {
        Ok(solve_two_player_binary(&game.thresholded(x), u0)?.0)
    })
}

/// One-player binary game under an alternative strategy set.
pub fn solve_one_player_variant(
    game: &GameSpec,
    u0: VertexId,
    mode: StrategyMode,
) -> Result<bool, GameError> {
    if !game.is_one_player() {
        return Err(GameError::MinVerticesInOnePlayerGame);
    }
    Ok(solve_binary(game, u0, mode, SummaryOrder::ReverseBfs)?.value)
}

/// Integer wrapper over the variant games, same dichotomy as the base set.
pub fn solve_one_player_variant_integer(
    game: &GameSpec,
    u0: VertexId,
    mode: StrategyMode,
) -> Result<u64, GameError> {
    if !game.is_one_player() {
        return Err(GameError::MinVerticesInOnePlayerGame);
    }
    let values = candidate_values(game);
    bisect_value(&values, |x| {
        Ok(solve_binary(&game.thresholded(x), u0, mode, SummaryOrder::ReverseBfs)?.value)
    })
}
