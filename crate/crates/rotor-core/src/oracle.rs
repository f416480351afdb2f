//! Naive reference implementations used by tests: bounded simulation,
//! exhaustive strategy enumeration, and a state-space search for the
//! per-visit game. Deliberately share nothing with the production solvers
//! beyond the single-step routing rule.

use crate::count::ExtendedCount;
use crate::games::{assemble_config, GameSpec, Owner, Strategy};
use crate::graph::{ArcId, RotorConfig, RotorGraph, VertexId};
use crate::walk::{clamped_step_bound, run_maximal_walk, ParticleState, WalkOptions};
use std::collections::{HashMap, VecDeque};

#[derive(Clone, Debug)]
pub struct EnumerationBudget {
    pub max_strategy_count: u64,
    pub max_steps: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_strategy_count: 1 << 20, max_steps: u64::MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded,
    CapHit,
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::BudgetExceeded => write!(f, "enumeration budget exceeded"),
            OracleError::CapHit => write!(f, "simulation cap hit"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Ground-truth exit sink by direct simulation.
pub fn exit_by_simulation(
    graph: &RotorGraph,
    config: &RotorConfig,
    u: VertexId,
    budget: &EnumerationBudget,
) -> Result<(VertexId, ExtendedCount), OracleError> {
    let cap = budget.max_steps.min(clamped_step_bound(graph));
    let outcome = run_maximal_walk(
        graph,
        &ParticleState { config: config.clone(), position: u },
        &WalkOptions { cap: Some(cap), record_trace: false, record_flows: false },
    );
    match outcome.exit {
        Some(s) => Ok((s, outcome.steps)),
        None => Err(OracleError::CapHit),
    }
}

/// Iterator over all total strategies of one player, in lexicographic
/// rotor-order positions.
pub struct StrategySpace<'g> {
    graph: &'g RotorGraph,
    vertices: Vec<VertexId>,
    positions: Vec<usize>,
    done: bool,
}

impl<'g> StrategySpace<'g> {
    pub fn new(graph: &'g RotorGraph, vertices: Vec<VertexId>) -> Self {
        StrategySpace { graph, positions: vec![0; vertices.len()], vertices, done: false }
    }

    pub fn count(&self) -> u64 {
        self.vertices
            .iter()
            .map(|v| self.graph.out_degree(*v) as u64)
            .try_fold(1u64, |acc, d| acc.checked_mul(d))
            .unwrap_or(u64::MAX)
    }
}

impl<'g> Iterator for StrategySpace<'g> {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.done {
            return None;
        }
        let mut strategy = RotorConfig::empty(self.graph);
        for (v, &pos) in self.vertices.iter().zip(&self.positions) {
            let arc = self.graph.rotor_order(*v)[pos];
            strategy.set(self.graph, *v, arc).expect("rotor arc");
        }
        // Advance odometer.
        let mut i = 0;
        loop {
            if i == self.vertices.len() {
                self.done = true;
                break;
            }
            self.positions[i] += 1;
            if self.positions[i] < self.graph.out_degree(self.vertices[i]) {
                break;
            }
            self.positions[i] = 0;
            i += 1;
        }
        Some(strategy)
    }
}

/// Exhaustive one-player optimum: maximal value over every strategy, with
/// the argmax strategies.
pub fn enumerate_one_player(
    game: &GameSpec,
    u0: VertexId,
    budget: &EnumerationBudget,
) -> Result<(u64, Vec<Strategy>), OracleError> {
    let space = StrategySpace::new(&game.graph, game.owned_by(Owner::Max));
    if space.count() > budget.max_strategy_count {
        return Err(OracleError::BudgetExceeded);
    }
    let mut best = 0;
    let mut argmax = Vec::new();
    for sigma in space {
        let value = crate::games::value_under_strategies(game, &sigma, None, u0);
        if value > best {
            best = value;
            argmax.clear();
        }
        if value == best {
            argmax.push(sigma);
        }
    }
    Ok((best, argmax))
}

/// Exhaustive two-player maximin and minimax values.
pub fn enumerate_two_player(
    game: &GameSpec,
    u0: VertexId,
    budget: &EnumerationBudget,
) -> Result<(u64, u64), OracleError> {
    let max_space: Vec<Strategy> =
        StrategySpace::new(&game.graph, game.owned_by(Owner::Max)).collect();
    let min_space: Vec<Strategy> =
        StrategySpace::new(&game.graph, game.owned_by(Owner::Min)).collect();
    if (max_space.len() as u64) > budget.max_strategy_count
        || (min_space.len() as u64) > budget.max_strategy_count
    {
        return Err(OracleError::BudgetExceeded);
    }
    let value = |sigma: &Strategy, tau: &Strategy| {
        crate::games::value_under_strategies(game, sigma, Some(tau), u0)
    };
    let maximin = max_space
        .iter()
        .map(|s| min_space.iter().map(|t| value(s, t)).min().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let minimax = min_space
        .iter()
        .map(|t| max_space.iter().map(|s| value(s, t)).max().unwrap_or(0))
        .min()
        .unwrap_or(0);
    Ok((maximin, minimax))
}

/// Does the pair satisfy both equilibrium inequalities at `u0`?
pub fn equilibrium_holds(
    game: &GameSpec,
    u0: VertexId,
    value: u64,
    sigma: &Strategy,
    tau: &Strategy,
    budget: &EnumerationBudget,
) -> Result<bool, OracleError> {
    let max_space: Vec<Strategy> =
        StrategySpace::new(&game.graph, game.owned_by(Owner::Max)).collect();
    let min_space: Vec<Strategy> =
        StrategySpace::new(&game.graph, game.owned_by(Owner::Min)).collect();
    if (max_space.len() as u64) > budget.max_strategy_count
        || (min_space.len() as u64) > budget.max_strategy_count
    {
        return Err(OracleError::BudgetExceeded);
    }
    let lower = min_space
        .iter()
        .all(|t| crate::games::value_under_strategies(game, sigma, Some(t), u0) >= value);
    let upper = max_space
        .iter()
        .all(|s| crate::games::value_under_strategies(game, s, Some(tau), u0) <= value);
    Ok(lower && upper)
}

/// Reference return flow; a thin alias so tests never lean on the
/// production table builder as its own oracle.
pub fn return_flow_reference(
    graph: &RotorGraph,
    config: &RotorConfig,
    u: VertexId,
    v: VertexId,
) -> Result<ExtendedCount, crate::flows::FlowError> {
    crate::flows::return_flow_oracle(graph, config, u, v, None)
}

/// Exact solution of the per-visit one-player game by alternating
/// reachability over the product of rotor states and positions: can the
/// player force the walk into a sink of value one?
pub fn per_visit_binary_oracle(
    game: &GameSpec,
    u0: VertexId,
    budget: &EnumerationBudget,
) -> Result<bool, OracleError> {
    let graph = &game.graph;
    let random: Vec<VertexId> = game.owned_by(Owner::Random);
    let state_count: u64 = random
        .iter()
        .map(|v| graph.out_degree(*v) as u64)
        .try_fold(1u64, |acc, d| acc.checked_mul(d))
        .and_then(|c| c.checked_mul(graph.vertex_count() as u64))
        .unwrap_or(u64::MAX);
    if state_count > budget.max_strategy_count {
        return Err(OracleError::BudgetExceeded);
    }
    let slot_of: HashMap<VertexId, usize> =
        random.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let dims: Vec<usize> = random.iter().map(|v| graph.out_degree(*v)).collect();

    // State = (rotor positions on random vertices, particle position).
    type State = (Vec<usize>, VertexId);
    let initial: State = (
        random.iter().map(|v| graph.rotor_position(game.fixed.arc(*v))).collect(),
        u0,
    );
    // Backward induction over the reachable state graph: a state wins if
    // it sits on a value-1 sink, or the mover can (player) / must (rotor)
    // step into a winning state. Cycles that never reach a 1-sink lose,
    // so a forward search with memoized AND/OR semantics works: iterate
    // until fixpoint over the finite state space.
    let mut statuses: HashMap<State, bool> = HashMap::new();
    let mut frontier: VecDeque<State> = VecDeque::new();
    let mut discovered: Vec<State> = Vec::new();
    frontier.push_back(initial.clone());
    let mut seen: HashMap<State, ()> = HashMap::new();
    seen.insert(initial.clone(), ());
    while let Some(s) = frontier.pop_front() {
        discovered.push(s.clone());
        let (ref rotors, pos) = s;
        if graph.is_sink(pos) {
            continue;
        }
        let moves: Vec<ArcId> = match game.owner(pos) {
            Owner::Random => {
                let slot = slot_of[&pos];
                vec![graph.rotor_order(pos)[rotors[slot]]]
            }
            _ => graph.rotor_order(pos).to_vec(),
        };
        for a in moves {
            let mut next_rotors = rotors.clone();
            if let Some(&slot) = slot_of.get(&pos) {
                next_rotors[slot] = (next_rotors[slot] + 1) % dims[slot];
            }
            let next = (next_rotors, graph.head(a));
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), ());
                frontier.push_back(next);
            }
        }
    }
    // Fixpoint: start everything losing, flip to winning when justified.
    for s in &discovered {
        if graph.is_sink(s.1) && game.sink_value(s.1) != 0 {
            statuses.insert(s.clone(), true);
        }
    }
    loop {
        let mut changed = false;
        for s in &discovered {
            if *statuses.get(s).unwrap_or(&false) {
                continue;
            }
            let (ref rotors, pos) = *s;
            if graph.is_sink(pos) {
                continue;
            }
            let arcs: Vec<ArcId> = match game.owner(pos) {
                Owner::Random => vec![graph.rotor_order(pos)[rotors[slot_of[&pos]]]],
                _ => graph.rotor_order(pos).to_vec(),
            };
            // MAX picks any winning move; the rotor has no choice. MIN
            // vertices never appear in per-visit one-player games.
            let wins = arcs.iter().any(|a| {
                let mut next_rotors = rotors.clone();
                if let Some(&slot) = slot_of.get(&pos) {
                    next_rotors[slot] = (next_rotors[slot] + 1) % dims[slot];
                }
                let next = (next_rotors, graph.head(*a));
                *statuses.get(&next).unwrap_or(&false)
            });
            if wins {
                statuses.insert(s.clone(), true);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(*statuses.get(&initial).unwrap_or(&false))
}

/// Enumerate every rotor order and start arc on the player's vertices:
/// the oracle for the free-rotor-order strategy set. Only sensible for a
/// few owned vertices of small degree.
pub fn free_rotor_order_oracle(
    game: &GameSpec,
    u0: VertexId,
    budget: &EnumerationBudget,
) -> Result<u64, OracleError> {
    let graph = &game.graph;
    let owned = game.owned_by(Owner::Max);
    let mut orders_per_vertex: Vec<Vec<Vec<ArcId>>> = Vec::new();
    let mut total: u64 = 1;
    for &v in &owned {
        let arcs = graph.rotor_order(v).to_vec();
        let perms = permutations(&arcs);
        total = total
            .checked_mul(perms.len() as u64)
            .and_then(|t| t.checked_mul(arcs.len() as u64))
            .ok_or(OracleError::BudgetExceeded)?;
        orders_per_vertex.push(perms);
    }
    if total > budget.max_strategy_count {
        return Err(OracleError::BudgetExceeded);
    }
    let mut best = 0u64;
    let mut choice = vec![(0usize, 0usize); owned.len()]; // (order, start)
    loop {
        // Rebuild the graph with the chosen rotor orders.
        let mut builder = crate::graph::RotorGraphBuilder::new();
        for v in graph.vertices() {
            builder.add_vertex(graph.name(v), graph.role(v));
        }
        for (_, arc) in graph.arcs() {
            builder.add_arc(arc.tail, arc.head);
        }
        for v in graph.plain_vertices() {
            builder.set_rotor_order(v, graph.rotor_order(v).to_vec());
        }
        for (i, &v) in owned.iter().enumerate() {
            builder.set_rotor_order(v, orders_per_vertex[i][choice[i].0].clone());
        }
        let g2 = builder.finish().expect("same graph, permuted orders");
        let mut config = RotorConfig::empty(&g2);
        for v in graph.plain_vertices() {
            if game.fixed.is_defined(v) {
                config.set(&g2, v, game.fixed.arc(v)).expect("same arc ids");
            }
        }
        for (i, &v) in owned.iter().enumerate() {
            let start = orders_per_vertex[i][choice[i].0][choice[i].1];
            config.set(&g2, v, start).expect("same arc ids");
        }
        let game2 = GameSpec::zero_player(g2, config);
        let cap = budget.max_steps.min(clamped_step_bound(&game2.graph));
        let outcome = run_maximal_walk(
            &game2.graph,
            &ParticleState { config: game2.fixed.clone(), position: u0 },
            &WalkOptions { cap: Some(cap), record_trace: false, record_flows: false },
        );
        let value = match outcome.exit {
            Some(s) => game.sink_value(s),
            None => 0,
        };
        best = best.max(value);
        // Advance the (order, start) odometer.
        let mut i = 0;
        loop {
            if i == owned.len() {
                return Ok(best);
            }
            choice[i].1 += 1;
            if choice[i].1 < graph.out_degree(owned[i]) {
                break;
            }
            choice[i].1 = 0;
            choice[i].0 += 1;
            if choice[i].0 < orders_per_vertex[i].len() {
                break;
            }
            choice[i].0 = 0;
            i += 1;
        }
        if owned.is_empty() {
            return Ok(best);
        }
    }
}

fn permutations(items: &[ArcId]) -> Vec<Vec<ArcId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            let mut perm = vec![x];
            perm.append(&mut tail);
            out.push(perm);
        }
    }
    out
}
