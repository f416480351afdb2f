//! Rotor multigraphs: vertices split into plain and sink, parallel arcs,
//! and a cyclic rotor order on the out-arcs of every plain vertex.

use std::collections::VecDeque;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRole {
    Plain,
    Sink,
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

/// A structural defect reported by validation. Violations are data, not
/// panics: callers collect all of them at once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSink,
    LoopArc(ArcId),
    SinkWithOutArc(VertexId, ArcId),
    PlainWithoutOutArc(VertexId),
    RotorOrderNotPermutation(VertexId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSink => write!(f, "graph has no sink vertex"),
            Violation::LoopArc(a) => write!(f, "arc {a:?} is a loop"),
            Violation::SinkWithOutArc(v, a) => {
                write!(f, "sink {v:?} has outgoing arc {a:?}")
            }
            Violation::PlainWithoutOutArc(v) => {
                write!(f, "plain vertex {v:?} has no outgoing arc")
            }
            Violation::RotorOrderNotPermutation(v) => {
                write!(f, "rotor order at {v:?} does not list its out-arcs exactly once")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GraphError(pub Vec<Violation>);

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rotor graph:")?;
        for v in &self.0 {
            write!(f, " {v};")?;
        }
        Ok(())
    }
}

impl std::error::Error for GraphError {}

/// Mutable staging area for a [`RotorGraph`]. `finish` runs validation and
/// freezes the graph.
#[derive(Clone, Debug, Default)]
pub struct RotorGraphBuilder {
    names: Vec<String>,
    roles: Vec<VertexRole>,
    arcs: Vec<Arc>,
    rotor_order: Vec<Option<Vec<ArcId>>>,
}

impl RotorGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, role: VertexRole) -> VertexId {
        let id = VertexId(self.names.len() as u32);
        self.names.push(name.into());
        self.roles.push(role);
        self.rotor_order.push(None);
        id
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId) -> ArcId {
        let id = ArcId(self.arcs.len() as u32);
        self.arcs.push(Arc { tail, head });
        id
    }

    /// Explicit cyclic order of the out-arcs of `u`. Without a call the
    /// order defaults to arc insertion order.
    pub fn set_rotor_order(&mut self, u: VertexId, order: Vec<ArcId>) {
        self.rotor_order[u.index()] = Some(order);
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    /// Collect every violated invariant; empty means the graph is well formed.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.roles.iter().any(|r| *r == VertexRole::Sink) {
            out.push(Violation::NoSink);
        }
        let mut declared_out: Vec<Vec<ArcId>> = vec![Vec::new(); self.names.len()];
        for (i, arc) in self.arcs.iter().enumerate() {
            let id = ArcId(i as u32);
            if arc.tail == arc.head {
                out.push(Violation::LoopArc(id));
            }
            if self.roles[arc.tail.index()] == VertexRole::Sink {
                out.push(Violation::SinkWithOutArc(arc.tail, id));
            }
            declared_out[arc.tail.index()].push(id);
        }
        for v in 0..self.names.len() {
            let vid = VertexId(v as u32);
            if self.roles[v] == VertexRole::Plain && declared_out[v].is_empty() {
                out.push(Violation::PlainWithoutOutArc(vid));
            }
            if let Some(order) = &self.rotor_order[v] {
                let mut a = order.clone();
                let mut b = declared_out[v].clone();
                a.sort();
                b.sort();
                if a != b {
                    out.push(Violation::RotorOrderNotPermutation(vid));
                }
            }
        }
        out
    }

    pub fn finish(self) -> Result<RotorGraph, GraphError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(GraphError(violations));
        }
        let n = self.names.len();
        let mut rotor_order: Vec<Vec<ArcId>> = vec![Vec::new(); n];
        for (i, arc) in self.arcs.iter().enumerate() {
            rotor_order[arc.tail.index()].push(ArcId(i as u32));
        }
        for (v, explicit) in self.rotor_order.into_iter().enumerate() {
            if let Some(order) = explicit {
                rotor_order[v] = order;
            }
        }
        let mut arc_slot = vec![0u32; self.arcs.len()];
        for order in &rotor_order {
            for (pos, a) in order.iter().enumerate() {
                arc_slot[a.index()] = pos as u32;
            }
        }
        let mut in_arcs: Vec<Vec<ArcId>> = vec![Vec::new(); n];
        for (i, arc) in self.arcs.iter().enumerate() {
            in_arcs[arc.head.index()].push(ArcId(i as u32));
        }
        // Out-neighbours in first-appearance order over the rotor order, so
        // every derived traversal is deterministic.
        let mut out_neighbors: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut head_multiplicity: Vec<Vec<u64>> = vec![Vec::new(); n];
        let mut arc_neighbor_slot = vec![0u32; self.arcs.len()];
        for v in 0..n {
            for a in &rotor_order[v] {
                let head = self.arcs[a.index()].head;
                let slot = match out_neighbors[v].iter().position(|w| *w == head) {
                    Some(s) => s,
                    None => {
                        out_neighbors[v].push(head);
                        head_multiplicity[v].push(0);
                        out_neighbors[v].len() - 1
                    }
                };
                head_multiplicity[v][slot] += 1;
                arc_neighbor_slot[a.index()] = slot as u32;
            }
        }
        let mut in_neighbors: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for arcs in in_arcs.iter().enumerate().map(|(v, list)| (VertexId(v as u32), list)) {
            let (v, list) = arcs;
            for a in list {
                let tail = self.arcs[a.index()].tail;
                if !in_neighbors[v.index()].contains(&tail) {
                    in_neighbors[v.index()].push(tail);
                }
            }
        }
        // Undirected shadow adjacency, in first-incident-arc order.
        let mut neighbors: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for arc in &self.arcs {
            let (t, h) = (arc.tail, arc.head);
            if !neighbors[t.index()].contains(&h) {
                neighbors[t.index()].push(h);
            }
            if !neighbors[h.index()].contains(&t) {
                neighbors[h.index()].push(t);
            }
        }
        Ok(RotorGraph {
            names: self.names,
            roles: self.roles,
            arcs: self.arcs,
            rotor_order,
            arc_slot,
            arc_neighbor_slot,
            in_arcs,
            out_neighbors,
            head_multiplicity,
            in_neighbors,
            neighbors,
        })
    }
}

/// Immutable rotor multigraph. Cheap to share between threads.
#[derive(Clone, Debug)]
pub struct RotorGraph {
    names: Vec<String>,
    roles: Vec<VertexRole>,
    arcs: Vec<Arc>,
    rotor_order: Vec<Vec<ArcId>>,
    arc_slot: Vec<u32>,
    arc_neighbor_slot: Vec<u32>,
    in_arcs: Vec<Vec<ArcId>>,
    out_neighbors: Vec<Vec<VertexId>>,
    head_multiplicity: Vec<Vec<u64>>,
    in_neighbors: Vec<Vec<VertexId>>,
    neighbors: Vec<Vec<VertexId>>,
}

impl RotorGraph {
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn plain_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|v| self.is_plain(*v))
    }

    pub fn sinks(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|v| self.is_sink(*v))
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(|i| VertexId(i as u32))
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        self.roles[v.index()]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.roles[v.index()] == VertexRole::Sink
    }

    pub fn is_plain(&self, v: VertexId) -> bool {
        self.roles[v.index()] == VertexRole::Plain
    }

    pub fn tail(&self, a: ArcId) -> VertexId {
        self.arcs[a.index()].tail
    }

    pub fn head(&self, a: ArcId) -> VertexId {
        self.arcs[a.index()].head
    }

    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, &Arc)> + '_ {
        self.arcs.iter().enumerate().map(|(i, a)| (ArcId(i as u32), a))
    }

    /// Cyclic rotor order of the out-arcs of `u` (empty for sinks).
    pub fn rotor_order(&self, u: VertexId) -> &[ArcId] {
        &self.rotor_order[u.index()]
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        self.rotor_order[u.index()].len()
    }

    pub fn in_arcs(&self, u: VertexId) -> &[ArcId] {
        &self.in_arcs[u.index()]
    }

    /// Distinct heads of the out-arcs of `u`, in rotor-order-of-first-appearance.
    pub fn out_neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.out_neighbors[u.index()]
    }

    /// Number of parallel arcs from `u` to the neighbour at `slot`.
    pub fn multiplicity_at(&self, u: VertexId, slot: usize) -> u64 {
        self.head_multiplicity[u.index()][slot]
    }

    /// Number of arcs from `u` with head `v`.
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u64 {
        self.neighbor_slot(u, v)
            .map(|s| self.head_multiplicity[u.index()][s])
            .unwrap_or(0)
    }

    pub fn neighbor_slot(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.out_neighbors[u.index()].iter().position(|w| *w == v)
    }

    pub fn arc_neighbor_slot(&self, a: ArcId) -> usize {
        self.arc_neighbor_slot[a.index()] as usize
    }

    pub fn in_neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.in_neighbors[u.index()]
    }

    /// Undirected shadow adjacency.
    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.neighbors[u.index()]
    }

    /// Is there at least one arc from `u` to `v`?
    pub fn has_arc_between(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbor_slot(u, v).is_some()
    }

    /// Successor of `a` in the rotor order at `u`, cyclic.
    pub fn theta(&self, u: VertexId, a: ArcId) -> Result<ArcId, GraphError> {
        if self.tail(a) != u || !self.is_plain(u) {
            return Err(GraphError(vec![Violation::RotorOrderNotPermutation(u)]));
        }
        let order = &self.rotor_order[u.index()];
        let pos = self.arc_slot[a.index()] as usize;
        Ok(order[(pos + 1) % order.len()])
    }

    /// `theta` without the precondition check, for inner loops.
    pub fn theta_fast(&self, a: ArcId) -> ArcId {
        let u = self.tail(a);
        let order = &self.rotor_order[u.index()];
        let pos = self.arc_slot[a.index()] as usize;
        order[(pos + 1) % order.len()]
    }

    /// Position of `a` within the rotor order of its tail.
    pub fn rotor_position(&self, a: ArcId) -> usize {
        self.arc_slot[a.index()] as usize
    }

    /// No two out-arcs of any vertex share a head.
    pub fn is_simple(&self) -> bool {
        self.vertices().all(|u| self.out_degree(u) == self.out_neighbors(u).len())
    }

    /// A leaf of the undirected shadow.
    pub fn is_leaf(&self, u: VertexId) -> bool {
        self.neighbors(u).len() == 1
    }

    /// The undirected shadow is a single tree. Sinks may sit anywhere;
    /// contraction can legitimately produce interior sinks.
    pub fn has_tree_shadow(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(VertexId(0));
        let mut edges = 0usize;
        let mut visited = 0usize;
        while let Some(u) = queue.pop_front() {
            visited += 1;
            for &w in self.neighbors(u) {
                edges += 1;
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        // Each undirected edge counted twice. A connected graph is a tree
        // iff it has exactly n-1 edges.
        visited == n && edges == 2 * (n - 1)
    }

    /// The undirected shadow is a single tree and every sink is one of its
    /// leaves.
    pub fn is_tree_like(&self) -> bool {
        self.has_tree_shadow() && self.sinks().all(|s| self.is_leaf(s))
    }

    /// Every vertex has a directed path to a sink.
    pub fn is_stopping(&self) -> bool {
        let n = self.vertex_count();
        let mut reach = vec![false; n];
        let mut queue: VecDeque<VertexId> = self.sinks().collect();
        for s in &queue {
            reach[s.index()] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &a in self.in_arcs(u) {
                let t = self.tail(a);
                if !reach[t.index()] {
                    reach[t.index()] = true;
                    queue.push_back(t);
                }
            }
        }
        reach.into_iter().all(|r| r)
    }

    /// Number of undirected shadow edges.
    pub fn shadow_edge_count(&self) -> usize {
        self.vertices().map(|u| self.neighbors(u).len()).sum::<usize>() / 2
    }
}

/// A rotor configuration: one outgoing arc per plain vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct RotorConfig {
    current: Vec<Option<ArcId>>,
}

impl RotorConfig {
    pub fn new(graph: &RotorGraph, assignment: &[(VertexId, ArcId)]) -> Result<Self, GraphError> {
        let mut partial = Self::empty(graph);
        for &(u, a) in assignment {
            partial.set(graph, u, a)?;
        }
        for u in graph.plain_vertices() {
            if partial.current[u.index()].is_none() {
                return Err(GraphError(vec![Violation::PlainWithoutOutArc(u)]));
            }
        }
        Ok(partial)
    }

    /// A partial configuration; games store strategies this way.
    pub fn empty(graph: &RotorGraph) -> Self {
        RotorConfig { current: vec![None; graph.vertex_count()] }
    }

    /// Every plain vertex points along the first arc of its rotor order.
    pub fn first_arcs(graph: &RotorGraph) -> Self {
        let mut c = Self::empty(graph);
        for u in graph.plain_vertices() {
            c.current[u.index()] = Some(graph.rotor_order(u)[0]);
        }
        c
    }

    pub fn set(&mut self, graph: &RotorGraph, u: VertexId, a: ArcId) -> Result<(), GraphError> {
        if graph.tail(a) != u || !graph.is_plain(u) {
            return Err(GraphError(vec![Violation::RotorOrderNotPermutation(u)]));
        }
        self.current[u.index()] = Some(a);
        Ok(())
    }

    pub fn get(&self, u: VertexId) -> Option<ArcId> {
        self.current[u.index()]
    }

    pub fn arc(&self, u: VertexId) -> ArcId {
        self.current[u.index()].expect("vertex has no configured arc")
    }

    pub fn is_defined(&self, u: VertexId) -> bool {
        self.current[u.index()].is_some()
    }

    pub fn is_total(&self, graph: &RotorGraph) -> bool {
        graph.plain_vertices().all(|u| self.is_defined(u))
    }

    pub fn defined_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.current
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|_| VertexId(i as u32)))
    }

    /// Apply the rotor order once at `u`.
    pub fn turn(&mut self, graph: &RotorGraph, u: VertexId) {
        let a = self.arc(u);
        self.current[u.index()] = Some(graph.theta_fast(a));
    }

    /// Overlay: entries of `other` win where defined.
    pub fn overlaid(&self, other: &RotorConfig) -> RotorConfig {
        let mut merged = self.clone();
        for (i, a) in other.current.iter().enumerate() {
            if a.is_some() {
                merged.current[i] = *a;
            }
        }
        merged
    }
}

impl fmt::Debug for RotorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .current
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| format!("v{i}->{a:?}")))
            .collect();
        write!(f, "RotorConfig[{}]", entries.join(", "))
    }
}

/// Result of replacing sink components by fresh sinks.
pub struct Contraction {
    pub graph: RotorGraph,
    pub config: RotorConfig,
    /// old vertex -> new vertex (members of a component map to its sink).
    pub vertex_map: Vec<VertexId>,
    /// old arc -> new arc, `None` for arcs dropped inside components.
    pub arc_map: Vec<Option<ArcId>>,
    /// For each fresh sink, the original vertices it replaces.
    pub new_sinks: Vec<(VertexId, Vec<VertexId>)>,
}

/// Strongly connected components with no sink and no escaping arc, found by
/// Tarjan's algorithm restricted to plain vertices.
pub fn sink_components(graph: &RotorGraph) -> Vec<Vec<VertexId>> {
    let n = graph.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<VertexId> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<VertexId>> = Vec::new();

    // Iterative Tarjan to dodge recursion limits on long paths.
    enum Frame {
        Enter(VertexId),
        Resume(VertexId, usize),
    }
    for start in graph.plain_vertices() {
        if index[start.index()] != usize::MAX {
            continue;
        }
        let mut call = vec![Frame::Enter(start)];
        while let Some(frame) = call.pop() {
            match frame {
                Frame::Enter(v) => {
                    index[v.index()] = next_index;
                    low[v.index()] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v.index()] = true;
                    call.push(Frame::Resume(v, 0));
                }
                Frame::Resume(v, mut i) => {
                    let order = graph.rotor_order(v);
                    let mut descended = false;
                    while i < order.len() {
                        let w = graph.head(order[i]);
                        i += 1;
                        if graph.is_sink(w) {
                            continue;
                        }
                        if index[w.index()] == usize::MAX {
                            call.push(Frame::Resume(v, i));
                            call.push(Frame::Enter(w));
                            descended = true;
                            break;
                        } else if on_stack[w.index()] {
                            low[v.index()] = low[v.index()].min(index[w.index()]);
                        }
                    }
                    if descended {
                        continue;
                    }
                    if low[v.index()] == index[v.index()] {
                        let mut comp = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w.index()] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.reverse();
                        components.push(comp);
                    } else if let Some(Frame::Resume(p, _)) = call.last() {
                        let p = *p;
                        low[p.index()] = low[p.index()].min(low[v.index()]);
                    }
                }
            }
        }
    }

    // Keep only components with no arc escaping to the outside.
    components.retain(|comp| {
        let inside: std::collections::HashSet<VertexId> = comp.iter().copied().collect();
        comp.iter().all(|&v| {
            graph
                .rotor_order(v)
                .iter()
                .all(|&a| inside.contains(&graph.head(a)))
        })
    });
    components
}

/// Replace every sink component by a fresh sink of the same name family.
/// Arcs into a component are redirected to its sink; arcs inside are
/// dropped. The result is stopping on every connected component.
pub fn contract_sink_components(graph: &RotorGraph, config: &RotorConfig) -> Contraction {
    let comps = sink_components(graph);
    let n = graph.vertex_count();
    let mut comp_of = vec![usize::MAX; n];
    for (ci, comp) in comps.iter().enumerate() {
        for v in comp {
            comp_of[v.index()] = ci;
        }
    }

    let mut builder = RotorGraphBuilder::new();
    let mut vertex_map = vec![VertexId(0); n];
    for v in graph.vertices() {
        if comp_of[v.index()] == usize::MAX {
            vertex_map[v.index()] = builder.add_vertex(graph.name(v), graph.role(v));
        }
    }
    let mut new_sinks = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        let sink = builder.add_vertex(format!("@sc{ci}"), VertexRole::Sink);
        for v in comp {
            vertex_map[v.index()] = sink;
        }
        new_sinks.push((sink, comp.clone()));
    }

    let mut arc_map: Vec<Option<ArcId>> = vec![None; graph.arc_count()];
    for (a, arc) in graph.arcs() {
        if comp_of[arc.tail.index()] != usize::MAX {
            continue; // interior arc of a component (tails never escape)
        }
        arc_map[a.index()] =
            Some(builder.add_arc(vertex_map[arc.tail.index()], vertex_map[arc.head.index()]));
    }
    for v in graph.plain_vertices() {
        if comp_of[v.index()] != usize::MAX {
            continue;
        }
        let order: Vec<ArcId> = graph
            .rotor_order(v)
            .iter()
            .map(|a| arc_map[a.index()].expect("surviving vertex keeps its arcs"))
            .collect();
        builder.set_rotor_order(vertex_map[v.index()], order);
    }
    let new_graph = builder.finish().expect("contraction preserves validity");
    let mut new_config = RotorConfig::empty(&new_graph);
    for u in config.defined_vertices() {
        if comp_of[u.index()] == usize::MAX {
            if let Some(a) = arc_map[config.arc(u).index()] {
                new_config
                    .set(&new_graph, vertex_map[u.index()], a)
                    .expect("config maps onto surviving arcs");
            }
        }
    }
    Contraction {
        graph: new_graph,
        config: new_config,
        vertex_map,
        arc_map,
        new_sinks,
    }
}

/// One rotor graph per connected component of the undirected shadow,
/// with the old-to-new vertex maps.
pub fn split_components(graph: &RotorGraph) -> Vec<(RotorGraph, Vec<(VertexId, VertexId)>)> {
    let n = graph.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0usize;
    for v in graph.vertices() {
        if comp[v.index()] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::new();
        comp[v.index()] = count;
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            for &w in graph.neighbors(u) {
                if comp[w.index()] == usize::MAX {
                    comp[w.index()] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    let mut out = Vec::new();
    for ci in 0..count {
        let mut builder = RotorGraphBuilder::new();
        let mut map: Vec<(VertexId, VertexId)> = Vec::new();
        let mut new_id = vec![None; n];
        for v in graph.vertices() {
            if comp[v.index()] == ci {
                let nv = builder.add_vertex(graph.name(v), graph.role(v));
                new_id[v.index()] = Some(nv);
                map.push((v, nv));
            }
        }
        let mut arc_map = vec![None; graph.arc_count()];
        for (a, arc) in graph.arcs() {
            if comp[arc.tail.index()] == ci {
                arc_map[a.index()] = Some(builder.add_arc(
                    new_id[arc.tail.index()].unwrap(),
                    new_id[arc.head.index()].unwrap(),
                ));
            }
        }
        for v in graph.plain_vertices() {
            if comp[v.index()] == ci {
                let order: Vec<ArcId> = graph
                    .rotor_order(v)
                    .iter()
                    .map(|a| arc_map[a.index()].unwrap())
                    .collect();
                builder.set_rotor_order(new_id[v.index()].unwrap(), order);
            }
        }
        let g = builder
            .finish()
            .expect("split requires a sink in every component; contract sink components first");
        out.push((g, map));
    }
    out
}
