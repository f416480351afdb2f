//! Closed-form results on the simple path graph: s0 - u1 - ... - un - s1,
//! each interior vertex with one arc left and one arc right.

use crate::graph::{RotorConfig, RotorGraph, RotorGraphBuilder, VertexId, VertexRole};
use num_bigint::BigUint;
use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathDirection {
    TowardS0,
    TowardS1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathSink {
    S0,
    S1,
}

/// Compact path instance: `dirs[i]` is the current direction of `u_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathInstance {
    dirs: Vec<PathDirection>,
}

impl PathInstance {
    pub fn new(dirs: Vec<PathDirection>) -> Self {
        assert!(!dirs.is_empty(), "path needs at least one interior vertex");
        PathInstance { dirs }
    }

    /// Interior directions from a bit string, '1' meaning toward s1.
    pub fn from_bits(bits: &str) -> Option<Self> {
        if bits.is_empty() {
            return None;
        }
        let mut dirs = Vec::with_capacity(bits.len());
        for c in bits.chars() {
            dirs.push(match c {
                '0' => PathDirection::TowardS0,
                '1' => PathDirection::TowardS1,
                _ => return None,
            });
        }
        Some(PathInstance { dirs })
    }

    pub fn interior_count(&self) -> usize {
        self.dirs.len()
    }

    /// Direction of `u_i`, 1-based.
    pub fn direction(&self, i: usize) -> PathDirection {
        self.dirs[i - 1]
    }

    pub fn set_direction(&mut self, i: usize, d: PathDirection) {
        self.dirs[i - 1] = d;
    }

    /// Number of interior vertices directed toward s1; a complete invariant
    /// of the cycle-push equivalence class.
    pub fn n1(&self) -> usize {
        self.dirs
            .iter()
            .filter(|d| **d == PathDirection::TowardS1)
            .count()
    }

    /// Exit sink of every interior vertex: `u_i` exits via s0 exactly when
    /// `i <= n - n1`.
    pub fn exit_pattern(&self) -> Vec<PathSink> {
        let n = self.interior_count();
        let n1 = self.n1();
        (1..=n)
            .map(|i| if i <= n - n1 { PathSink::S0 } else { PathSink::S1 })
            .collect()
    }

    pub fn exit_of(&self, i: usize) -> PathSink {
        self.exit_pattern()[i - 1]
    }

    /// Route one particle from `u_i` all the way to a sink, updating the
    /// directions in place; returns the sink reached. O(1) amortized per
    /// step over the compact representation.
    pub fn route_particle(&mut self, i: usize) -> PathSink {
        let n = self.interior_count();
        assert!((1..=n).contains(&i));
        let mut pos = i as isize; // 1..=n interior, 0 = s0, n+1 = s1
        loop {
            let idx = pos as usize;
            let dir = self.dirs[idx - 1];
            let next = match dir {
                PathDirection::TowardS0 => {
                    self.dirs[idx - 1] = PathDirection::TowardS1;
                    pos - 1
                }
                PathDirection::TowardS1 => {
                    self.dirs[idx - 1] = PathDirection::TowardS0;
                    pos + 1
                }
            };
            if next == 0 {
                return PathSink::S0;
            }
            if next == n as isize + 1 {
                return PathSink::S1;
            }
            pos = next;
        }
    }

    /// Vertices directed toward `u_i` strictly between s0 and `u_i` (`r0`)
    /// and strictly between `u_i` and s1 (`r1`).
    pub fn r0_r1(&self, i: usize) -> (usize, usize) {
        let r0 = self.dirs[..i - 1]
            .iter()
            .filter(|d| **d == PathDirection::TowardS1)
            .count();
        let r1 = self.dirs[i..]
            .iter()
            .filter(|d| **d == PathDirection::TowardS0)
            .count();
        (r0, r1)
    }

    /// Exit rule stated through `r0`/`r1`: the particle from `u_i` reaches
    /// s1 iff `r1 < r0`, or `r1 = r0` and `u_i` points toward s1.
    pub fn exit_by_r_rule(&self, i: usize) -> PathSink {
        let (r0, r1) = self.r0_r1(i);
        let toward_s1 = self.direction(i) == PathDirection::TowardS1;
        if r1 < r0 || (r1 == r0 && toward_s1) {
            PathSink::S1
        } else {
            PathSink::S0
        }
    }

    /// Expand into an explicit rotor multigraph plus matching configuration.
    pub fn to_rotor_graph(&self) -> (RotorGraph, RotorConfig) {
        let n = self.interior_count();
        let mut b = RotorGraphBuilder::new();
        let s0 = b.add_vertex("s0", VertexRole::Sink);
        let interior: Vec<VertexId> = (1..=n)
            .map(|i| b.add_vertex(format!("u{i}"), VertexRole::Plain))
            .collect();
        let s1 = b.add_vertex("s1", VertexRole::Sink);
        let left_of = |i: usize| if i == 1 { s0 } else { interior[i - 2] };
        let right_of = |i: usize| if i == n { s1 } else { interior[i] };
        let mut assignment = Vec::new();
        for i in 1..=n {
            let u = interior[i - 1];
            let left = b.add_arc(u, left_of(i));
            let right = b.add_arc(u, right_of(i));
            b.set_rotor_order(u, vec![left, right]);
            assignment.push((
                u,
                match self.dirs[i - 1] {
                    PathDirection::TowardS0 => left,
                    PathDirection::TowardS1 => right,
                },
            ));
        }
        let graph = b.finish().expect("path graph is well formed");
        let config = RotorConfig::new(&graph, &assignment).expect("directions are out-arcs");
        (graph, config)
    }

    /// Read the directions back from an explicit path graph configuration.
    pub fn from_rotor_graph(graph: &RotorGraph, config: &RotorConfig) -> Option<PathInstance> {
        let n = graph.vertex_count().checked_sub(2)?;
        if n == 0 {
            return None;
        }
        let mut dirs = Vec::with_capacity(n);
        for i in 1..=n {
            let u = graph.vertex_by_name(&format!("u{i}"))?;
            let right_name = if i == n { "s1".to_string() } else { format!("u{}", i + 1) };
            let right = graph.vertex_by_name(&right_name)?;
            let head = graph.head(config.get(u)?);
            dirs.push(if head == right {
                PathDirection::TowardS1
            } else {
                PathDirection::TowardS0
            });
        }
        Some(PathInstance { dirs })
    }
}

/// Class index after routing one particle from `u_i` out of class `k`:
/// `(k + i) mod (n + 1)`.
pub fn class_after_routing(n: usize, k: usize, i: usize) -> usize {
    assert!(k <= n && (1..=n).contains(&i));
    (k + i) % (n + 1)
}

/// Outcome of routing a batch of particles from class `k`: final class and
/// the number of particles absorbed by s1. Start indices carry particle
/// multiplicities so that exponential batches stay exact.
pub fn multi_particle_outcome(
    n: usize,
    k: usize,
    starts: &[(usize, BigUint)],
) -> (usize, BigUint) {
    let modulus = BigUint::from(n as u64 + 1);
    let mut total = BigUint::from(k as u64);
    for (i, count) in starts {
        assert!((1..=n).contains(i));
        total += BigUint::from(*i as u64) * count;
    }
    let (q, r) = total.div_rem(&modulus);
    let final_class: u64 = r.try_into().expect("class fits machine word");
    (final_class as usize, q)
}

/// Canonical acyclic member of class `k`: the last `k` interior vertices
/// point toward s1.
pub fn canonical_class_member(n: usize, k: usize) -> PathInstance {
    assert!(k <= n);
    let dirs = (1..=n)
        .map(|i| {
            if i <= n - k {
                PathDirection::TowardS0
            } else {
                PathDirection::TowardS1
            }
        })
        .collect();
    PathInstance::new(dirs)
}
