//! Insertion-only graph streams: each event adds one node together with its
//! edges to earlier nodes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forest::{ForestError, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEvent {
    pub id: String,
    pub neighbors: Vec<String>,
}

impl GraphEvent {
    pub fn new(id: impl Into<String>, neighbors: impl IntoIterator<Item = String>) -> Self {
        GraphEvent {
            id: id.into(),
            neighbors: neighbors.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSequence {
    events: Vec<GraphEvent>,
}

impl GraphSequence {
    pub fn new(events: Vec<GraphEvent>) -> Result<Self, ForestError> {
        let seq = GraphSequence { events };
        seq.build()?;
        Ok(seq)
    }

    pub fn events(&self) -> &[GraphEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The final graph and the external-to-internal id map.
    pub fn build(&self) -> Result<(SimpleGraph, BTreeMap<String, NodeId>), ForestError> {
        let mut ids = BTreeMap::new();
        let mut g = SimpleGraph::default();
        for (index, e) in self.events.iter().enumerate() {
            let invalid = |reason: String| ForestError::InvalidEvent { index, reason };
            if ids.contains_key(&e.id) {
                return Err(invalid(format!("id {:?} already used", e.id)));
            }
            let mut nbrs = Vec::with_capacity(e.neighbors.len());
            for nb in &e.neighbors {
                let v = *ids
                    .get(nb)
                    .ok_or_else(|| invalid(format!("unknown neighbor {nb:?}")))?;
                if nbrs.contains(&v) {
                    return Err(invalid(format!("duplicate neighbor {nb:?}")));
                }
                nbrs.push(v);
            }
            let v = g.add_node(&nbrs);
            ids.insert(e.id.clone(), v);
        }
        Ok((g, ids))
    }
}

/// Undirected simple graph over dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<NodeId>>,
}

impl SimpleGraph {
    pub fn add_node(&mut self, neighbors: &[NodeId]) -> NodeId {
        let v = NodeId(self.adj.len() as u32);
        self.adj.push(neighbors.to_vec());
        for &u in neighbors {
            self.adj[u.index()].push(v);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.index()].contains(&v)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A seeded random graph on `n` nodes with maximum degree `k`. Each new
/// node connects to between 0 and `k` earlier nodes that still have spare
/// degree.
pub fn random_bounded_degree(n: usize, k: usize, seed: u64) -> GraphSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for i in 0..n {
        let mut open: Vec<usize> = (0..i).filter(|&j| degree[j] < k).collect();
        open.shuffle(&mut rng);
        let want = rng.gen_range(0..=k.min(open.len()));
        open.truncate(want);
        open.sort_unstable();
        for &j in &open {
            degree[j] += 1;
        }
        degree.push(open.len());
        events.push(GraphEvent::new(
            format!("g{i}"),
            open.into_iter().map(|j| format!("g{j}")),
        ));
    }
    GraphSequence { events }
}
