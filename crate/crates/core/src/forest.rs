//! Rooted forests, topological event streams and ground-truth query oracles.
//!
//! Nodes get dense internal ids in insertion order. A removed leaf keeps its
//! id slot (marked dead) so ids are never reused.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("invalid event #{index}: {reason}")]
    InvalidEvent { index: usize, reason: String },
    #[error("invalid forest: {0}")]
    InvalidForest(String),
    #[error("{0} is not a live node")]
    NotPresent(NodeId),
    #[error("{0} and {1} lie in different trees")]
    CrossTree(NodeId, NodeId),
    #[error("routing from a node to itself is undefined")]
    SelfRoute,
}

/// One step of the dynamic model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologicalEvent {
    InsertRoot { id: String },
    InsertChild { id: String, parent: String },
    RemoveLeaf { id: String },
}

impl TopologicalEvent {
    pub fn root(id: impl Into<String>) -> Self {
        TopologicalEvent::InsertRoot { id: id.into() }
    }

    pub fn child(id: impl Into<String>, parent: impl Into<String>) -> Self {
        TopologicalEvent::InsertChild {
            id: id.into(),
            parent: parent.into(),
        }
    }

    pub fn remove(id: impl Into<String>) -> Self {
        TopologicalEvent::RemoveLeaf { id: id.into() }
    }

    /// The node the event inserts or removes.
    pub fn id(&self) -> &str {
        match self {
            TopologicalEvent::InsertRoot { id }
            | TopologicalEvent::InsertChild { id, .. }
            | TopologicalEvent::RemoveLeaf { id } => id,
        }
    }
}

/// A validated stream of topological events. Every prefix of a valid stream
/// is itself valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSequence {
    events: Vec<TopologicalEvent>,
    max_n: usize,
}

impl EventSequence {
    pub fn new(events: Vec<TopologicalEvent>) -> Result<Self, ForestError> {
        let mut replay = Replay::default();
        let mut max_n = 0;
        for (i, e) in events.iter().enumerate() {
            replay.apply(i, e)?;
            max_n = max_n.max(replay.builder.live);
        }
        Ok(EventSequence { events, max_n })
    }

    pub fn events(&self) -> &[TopologicalEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Largest number of simultaneously live nodes.
    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Number of insertion events.
    pub fn insertions(&self) -> usize {
        self.events
            .iter()
            .filter(|e| !matches!(e, TopologicalEvent::RemoveLeaf { .. }))
            .count()
    }

    pub fn prefix(&self, len: usize) -> EventSequence {
        // a prefix of a valid sequence is valid
        let events = self.events[..len].to_vec();
        let mut replay = Replay::default();
        let mut max_n = 0;
        for (i, e) in events.iter().enumerate() {
            replay.apply(i, e).expect("prefix of a valid sequence");
            max_n = max_n.max(replay.builder.live);
        }
        EventSequence { events, max_n }
    }
}

/// Incremental construction with the dynamic model's rules.
#[derive(Debug, Clone, Default)]
pub struct ForestBuilder {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    alive: Vec<bool>,
    port: Vec<u32>,
    inserted_children: Vec<u32>,
    roots: Vec<NodeId>,
    live: usize,
}

impl ForestBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, parent: Option<NodeId>, port: u32) -> NodeId {
        let id = NodeId(self.parent.len() as u32);
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.alive.push(true);
        self.port.push(port);
        self.inserted_children.push(0);
        self.live += 1;
        id
    }

    pub fn insert_root(&mut self) -> NodeId {
        let id = self.push(None, 0);
        self.roots.push(id);
        id
    }

    pub fn insert_child(&mut self, parent: NodeId) -> Result<NodeId, ForestError> {
        if !self.is_live(parent) {
            return Err(ForestError::NotPresent(parent));
        }
        self.inserted_children[parent.index()] += 1;
        let port = self.inserted_children[parent.index()];
        let id = self.push(Some(parent), port);
        self.children[parent.index()].push(id);
        Ok(id)
    }

    pub fn remove_leaf(&mut self, v: NodeId) -> Result<(), String> {
        if !self.is_live(v) {
            return Err(format!("{v} is not a live node"));
        }
        let Some(p) = self.parent[v.index()] else {
            return Err(format!("{v} is a root; roots are never removed"));
        };
        if !self.children[v.index()].is_empty() {
            return Err(format!("{v} is not a leaf"));
        }
        self.alive[v.index()] = false;
        self.children[p.index()].retain(|&c| c != v);
        self.live -= 1;
        Ok(())
    }

    pub fn is_live(&self, v: NodeId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn live(&self) -> usize {
        self.live
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    pub fn finish(self) -> RootedForest {
        RootedForest::from_builder(self)
    }
}

#[derive(Default)]
struct Replay {
    builder: ForestBuilder,
    ids: BTreeMap<String, NodeId>,
}

impl Replay {
    fn apply(&mut self, index: usize, event: &TopologicalEvent) -> Result<NodeId, ForestError> {
        let invalid = |reason: String| ForestError::InvalidEvent { index, reason };
        match event {
            TopologicalEvent::InsertRoot { id } => {
                if self.ids.contains_key(id) {
                    return Err(invalid(format!("id {id:?} already used")));
                }
                let v = self.builder.insert_root();
                self.ids.insert(id.clone(), v);
                Ok(v)
            }
            TopologicalEvent::InsertChild { id, parent } => {
                if self.ids.contains_key(id) {
                    return Err(invalid(format!("id {id:?} already used")));
                }
                let p = *self
                    .ids
                    .get(parent)
                    .ok_or_else(|| invalid(format!("unknown parent {parent:?}")))?;
                let v = self
                    .builder
                    .insert_child(p)
                    .map_err(|_| invalid(format!("parent {parent:?} was removed")))?;
                self.ids.insert(id.clone(), v);
                Ok(v)
            }
            TopologicalEvent::RemoveLeaf { id } => {
                let v = *self
                    .ids
                    .get(id)
                    .ok_or_else(|| invalid(format!("unknown node {id:?}")))?;
                self.builder
                    .remove_leaf(v)
                    .map_err(|r| invalid(format!("{id:?}: {r}")))?;
                Ok(v)
            }
        }
    }
}

/// Replays `seq` and returns the final forest together with the map from
/// external tokens to internal ids (retired ids included).
pub fn build_from_events(
    seq: &EventSequence,
) -> Result<(RootedForest, BTreeMap<String, NodeId>), ForestError> {
    let mut replay = Replay::default();
    for (i, e) in seq.events().iter().enumerate() {
        replay.apply(i, e)?;
    }
    Ok((replay.builder.finish(), replay.ids))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryKind {
    Adjacency,
    Sibling,
    Connectivity,
    Ancestry,
    Nca,
    Distance,
    Routing,
}

impl QueryKind {
    pub const ALL: [QueryKind; 7] = [
        QueryKind::Adjacency,
        QueryKind::Sibling,
        QueryKind::Connectivity,
        QueryKind::Ancestry,
        QueryKind::Nca,
        QueryKind::Distance,
        QueryKind::Routing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Adjacency => "adjacency",
            QueryKind::Sibling => "sibling",
            QueryKind::Connectivity => "connectivity",
            QueryKind::Ancestry => "ancestry",
            QueryKind::Nca => "nca",
            QueryKind::Distance => "distance",
            QueryKind::Routing => "routing",
        }
    }

    pub fn parse(s: &str) -> Option<QueryKind> {
        QueryKind::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryAnswer {
    Bool(bool),
    Node(NodeId),
    Distance(u32),
    Port(u32),
}

impl QueryAnswer {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            QueryAnswer::Bool(b) => Some(b),
            _ => None,
        }
    }
}

/// An immutable rooted forest with precomputed depths, tree membership and
/// DFS intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    alive: Vec<bool>,
    port: Vec<u32>,
    roots: Vec<NodeId>,
    n: usize,
    depth: Vec<u32>,
    tree_root: Vec<NodeId>,
    pre: Vec<u32>,
    post: Vec<u32>,
}

impl RootedForest {
    fn from_builder(b: ForestBuilder) -> Self {
        let slots = b.parent.len();
        let mut forest = RootedForest {
            parent: b.parent,
            children: b.children,
            alive: b.alive,
            port: b.port,
            roots: b.roots,
            n: b.live,
            depth: vec![0; slots],
            tree_root: (0..slots as u32).map(NodeId).collect(),
            pre: vec![0; slots],
            post: vec![0; slots],
        };
        forest.index();
        forest
    }

    /// Builds a forest from a parent table; node `i` gets id `i` and
    /// children are ordered by id.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self, ForestError> {
        let n = parents.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        let mut port = vec![0; n];
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => roots.push(NodeId(v as u32)),
                Some(p) if p >= n => {
                    return Err(ForestError::InvalidForest(format!(
                        "node {v} has out-of-range parent {p}"
                    )))
                }
                Some(p) if p == v => {
                    return Err(ForestError::InvalidForest(format!("node {v} is its own parent")))
                }
                Some(p) => {
                    children[p].push(NodeId(v as u32));
                    port[v] = children[p].len() as u32;
                }
            }
        }
        let b = ForestBuilder {
            parent: parents.iter().map(|p| p.map(|p| NodeId(p as u32))).collect(),
            children,
            alive: vec![true; n],
            port,
            inserted_children: Vec::new(),
            roots,
            live: n,
        };
        let forest = RootedForest::from_builder(b);
        // every node must have been reached from a root
        let reached = forest.pre_order().count();
        if reached != n {
            return Err(ForestError::InvalidForest(format!(
                "{} nodes lie on a parent cycle",
                n - reached
            )));
        }
        Ok(forest)
    }

    fn index(&mut self) {
        let mut counter = 0u32;
        let mut stack: Vec<(NodeId, usize)> = Vec::new();
        for &r in &self.roots {
            self.depth[r.index()] = 0;
            self.tree_root[r.index()] = r;
            self.pre[r.index()] = counter;
            counter += 1;
            stack.push((r, 0));
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&c) = self.children[v.index()].get(*next) {
                    *next += 1;
                    self.depth[c.index()] = self.depth[v.index()] + 1;
                    self.tree_root[c.index()] = r;
                    self.pre[c.index()] = counter;
                    counter += 1;
                    stack.push((c, 0));
                } else {
                    self.post[v.index()] = counter;
                    counter += 1;
                    stack.pop();
                }
            }
        }
    }

    /// Number of live nodes.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of id slots, including retired ids.
    pub fn id_bound(&self) -> usize {
        self.parent.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    /// Live nodes in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.parent.len() as u32)
            .map(NodeId)
            .filter(move |v| self.alive[v.index()])
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.index()]
    }

    pub fn is_root(&self, v: NodeId) -> bool {
        self.parent[v.index()].is_none()
    }

    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v.index()]
    }

    /// The root of the tree containing `v`.
    pub fn tree_of(&self, v: NodeId) -> NodeId {
        self.tree_root[v.index()]
    }

    /// Port number of `v` at its parent: children are numbered from 1 in
    /// insertion order (removed children keep their number). Roots get 0.
    pub fn port(&self, v: NodeId) -> u32 {
        self.port[v.index()]
    }

    /// DFS entry and exit times; both lie in `0..2n`.
    pub fn interval(&self, v: NodeId) -> (u32, u32) {
        (self.pre[v.index()], self.post[v.index()])
    }

    /// All live nodes, tree by tree, parents before children.
    pub fn pre_order(&self) -> impl Iterator<Item = NodeId> + '_ {
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        core::iter::from_fn(move || {
            let v = stack.pop()?;
            stack.extend(self.children[v.index()].iter().rev().copied());
            Some(v)
        })
    }

    /// The live members of the tree rooted at `root`, in insertion order.
    pub fn tree_members(&self, root: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v.index()].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// The tree rooted at `root` as a standalone forest. Returns the forest
    /// and, for each of its nodes, the id in `self`.
    pub fn subtree_forest(&self, root: NodeId) -> (RootedForest, Vec<NodeId>) {
        let members = self.tree_members(root);
        let local: BTreeMap<NodeId, usize> =
            members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let parents: Vec<Option<usize>> = members
            .iter()
            .map(|&v| self.parent(v).map(|p| local[&p]))
            .collect();
        let mut forest = RootedForest::from_parents(&parents).expect("subtree of a valid forest");
        for (i, &v) in members.iter().enumerate() {
            forest.port[i] = self.port(v);
        }
        (forest, members)
    }

    pub fn is_ancestor(&self, u: NodeId, v: NodeId) -> bool {
        let (pu, qu) = self.interval(u);
        let (pv, qv) = self.interval(v);
        pu <= pv && qv <= qu
    }

    pub fn nca(&self, u: NodeId, v: NodeId) -> Option<NodeId> {
        if self.tree_of(u) != self.tree_of(v) {
            return None;
        }
        let (mut a, mut b) = (u, v);
        while self.depth(a) > self.depth(b) {
            a = self.parent(a)?;
        }
        while self.depth(b) > self.depth(a) {
            b = self.parent(b)?;
        }
        while a != b {
            a = self.parent(a)?;
            b = self.parent(b)?;
        }
        Some(a)
    }

    /// Ground truth for every query kind.
    ///
    /// Conventions: `Ancestry(u, v)` holds when `u` is an ancestor of `v` or
    /// `u = v`; `Sibling(u, u)` is true and distinct roots are never
    /// siblings; `Routing(u, v)` is the port at `u` on the path to `v`, where
    /// port 0 leads to the parent.
    pub fn oracle(&self, q: QueryKind, u: NodeId, v: NodeId) -> Result<QueryAnswer, ForestError> {
        for w in [u, v] {
            if !self.contains(w) {
                return Err(ForestError::NotPresent(w));
            }
        }
        let same_tree = self.tree_of(u) == self.tree_of(v);
        let answer = match q {
            QueryKind::Adjacency => QueryAnswer::Bool(
                self.parent(u) == Some(v) || self.parent(v) == Some(u),
            ),
            QueryKind::Sibling => QueryAnswer::Bool(
                u == v || (self.parent(u).is_some() && self.parent(u) == self.parent(v)),
            ),
            QueryKind::Connectivity => QueryAnswer::Bool(same_tree),
            QueryKind::Ancestry => QueryAnswer::Bool(self.is_ancestor(u, v)),
            QueryKind::Nca => {
                QueryAnswer::Node(self.nca(u, v).ok_or(ForestError::CrossTree(u, v))?)
            }
            QueryKind::Distance => {
                let w = self.nca(u, v).ok_or(ForestError::CrossTree(u, v))?;
                QueryAnswer::Distance(self.depth(u) + self.depth(v) - 2 * self.depth(w))
            }
            QueryKind::Routing => {
                if !same_tree {
                    return Err(ForestError::CrossTree(u, v));
                }
                if u == v {
                    return Err(ForestError::SelfRoute);
                }
                if self.is_ancestor(u, v) {
                    let mut w = v;
                    while self.parent(w) != Some(u) {
                        w = self.parent(w).expect("u is a proper ancestor of v");
                    }
                    QueryAnswer::Port(self.port(w))
                } else {
                    QueryAnswer::Port(0)
                }
            }
        };
        Ok(answer)
    }
}

fn token(i: usize) -> String {
    format!("v{i}")
}

/// A seeded random forest of `n` insertions: every new node becomes a root
/// with probability 1/8 and otherwise attaches below a uniformly chosen
/// earlier node.
pub fn random_forest(n: usize, seed: u64) -> EventSequence {
    assert!(n >= 1, "random_forest needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::with_capacity(n);
    events.push(TopologicalEvent::root(token(0)));
    for i in 1..n {
        if rng.gen_ratio(1, 8) {
            events.push(TopologicalEvent::root(token(i)));
        } else {
            let p = rng.gen_range(0..i);
            events.push(TopologicalEvent::child(token(i), token(p)));
        }
    }
    EventSequence {
        events,
        max_n: n,
    }
}

/// Like [`random_forest`] but interleaves leaf removals: before each
/// insertion, with probability 1/4, a uniformly chosen removable leaf is
/// deleted.
pub fn random_stream(n: usize, seed: u64) -> EventSequence {
    assert!(n >= 1, "random_stream needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ForestBuilder::new();
    let mut events = Vec::new();
    let mut live: Vec<NodeId> = Vec::new();
    for i in 0..n {
        if i > 0 && rng.gen_ratio(1, 4) {
            let leaves: Vec<NodeId> = live
                .iter()
                .copied()
                .filter(|&v| b.parent(v).is_some() && b.children[v.index()].is_empty())
                .collect();
            if !leaves.is_empty() {
                let v = leaves[rng.gen_range(0..leaves.len())];
                b.remove_leaf(v).expect("chosen among removable leaves");
                live.retain(|&w| w != v);
                events.push(TopologicalEvent::remove(token(v.index())));
            }
        }
        let v = if live.is_empty() || rng.gen_ratio(1, 8) {
            events.push(TopologicalEvent::root(token(i)));
            b.insert_root()
        } else {
            let p = live[rng.gen_range(0..live.len())];
            events.push(TopologicalEvent::child(token(i), token(p.index())));
            b.insert_child(p).expect("parent is live")
        };
        live.push(v);
    }
    EventSequence::new(events).expect("generator emits valid events")
}
