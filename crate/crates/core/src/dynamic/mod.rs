//! Online encoders over event streams.
//!
//! Each inserted node receives a label at insertion time and keeps it
//! forever. Labels are equal-width integer fields; the field width is
//! `max(1, ⌈log₂ t⌉)` where `t` counts the insertions so far, this one
//! included. The decoder recovers the width as `bit_len / field_count`, so
//! labels of different ages can be compared directly.

pub mod reductions;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bits::{ceil_log2, pack_fields, Label, LabelError};
use crate::forest::{ForestBuilder, ForestError, NodeId, QueryKind, TopologicalEvent};
use crate::graph::GraphEvent;
use crate::schemes::{self, SchemeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicError {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("unknown dynamic scheme {0:?}")]
    UnknownScheme(String),
    #[error("new node's edges reach {0} different components")]
    ComponentMerge(usize),
    #[error("degree bound {k} exceeded at {node}")]
    DegreeExceeded { node: String, k: u32 },
    #[error("{scheme} cannot process {what}")]
    UnsupportedEvent { scheme: String, what: &'static str },
    #[error("{scheme} does not answer {query} queries")]
    UnsupportedQuery { scheme: String, query: QueryKind },
    #[error("malformed label: {0}")]
    Malformed(String),
    #[error(transparent)]
    Label(#[from] LabelError),
}

impl From<SchemeError> for DynamicError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Label(l) => DynamicError::Label(l),
            other => DynamicError::Malformed(format!("{other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicKind {
    /// `(id, parent id)`: adjacency and sibling.
    Pair,
    /// `(id, component id)`: connectivity, on forests or general graphs.
    Connectivity,
    /// `(id, parent id, component id)`.
    Triple,
    /// Own id plus the ids of up to `k` earlier neighbours.
    BoundedDegree(u32),
}

impl DynamicKind {
    pub fn parse(name: &str) -> Result<Self, DynamicError> {
        match name {
            "dyn-adj-sib" => Ok(DynamicKind::Pair),
            "dyn-conn" => Ok(DynamicKind::Connectivity),
            "dyn-triple" => Ok(DynamicKind::Triple),
            _ => name
                .strip_prefix("dyn-deg")
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .map(DynamicKind::BoundedDegree)
                .ok_or_else(|| DynamicError::UnknownScheme(name.into())),
        }
    }

    pub fn name(self) -> String {
        match self {
            DynamicKind::Pair => "dyn-adj-sib".into(),
            DynamicKind::Connectivity => "dyn-conn".into(),
            DynamicKind::Triple => "dyn-triple".into(),
            DynamicKind::BoundedDegree(k) => format!("dyn-deg{k}"),
        }
    }

    pub fn queries(self) -> Vec<QueryKind> {
        match self {
            DynamicKind::Pair => vec![QueryKind::Adjacency, QueryKind::Sibling],
            DynamicKind::Connectivity => vec![QueryKind::Connectivity],
            DynamicKind::Triple => vec![
                QueryKind::Adjacency,
                QueryKind::Sibling,
                QueryKind::Connectivity,
            ],
            DynamicKind::BoundedDegree(_) => vec![QueryKind::Adjacency],
        }
    }

    pub fn field_count(self) -> usize {
        match self {
            DynamicKind::Pair | DynamicKind::Connectivity => 2,
            DynamicKind::Triple => 3,
            DynamicKind::BoundedDegree(k) => k as usize + 1,
        }
    }

    /// Label width of the `t`-th insertion (1-based).
    pub fn width_at(self, t: u64) -> usize {
        self.field_count() * field_width(t) as usize
    }
}

/// Width of each field for the `t`-th insertion.
pub fn field_width(t: u64) -> u32 {
    ceil_log2(t).max(1)
}

fn fields(label: &Label, count: usize) -> Result<Vec<u64>, DynamicError> {
    if label.is_empty() || !label.len().is_multiple_of(count) {
        return Err(DynamicError::Malformed(format!(
            "{} bits is not a multiple of {count} fields",
            label.len()
        )));
    }
    let w = label.len() / count;
    if w > 64 {
        return Err(DynamicError::Malformed(format!("field width {w}")));
    }
    (0..count)
        .map(|i| Ok(label.get_uint(i * w, w as u32)?))
        .collect()
}

/// Answers `q` from two labels of a `kind` encoder.
pub fn decode(kind: DynamicKind, q: QueryKind, a: &Label, b: &Label) -> Result<bool, DynamicError> {
    if !kind.queries().contains(&q) {
        return Err(DynamicError::UnsupportedQuery {
            scheme: kind.name(),
            query: q,
        });
    }
    match kind {
        DynamicKind::Pair => Ok(schemes::kannan_decode(q, a, b)?),
        DynamicKind::Connectivity => Ok(fields(a, 2)?[1] == fields(b, 2)?[1]),
        DynamicKind::Triple => {
            let (fa, fb) = (fields(a, 3)?, fields(b, 3)?);
            Ok(match q {
                QueryKind::Connectivity => fa[2] == fb[2],
                QueryKind::Adjacency => (fa[1] == fb[0]) != (fb[1] == fa[0]),
                _ => fa[1] == fb[1] && (fa[0] == fa[1]) == (fb[0] == fb[1]),
            })
        }
        DynamicKind::BoundedDegree(k) => {
            let count = k as usize + 1;
            let (fa, fb) = (fields(a, count)?, fields(b, count)?);
            // unused slots hold the node's own id, which never matches another node
            Ok(fa[0] != fb[0] && (fa[1..].contains(&fb[0]) || fb[1..].contains(&fa[0])))
        }
    }
}

/// A single-writer online encoder.
#[derive(Debug, Clone)]
pub struct DynamicEncoder {
    kind: DynamicKind,
    forest: ForestBuilder,
    component: Vec<u64>,
    degree: Vec<u32>,
    ids: BTreeMap<String, NodeId>,
    labels: Vec<Label>,
    live: Vec<bool>,
}

impl DynamicEncoder {
    pub fn new(kind: DynamicKind) -> Self {
        DynamicEncoder {
            kind,
            forest: ForestBuilder::new(),
            component: Vec::new(),
            degree: Vec::new(),
            ids: BTreeMap::new(),
            labels: Vec::new(),
            live: Vec::new(),
        }
    }

    pub fn kind(&self) -> DynamicKind {
        self.kind
    }

    /// Number of insertions so far.
    pub fn inserted(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: NodeId) -> Option<&Label> {
        self.labels.get(v.index())
    }

    pub fn is_live(&self, v: NodeId) -> bool {
        self.live.get(v.index()).copied().unwrap_or(false)
    }

    pub fn node(&self, external: &str) -> Option<NodeId> {
        self.ids.get(external).copied()
    }

    /// Labels of live nodes in insertion order.
    pub fn live_labels(&self) -> impl Iterator<Item = (NodeId, &Label)> {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.live[*i])
            .map(|(i, l)| (NodeId(i as u32), l))
    }

    /// Every label ever emitted, removed nodes included.
    pub fn all_labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn max_bits(&self) -> usize {
        self.labels.iter().map(Label::len).max().unwrap_or(0)
    }

    fn emit(
        &mut self,
        v: NodeId,
        parent: Option<u64>,
        component: u64,
        neighbors: &[NodeId],
    ) -> Result<Label, DynamicError> {
        let t = self.labels.len() as u64 + 1;
        debug_assert_eq!(u64::from(v.0) + 1, t);
        let id = u64::from(v.0);
        let w = field_width(t);
        let label = match self.kind {
            DynamicKind::Pair => pack_fields(&[id, parent.unwrap_or(id)], w)?,
            DynamicKind::Connectivity => pack_fields(&[id, component], w)?,
            DynamicKind::Triple => pack_fields(&[id, parent.unwrap_or(id), component], w)?,
            DynamicKind::BoundedDegree(k) => {
                let mut f = vec![id; k as usize + 1];
                for (slot, nb) in f[1..].iter_mut().zip(neighbors) {
                    *slot = u64::from(nb.0);
                }
                pack_fields(&f, w)?
            }
        };
        self.component.push(component);
        self.labels.push(label.clone());
        self.live.push(true);
        Ok(label)
    }

    fn check_degree(&self, neighbors: &[NodeId], name: &str) -> Result<(), DynamicError> {
        if let DynamicKind::BoundedDegree(k) = self.kind {
            let over = neighbors.len() > k as usize
                || neighbors.iter().any(|nb| self.degree[nb.index()] >= k);
            if over {
                return Err(DynamicError::DegreeExceeded {
                    node: name.into(),
                    k,
                });
            }
        }
        Ok(())
    }

    fn bump_degrees(&mut self, neighbors: &[NodeId]) {
        for nb in neighbors {
            self.degree[nb.index()] += 1;
        }
        self.degree.push(neighbors.len() as u32);
    }

    pub fn insert_root(&mut self) -> Result<(NodeId, Label), DynamicError> {
        let v = self.forest.insert_root();
        let label = self.emit(v, None, u64::from(v.0), &[])?;
        self.degree.push(0);
        Ok((v, label))
    }

    pub fn insert_child(&mut self, parent: NodeId) -> Result<(NodeId, Label), DynamicError> {
        if !self.forest.is_live(parent) {
            return Err(ForestError::NotPresent(parent).into());
        }
        self.check_degree(&[parent], &format!("{}", NodeId(self.labels.len() as u32)))?;
        let v = self.forest.insert_child(parent)?;
        let comp = self.component[parent.index()];
        let label = self.emit(v, Some(u64::from(parent.0)), comp, &[parent])?;
        self.bump_degrees(&[parent]);
        Ok((v, label))
    }

    pub fn remove_leaf(&mut self, v: NodeId) -> Result<(), DynamicError> {
        self.forest.remove_leaf(v).map_err(|reason| {
            ForestError::InvalidEvent {
                index: self.labels.len(),
                reason,
            }
        })?;
        self.live[v.index()] = false;
        Ok(())
    }

    /// Applies one tree event; returns the new node and its label on
    /// insertion.
    pub fn apply(&mut self, event: &TopologicalEvent) -> Result<Option<(NodeId, Label)>, DynamicError> {
        let index = self.labels.len();
        let invalid = |reason: String| DynamicError::Forest(ForestError::InvalidEvent { index, reason });
        match event {
            TopologicalEvent::InsertRoot { id } => {
                if self.ids.contains_key(id) {
                    return Err(invalid(format!("id {id:?} already used")));
                }
                let (v, l) = self.insert_root()?;
                self.ids.insert(id.clone(), v);
                Ok(Some((v, l)))
            }
            TopologicalEvent::InsertChild { id, parent } => {
                if self.ids.contains_key(id) {
                    return Err(invalid(format!("id {id:?} already used")));
                }
                let p = *self
                    .ids
                    .get(parent)
                    .ok_or_else(|| invalid(format!("unknown parent {parent:?}")))?;
                let (v, l) = self.insert_child(p).map_err(|e| match e {
                    DynamicError::DegreeExceeded { k, .. } => {
                        DynamicError::DegreeExceeded { node: id.clone(), k }
                    }
                    DynamicError::Forest(ForestError::NotPresent(_)) => {
                        invalid(format!("parent {parent:?} was removed"))
                    }
                    other => other,
                })?;
                self.ids.insert(id.clone(), v);
                Ok(Some((v, l)))
            }
            TopologicalEvent::RemoveLeaf { id } => {
                let v = *self
                    .ids
                    .get(id)
                    .ok_or_else(|| invalid(format!("unknown node {id:?}")))?;
                self.remove_leaf(v)?;
                Ok(None)
            }
        }
    }

    /// Applies one graph event (a node and its edges to earlier nodes).
    /// Only the connectivity and bounded-degree encoders accept these.
    pub fn apply_graph(&mut self, event: &GraphEvent) -> Result<(NodeId, Label), DynamicError> {
        if matches!(self.kind, DynamicKind::Pair | DynamicKind::Triple) {
            return Err(DynamicError::UnsupportedEvent {
                scheme: self.kind.name(),
                what: "graph events",
            });
        }
        let index = self.labels.len();
        if self.ids.contains_key(&event.id) {
            return Err(ForestError::InvalidEvent {
                index,
                reason: format!("id {:?} already used", event.id),
            }
            .into());
        }
        let mut nbrs = Vec::with_capacity(event.neighbors.len());
        for nb in &event.neighbors {
            let v = self.ids.get(nb).copied().filter(|&v| self.is_live(v)).ok_or_else(|| {
                ForestError::InvalidEvent {
                    index,
                    reason: format!("unknown neighbor {nb:?}"),
                }
            })?;
            if nbrs.contains(&v) {
                return Err(ForestError::InvalidEvent {
                    index,
                    reason: format!("duplicate neighbor {nb:?}"),
                }
                .into());
            }
            nbrs.push(v);
        }
        self.check_degree(&nbrs, &event.id)?;
        let mut comps: Vec<u64> = nbrs.iter().map(|v| self.component[v.index()]).collect();
        comps.sort_unstable();
        comps.dedup();
        if comps.len() > 1 && self.kind == DynamicKind::Connectivity {
            return Err(DynamicError::ComponentMerge(comps.len()));
        }
        // graph nodes live in the builder as roots so ids stay aligned
        let v = self.forest.insert_root();
        let comp = comps.first().copied().unwrap_or(u64::from(v.0));
        let label = self.emit(v, None, comp, &nbrs)?;
        self.bump_degrees(&nbrs);
        self.ids.insert(event.id.clone(), v);
        Ok((v, label))
    }
}

/// Runs `kind` over a whole stream, returning the emission log in order.
pub fn run(
    kind: DynamicKind,
    seq: &crate::forest::EventSequence,
) -> Result<(DynamicEncoder, Vec<(NodeId, Label)>), DynamicError> {
    let mut enc = DynamicEncoder::new(kind);
    let mut log = Vec::with_capacity(seq.insertions());
    for e in seq.events() {
        if let Some(x) = enc.apply(e)? {
            log.push(x);
        }
    }
    Ok((enc, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{build_from_events, random_stream, EventSequence, QueryAnswer};
    use crate::graph::{random_bounded_degree, GraphSequence};

    fn tev(events: Vec<TopologicalEvent>) -> EventSequence {
        EventSequence::new(events).unwrap()
    }

    #[test]
    fn names() {
        for name in ["dyn-adj-sib", "dyn-conn", "dyn-triple", "dyn-deg3"] {
            assert_eq!(DynamicKind::parse(name).unwrap().name(), name);
        }
        assert!(DynamicKind::parse("dyn-deg0").is_err());
        assert!(DynamicKind::parse("dyn-degx").is_err());
    }

    #[test]
    fn first_root_is_zero_zero() {
        let mut enc = DynamicEncoder::new(DynamicKind::Pair);
        let (_, l) = enc.apply(&TopologicalEvent::root("r")).unwrap().unwrap();
        assert_eq!(l, Label::from_bit_str("00").unwrap());
        let mut enc = DynamicEncoder::new(DynamicKind::Triple);
        let (_, l) = enc.apply(&TopologicalEvent::root("r")).unwrap().unwrap();
        assert_eq!(l, Label::from_bit_str("000").unwrap());
    }

    #[test]
    fn tenth_insertion_uses_four_bit_fields() {
        let mut enc = DynamicEncoder::new(DynamicKind::Pair);
        enc.insert_root().unwrap();
        let mut last = None;
        for _ in 1..10 {
            last = Some(enc.insert_child(NodeId(0)).unwrap().1);
        }
        assert_eq!(last.unwrap().len(), 8);
    }

    #[test]
    fn triple_width_after_eight() {
        let mut enc = DynamicEncoder::new(DynamicKind::Triple);
        enc.insert_root().unwrap();
        for i in 1..8 {
            enc.insert_child(NodeId(i - 1)).unwrap();
        }
        assert_eq!(enc.max_bits(), 9);
    }

    #[test]
    fn connectivity_components() {
        let mut enc = DynamicEncoder::new(DynamicKind::Connectivity);
        let (_, a) = enc.apply(&TopologicalEvent::root("a")).unwrap().unwrap();
        let (_, b) = enc.apply(&TopologicalEvent::root("b")).unwrap().unwrap();
        assert!(!decode(DynamicKind::Connectivity, QueryKind::Connectivity, &a, &b).unwrap());
        let (_, c) = enc.apply(&TopologicalEvent::child("c", "a")).unwrap().unwrap();
        assert_eq!(fields(&c, 2).unwrap()[1], 0);
        assert!(decode(DynamicKind::Connectivity, QueryKind::Connectivity, &a, &c).unwrap());
    }

    #[test]
    fn graph_connectivity_rejects_merges() {
        let mut enc = DynamicEncoder::new(DynamicKind::Connectivity);
        enc.apply_graph(&GraphEvent::new("a", [])).unwrap();
        enc.apply_graph(&GraphEvent::new("b", [])).unwrap();
        let (_, c) = enc.apply_graph(&GraphEvent::new("c", ["a".into()])).unwrap();
        assert_eq!(fields(&c, 2).unwrap()[1], 0);
        assert_eq!(
            enc.apply_graph(&GraphEvent::new("d", ["a".into(), "b".into()])),
            Err(DynamicError::ComponentMerge(2))
        );
        // the rejected event changed nothing
        assert_eq!(enc.inserted(), 3);
        enc.apply_graph(&GraphEvent::new("d", ["a".into(), "c".into()])).unwrap();
    }

    #[test]
    fn pair_encoders_refuse_graph_events() {
        let mut enc = DynamicEncoder::new(DynamicKind::Pair);
        assert!(matches!(
            enc.apply_graph(&GraphEvent::new("a", [])),
            Err(DynamicError::UnsupportedEvent { .. })
        ));
    }

    #[test]
    fn bounded_degree_labels() {
        let kind = DynamicKind::BoundedDegree(2);
        let mut enc = DynamicEncoder::new(kind);
        let (_, a) = enc.apply_graph(&GraphEvent::new("a", [])).unwrap();
        // the lone node's slots are all sentinels
        assert_eq!(fields(&a, 3).unwrap(), vec![0, 0, 0]);
        assert!(!decode(kind, QueryKind::Adjacency, &a, &a).unwrap());
        let (_, b) = enc.apply_graph(&GraphEvent::new("b", ["a".into()])).unwrap();
        let (_, c) = enc.apply_graph(&GraphEvent::new("c", ["b".into()])).unwrap();
        assert_eq!(c.len(), 3 * 2);
        assert!(decode(kind, QueryKind::Adjacency, &a, &b).unwrap());
        assert!(decode(kind, QueryKind::Adjacency, &c, &b).unwrap());
        assert!(!decode(kind, QueryKind::Adjacency, &a, &c).unwrap());
        let (_, d) = enc.apply_graph(&GraphEvent::new("d", [])).unwrap();
        assert!(!decode(kind, QueryKind::Adjacency, &d, &a).unwrap());
        assert!(matches!(
            enc.apply_graph(&GraphEvent::new("e", ["a".into(), "c".into(), "d".into()])),
            Err(DynamicError::DegreeExceeded { k: 2, .. })
        ));
        enc.apply_graph(&GraphEvent::new("e", ["b".into()])).unwrap_err();
    }

    #[test]
    fn bounded_degree_matches_graph_oracle() {
        let kind = DynamicKind::BoundedDegree(3);
        for seed in 0..40 {
            for n in [1, 2, 5, 17, 32] {
                let seq: GraphSequence = random_bounded_degree(n, 3, seed);
                let (g, _) = seq.build().unwrap();
                let mut enc = DynamicEncoder::new(kind);
                for e in seq.events() {
                    enc.apply_graph(e).unwrap();
                }
                for (u, lu) in enc.live_labels() {
                    assert!(lu.len() <= 4 * field_width(n as u64) as usize);
                    for (v, lv) in enc.live_labels() {
                        let want = u != v && g.adjacent(u, v);
                        assert_eq!(decode(kind, QueryKind::Adjacency, lu, lv).unwrap(), want);
                    }
                }
            }
        }
    }

    #[test]
    fn labels_never_change_and_match_the_oracle() {
        for kind in [DynamicKind::Pair, DynamicKind::Connectivity, DynamicKind::Triple] {
            for seed in 0..30 {
                let seq = random_stream(40, seed);
                let mut enc = DynamicEncoder::new(kind);
                let mut log: Vec<(NodeId, Label)> = Vec::new();
                for (i, e) in seq.events().iter().enumerate() {
                    if let Some(x) = enc.apply(e).unwrap() {
                        log.push(x);
                    }
                    for (v, l) in &log {
                        assert_eq!(enc.label(*v), Some(l));
                    }
                    let prefix = seq.prefix(i + 1);
                    let (f, _) = build_from_events(&prefix).unwrap();
                    for (u, lu) in enc.live_labels() {
                        for (v, lv) in enc.live_labels() {
                            for q in kind.queries() {
                                let want = f.oracle(q, u, v).unwrap();
                                assert_eq!(QueryAnswer::Bool(decode(kind, q, lu, lv).unwrap()), want);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn removing_a_root_or_inner_node_fails() {
        let mut enc = DynamicEncoder::new(DynamicKind::Pair);
        enc.apply(&TopologicalEvent::root("a")).unwrap();
        enc.apply(&TopologicalEvent::child("b", "a")).unwrap();
        assert!(enc.apply(&TopologicalEvent::remove("a")).is_err());
        enc.apply(&TopologicalEvent::remove("b")).unwrap();
        assert!(enc.apply(&TopologicalEvent::child("c", "b")).is_err());
        assert!(!enc.is_live(NodeId(1)));
    }

    #[test]
    fn run_logs_every_insertion() {
        let seq = tev(vec![
            TopologicalEvent::root("a"),
            TopologicalEvent::child("b", "a"),
            TopologicalEvent::remove("b"),
            TopologicalEvent::child("c", "a"),
        ]);
        let (enc, log) = run(DynamicKind::Pair, &seq).unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(enc.live_labels().count(), 2);
        assert_eq!(log[2].1, pack_fields(&[2, 0], 2).unwrap());
    }
}
