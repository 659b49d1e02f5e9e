//! Reference labels for NCA, routing and distance, and the adapters that
//! answer ancestry from any decoder of those functions.
//!
//! The reference labels store the root path of a node as a list of node
//! ids, so they are persistent under insertions. They exist to exercise the
//! adapters, not to be small.

use alloc::vec::Vec;

use thiserror::Error;

use crate::bits::{bits_for, Label, LabelError};
use crate::forest::{NodeId, RootedForest};
use crate::schemes::Labeling;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("nodes lie in different trees")]
    CrossTree,
    #[error("routing from a node to itself")]
    SelfRoute,
    #[error("malformed label")]
    Malformed,
    #[error(transparent)]
    Label(#[from] LabelError),
}

fn root_path(forest: &RootedForest, v: NodeId) -> Vec<NodeId> {
    let mut path = alloc::vec![v];
    let mut w = v;
    while let Some(p) = forest.parent(w) {
        path.push(p);
        w = p;
    }
    path.reverse();
    path
}

fn id_width(forest: &RootedForest) -> u32 {
    bits_for(forest.id_bound().saturating_sub(1) as u64)
}

fn split(label: &Label, width: usize) -> Result<Vec<u64>, ReductionError> {
    if width == 0 || !label.len().is_multiple_of(width) {
        return Err(ReductionError::Malformed);
    }
    (0..label.len() / width)
        .map(|i| Ok(label.get_uint(i * width, width as u32)?))
        .collect()
}

fn common_prefix(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// NCA labels: the ids on the root path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NcaReference {
    pub width: u32,
}

impl NcaReference {
    pub fn for_forest(forest: &RootedForest) -> Self {
        NcaReference { width: id_width(forest) }
    }

    pub fn encode(&self, forest: &RootedForest) -> Result<Labeling, ReductionError> {
        let mut labels = Labeling::with_slots(forest.id_bound());
        for v in forest.nodes() {
            let mut l = Label::new();
            for w in root_path(forest, v) {
                l.put_uint(u64::from(w.0), self.width)?;
            }
            labels.set(v, l);
        }
        Ok(labels)
    }

    /// The label of the nearest common ancestor.
    pub fn nca(&self, a: &Label, b: &Label) -> Result<Label, ReductionError> {
        let w = self.width as usize;
        let common = common_prefix(&split(a, w)?, &split(b, w)?);
        if common == 0 {
            return Err(ReductionError::CrossTree);
        }
        Ok(a.slice(0, common * w)?)
    }
}

/// Routing labels: `(id, port)` for every node on the root path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingReference {
    pub id_width: u32,
    pub port_width: u32,
}

impl RoutingReference {
    pub fn for_forest(forest: &RootedForest) -> Self {
        let max_port = forest.nodes().map(|v| forest.port(v)).max().unwrap_or(0);
        RoutingReference {
            id_width: id_width(forest),
            port_width: bits_for(u64::from(max_port)),
        }
    }

    pub fn encode(&self, forest: &RootedForest) -> Result<Labeling, ReductionError> {
        let mut labels = Labeling::with_slots(forest.id_bound());
        for v in forest.nodes() {
            let mut l = Label::new();
            for w in root_path(forest, v) {
                l.put_uint(u64::from(w.0), self.id_width)?;
                l.put_uint(u64::from(forest.port(w)), self.port_width)?;
            }
            labels.set(v, l);
        }
        Ok(labels)
    }

    fn entries(&self, l: &Label) -> Result<Vec<(u64, u64)>, ReductionError> {
        let raw = split(l, (self.id_width + self.port_width) as usize)?;
        let shift = self.port_width;
        Ok(raw
            .into_iter()
            .map(|x| (x >> shift, x & ((1u64 << shift) - 1)))
            .collect())
    }

    /// Port at `a` on the path to `b`: the child's port when `a` is a proper
    /// ancestor of `b`, otherwise 0 (towards the parent).
    pub fn route(&self, a: &Label, b: &Label) -> Result<u32, ReductionError> {
        let (pa, pb) = (self.entries(a)?, self.entries(b)?);
        if pa.first().map(|e| e.0) != pb.first().map(|e| e.0) {
            return Err(ReductionError::CrossTree);
        }
        if pa == pb {
            return Err(ReductionError::SelfRoute);
        }
        if pb.len() > pa.len() && pb.starts_with(&pa) {
            Ok(pb[pa.len()].1 as u32)
        } else {
            Ok(0)
        }
    }
}

/// Distance labels: depth followed by the root path ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReference {
    pub width: u32,
}

impl DistanceReference {
    pub fn for_forest(forest: &RootedForest) -> Self {
        let max_depth = forest.nodes().map(|v| forest.depth(v)).max().unwrap_or(0);
        DistanceReference {
            width: id_width(forest).max(bits_for(u64::from(max_depth))),
        }
    }

    pub fn encode(&self, forest: &RootedForest) -> Result<Labeling, ReductionError> {
        let mut labels = Labeling::with_slots(forest.id_bound());
        for v in forest.nodes() {
            let mut l = Label::new();
            l.put_uint(u64::from(forest.depth(v)), self.width)?;
            for w in root_path(forest, v) {
                l.put_uint(u64::from(w.0), self.width)?;
            }
            labels.set(v, l);
        }
        Ok(labels)
    }

    pub fn depth(&self, l: &Label) -> Result<u32, ReductionError> {
        Ok(l.get_uint(0, self.width)? as u32)
    }

    pub fn distance(&self, a: &Label, b: &Label) -> Result<u32, ReductionError> {
        let (fa, fb) = (split(a, self.width as usize)?, split(b, self.width as usize)?);
        let (pa, pb) = (&fa[1..], &fb[1..]);
        let common = common_prefix(pa, pb);
        if common == 0 {
            return Err(ReductionError::CrossTree);
        }
        Ok((pa.len() + pb.len() - 2 * common) as u32)
    }
}

/// Ancestry from an NCA decoder: `u` is an ancestor of `v` when the NCA of
/// the two is `u` itself.
pub fn ancestry_from_nca<E>(
    nca: impl Fn(&Label, &Label) -> Result<Label, E>,
    u: &Label,
    v: &Label,
) -> Result<bool, E> {
    Ok(nca(u, v)? == *u)
}

/// Ancestry from a routing decoder. `u` is a proper ancestor of `v` when the
/// route from `u` leaves through a child port while the route back from `v`
/// goes to the parent. Routing to oneself is undefined, so `u = v` gives
/// `false`.
pub fn ancestry_from_routing(
    route: impl Fn(&Label, &Label) -> Result<u32, ReductionError>,
    u: &Label,
    v: &Label,
) -> Result<bool, ReductionError> {
    match route(u, v) {
        Err(ReductionError::SelfRoute) => Ok(false),
        Err(e) => Err(e),
        Ok(0) => Ok(false),
        Ok(_) => Ok(route(v, u)? == 0),
    }
}

/// Ancestry from a distance decoder over labels that also carry depth:
/// `u` is an ancestor-or-self of `v` exactly when the tree distance equals
/// the depth difference.
pub fn ancestry_from_distance(
    distance: impl Fn(&Label, &Label) -> Result<u32, ReductionError>,
    depth: impl Fn(&Label) -> Result<u32, ReductionError>,
    u: &Label,
    v: &Label,
) -> Result<bool, ReductionError> {
    let (du, dv) = (depth(u)?, depth(v)?);
    Ok(du <= dv && distance(u, v)? == dv - du)
}
