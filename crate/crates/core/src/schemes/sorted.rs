//! Size-sorted group labels.
//!
//! Groups (trees, or sibling groups) are ranked by decreasing size, so the
//! group of rank `i` has at most `n / i` members. A unique label is
//!
//! ```text
//! [t = ⌊log₂ i⌋ : sep bits] [i without its leading one : t bits] [index in group] [zero padding]
//! ```
//!
//! and two nodes share a group exactly when the first two fields agree.

use alloc::vec::Vec;

use crate::bits::{bits_for, ceil_log2, floor_log2, minimal_binary, Label};
use crate::forest::{NodeId, RootedForest};

use super::{Labeling, SchemeError};

/// Width of the field that stores `⌊log₂ i⌋` for ranks `i ≤ n`.
pub fn sep_width(n: u64) -> u32 {
    bits_for(u64::from(floor_log2(n)))
}

pub(super) fn unique_size(n: u64) -> usize {
    ceil_log2(n) as usize + sep_width(n) as usize
}

pub(super) fn nonunique_size(n: u64) -> usize {
    ceil_log2(n) as usize
}

/// Groups in rank order: rank `i` is `groups[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRanking {
    pub groups: Vec<Vec<NodeId>>,
}

impl GroupRanking {
    /// Sorts by size, largest first; ties go to the group whose key node
    /// was inserted first.
    fn from_keyed(mut keyed: Vec<((NodeId, bool), Vec<NodeId>)>) -> Self {
        keyed.sort_by(|(ka, ga), (kb, gb)| gb.len().cmp(&ga.len()).then(ka.cmp(kb)));
        GroupRanking {
            groups: keyed.into_iter().map(|(_, g)| g).collect(),
        }
    }

    /// `(rank, index within group)` for every member.
    pub fn positions(&self, slots: usize) -> Vec<Option<(u64, u64)>> {
        let mut out = alloc::vec![None; slots];
        for (r, g) in self.groups.iter().enumerate() {
            for (j, v) in g.iter().enumerate() {
                out[v.index()] = Some((r as u64 + 1, j as u64));
            }
        }
        out
    }
}

/// Trees ranked by size.
pub fn tree_ranks(forest: &RootedForest) -> GroupRanking {
    GroupRanking::from_keyed(
        forest
            .roots()
            .iter()
            .map(|&r| ((r, false), forest.tree_members(r)))
            .collect(),
    )
}

/// Sibling groups ranked by size: the children of each internal node, plus
/// one singleton group per root.
pub fn sibling_groups(forest: &RootedForest) -> GroupRanking {
    let mut keyed = Vec::new();
    for v in forest.nodes() {
        if !forest.children(v).is_empty() {
            keyed.push(((v, false), forest.children(v).to_vec()));
        }
        if forest.is_root(v) {
            keyed.push(((v, true), alloc::vec![v]));
        }
    }
    GroupRanking::from_keyed(keyed)
}

/// Writes the sep and rank fields for rank `i`.
pub(super) fn put_rank(label: &mut Label, rank: u64, sep: u32) -> Result<(), SchemeError> {
    let bin = minimal_binary(rank)?;
    let t = (bin.len() - 1) as u64;
    label.put_uint(t, sep)?;
    label.append(&bin.slice(1, t as usize)?)?;
    Ok(())
}

/// Reads the rank written by [`put_rank`]; returns `(rank, bits consumed)`.
pub(super) fn read_rank(label: &Label, sep: u32) -> Result<(u64, usize), SchemeError> {
    let t = label.get_uint(0, sep)?;
    if t > 62 {
        return Err(SchemeError::Malformed(alloc::format!("rank exponent {t}")));
    }
    let low = label.get_uint(sep as usize, t as u32)?;
    Ok(((1 << t) | low, sep as usize + t as usize))
}

pub(super) fn encode_unique(
    forest: &RootedForest,
    ranking: &GroupRanking,
    n: u64,
) -> Result<Labeling, SchemeError> {
    let sep = sep_width(n);
    let width = unique_size(n);
    let mut labels = Labeling::with_slots(forest.id_bound());
    for (r, group) in ranking.groups.iter().enumerate() {
        let rank = r as u64 + 1;
        debug_assert!(rank * group.len() as u64 <= n);
        let index_width = ceil_log2(group.len() as u64);
        for (j, &v) in group.iter().enumerate() {
            let mut l = Label::with_capacity(width);
            put_rank(&mut l, rank, sep)?;
            l.put_uint(j as u64, index_width)?;
            l.pad_to(width)?;
            labels.set(v, l);
        }
    }
    Ok(labels)
}

pub(super) fn decode_unique(a: &Label, b: &Label, n: u64) -> Result<bool, SchemeError> {
    let sep = sep_width(n);
    Ok(read_rank(a, sep)?.0 == read_rank(b, sep)?.0)
}

pub(super) fn encode_nonunique(
    forest: &RootedForest,
    ranking: &GroupRanking,
    n: u64,
) -> Result<Labeling, SchemeError> {
    let width = ceil_log2(n);
    let mut labels = Labeling::with_slots(forest.id_bound());
    for (r, group) in ranking.groups.iter().enumerate() {
        for &v in group {
            let mut l = Label::with_capacity(width as usize);
            l.put_uint(r as u64, width)?;
            labels.set(v, l);
        }
    }
    Ok(labels)
}
