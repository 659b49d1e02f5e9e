//! The `(Id(v), Id(parent(v)))` adjacency scheme; roots store their own id
//! as parent.

use crate::bits::{ceil_log2, pack_fields, Label};
use crate::forest::{QueryKind, RootedForest};

use super::{Labeling, SchemeError};

pub(super) fn field_width(n: u64) -> u32 {
    ceil_log2(n).max(1)
}

pub(super) fn size(n: u64) -> usize {
    2 * field_width(n) as usize
}

pub(super) fn encode(forest: &RootedForest, n: u64) -> Result<Labeling, SchemeError> {
    let w = field_width(n);
    let mut ids = alloc::vec![0u64; forest.id_bound()];
    let mut next = 0u64;
    for &root in forest.roots() {
        for v in forest.tree_members(root) {
            ids[v.index()] = next;
            next += 1;
        }
    }
    let mut labels = Labeling::with_slots(forest.id_bound());
    for v in forest.nodes() {
        let id = ids[v.index()];
        let parent = forest.parent(v).map_or(id, |p| ids[p.index()]);
        labels.set(v, pack_fields(&[id, parent], w)?);
    }
    Ok(labels)
}

/// `(id, parent)` fields of a pair label.
pub(crate) fn fields(l: &Label) -> Result<(u64, u64), SchemeError> {
    if l.is_empty() || !l.len().is_multiple_of(2) {
        return Err(SchemeError::Malformed(alloc::format!(
            "pair label of odd width {}",
            l.len()
        )));
    }
    let w = (l.len() / 2) as u32;
    Ok((l.get_uint(0, w)?, l.get_uint(w as usize, w)?))
}

/// Decoding shared with the dynamic pair scheme.
pub(crate) fn decode(q: QueryKind, a: &Label, b: &Label) -> Result<bool, SchemeError> {
    let (id_a, par_a) = fields(a)?;
    let (id_b, par_b) = fields(b)?;
    Ok(match q {
        // exclusive or: a root stores itself as parent and is not adjacent to itself
        QueryKind::Adjacency => (par_a == id_b) != (par_b == id_a),
        // roots are siblings only of themselves
        QueryKind::Sibling => par_a == par_b && (id_a == par_a) == (id_b == par_b),
        _ => unreachable!("checked by the caller"),
    })
}
