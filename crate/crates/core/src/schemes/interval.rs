//! Ancestry by nesting of DFS `(pre, post)` intervals.

use crate::bits::{ceil_log2, pack_fields, Label};
use crate::forest::RootedForest;

use super::{Labeling, SchemeError};

pub(super) fn field_width(n: u64) -> u32 {
    ceil_log2(2 * n)
}

pub(super) fn size(n: u64) -> usize {
    2 * field_width(n) as usize
}

pub(super) fn encode(forest: &RootedForest, n: u64) -> Result<Labeling, SchemeError> {
    let w = field_width(n);
    let mut labels = Labeling::with_slots(forest.id_bound());
    for v in forest.nodes() {
        let (pre, post) = forest.interval(v);
        labels.set(v, pack_fields(&[u64::from(pre), u64::from(post)], w)?);
    }
    Ok(labels)
}

/// `true` when the first label's interval contains the second's.
pub(super) fn decode(a: &Label, b: &Label) -> Result<bool, SchemeError> {
    if a.is_empty() || !a.len().is_multiple_of(2) {
        return Err(SchemeError::Malformed(alloc::format!(
            "interval label of width {}",
            a.len()
        )));
    }
    let w = (a.len() / 2) as u32;
    let (pre_a, post_a) = (a.get_uint(0, w)?, a.get_uint(w as usize, w)?);
    let (pre_b, post_b) = (b.get_uint(0, w)?, b.get_uint(w as usize, w)?);
    Ok(pre_a <= pre_b && post_b <= post_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{build_from_events, EventSequence, TopologicalEvent};
    use crate::schemes::StaticScheme;
    use alloc::vec;

    #[test]
    fn root_and_child() {
        let seq = EventSequence::new(vec![
            TopologicalEvent::root("r"),
            TopologicalEvent::child("c", "r"),
        ])
        .unwrap();
        let (f, ids) = build_from_events(&seq).unwrap();
        let labels = StaticScheme::Interval.encode_forest(&f).unwrap();
        let (r, c) = (labels.get(ids["r"]).unwrap(), labels.get(ids["c"]).unwrap());
        assert_eq!(r.len(), 4);
        assert!(decode(r, c).unwrap());
        assert!(!decode(c, r).unwrap());
        assert!(decode(c, c).unwrap());
        assert!(decode(r, r).unwrap());
    }
}
