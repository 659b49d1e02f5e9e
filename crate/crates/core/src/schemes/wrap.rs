//! Connectivity wrapper: turns a scheme for a function of two nodes in the
//! same tree into one that also answers connectivity.
//!
//! Trees are ranked by decreasing size. The tree of rank `i` has at most
//! `n / i` nodes, so its inner labels are computed with parameter
//! `⌊n / i⌋`; the bits saved pay for writing the rank. Layout:
//!
//! ```text
//! [t = ⌊log₂ i⌋ : sep bits] [i without leading one : t bits] [inner label : S(⌊n/i⌋) bits] [padding]
//! ```
//!
//! padded to `S(n) + loglog n + WRAP_SLACK` bits.

use crate::bits::{ceil_log2, loglog, Label};
use crate::forest::{QueryKind, RootedForest};

use super::sorted::{put_rank, read_rank, sep_width, tree_ranks};
use super::{Labeling, SchemeError, StaticScheme};

/// Additive constant on top of `S(n) + loglog n`.
pub const WRAP_SLACK: usize = 1;

/// Slack `c` allowed in `S(a) - S(b) >= log a - log b - c`.
const SIZE_FN_SLACK: i64 = 2;

/// Registration checks run the size-function condition up to this bound...
const CHECK_MONOTONE_UP_TO: u64 = 1 << 20;
/// ...and the exact layout fit up to this one.
const CHECK_FIT_UP_TO: u64 = 1 << 16;

pub fn wrapped_width(inner: &StaticScheme, n: u64) -> usize {
    inner.size(n) + loglog(n) as usize + WRAP_SLACK
}

/// Widest label the layout can need for parameter `n`: the rank fields plus
/// the inner label, maximised over ranks. Within ranks sharing `⌊log₂ i⌋ = t`
/// the smallest rank `2^t` has the widest inner label, so only powers of two
/// need checking.
fn widest_layout(size: &impl Fn(u64) -> usize, n: u64) -> (usize, u64) {
    let sep = sep_width(n) as usize;
    let mut worst = (0, 1);
    let mut t = 0;
    while (1u64 << t) <= n {
        let budget = n >> t;
        let need = sep + t + size(budget);
        if need > worst.0 {
            worst = (need, budget);
        }
        t += 1;
    }
    worst
}

/// Registration check for an inner scheme: `S` must be non-decreasing,
/// satisfy `S(a) - S(b) >= ⌈log₂ a⌉ - ⌈log₂ b⌉ - 2` for all `b <= a`, and
/// every rank layout must fit in [`wrapped_width`].
pub fn check_size_function(inner: &StaticScheme) -> Result<(), SchemeError> {
    check_size_fn(&inner.name(), |m| inner.size(m))
}

fn check_size_fn(name: &str, size: impl Fn(u64) -> usize) -> Result<(), SchemeError> {
    let violation = |a: u64, b: u64| SchemeError::SizeFunctionViolation {
        scheme: name.into(),
        a,
        b,
    };
    let mut prev = size(1);
    // running maximum of S(b) - ⌈log₂ b⌉ and where it was attained
    let mut best = (prev as i64, 1u64);
    for a in 2..=CHECK_MONOTONE_UP_TO {
        let s = size(a);
        if s < prev {
            return Err(violation(a, a - 1));
        }
        let excess = s as i64 - i64::from(ceil_log2(a));
        if excess < best.0 - SIZE_FN_SLACK {
            return Err(violation(a, best.1));
        }
        if excess > best.0 {
            best = (excess, a);
        }
        prev = s;
    }
    for n in 1..=CHECK_FIT_UP_TO {
        let (need, budget) = widest_layout(&size, n);
        if need > size(n) + loglog(n) as usize + WRAP_SLACK {
            return Err(violation(n, budget));
        }
    }
    Ok(())
}

pub(super) fn encode(
    inner: &StaticScheme,
    forest: &RootedForest,
    n: u64,
) -> Result<Labeling, SchemeError> {
    let sep = sep_width(n);
    let width = wrapped_width(inner, n);
    let mut labels = Labeling::with_slots(forest.id_bound());
    for (r, members) in tree_ranks(forest).groups.iter().enumerate() {
        let rank = r as u64 + 1;
        assert!(
            rank * members.len() as u64 <= n,
            "tree of rank {rank} has {} nodes, more than n/rank",
            members.len()
        );
        let budget = n / rank;
        let (tree, ids) = forest.subtree_forest(forest.tree_of(members[0]));
        let inner_labels = inner.encode(&tree, budget)?;
        for (local, l) in inner_labels.iter() {
            let mut label = Label::with_capacity(width);
            put_rank(&mut label, rank, sep)?;
            label.append(l)?;
            label.pad_to(width)?;
            labels.set(ids[local.index()], label);
        }
    }
    Ok(labels)
}

pub(super) fn decode(
    inner: &StaticScheme,
    q: QueryKind,
    a: &Label,
    b: &Label,
    n: u64,
) -> Result<bool, SchemeError> {
    let sep = sep_width(n);
    let (rank_a, offset) = read_rank(a, sep)?;
    let (rank_b, _) = read_rank(b, sep)?;
    if q == QueryKind::Connectivity {
        return Ok(rank_a == rank_b);
    }
    if rank_a != rank_b {
        // inner functions only relate nodes of one tree
        return Ok(false);
    }
    let budget = n / rank_a;
    if budget == 0 {
        return Err(SchemeError::Malformed(alloc::format!(
            "tree rank {rank_a} exceeds n={n}"
        )));
    }
    let inner_width = inner.size(budget);
    let inner_a = a.slice(offset, inner_width)?;
    let inner_b = b.slice(offset, inner_width)?;
    inner.decode(q, &inner_a, &inner_b, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{build_from_events, random_forest, EventSequence, TopologicalEvent};
    use alloc::vec;
    use alloc::vec::Vec;

    fn inners() -> Vec<StaticScheme> {
        vec![
            StaticScheme::Kannan,
            StaticScheme::Interval,
            StaticScheme::SortedConnectivity,
            StaticScheme::SortedSibling { unique: true },
            StaticScheme::SortedSibling { unique: false },
        ]
    }

    #[test]
    fn registered_inners_pass_the_check() {
        for s in inners() {
            check_size_function(&s).unwrap();
        }
    }

    #[test]
    fn overhead_is_loglog_plus_one() {
        for s in inners() {
            let w = StaticScheme::wrap(s.clone()).unwrap();
            for n in [1u64, 2, 3, 16, 100, 256, 4096, 65536] {
                assert_eq!(w.size(n) - s.size(n), loglog(n) as usize + 1);
            }
        }
    }

    #[test]
    fn cross_tree_pairs() {
        let seq = EventSequence::new(vec![
            TopologicalEvent::root("a"),
            TopologicalEvent::child("a1", "a"),
            TopologicalEvent::root("b"),
        ])
        .unwrap();
        let (f, ids) = build_from_events(&seq).unwrap();
        let s = StaticScheme::parse("wrap:adj-sib-kannan").unwrap();
        let labels = s.encode_forest(&f).unwrap();
        let l = |k: &str| labels.get(ids[k]).unwrap();
        assert!(!s.decode(QueryKind::Adjacency, l("a"), l("b"), 3).unwrap());
        assert!(!s.decode(QueryKind::Sibling, l("a"), l("b"), 3).unwrap());
        assert!(!s.decode(QueryKind::Connectivity, l("a1"), l("b"), 3).unwrap());
        assert!(s.decode(QueryKind::Connectivity, l("a1"), l("a"), 3).unwrap());
        assert!(s.decode(QueryKind::Adjacency, l("a1"), l("a"), 3).unwrap());
    }

    #[test]
    fn rank_times_size_never_exceeds_n() {
        for seed in 0..50 {
            let (f, _) = build_from_events(&random_forest(40, seed)).unwrap();
            for (r, g) in tree_ranks(&f).groups.iter().enumerate() {
                assert!((r + 1) * g.len() <= f.len());
            }
        }
    }

    #[test]
    fn rejects_bad_size_functions() {
        // constant width leaves no room for the rank field
        assert!(matches!(
            check_size_fn("const", |_| 8),
            Err(SchemeError::SizeFunctionViolation { .. })
        ));
        // shrinking at a=5
        assert!(matches!(
            check_size_fn("dip", |m| if m == 5 { 1 } else { 2 * ceil_log2(m) as usize + 2 }),
            Err(SchemeError::SizeFunctionViolation { a: 5, b: 4, .. })
        ));
        // growth far below log a - log b - 2 after a plateau
        assert!(check_size_fn("plateau", |m| 2 * ceil_log2(m.min(64)) as usize + 2).is_err());
        // 2 log n is fine
        check_size_fn("2log", |m| 2 * ceil_log2(m).max(1) as usize).unwrap();
    }
}
