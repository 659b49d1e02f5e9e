//! Static labeling schemes for rooted forests.
//!
//! Every scheme is parameterised by `n`, an upper bound on the number of
//! nodes known to both encoder and decoder. All labels a scheme emits for a
//! given `n` have the same width, [`StaticScheme::size`].

mod interval;
mod kannan;
mod sorted;
mod wrap;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bits::{Label, LabelError};
use crate::forest::{NodeId, QueryKind, RootedForest};

pub use sorted::{sep_width, sibling_groups, tree_ranks, GroupRanking};
pub use wrap::{check_size_function, wrapped_width, WRAP_SLACK};
pub(crate) use kannan::decode as kannan_decode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("scheme {scheme} does not answer {query} queries")]
    UnsupportedQuery { scheme: String, query: QueryKind },
    #[error("labels have different widths ({0} vs {1} bits)")]
    WidthMismatch(usize, usize),
    #[error("size function of {scheme} violates the wrapper precondition at a={a}, b={b}")]
    SizeFunctionViolation { scheme: String, a: u64, b: u64 },
    #[error("forest has {len} nodes but the scheme parameter is n={n}")]
    BudgetTooSmall { len: usize, n: u64 },
    #[error("malformed label: {0}")]
    Malformed(String),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// Labels produced for one forest, indexed by node id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<Option<Label>>,
}

impl Labeling {
    pub fn with_slots(slots: usize) -> Self {
        Labeling {
            labels: vec![None; slots],
        }
    }

    pub fn set(&mut self, v: NodeId, label: Label) {
        if self.labels.len() <= v.index() {
            self.labels.resize(v.index() + 1, None);
        }
        self.labels[v.index()] = Some(label);
    }

    pub fn get(&self, v: NodeId) -> Option<&Label> {
        self.labels.get(v.index()).and_then(Option::as_ref)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Label)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.as_ref().map(|l| (NodeId(i as u32), l)))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.iter().all(Option::is_none)
    }

    pub fn max_bits(&self) -> usize {
        self.iter().map(|(_, l)| l.len()).max().unwrap_or(0)
    }

    /// True when no two nodes share a label.
    pub fn all_distinct(&self) -> bool {
        let set: BTreeSet<&Label> = self.iter().map(|(_, l)| l).collect();
        set.len() == self.len()
    }
}

/// A named static encoder/decoder pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StaticScheme {
    /// `(id, parent id)` pairs; adjacency and sibling.
    Kannan,
    /// DFS entry/exit intervals; ancestry.
    Interval,
    /// Trees ranked by size; connectivity.
    SortedConnectivity,
    /// Sibling groups ranked by size; sibling.
    SortedSibling { unique: bool },
    /// Any within-tree scheme extended with connectivity.
    Wrapped(Box<StaticScheme>),
}

impl StaticScheme {
    /// Every scheme name the registry knows, wrapped variants included.
    pub fn registered_names() -> Vec<String> {
        let base = ["adj-sib-kannan", "anc-interval", "conn-sorted", "sib-sorted", "sib-sorted-nonunique"];
        let mut names: Vec<String> = base.iter().map(|s| String::from(*s)).collect();
        names.extend(base.iter().map(|s| format!("wrap:{s}")));
        names
    }

    /// Looks a scheme up by name. Wrapped schemes run the size-function
    /// registration check.
    pub fn parse(name: &str) -> Result<Self, SchemeError> {
        if let Some(inner) = name.strip_prefix("wrap:") {
            let inner = StaticScheme::parse(inner)?;
            return StaticScheme::wrap(inner);
        }
        match name {
            "adj-sib-kannan" => Ok(StaticScheme::Kannan),
            "anc-interval" => Ok(StaticScheme::Interval),
            "conn-sorted" => Ok(StaticScheme::SortedConnectivity),
            "sib-sorted" => Ok(StaticScheme::SortedSibling { unique: true }),
            "sib-sorted-nonunique" => Ok(StaticScheme::SortedSibling { unique: false }),
            _ => Err(SchemeError::UnknownScheme(name.into())),
        }
    }

    /// Registers `inner` under the connectivity wrapper after checking its
    /// size function.
    pub fn wrap(inner: StaticScheme) -> Result<Self, SchemeError> {
        if matches!(inner, StaticScheme::Wrapped(_)) {
            return Err(SchemeError::UnknownScheme(format!("wrap:{}", inner.name())));
        }
        check_size_function(&inner)?;
        Ok(StaticScheme::Wrapped(Box::new(inner)))
    }

    pub fn name(&self) -> String {
        match self {
            StaticScheme::Kannan => "adj-sib-kannan".into(),
            StaticScheme::Interval => "anc-interval".into(),
            StaticScheme::SortedConnectivity => "conn-sorted".into(),
            StaticScheme::SortedSibling { unique: true } => "sib-sorted".into(),
            StaticScheme::SortedSibling { unique: false } => "sib-sorted-nonunique".into(),
            StaticScheme::Wrapped(inner) => format!("wrap:{}", inner.name()),
        }
    }

    pub fn queries(&self) -> Vec<QueryKind> {
        match self {
            StaticScheme::Kannan => vec![QueryKind::Adjacency, QueryKind::Sibling],
            StaticScheme::Interval => vec![QueryKind::Ancestry],
            StaticScheme::SortedConnectivity => vec![QueryKind::Connectivity],
            StaticScheme::SortedSibling { .. } => vec![QueryKind::Sibling],
            StaticScheme::Wrapped(inner) => {
                let mut qs = inner.queries();
                if !qs.contains(&QueryKind::Connectivity) {
                    qs.push(QueryKind::Connectivity);
                }
                qs.sort();
                qs
            }
        }
    }

    pub fn supports(&self, q: QueryKind) -> bool {
        self.queries().contains(&q)
    }

    /// Whether labels are pairwise distinct within one forest.
    pub fn is_unique(&self) -> bool {
        match self {
            StaticScheme::SortedSibling { unique } => *unique,
            StaticScheme::Wrapped(inner) => inner.is_unique(),
            _ => true,
        }
    }

    /// Label width in bits for parameter `n`.
    pub fn size(&self, n: u64) -> usize {
        match self {
            StaticScheme::Kannan => kannan::size(n),
            StaticScheme::Interval => interval::size(n),
            StaticScheme::SortedConnectivity => sorted::unique_size(n),
            StaticScheme::SortedSibling { unique: true } => sorted::unique_size(n),
            StaticScheme::SortedSibling { unique: false } => sorted::nonunique_size(n),
            StaticScheme::Wrapped(inner) => wrapped_width(inner, n),
        }
    }

    /// Labels `forest` with parameter `n = forest.len()`.
    pub fn encode_forest(&self, forest: &RootedForest) -> Result<Labeling, SchemeError> {
        self.encode(forest, forest.len().max(1) as u64)
    }

    /// Labels `forest` with parameter `n`, which must be at least the number
    /// of live nodes.
    pub fn encode(&self, forest: &RootedForest, n: u64) -> Result<Labeling, SchemeError> {
        if (forest.len() as u64) > n || n == 0 {
            return Err(SchemeError::BudgetTooSmall {
                len: forest.len(),
                n,
            });
        }
        match self {
            StaticScheme::Kannan => kannan::encode(forest, n),
            StaticScheme::Interval => interval::encode(forest, n),
            StaticScheme::SortedConnectivity => {
                sorted::encode_unique(forest, &tree_ranks(forest), n)
            }
            StaticScheme::SortedSibling { unique: true } => {
                sorted::encode_unique(forest, &sibling_groups(forest), n)
            }
            StaticScheme::SortedSibling { unique: false } => {
                sorted::encode_nonunique(forest, &sibling_groups(forest), n)
            }
            StaticScheme::Wrapped(inner) => wrap::encode(inner, forest, n),
        }
    }

    /// Answers `q` from two labels emitted under parameter `n`.
    pub fn decode(&self, q: QueryKind, a: &Label, b: &Label, n: u64) -> Result<bool, SchemeError> {
        if !self.supports(q) {
            return Err(SchemeError::UnsupportedQuery {
                scheme: self.name(),
                query: q,
            });
        }
        if a.len() != b.len() {
            return Err(SchemeError::WidthMismatch(a.len(), b.len()));
        }
        match self {
            StaticScheme::Kannan => kannan::decode(q, a, b),
            StaticScheme::Interval => interval::decode(a, b),
            StaticScheme::SortedConnectivity | StaticScheme::SortedSibling { unique: true } => {
                sorted::decode_unique(a, b, n)
            }
            StaticScheme::SortedSibling { unique: false } => Ok(a == b),
            StaticScheme::Wrapped(inner) => wrap::decode(inner, q, a, b, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{build_from_events, random_forest, QueryAnswer};

    fn all_schemes() -> Vec<StaticScheme> {
        StaticScheme::registered_names()
            .iter()
            .map(|n| StaticScheme::parse(n).unwrap())
            .collect()
    }

    #[test]
    fn names_round_trip() {
        for s in all_schemes() {
            assert_eq!(StaticScheme::parse(&s.name()).unwrap(), s);
        }
        assert!(matches!(
            StaticScheme::parse("wrap:wrap:conn-sorted"),
            Err(SchemeError::UnknownScheme(_))
        ));
        assert!(StaticScheme::parse("nope").is_err());
    }

    #[test]
    fn unsupported_query_and_width_mismatch() {
        let k = StaticScheme::Kannan;
        let a = Label::from_bit_str("0000").unwrap();
        let b = Label::from_bit_str("00").unwrap();
        assert!(matches!(
            k.decode(QueryKind::Distance, &a, &a, 4),
            Err(SchemeError::UnsupportedQuery { .. })
        ));
        assert_eq!(
            k.decode(QueryKind::Adjacency, &a, &b, 4),
            Err(SchemeError::WidthMismatch(4, 2))
        );
    }

    #[test]
    fn budget_must_cover_the_forest() {
        let (f, _) = build_from_events(&random_forest(10, 1)).unwrap();
        assert!(matches!(
            StaticScheme::Kannan.encode(&f, 9),
            Err(SchemeError::BudgetTooSmall { len: 10, n: 9 })
        ));
    }

    #[test]
    fn every_scheme_matches_the_oracle_on_small_forests() {
        for s in all_schemes() {
            for n in 1..=24 {
                for seed in 0..12 {
                    let (f, _) = build_from_events(&random_forest(n, seed)).unwrap();
                    let labels = s.encode_forest(&f).unwrap();
                    let width = s.size(n as u64);
                    if s.is_unique() {
                        assert!(labels.all_distinct(), "{} n={n}", s.name());
                    }
                    for (u, lu) in labels.iter() {
                        assert_eq!(lu.len(), width, "{} n={n}", s.name());
                        for (v, lv) in labels.iter() {
                            for q in s.queries() {
                                let want = f.oracle(q, u, v).unwrap();
                                let got = s.decode(q, lu, lv, n as u64).unwrap();
                                assert_eq!(
                                    QueryAnswer::Bool(got),
                                    want,
                                    "{} {q} {u} {v} n={n} seed={seed}",
                                    s.name()
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}
