//! Fuzzing schemes against the ground-truth oracle.

use forestlabel_core::dynamic::{self, DynamicEncoder, DynamicError, DynamicKind};
use forestlabel_core::graph::{random_bounded_degree, GraphSequence};
use forestlabel_core::{
    build_from_events, random_forest, random_stream, EventSequence, Label, NodeId, QueryAnswer,
    QueryKind, RootedForest, SchemeError, StaticScheme,
};

/// A static scheme or a dynamic encoder, by registered name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyScheme {
    Static(StaticScheme),
    Dynamic(DynamicKind),
}

impl AnyScheme {
    pub fn parse(name: &str) -> Result<Self, String> {
        if name.starts_with("dyn-") {
            DynamicKind::parse(name).map(AnyScheme::Dynamic).map_err(|e| e.to_string())
        } else {
            StaticScheme::parse(name).map(AnyScheme::Static).map_err(|e| e.to_string())
        }
    }

    pub fn name(&self) -> String {
        match self {
            AnyScheme::Static(s) => s.name(),
            AnyScheme::Dynamic(k) => k.name(),
        }
    }

    pub fn queries(&self) -> Vec<QueryKind> {
        match self {
            AnyScheme::Static(s) => s.queries(),
            AnyScheme::Dynamic(k) => k.queries(),
        }
    }

    pub fn decode(&self, q: QueryKind, a: &Label, b: &Label, n: u64) -> Result<bool, String> {
        match self {
            AnyScheme::Static(s) => s.decode(q, a, b, n).map_err(|e| e.to_string()),
            AnyScheme::Dynamic(k) => dynamic::decode(*k, q, a, b).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pairs: u64,
    pub mismatches: u64,
}

impl Tally {
    pub fn add(&mut self, other: Tally) {
        self.pairs += other.pairs;
        self.mismatches += other.mismatches;
    }
}

fn compare<'a>(
    nodes: &[(NodeId, &'a Label)],
    queries: &[QueryKind],
    mut decode: impl FnMut(QueryKind, &'a Label, &'a Label) -> bool,
    oracle: impl Fn(QueryKind, NodeId, NodeId) -> bool,
) -> Tally {
    let mut t = Tally::default();
    for &(u, lu) in nodes {
        for &(v, lv) in nodes {
            for &q in queries {
                t.pairs += 1;
                if decode(q, lu, lv) != oracle(q, u, v) {
                    t.mismatches += 1;
                }
            }
        }
    }
    t
}

fn bool_oracle(f: &RootedForest) -> impl Fn(QueryKind, NodeId, NodeId) -> bool + '_ {
    |q, u, v| f.oracle(q, u, v) == Ok(QueryAnswer::Bool(true))
}

/// Every ordered pair and every query of `scheme` on one forest.
pub fn check_static(
    scheme: &StaticScheme,
    forest: &RootedForest,
    n: u64,
    queries: &[QueryKind],
) -> Result<Tally, SchemeError> {
    let labels = scheme.encode(forest, n)?;
    let nodes: Vec<(NodeId, &Label)> = labels.iter().collect();
    let mut failed = false;
    let mut t = compare(
        &nodes,
        queries,
        |q, a, b| scheme.decode(q, a, b, n).unwrap_or_else(|_| {
            failed = true;
            false
        }),
        bool_oracle(forest),
    );
    // decode errors on labels the encoder produced count as mismatches too
    if failed && t.mismatches == 0 {
        t.mismatches = 1;
    }
    if scheme.is_unique() && !labels.all_distinct() {
        t.mismatches += 1;
    }
    Ok(t)
}

/// Replays a stream, then checks every live pair against the final forest
/// and that no emitted label changed along the way.
pub fn check_dynamic(
    kind: DynamicKind,
    seq: &EventSequence,
    queries: &[QueryKind],
) -> Result<Tally, DynamicError> {
    let (enc, log) = dynamic::run(kind, seq)?;
    let (forest, _) = build_from_events(seq)?;
    let mut t = persistence(&enc, &log);
    let nodes: Vec<(NodeId, &Label)> = enc.live_labels().collect();
    t.add(compare(
        &nodes,
        queries,
        |q, a, b| dynamic::decode(kind, q, a, b).unwrap_or(false),
        bool_oracle(&forest),
    ));
    Ok(t)
}

pub fn check_graph(
    kind: DynamicKind,
    seq: &GraphSequence,
    queries: &[QueryKind],
) -> Result<Tally, DynamicError> {
    let mut enc = DynamicEncoder::new(kind);
    let mut log = Vec::new();
    for e in seq.events() {
        log.push(enc.apply_graph(e)?);
    }
    let (g, _) = seq.build()?;
    let mut t = persistence(&enc, &log);
    let nodes: Vec<(NodeId, &Label)> = enc.live_labels().collect();
    t.add(compare(
        &nodes,
        queries,
        |q, a, b| dynamic::decode(kind, q, a, b).unwrap_or(false),
        |q, u, v| q == QueryKind::Adjacency && u != v && g.adjacent(u, v),
    ));
    Ok(t)
}

fn persistence(enc: &DynamicEncoder, log: &[(NodeId, Label)]) -> Tally {
    let changed = log.iter().filter(|(v, l)| enc.label(*v) != Some(l)).count() as u64;
    Tally {
        pairs: log.len() as u64,
        mismatches: changed,
    }
}

/// Seed of trial `t`.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t)
}

/// `trials` random instances of size `n`; static schemes see random
/// forests, tree encoders random streams with removals, the bounded-degree
/// encoder random graphs of matching degree.
pub fn fuzz(
    scheme: &AnyScheme,
    n: usize,
    trials: u64,
    seed: u64,
    queries: &[QueryKind],
) -> Result<Tally, String> {
    let mut total = Tally::default();
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let tally = match scheme {
            AnyScheme::Static(sc) => {
                let (f, _) = build_from_events(&random_forest(n, s)).map_err(|e| e.to_string())?;
                check_static(sc, &f, n as u64, queries).map_err(|e| e.to_string())?
            }
            AnyScheme::Dynamic(DynamicKind::BoundedDegree(k)) => {
                let seq = random_bounded_degree(n, *k as usize, s);
                check_graph(DynamicKind::BoundedDegree(*k), &seq, queries).map_err(|e| e.to_string())?
            }
            AnyScheme::Dynamic(kind) => {
                check_dynamic(*kind, &random_stream(n, s), queries).map_err(|e| e.to_string())?
            }
        };
        total.add(tally);
    }
    Ok(total)
}
