//! Adversarial families and exact lower-bound certification.
//!
//! Everything here is integer or rational arithmetic; nothing is estimated.

mod certify;
mod counting;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::dynamic::DynamicError;
use crate::forest::{EventSequence, ForestError, RootedForest, TopologicalEvent};
use crate::graph::{GraphEvent, GraphSequence};
use crate::schemes::SchemeError;

pub use certify::{
    certify_forced_distinct, count_distinct_emitted, yao_expected_max, BoundCertificate,
    MissingWitness, Vertex, WitnessStats, YaoReport,
};
pub use counting::{
    counting_oracle, lemma3_intersection_check, lemma4_order, CountingReport, CountingStep,
    IntersectionReport, IntersectionViolation, Theorem,
};

/// Largest `n` for which the whole two-phase family is materialised.
pub const A2_MAX_N: u64 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Dynamic(#[from] DynamicError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

fn invalid(msg: impl Into<String>) -> BoundsError {
    BoundsError::InvalidParams(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    /// Path of `k`, then leaves on the path's second-to-last node.
    Fn,
    /// `k` singleton roots, then leaves under the last root.
    FnC,
    /// `j` singletons, a `k`-path under root `j`, leaves on the path's
    /// second-to-last node.
    In,
    /// Graph family: a path of `n - 1`, then one node joined to a subset.
    A2,
    /// `a` trees with `b` sibling groups of `n/(ab)` each.
    Fab,
    /// `a` trees with `b` root-attached paths of `n/(ab)` each.
    Gab,
    Warmup,
    Thm6,
    Thm7,
    Thm8,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 10] = [
        FamilyKind::Fn,
        FamilyKind::FnC,
        FamilyKind::In,
        FamilyKind::A2,
        FamilyKind::Fab,
        FamilyKind::Gab,
        FamilyKind::Warmup,
        FamilyKind::Thm6,
        FamilyKind::Thm7,
        FamilyKind::Thm8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Fn => "Fn",
            FamilyKind::FnC => "FnC",
            FamilyKind::In => "In",
            FamilyKind::A2 => "A2",
            FamilyKind::Fab => "Fab",
            FamilyKind::Gab => "Gab",
            FamilyKind::Warmup => "Warmup",
            FamilyKind::Thm6 => "Thm6",
            FamilyKind::Thm7 => "Thm7",
            FamilyKind::Thm8 => "Thm8",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "WarmupConn" {
            return Some(FamilyKind::Warmup);
        }
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Families built from event streams rather than static forests.
    pub fn is_dynamic(self) -> bool {
        matches!(self, FamilyKind::Fn | FamilyKind::FnC | FamilyKind::In | FamilyKind::A2)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A family, or a single member of it when the member parameters are set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: u64,
    pub k: Option<u64>,
    pub j: Option<u64>,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub x: Option<u64>,
    /// A2 subset as a bitmask over path positions.
    pub s: Option<u64>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: u64) -> Self {
        FamilySpec {
            kind,
            n,
            k: None,
            j: None,
            a: None,
            b: None,
            x: None,
            s: None,
        }
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_j(mut self, j: u64) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_ab(mut self, a: u64, b: u64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    pub fn with_x(mut self, x: u64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn with_s(mut self, s: u64) -> Self {
        self.s = Some(s);
        self
    }

    /// `x` for the two-parameter counting theorems; 6 unless given.
    pub fn x_or_default(&self) -> u64 {
        self.x.unwrap_or(6)
    }

    /// Set parameters as `name=value` pairs joined by commas, or `-`.
    pub fn params(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [
            ("k", self.k),
            ("j", self.j),
            ("a", self.a),
            ("b", self.b),
            ("x", self.x),
            ("s", self.s),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(",")
        }
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        let n = self.n;
        match self.kind {
            FamilyKind::Fn | FamilyKind::FnC => {
                if n < 2 {
                    return Err(invalid("n must be at least 2"));
                }
                if let Some(k) = self.k {
                    if !(2..=n).contains(&k) {
                        return Err(invalid(format!("need 1 < k <= n, got k={k}")));
                    }
                }
            }
            FamilyKind::In => {
                if n < 3 {
                    return Err(invalid("n must be at least 3"));
                }
                match (self.j, self.k) {
                    (None, None) => {}
                    (Some(j), Some(k)) => {
                        if j == 0 || k == 0 || j + k >= n {
                            return Err(invalid(format!(
                                "need j, k >= 1 and j + k < n, got j={j} k={k}"
                            )));
                        }
                    }
                    _ => return Err(invalid("give both j and k or neither")),
                }
            }
            FamilyKind::A2 => {
                if !(2..=62).contains(&n) {
                    return Err(invalid("need 2 <= n <= 62"));
                }
                match self.s {
                    Some(s) => {
                        if s == 0 || s >> (n - 1) != 0 {
                            return Err(invalid(format!("subset {s} is empty or out of range")));
                        }
                    }
                    None if n > A2_MAX_N => {
                        return Err(invalid(format!("whole family capped at n <= {A2_MAX_N}")));
                    }
                    None => {}
                }
            }
            FamilyKind::Fab | FamilyKind::Gab => match (self.a, self.b) {
                (None, None) if n >= 1 => {}
                (Some(a), Some(b)) if a >= 1 && b >= 1 && n.is_multiple_of(a * b) && n > 0 => {}
                _ => return Err(invalid("need a, b >= 1 with ab dividing n")),
            },
            FamilyKind::Warmup | FamilyKind::Thm6 => {
                exact_log(n, 3).ok_or_else(|| invalid(format!("{n} is not a power of 3")))?;
            }
            FamilyKind::Thm7 | FamilyKind::Thm8 => {
                let x = self.x_or_default();
                if x < 2 {
                    return Err(invalid("x must be at least 2"));
                }
                exact_log(n, x).ok_or_else(|| invalid(format!("{n} is not a power of {x}")))?;
            }
        }
        Ok(())
    }
}

/// `L` with `base^L = n`.
pub(crate) fn exact_log(n: u64, base: u64) -> Option<u32> {
    if n == 0 || base < 2 {
        return None;
    }
    let mut m = n;
    let mut l = 0;
    while m.is_multiple_of(base) {
        m /= base;
        l += 1;
    }
    (m == 1).then_some(l)
}

#[derive(Debug, Clone)]
pub enum Instance {
    Events(EventSequence),
    Graph(GraphSequence),
    Forest(RootedForest),
}

impl Instance {
    pub fn node_count(&self) -> usize {
        match self {
            Instance::Events(s) => s.insertions(),
            Instance::Graph(g) => g.len(),
            Instance::Forest(f) => f.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Member {
    /// The member's own parameters, e.g. `k=3`.
    pub params: String,
    pub instance: Instance,
}

#[derive(Debug, Clone)]
pub struct Family {
    pub spec: FamilySpec,
    pub members: Vec<Member>,
}

fn events(list: Vec<TopologicalEvent>) -> EventSequence {
    EventSequence::new(list).expect("family generators emit valid sequences")
}

fn fn_member(n: u64, k: u64) -> EventSequence {
    let mut ev = Vec::with_capacity(n as usize);
    ev.push(TopologicalEvent::root("p1"));
    for i in 2..=k {
        ev.push(TopologicalEvent::child(format!("p{i}"), format!("p{}", i - 1)));
    }
    for i in 1..=n - k {
        ev.push(TopologicalEvent::child(format!("l{i}"), format!("p{}", k - 1)));
    }
    events(ev)
}

fn fnc_member(n: u64, k: u64) -> EventSequence {
    let mut ev: Vec<_> = (1..=k).map(|i| TopologicalEvent::root(format!("c{i}"))).collect();
    for i in 1..=n - k {
        ev.push(TopologicalEvent::child(format!("l{i}"), format!("c{k}")));
    }
    events(ev)
}

fn in_member(n: u64, j: u64, k: u64) -> EventSequence {
    let mut ev: Vec<_> = (1..=j).map(|i| TopologicalEvent::root(format!("c{i}"))).collect();
    let mut above = format!("c{j}");
    let mut second_to_last = above.clone();
    for i in 1..=k {
        let name = format!("p{i}");
        ev.push(TopologicalEvent::child(name.clone(), above.clone()));
        second_to_last = core::mem::replace(&mut above, name);
    }
    for i in 1..=n - j - k {
        ev.push(TopologicalEvent::child(format!("l{i}"), second_to_last.clone()));
    }
    events(ev)
}

fn a2_member(n: u64, s: u64) -> GraphSequence {
    let mut ev = Vec::with_capacity(n as usize);
    for i in 1..n {
        let prev = (i > 1).then(|| format!("p{}", i - 1));
        ev.push(GraphEvent::new(format!("p{i}"), prev));
    }
    let nbrs = (0..n - 1).filter(|p| s >> p & 1 == 1).map(|p| format!("p{}", p + 1));
    ev.push(GraphEvent::new("v", nbrs));
    GraphSequence::new(ev).expect("family generators emit valid sequences")
}

/// `a` trees, each a root followed by `b` sibling groups of `n/(ab)`
/// nodes. The first group hangs off the root and every later group off
/// the first node of the group before it, so a tree has `1 + n/a` nodes
/// and the forest `n + a`.
pub fn fab_forest(n: u64, a: u64, b: u64) -> RootedForest {
    let g = (n / (a * b)) as usize;
    let mut parents = Vec::with_capacity((n + a) as usize);
    for _ in 0..a {
        let root = parents.len();
        parents.push(None);
        let mut anchor = root;
        for _ in 0..b {
            let first = parents.len();
            parents.extend(core::iter::repeat_n(Some(anchor), g));
            anchor = first;
        }
    }
    RootedForest::from_parents(&parents).expect("acyclic by construction")
}

/// `a` trees, each a root with `b` paths of `n/(ab)` nodes hanging off it.
pub fn gab_forest(n: u64, a: u64, b: u64) -> RootedForest {
    let g = (n / (a * b)) as usize;
    let mut parents = Vec::with_capacity((n + a) as usize);
    for _ in 0..a {
        let root = parents.len();
        parents.push(None);
        for _ in 0..b {
            let mut above = root;
            for _ in 0..g {
                parents.push(Some(above));
                above = parents.len() - 1;
            }
        }
    }
    RootedForest::from_parents(&parents).expect("acyclic by construction")
}

fn forest_member(kind: FamilyKind, n: u64, a: u64, b: u64) -> Member {
    let forest = if kind == FamilyKind::Thm8 || kind == FamilyKind::Gab {
        gab_forest(n, a, b)
    } else {
        fab_forest(n, a, b)
    };
    Member {
        params: format!("a={a},b={b}"),
        instance: Instance::Forest(forest),
    }
}

/// Materialises the family, or the single member when its parameters are
/// set.
pub fn generate(spec: &FamilySpec) -> Result<Family, BoundsError> {
    spec.validate()?;
    let n = spec.n;
    let ev = |params: String, seq| Member {
        params,
        instance: Instance::Events(seq),
    };
    let members = match spec.kind {
        FamilyKind::Fn | FamilyKind::FnC => {
            let ks: Vec<u64> = spec.k.map_or_else(|| (2..=n).collect(), |k| alloc::vec![k]);
            ks.into_iter()
                .map(|k| {
                    let seq = if spec.kind == FamilyKind::Fn {
                        fn_member(n, k)
                    } else {
                        fnc_member(n, k)
                    };
                    ev(format!("k={k}"), seq)
                })
                .collect()
        }
        FamilyKind::In => {
            let pairs: Vec<(u64, u64)> = match (spec.j, spec.k) {
                (Some(j), Some(k)) => alloc::vec![(j, k)],
                _ => (1..n)
                    .flat_map(|j| (1..n - j).map(move |k| (j, k)))
                    .collect(),
            };
            pairs
                .into_iter()
                .map(|(j, k)| ev(format!("j={j},k={k}"), in_member(n, j, k)))
                .collect()
        }
        FamilyKind::A2 => {
            let subsets: Vec<u64> = spec.s.map_or_else(|| (1..1u64 << (n - 1)).collect(), |s| alloc::vec![s]);
            subsets
                .into_iter()
                .map(|s| Member {
                    params: format!("s={s}"),
                    instance: Instance::Graph(a2_member(n, s)),
                })
                .collect()
        }
        FamilyKind::Fab | FamilyKind::Gab => {
            let params: Vec<(u64, u64)> = match (spec.a, spec.b) {
                (Some(a), Some(b)) => alloc::vec![(a, b)],
                _ => (1..=n)
                    .filter(|a| n.is_multiple_of(*a))
                    .flat_map(|a| (1..=n / a).filter(move |b| (n / a).is_multiple_of(*b)).map(move |b| (a, b)))
                    .collect(),
            };
            params
                .into_iter()
                .map(|(a, b)| forest_member(spec.kind, n, a, b))
                .collect()
        }
        FamilyKind::Warmup | FamilyKind::Thm6 | FamilyKind::Thm7 | FamilyKind::Thm8 => {
            let theorem = Theorem::for_kind(spec.kind).expect("counting kinds");
            lemma4_order(theorem, n, spec.x_or_default())?
                .into_iter()
                .map(|(a, b)| forest_member(spec.kind, n, a, b))
                .collect()
        }
    };
    Ok(Family {
        spec: spec.clone(),
        members,
    })
}
