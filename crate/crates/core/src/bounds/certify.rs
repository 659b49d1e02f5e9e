//! Forced-distinct label counting over families of insertion sequences.
//!
//! A vertex is a node of one sequence. Two sequences that agree on their
//! first `p` events give the same labels to those `p` nodes under any
//! deterministic encoder, so such nodes are one vertex. Two vertices need
//! different labels when some sequence contains both (labels are unique),
//! or when some shared node `z` relates to them differently: `z` has one
//! label in both sequences, and a decoder given the same pair of labels
//! must give the same answer.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::bits::{ceil_log2, Label};
use crate::dynamic::{DynamicEncoder, DynamicKind};
use crate::forest::{build_from_events, NodeId, QueryAnswer, QueryKind, RootedForest, TopologicalEvent};
use crate::graph::SimpleGraph;

use super::{generate, invalid, BoundsError, Family, FamilyKind, FamilySpec, Instance};

/// `(member index, node index)`; node `i` is the `i`-th insertion.
pub type Vertex = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MissingWitness {
    pub a: Vertex,
    pub b: Vertex,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WitnessStats {
    pub pairs: u64,
    /// Pairs settled because one sequence holds both nodes.
    pub by_uniqueness: u64,
    /// Pairs settled by a query against a shared node.
    pub by_query: u64,
    pub missing: Vec<MissingWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    pub family: FamilySpec,
    pub queries: Vec<QueryKind>,
    pub certified_count: u64,
    pub implied_bits: u32,
    pub theory_expr: String,
    pub theory_value: Ratio<i128>,
    pub stats: WitnessStats,
}

/// Events with names replaced by insertion positions.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Step {
    Root,
    Child(usize),
    Node(Vec<usize>),
}

enum Relations {
    Tree(RootedForest),
    Graph(SimpleGraph, Vec<usize>),
}

impl Relations {
    /// Answers that pin down a decoder's output. Node- and port-valued
    /// answers are skipped: the encoder chooses those values.
    fn eval(&self, q: QueryKind, u: usize, v: usize) -> Option<QueryAnswer> {
        match self {
            Relations::Tree(f) => match q {
                QueryKind::Nca | QueryKind::Routing => None,
                _ => f.oracle(q, NodeId(u as u32), NodeId(v as u32)).ok(),
            },
            Relations::Graph(g, comp) => match q {
                QueryKind::Adjacency => Some(QueryAnswer::Bool(
                    u != v && g.adjacent(NodeId(u as u32), NodeId(v as u32)),
                )),
                QueryKind::Connectivity => Some(QueryAnswer::Bool(comp[u] == comp[v])),
                _ => None,
            },
        }
    }
}

fn components(g: &SimpleGraph) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..g.len()).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    for v in 0..g.len() {
        for nb in g.neighbors(NodeId(v as u32)) {
            let (a, b) = (find(&mut comp, v), find(&mut comp, nb.index()));
            comp[a.max(b)] = a.min(b);
        }
    }
    (0..g.len()).map(|v| find(&mut comp, v)).collect()
}

fn prepare(family: &Family) -> Result<(Vec<Vec<Step>>, Vec<Relations>), BoundsError> {
    let mut steps = Vec::with_capacity(family.members.len());
    let mut rels = Vec::with_capacity(family.members.len());
    for m in &family.members {
        match &m.instance {
            Instance::Events(seq) => {
                let (forest, ids) = build_from_events(seq)?;
                let mut s = Vec::with_capacity(seq.len());
                for e in seq.events() {
                    s.push(match e {
                        TopologicalEvent::InsertRoot { .. } => Step::Root,
                        TopologicalEvent::InsertChild { parent, .. } => Step::Child(ids[parent].index()),
                        TopologicalEvent::RemoveLeaf { .. } => {
                            return Err(invalid("certification needs insertion-only sequences"))
                        }
                    });
                }
                steps.push(s);
                rels.push(Relations::Tree(forest));
            }
            Instance::Graph(seq) => {
                let (g, ids) = seq.build()?;
                let s = seq
                    .events()
                    .iter()
                    .map(|e| {
                        let mut nb: Vec<usize> = e.neighbors.iter().map(|x| ids[x].index()).collect();
                        nb.sort_unstable();
                        Step::Node(nb)
                    })
                    .collect();
                steps.push(s);
                let comp = components(&g);
                rels.push(Relations::Graph(g, comp));
            }
            Instance::Forest(_) => {
                return Err(invalid("certification runs on insertion-sequence families"));
            }
        }
    }
    Ok((steps, rels))
}

fn lcp(a: &[Step], b: &[Step]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// The candidate vertices the lower-bound arguments count.
fn candidates(family: &Family) -> Vec<Vertex> {
    let n = family.spec.n as usize;
    let mut out = Vec::new();
    for (m, member) in family.members.iter().enumerate() {
        let count = member.instance.node_count();
        match family.spec.kind {
            // every node of the full path (or all roots), plus every leaf
            FamilyKind::Fn | FamilyKind::FnC => {
                let k = count - leaf_count(member, n);
                if k == n {
                    out.extend((0..n).map(|i| (m, i)));
                } else {
                    out.extend((k..count).map(|i| (m, i)));
                }
            }
            FamilyKind::In => {
                let leaves = leaf_count(member, n);
                out.extend((count - leaves..count).map(|i| (m, i)));
            }
            // the joined node of each member
            _ => out.push((m, count - 1)),
        }
    }
    out
}

/// Number of trailing leaves in a generated `Fn`, `FnC` or `In` member.
fn leaf_count(member: &super::Member, n: usize) -> usize {
    let param = |name: &str| -> usize {
        member
            .params
            .split(',')
            .find_map(|p| p.strip_prefix(name)?.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    n - param("k") - param("j")
}

struct Canonical {
    /// Canonical vertex list, sorted.
    vertices: Vec<Vertex>,
    /// Per vertex, the set of members containing it.
    present: Vec<Vec<u64>>,
}

fn canonicalize(cands: &[Vertex], lcps: &[Vec<usize>]) -> Canonical {
    let m = lcps.len();
    let words = m.div_ceil(64);
    let mut set = BTreeSet::new();
    for &(s, i) in cands {
        let c = (0..m).find(|&t| lcps[s][t] > i).expect("a member shares its own prefix");
        set.insert((c, i));
    }
    let vertices: Vec<Vertex> = set.into_iter().collect();
    let present = vertices
        .iter()
        .map(|&(c, i)| {
            let mut bits = vec![0u64; words];
            for t in 0..m {
                if lcps[c][t] > i {
                    bits[t / 64] |= 1 << (t % 64);
                }
            }
            bits
        })
        .collect();
    Canonical { vertices, present }
}

enum Witness {
    Unique,
    Query,
    Missing,
}

fn witness(
    u: Vertex,
    w: Vertex,
    pu: &[u64],
    pw: &[u64],
    lcps: &[Vec<usize>],
    rels: &[Relations],
    queries: &[QueryKind],
) -> Witness {
    if pu.iter().zip(pw).any(|(x, y)| x & y != 0) {
        return Witness::Unique;
    }
    let ((a, i), (b, j)) = (u, w);
    let (ra, rb) = (&rels[a], &rels[b]);
    // shared nodes nearest the divergence point tend to be the witnesses
    for z in (0..lcps[a][b]).rev() {
        for &q in queries {
            let differ = |x: Option<QueryAnswer>, y: Option<QueryAnswer>| matches!((x, y), (Some(x), Some(y)) if x != y);
            if differ(ra.eval(q, i, z), rb.eval(q, j, z)) || differ(ra.eval(q, z, i), rb.eval(q, z, j)) {
                return Witness::Query;
            }
        }
    }
    Witness::Missing
}

fn theory(spec: &FamilySpec) -> (String, Ratio<i128>) {
    let n = i128::from(spec.n);
    match spec.kind {
        FamilyKind::Fn | FamilyKind::FnC => (
            "n+(n-1)(n-2)/2".into(),
            Ratio::from_integer(n + (n - 1) * (n - 2) / 2),
        ),
        FamilyKind::In => ("n(n-1)(n-2)/6".into(), Ratio::from_integer(n * (n - 1) * (n - 2) / 6)),
        _ => ("2^(n-1)-1".into(), Ratio::from_integer((1i128 << (n - 1)) - 1)),
    }
}

/// Certifies how many distinct labels every correct deterministic unique
/// encoder answering `queries` must use over the family.
///
/// Pairs without a witness are recorded and one endpoint is dropped, so the
/// count stays a sound lower bound.
pub fn certify_forced_distinct(
    spec: &FamilySpec,
    queries: &[QueryKind],
) -> Result<BoundCertificate, BoundsError> {
    if !matches!(
        spec.kind,
        FamilyKind::Fn | FamilyKind::FnC | FamilyKind::In | FamilyKind::A2
    ) {
        return Err(invalid(format!("{} is not certified by witnesses", spec.kind)));
    }
    if spec.k.is_some() || spec.j.is_some() || spec.s.is_some() {
        return Err(invalid("certification needs the whole family, not one member"));
    }
    let family = generate(spec)?;
    let (steps, rels) = prepare(&family)?;
    let m = steps.len();
    let lcps: Vec<Vec<usize>> = (0..m)
        .map(|a| (0..m).map(|b| lcp(&steps[a], &steps[b])).collect())
        .collect();
    let canon = canonicalize(&candidates(&family), &lcps);
    let vs = &canon.vertices;

    let mut stats = WitnessStats::default();
    let mut missing_per_vertex = vec![0usize; vs.len()];
    for x in 0..vs.len() {
        for y in x + 1..vs.len() {
            stats.pairs += 1;
            match witness(vs[x], vs[y], &canon.present[x], &canon.present[y], &lcps, &rels, queries) {
                Witness::Unique => stats.by_uniqueness += 1,
                Witness::Query => stats.by_query += 1,
                Witness::Missing => {
                    stats.missing.push(MissingWitness { a: vs[x], b: vs[y] });
                    missing_per_vertex[x] += 1;
                    missing_per_vertex[y] += 1;
                }
            }
        }
    }

    // drop vertices until every remaining pair has a witness
    let mut dropped = vec![false; vs.len()];
    let index = |v: Vertex| vs.binary_search(&v).expect("vertex from the list");
    loop {
        let open: Vec<&MissingWitness> = stats
            .missing
            .iter()
            .filter(|p| !dropped[index(p.a)] && !dropped[index(p.b)])
            .collect();
        if open.is_empty() {
            break;
        }
        let mut load = vec![0usize; vs.len()];
        for p in &open {
            load[index(p.a)] += 1;
            load[index(p.b)] += 1;
        }
        let worst = (0..vs.len()).max_by_key(|&i| (load[i], core::cmp::Reverse(i))).expect("non-empty");
        dropped[worst] = true;
    }
    let certified = dropped.iter().filter(|d| !**d).count() as u64;
    let (theory_expr, theory_value) = theory(spec);
    Ok(BoundCertificate {
        family: spec.clone(),
        queries: queries.to_vec(),
        certified_count: certified,
        implied_bits: ceil_log2(certified),
        theory_expr,
        theory_value,
        stats,
    })
}

/// Runs the encoder over every member and counts distinct labels overall.
pub fn count_distinct_emitted(kind: DynamicKind, family: &Family) -> Result<u64, BoundsError> {
    let mut seen: BTreeSet<Label> = BTreeSet::new();
    for m in &family.members {
        let mut enc = DynamicEncoder::new(kind);
        match &m.instance {
            Instance::Events(seq) => {
                for e in seq.events() {
                    enc.apply(e)?;
                }
            }
            Instance::Graph(seq) => {
                for e in seq.events() {
                    enc.apply_graph(e)?;
                }
            }
            Instance::Forest(_) => return Err(invalid("static family given to a dynamic encoder")),
        }
        seen.extend(enc.all_labels().iter().cloned());
    }
    Ok(seen.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YaoReport {
    pub n: u64,
    pub family_size: u64,
    /// Mean over the family of the largest label in each sequence.
    pub expected_max: Ratio<i128>,
    /// `(1/|F|) Σ_i (⌈log₂ n⌉ + ⌈log₂ i⌉ - 1)`.
    pub bound: Ratio<i128>,
}

/// Exact mean of the per-sequence maximum label size over
/// `{Fn(k) : 1 < k < n/2}`, next to the averaging bound. Logs are rounded
/// up so both sides stay rational; rounding up only raises the bound.
pub fn yao_expected_max(kind: DynamicKind, n: u64) -> Result<YaoReport, BoundsError> {
    let ks: Vec<u64> = (2..n).take_while(|k| 2 * k < n).collect();
    if ks.is_empty() {
        return Err(invalid(format!("no k with 1 < k < n/2 for n={n}")));
    }
    let mut total: i128 = 0;
    for &k in &ks {
        let fam = generate(&FamilySpec::new(FamilyKind::Fn, n).with_k(k))?;
        let Instance::Events(seq) = &fam.members[0].instance else {
            unreachable!("Fn members are event sequences")
        };
        let mut enc = DynamicEncoder::new(kind);
        for e in seq.events() {
            enc.apply(e)?;
        }
        total += enc.max_bits() as i128;
    }
    let size = ks.len() as i128;
    let log_n = i128::from(ceil_log2(n));
    let rhs: i128 = (1..=size as u64).map(|i| log_n + i128::from(ceil_log2(i)) - 1).sum();
    Ok(YaoReport {
        n,
        family_size: size as u64,
        expected_max: Ratio::new(total, size),
        bound: Ratio::new(rhs, size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom3(n: u64) -> u64 {
        n * (n - 1) * (n - 2) / 6
    }

    #[test]
    fn fn_family_at_ten() {
        let c = certify_forced_distinct(&FamilySpec::new(FamilyKind::Fn, 10), &[QueryKind::Adjacency]).unwrap();
        assert_eq!(c.certified_count, 46);
        assert_eq!(c.implied_bits, 6);
        assert!(c.stats.missing.is_empty());
        assert_eq!(c.theory_value, Ratio::from_integer(46));
    }

    #[test]
    fn fnc_family_needs_connectivity() {
        let spec = FamilySpec::new(FamilyKind::FnC, 10);
        let c = certify_forced_distinct(&spec, &[QueryKind::Connectivity]).unwrap();
        assert_eq!(c.certified_count, 46);
        assert!(c.stats.missing.is_empty());
        // siblings alone cannot tell a leaf from a later root
        let weak = certify_forced_distinct(&spec, &[QueryKind::Sibling]).unwrap();
        assert!(!weak.stats.missing.is_empty());
        assert!(weak.certified_count < 46);
    }

    #[test]
    fn in_family_is_n_choose_three() {
        let q = [QueryKind::Adjacency, QueryKind::Connectivity];
        for n in 3..=12u64 {
            let c = certify_forced_distinct(&FamilySpec::new(FamilyKind::In, n), &q).unwrap();
            assert_eq!(c.certified_count, binom3(n), "n={n}");
            assert!(c.stats.missing.is_empty());
        }
    }

    #[test]
    fn binomial_identity_by_direct_summation() {
        for n in 3..=32u64 {
            let direct: u64 = (1..n).flat_map(|j| (1..n - j).map(move |k| n - j - k)).sum();
            assert_eq!(direct, binom3(n));
        }
    }

    #[test]
    fn a2_family_small() {
        let c = certify_forced_distinct(&FamilySpec::new(FamilyKind::A2, 6), &[QueryKind::Adjacency]).unwrap();
        assert_eq!(c.certified_count, 31);
        assert_eq!(c.implied_bits, 5);
    }

    #[test]
    fn member_specs_are_rejected() {
        let spec = FamilySpec::new(FamilyKind::Fn, 10).with_k(3);
        assert!(certify_forced_distinct(&spec, &[QueryKind::Adjacency]).is_err());
        assert!(certify_forced_distinct(&FamilySpec::new(FamilyKind::Fab, 12), &[]).is_err());
    }

    #[test]
    fn emitted_counts_dominate_certified_counts() {
        let fam = generate(&FamilySpec::new(FamilyKind::Fn, 10)).unwrap();
        assert!(count_distinct_emitted(DynamicKind::Pair, &fam).unwrap() >= 46);
        let fam = generate(&FamilySpec::new(FamilyKind::In, 10)).unwrap();
        assert!(count_distinct_emitted(DynamicKind::Triple, &fam).unwrap() >= 120);
        let fam = generate(&FamilySpec::new(FamilyKind::FnC, 10)).unwrap();
        assert!(count_distinct_emitted(DynamicKind::Connectivity, &fam).unwrap() >= 46);
        let fam = generate(&FamilySpec::new(FamilyKind::A2, 8)).unwrap();
        assert!(count_distinct_emitted(DynamicKind::BoundedDegree(7), &fam).unwrap() >= 127);
    }

    #[test]
    fn yao_values() {
        let r = yao_expected_max(DynamicKind::Pair, 16).unwrap();
        assert_eq!(r.expected_max, Ratio::from_integer(8));
        assert_eq!(r.family_size, 6);
        let r = yao_expected_max(DynamicKind::Pair, 8).unwrap();
        assert_eq!(r.bound, Ratio::new(5, 2));
        assert!(r.expected_max >= r.bound);
        assert!(matches!(yao_expected_max(DynamicKind::Pair, 4), Err(BoundsError::InvalidParams(_))));
    }
}
