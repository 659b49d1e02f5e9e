//! The forest's precomputed oracle against relations recomputed from scratch
//! out of the bare parent array.

use forestlabel_core::{build_from_events, random_forest, random_stream, NodeId, QueryAnswer, QueryKind, RootedForest};

struct Brute {
    parent: Vec<Option<usize>>,
    anc: Vec<Vec<bool>>,
}

impl Brute {
    #[allow(clippy::needless_range_loop)]
    fn new(f: &RootedForest) -> Self {
        let n = f.id_bound();
        let parent: Vec<Option<usize>> = (0..n)
            .map(|i| {
                let v = NodeId(i as u32);
                if f.contains(v) {
                    f.parent(v).map(|p| p.index())
                } else {
                    None
                }
            })
            .collect();
        // anc[u][v]: u on the path from v to its root
        let mut anc = vec![vec![false; n]; n];
        for v in 0..n {
            let mut w = Some(v);
            while let Some(x) = w {
                anc[x][v] = true;
                w = parent[x];
            }
        }
        Brute { parent, anc }
    }

    fn root(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    fn depth(&self, v: usize) -> u32 {
        (0..self.parent.len()).filter(|&u| self.anc[u][v]).count() as u32 - 1
    }

    fn nca(&self, u: usize, v: usize) -> Option<usize> {
        (0..self.parent.len())
            .filter(|&w| self.anc[w][u] && self.anc[w][v])
            .max_by_key(|&w| self.depth(w))
    }
}

fn check(f: &RootedForest) {
    let b = Brute::new(f);
    for u in f.nodes() {
        for v in f.nodes() {
            let (ui, vi) = (u.index(), v.index());
            let adj = b.parent[ui] == Some(vi) || b.parent[vi] == Some(ui);
            assert_eq!(f.oracle(QueryKind::Adjacency, u, v).unwrap(), QueryAnswer::Bool(adj));
            let sib = ui == vi || (b.parent[ui].is_some() && b.parent[ui] == b.parent[vi]);
            assert_eq!(f.oracle(QueryKind::Sibling, u, v).unwrap(), QueryAnswer::Bool(sib));
            let conn = b.root(ui) == b.root(vi);
            assert_eq!(f.oracle(QueryKind::Connectivity, u, v).unwrap(), QueryAnswer::Bool(conn));
            assert_eq!(f.oracle(QueryKind::Ancestry, u, v).unwrap(), QueryAnswer::Bool(b.anc[ui][vi]));
            match b.nca(ui, vi) {
                Some(w) => {
                    assert_eq!(f.oracle(QueryKind::Nca, u, v).unwrap(), QueryAnswer::Node(NodeId(w as u32)));
                    let d = b.depth(ui) + b.depth(vi) - 2 * b.depth(w);
                    assert_eq!(f.oracle(QueryKind::Distance, u, v).unwrap(), QueryAnswer::Distance(d));
                }
                None => {
                    assert!(!conn);
                    assert!(f.oracle(QueryKind::Nca, u, v).is_err());
                    assert!(f.oracle(QueryKind::Distance, u, v).is_err());
                }
            }
            if conn && ui != vi {
                let port = match f.oracle(QueryKind::Routing, u, v).unwrap() {
                    QueryAnswer::Port(p) => p,
                    other => panic!("{other:?}"),
                };
                if b.anc[ui][vi] {
                    // the port names the child of u on the way down
                    let child = f.children(u).iter().find(|c| b.anc[c.index()][vi]).unwrap();
                    assert_eq!(port, f.port(*child));
                    assert_ne!(port, 0);
                } else {
                    assert_eq!(port, 0);
                }
            } else {
                assert!(f.oracle(QueryKind::Routing, u, v).is_err());
            }
        }
    }
}

#[test]
fn random_forests_up_to_64() {
    for n in (1..=64).step_by(3) {
        for seed in 0..4 {
            let (f, _) = build_from_events(&random_forest(n, seed)).unwrap();
            check(&f);
        }
    }
}

#[test]
fn forests_left_by_streams_with_removals() {
    for seed in 0..20 {
        let (f, _) = build_from_events(&random_stream(48, seed)).unwrap();
        check(&f);
    }
}
