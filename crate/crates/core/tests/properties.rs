use proptest::prelude::*;

use forestlabel_core::bounds::{certify_forced_distinct, count_distinct_emitted, generate, FamilyKind, FamilySpec};
use forestlabel_core::dynamic::{decode, DynamicEncoder, DynamicKind};
use forestlabel_core::{build_from_events, random_stream, NodeId, QueryAnswer, QueryKind, RootedForest, StaticScheme};

fn forest_from(choices: &[u8]) -> RootedForest {
    // choice 0 makes a root, anything else attaches below an earlier node
    let parents: Vec<Option<usize>> = choices
        .iter()
        .enumerate()
        .map(|(i, &c)| if i == 0 || c % 8 == 0 { None } else { Some(c as usize % i) })
        .collect();
    RootedForest::from_parents(&parents).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn static_schemes_agree_with_the_oracle(choices in prop::collection::vec(any::<u8>(), 1..40), slack in 0u64..20) {
        let f = forest_from(&choices);
        let n = f.len() as u64 + slack;
        for name in StaticScheme::registered_names() {
            let s = StaticScheme::parse(&name).unwrap();
            let labels = s.encode(&f, n).unwrap();
            prop_assert!(labels.iter().all(|(_, l)| l.len() == s.size(n)));
            if s.is_unique() {
                prop_assert!(labels.all_distinct());
            }
            for q in s.queries() {
                for u in f.nodes() {
                    for v in f.nodes() {
                        let got = s.decode(q, labels.get(u).unwrap(), labels.get(v).unwrap(), n).unwrap();
                        prop_assert_eq!(QueryAnswer::Bool(got), f.oracle(q, u, v).unwrap(), "{} {} {} {}", name, q, u, v);
                    }
                }
            }
        }
    }

    #[test]
    fn dynamic_labels_are_unique_and_permanent(n in 1usize..120, seed in any::<u64>()) {
        let seq = random_stream(n, seed);
        for kind in [DynamicKind::Pair, DynamicKind::Connectivity, DynamicKind::Triple] {
            let mut enc = DynamicEncoder::new(kind);
            let mut log = Vec::new();
            for e in seq.events() {
                if let Some(x) = enc.apply(e).unwrap() {
                    log.push(x);
                }
            }
            for (v, l) in &log {
                prop_assert_eq!(enc.label(*v).unwrap(), l);
            }
            let live: Vec<_> = enc.live_labels().collect();
            let mut ids: Vec<_> = live.iter().map(|(_, l)| (*l).clone()).collect();
            ids.sort();
            ids.dedup();
            prop_assert_eq!(ids.len(), live.len());
            let (f, _) = build_from_events(&seq).unwrap();
            for &(u, lu) in live.iter().take(12) {
                for &(v, lv) in &live {
                    for q in kind.queries() {
                        prop_assert_eq!(QueryAnswer::Bool(decode(kind, q, lu, lv).unwrap()), f.oracle(q, u, v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn dynamic_width_tracks_insertions(n in 1u64..5000) {
        let mut enc = DynamicEncoder::new(DynamicKind::Pair);
        enc.insert_root().unwrap();
        for _ in 1..n {
            enc.insert_child(NodeId(0)).unwrap();
        }
        let w = forestlabel_core::bits::ceil_log2(n).max(1) as usize;
        prop_assert_eq!(enc.max_bits(), 2 * w);
    }
}

#[test]
fn certified_counts_never_exceed_emitted_counts() {
    let cases = [
        (FamilyKind::Fn, 12, vec![QueryKind::Adjacency], DynamicKind::Pair),
        (FamilyKind::Fn, 12, vec![QueryKind::Adjacency], DynamicKind::Triple),
        (FamilyKind::FnC, 12, vec![QueryKind::Connectivity], DynamicKind::Connectivity),
        (FamilyKind::In, 12, vec![QueryKind::Adjacency, QueryKind::Connectivity], DynamicKind::Triple),
        (FamilyKind::A2, 9, vec![QueryKind::Adjacency], DynamicKind::BoundedDegree(8)),
    ];
    for (kind, n, queries, enc) in cases {
        let spec = FamilySpec::new(kind, n);
        let cert = certify_forced_distinct(&spec, &queries).unwrap();
        let emitted = count_distinct_emitted(enc, &generate(&spec).unwrap()).unwrap();
        assert!(cert.certified_count <= emitted, "{kind} {}: {} > {emitted}", enc.name(), cert.certified_count);
        assert!(cert.stats.missing.is_empty());
    }
}

#[test]
fn fn_implied_bits_follow_two_log_n() {
    for n in 8..=64u64 {
        let c = certify_forced_distinct(&FamilySpec::new(FamilyKind::Fn, n), &[QueryKind::Adjacency]).unwrap();
        assert_eq!(c.certified_count, n + (n - 1) * (n - 2) / 2);
        assert!(f64::from(c.implied_bits) >= 2.0 * (n as f64).log2() - 2.0, "n={n}");
    }
}
