//! Randomized property tests tying the constructions to the exact oracle
//! and to each other.

use proptest::prelude::*;

use selfsim::bounds::{iso_volume, split_star_forest, star_cover, ExpectationMode};
use selfsim::driver::{drive, union_bound_log, DriveMode};
use selfsim::graph::{verify_certificate, Graph};
use selfsim::greedy::{key_similarity, GreedyConfig};
use selfsim::io::{parse_edge_list, write_edge_list};
use selfsim::oracle::iso_exact;

/// A small random graph from (n, edge bitmask).
fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=7, any::<u32>()).prop_map(|(n, mask)| {
        let all: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let edges: Vec<(usize, usize)> = all
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> (i % 32) & 1 == 1 || (mask >> ((i + 7) % 32)) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::build(n, &edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constructions_never_beat_the_oracle(g in small_graph(), seed in 0u64..1000) {
        let (exact, oracle_cert) = iso_exact(&g, 9).unwrap();
        prop_assert_eq!(verify_certificate(&g, &oracle_cert), Ok(()));
        prop_assert!(2 * exact <= g.edge_count());

        let cfg = GreedyConfig { seed, ..Default::default() };
        let mut certs = Vec::new();

        let (live, map) = g.remove_isolated();
        if live.vertex_count() > 0 {
            certs.push(split_star_forest(&star_cover(&live).unwrap()).lift(&map));
        }
        certs.push(iso_volume(&g, ExpectationMode::Derandomized).cert);
        certs.push(key_similarity(&g, &cfg).unwrap().cert);
        certs.push(drive(&g, &cfg, DriveMode::Theory).best);
        certs.push(drive(&g, &cfg, DriveMode::BestOfAll).best);

        for cert in certs {
            prop_assert_eq!(verify_certificate(&g, &cert), Ok(()), "method {}", cert.method);
            prop_assert!(cert.s <= exact, "method {} gave {} > exact {}", cert.method, cert.s, exact);
        }
    }

    #[test]
    fn best_of_all_recovers_the_star_bound(g in small_graph(), seed in 0u64..1000) {
        let (live, map) = g.remove_isolated();
        prop_assume!(live.vertex_count() > 0);
        let star = split_star_forest(&star_cover(&live).unwrap()).lift(&map);
        let cfg = GreedyConfig { seed, ..Default::default() };
        let report = drive(&g, &cfg, DriveMode::BestOfAll);
        prop_assert!(report.best.s >= star.s);
    }

    #[test]
    fn edge_list_round_trip(g in small_graph()) {
        let text = write_edge_list(&g, &[]);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn union_bound_inequality(n in 2u64..500, p in 1e-6f64..1.0, frac in 0.0f64..1.0) {
        let pairs = n * (n - 1) / 2;
        let t = 1 + (frac * (pairs - 1) as f64) as u64;
        let (exact, simplified) = union_bound_log(n, p, t).unwrap();
        prop_assert!(
            exact <= simplified + 1e-9,
            "exact {} > simplified {} at n={n} p={p} t={t}", exact, simplified
        );
    }

    #[test]
    fn star_bound_quarter_n(g in small_graph()) {
        let (live, map) = g.remove_isolated();
        prop_assume!(live.vertex_count() > 0);
        let cert = split_star_forest(&star_cover(&live).unwrap()).lift(&map);
        let n = live.vertex_count() as f64;
        prop_assert!(cert.s as f64 >= (n - 2.0) / 4.0);
    }
}
