mod common;

use common::*;
use kwise::disjointness::{
    binary_entropy, dichotomy_threshold, dp_with_workers, entropy_bound_holds, linked_distance, weak_lower_bound,
    InjectionCertificate,
};
use kwise::intersecting::random_intersecting_family;
use kwise::{
    balanced_linked_cubes, build_disjointness_graph, clique_count, dichotomy_check, dp, entropy_bound, linked_cubes,
    observation1_certificate, principal_star, saturate, series_of_cubes, stability_distance, Partition, SetFamily,
    SubsetMask,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_family(max_n: u32) -> impl Strategy<Value = SetFamily> {
    (1u32..=max_n).prop_flat_map(|n| {
        proptest::collection::btree_set(0u32..1 << n, 0..=(1usize << n).min(120)).prop_map(move |s| from_bits(n, s))
    })
}

fn brute_cliques(f: &SetFamily, r: usize) -> u64 {
    let m: Vec<u32> = f.iter().map(|x| x.bits()).collect();
    itertools::Itertools::combinations(m.iter(), r)
        .filter(|c| (0..r).all(|i| (i + 1..r).all(|j| c[i] & c[j] == 0)))
        .count() as u64
}

#[test]
fn series_of_cubes_clique_counts_match_triple_loop() {
    let f = series_of_cubes(&Partition::balanced(g(6), 3).unwrap());
    let graph = build_disjointness_graph(&f);
    assert_eq!(brute_triangles(&f), 75);
    assert_eq!(clique_count(&graph, 3).unwrap(), 75);
    assert_eq!(clique_count(&graph, 4).unwrap(), brute_cliques(&f, 4));
    assert_eq!(clique_count(&graph, 2).unwrap(), graph.edge_count());
}

#[test]
fn clique_counts_match_brute_force_on_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.gen_range(3..=6);
        let f = SetFamily::collect(g(n), (0..25).map(|_| SubsetMask::from_bits(rng.gen_range(0..1 << n)))).unwrap();
        let graph = build_disjointness_graph(&f);
        for r in 2..=5 {
            assert_eq!(clique_count(&graph, r).unwrap(), brute_cliques(&f, r), "{f} r={r}");
        }
    }
    let graph = build_disjointness_graph(&fam(3, &[&[1]]));
    assert!(clique_count(&graph, 1).is_err());
    assert!(clique_count(&graph, 9).is_err());
}

#[test]
fn graph_is_simple_and_symmetric() {
    let f = SetFamily::power_set(g(4));
    let graph = build_disjointness_graph(&f);
    for i in 0..graph.vertex_count() {
        assert!(!graph.are_adjacent(i, i));
        for j in 0..graph.vertex_count() {
            let disjoint = f.members()[i].is_disjoint(f.members()[j]);
            assert_eq!(graph.are_adjacent(i, j), i != j && disjoint);
            assert_eq!(graph.are_adjacent(i, j), graph.are_adjacent(j, i));
        }
        assert_eq!(graph.degree(i), graph.neighbors(i).count());
    }
}

#[test]
fn certificate_invariants_on_saturated_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for n in 3..=8u32 {
        for _ in 0..10 {
            let seed = random_intersecting_family(g(n), k(3), 4, &mut rng);
            let f = saturate(&seed, k(3)).unwrap();
            let cert = observation1_certificate(&f).unwrap();
            cert.validate(&f).unwrap();
            assert_eq!(cert.len(), (1 << n) - f.len());
            let fbar = f.complement_family();
            for e in cert.entries() {
                assert!(fbar.contains(e.p) && fbar.contains(e.q));
                assert!(e.p.is_disjoint(e.q));
                assert_eq!(e.p | e.q, e.a);
            }
            let mut images: Vec<(u32, u32)> = cert.entries().iter().map(|e| (e.p.bits(), e.q.bits())).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len(), cert.len());
            assert!(brute_dp(&fbar) >= cert.len() as u64);
            let back = InjectionCertificate::from_json(g(n), &cert.to_json()).unwrap();
            assert_eq!(back, cert);
        }
    }
}

#[test]
fn certificate_rejects_non_maximal_families() {
    let f = linked_cubes(g(3), g(3).subset(&[1]).unwrap()).unwrap();
    assert!(observation1_certificate(&f).is_err());
    assert!(observation1_certificate(&fam(3, &[&[1], &[2]])).is_err());
}

#[test]
fn certificate_validation_catches_tampering() {
    let f = balanced_linked_cubes(g(4)).unwrap();
    let cert = observation1_certificate(&f).unwrap();
    let mut text: Vec<serde_json::Value> = serde_json::from_str(&cert.to_json()).unwrap();
    // Point a nonempty A at the pair of another A.
    let donor = text[2].clone();
    text[3]["P"] = donor["P"].clone();
    text[3]["Q"] = donor["Q"].clone();
    let forged = InjectionCertificate::from_json(g(4), &serde_json::to_string(&text).unwrap());
    assert!(forged.map(|c| c.validate(&f)).map_or(true, |v| v.is_err()));
}

#[test]
fn entropy_tightness_and_random_families() {
    for n in 1..=8 {
        let bound = entropy_bound(&SetFamily::power_set(g(n))).unwrap();
        assert!((bound - n as f64).abs() < 1e-12);
    }
    assert_eq!(entropy_bound(&fam(3, &[&[1]])).unwrap(), 0.0);
    let cube = fam(4, &[&[], &[1], &[2], &[1, 2]]);
    assert!((entropy_bound(&cube).unwrap() - 2.0).abs() < 1e-12);
    assert!(entropy_bound(&SetFamily::empty(g(3))).is_err());
    assert_eq!(binary_entropy(0.0), 0.0);
    assert_eq!(binary_entropy(1.0), 0.0);
    assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let size = rng.gen_range(1..=600);
        let f = SetFamily::collect(g(10), (0..size).map(|_| SubsetMask::from_bits(rng.gen_range(0..1 << 10)))).unwrap();
        assert!(entropy_bound_holds(&f).unwrap());
    }
}

#[test]
fn weak_lower_bound_is_the_smallest_solution() {
    for n in 1..=20u32 {
        let m = weak_lower_bound(n);
        let holds = |m: u64| (1u64 << n) - m.min(1 << n) <= 1 + m * m.saturating_sub(1) / 2;
        assert!(holds(m));
        assert!(m == 1 || !holds(m - 1), "n={n}");
    }
    assert_eq!(weak_lower_bound(4), 5);
}

#[test]
fn dichotomy_values() {
    let s = g(4).subset(&[1, 2]).unwrap();
    let f = linked_cubes(g(4), s).unwrap();
    assert_eq!(dichotomy_check(&f, s).unwrap(), 0);
    // F̄ = {∅,{1},{2},{3},{4}} already holds every proper subset of {1,3} and {2,4}.
    let t = dichotomy_check(&f, g(4).subset(&[1, 3]).unwrap()).unwrap();
    assert_eq!(t, 0);
    let star = principal_star(g(6), 1).unwrap();
    for y in g(6).subsets_of_size(3) {
        let t = dichotomy_check(&star, y).unwrap();
        let fbar = star.complement_family();
        let yc = y.complement(g(6));
        let expect = (0..64u32)
            .map(SubsetMask::from_bits)
            .filter(|&x| (x.is_proper_subset_of(y) || x.is_proper_subset_of(yc)) && !fbar.contains(x))
            .count() as u64;
        assert_eq!(t, expect);
    }
    assert_eq!(dichotomy_threshold(6), 4);
    let f6 = balanced_linked_cubes(g(6)).unwrap();
    assert_eq!(dichotomy_check(&f6, g(6).subset(&[1, 2, 3]).unwrap()).unwrap(), 0);
    assert!(dichotomy_check(&f6, g(6).subset(&[1, 2]).unwrap()).is_err());
    assert!(dichotomy_check(&principal_star(g(5), 1).unwrap(), g(5).subset(&[1, 2]).unwrap()).is_err());
}

#[test]
fn stability_distance_matches_brute_force() {
    let star = principal_star(g(4), 1).unwrap();
    let oracle = [0b0011u32, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]
        .iter()
        .map(|&s| brute_linked_distance(&star, s))
        .min()
        .unwrap();
    let (s, d) = stability_distance(&star).unwrap();
    assert_eq!(d, oracle);
    assert_eq!(d, 5);
    assert_eq!(s, SubsetMask::from_bits(0b0011));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [4u32, 6] {
        for _ in 0..10 {
            let f = saturate(&random_intersecting_family(g(n), k(3), 5, &mut rng), k(3)).unwrap();
            for s in g(n).subsets_of_size(n / 2) {
                assert_eq!(linked_distance(&f, s), brute_linked_distance(&f, s.bits()));
            }
        }
    }
    let f6 = balanced_linked_cubes(g(6)).unwrap();
    assert_eq!(stability_distance(&f6).unwrap(), (g(6).subset(&[1, 2, 3]).unwrap(), 0));
    assert!(stability_distance(&principal_star(g(5), 1).unwrap()).is_err());
}

#[test]
fn dp_independent_of_worker_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = SetFamily::collect(g(14), (0..3000).map(|_| SubsetMask::from_bits(rng.gen_range(0..1 << 14)))).unwrap();
    let reference = brute_dp(&f);
    for w in [1, 2, 3, 4] {
        assert_eq!(dp_with_workers(&f, w).unwrap(), reference);
    }
    assert!(dp_with_workers(&f, 0).is_err());
}

#[test]
fn dp_transform_path_on_dense_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [8u32, 10] {
        let f = SetFamily::collect(g(n), (0..1 << n).filter(|_| rng.gen_bool(0.8)).map(SubsetMask::from_bits)).unwrap();
        assert_eq!(dp(&f), brute_dp(&f));
    }
    let full = SetFamily::power_set(g(10));
    assert_eq!(dp(&full), (3u64.pow(10) + 1) / 2);
}

/// Clique density of `K_{r}` in the disjointness graph of the power set with
/// random deletions. Printed for the record; the trend is not asserted.
#[test]
fn clique_density_trend_is_recorded() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for n in [10u32, 12] {
        for kk in [2usize, 3] {
            let mut line = format!("clique density n={n} K_{}:", kk + 1);
            for keep in [0.25, 0.5, 0.75, 1.0] {
                let f = SetFamily::collect(
                    g(n),
                    (0..1u32 << n).filter(|_| keep == 1.0 || rng.gen_bool(keep)).map(SubsetMask::from_bits),
                )
                .unwrap();
                let m = f.len() as u64;
                let cliques = clique_count(&build_disjointness_graph(&f), kk + 1).unwrap();
                let density = cliques as f64 / binomial(m, kk as u64 + 1) as f64;
                line.push_str(&format!(" m={m} {density:.3e}"));
            }
            println!("{line}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_matches_brute_force_and_graph(f in arb_family(10)) {
        let d = dp(&f);
        prop_assert_eq!(d, brute_dp(&f));
        let graph = build_disjointness_graph(&f);
        prop_assert_eq!(d, graph.edge_count() + u64::from(f.contains_empty_set()));
        prop_assert_eq!(clique_count(&graph, 2).unwrap(), graph.edge_count());
    }

    #[test]
    fn entropy_bound_holds_everywhere(f in arb_family(10)) {
        prop_assume!(!f.is_empty());
        let bound = entropy_bound(&f).unwrap();
        prop_assert!(f.len() as f64 <= bound.exp2() * (1.0 + 1e-9));
    }
}
