mod common;

use crn_core::conjugacy::{satisfies_condition, verify_conjugacy_numerically, Scaling};
use crn_core::dynamics::random_positive_point;
use crn_core::scalar::Scalar;
use crn_core::search::{enumerate_wr_digraphs, search_conjugate_targets, SearchConfig, SearchOutcome};
use crn_core::structure::{is_weakly_reversible, linkage_classes, stoichiometric_subspace};
use crn_core::Network;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{complex, edges_in, load, qs};

fn cb_only() -> SearchConfig {
    SearchConfig {
        require_complex_balanced: true,
        ..SearchConfig::default()
    }
}

fn no_phantoms(cfg: SearchConfig) -> SearchConfig {
    SearchConfig {
        allow_phantoms: false,
        ..cfg
    }
}

fn check_all_results(original: &Network, out: &SearchOutcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in &out.results {
        assert!(is_weakly_reversible(&r.target));
        assert!(satisfies_condition(original, &r.target, &r.witness));
        for _ in 0..3 {
            let x0 = random_positive_point(&mut rng, original.num_species(), 0.2, 3.0);
            let check = verify_conjugacy_numerically(original, &r.target, &r.witness, &x0, 5.0, 1e-6).unwrap();
            assert!(check.passed, "{:?}: deviation {}", r.edges, check.max_deviation);
        }
    }
}

#[test]
fn example_one_search_finds_the_reversible_pairs() {
    let n = load("example1_N.crn");
    let out = search_conjugate_targets(&n, &cb_only()).unwrap();
    let wanted = edges_in(&n, &load("example1_Nprime.crn"));
    let r = out
        .results
        .iter()
        .find(|r| r.edges == wanted)
        .expect("two reversible pairs");
    assert_eq!(r.witness.k_tilde, qs(&["2", "4", "2", "4"]));
    assert_eq!(r.witness.c, qs(&["2", "1"]));
    assert!(r.balanced && r.stability_implied);
    check_all_results(&n, &out);
}

#[test]
fn example_two_off_the_knife_edge_has_no_target_even_with_phantoms() {
    let n = load("ex2.crn").with_rates(&qs(&["1", "2", "1"])).unwrap();
    let out = search_conjugate_targets(&n, &SearchConfig::default()).unwrap();
    assert!(out.results.is_empty());
    assert!(!out.cap_exhausted);
}

#[test]
fn example_two_on_the_knife_edge_finds_the_reversible_pair() {
    let n = load("ex2.crn");
    let out = search_conjugate_targets(&n, &no_phantoms(SearchConfig::default())).unwrap();
    let wanted = edges_in(&n, &load("ex2_target.crn"));
    let r = out.results.iter().find(|r| r.edges == wanted).expect("A1 <-> 2A2");
    assert_eq!(r.witness.c, qs(&["2", "1"]));
    check_all_results(&n, &out);
}

#[test]
fn example_three_split_target_tracks_the_balancing_curve() {
    let base = load("ex3.crn");
    let wanted = edges_in(&base, &load("ex3_target.crn"));
    let free = (
        base.complex_index(&complex("A1 + 3A2", "A1 A2")).unwrap().unwrap(),
        base.complex_index(&complex("A1 + A2", "A1 A2")).unwrap().unwrap(),
    );
    for eps in [0.25f64, 0.5, 0.7] {
        let n = base.with_rates(&qs(&[&eps.to_string(), "1", "1", "1"])).unwrap();
        let out = search_conjugate_targets(&n, &no_phantoms(cb_only())).unwrap();
        let r = out.results.iter().find(|r| r.edges == wanted).expect("split digraph");
        let t = r.witness.b[r.edges.iter().position(|&e| e == free).unwrap()].as_f64();
        // Root in [0, 1] of t^2 - (2 - eps^2) t + 1 - 2 eps^2 = 0.
        let p = 2.0 - eps * eps;
        let root = (p - (p * p - 4.0 * (1.0 - 2.0 * eps * eps)).sqrt()) / 2.0;
        assert!((t - root).abs() < 1e-6, "eps {eps}: t {t} vs {root}");
        check_all_results(&n, &out);
    }
    let n = base.with_rates(&qs(&["4/5", "1", "1", "1"])).unwrap();
    let out = search_conjugate_targets(&n, &no_phantoms(cb_only())).unwrap();
    assert!(out.results.iter().all(|r| r.edges != wanted));
}

#[test]
fn example_four_phantom_target_is_found_and_balanced() {
    let n = load("ex4.crn");
    let out = search_conjugate_targets(&n, &cb_only()).unwrap();
    let wanted = edges_in(&n, &load("ex4_target.crn"));
    let r = out.results.iter().find(|r| r.edges == wanted).expect("phantom target");
    assert_eq!(r.phantoms, vec![complex("A1 + A2", "A1 A2")]);
    assert_eq!(r.num_complexes(), 4);
    let t = r.witness.b[3].as_f64();
    assert!((t.powi(3) - 1.0 / 6.0).abs() < 1e-8);
    check_all_results(&n, &out);
}

#[test]
fn example_four_phantom_target_follows_the_rate_product() {
    let n = load("ex4.crn").with_rates(&qs(&["2", "3", "1/2"])).unwrap();
    let out = search_conjugate_targets(&n, &cb_only()).unwrap();
    let wanted = edges_in(&n, &load("ex4_target.crn"));
    let r = out.results.iter().find(|r| r.edges == wanted).expect("phantom target");
    let phantom = n.complex_index(&complex("A1 + A2", "A1 A2")).unwrap().unwrap();
    let pos = r.edges.iter().position(|&(a, _)| a == phantom).unwrap();
    let t = r.witness.b[pos].as_f64();
    assert!((t.powi(3) - 2.0 * 3.0 * 0.5 / 6.0).abs() < 1e-8, "t = {t}");
}

/// Over the three reactant complexes alone a weakly reversible conjugate
/// target exists, even with T = I: A1 -> B -> A2 -> A1 plus A2 -> B.
#[test]
fn example_four_without_phantoms_admits_deficiency_zero_targets() {
    let n = load("ex4.crn");
    let out = search_conjugate_targets(&n, &no_phantoms(SearchConfig::default())).unwrap();
    assert_eq!(out.results.len(), 3);
    for r in &out.results {
        assert!(r.phantoms.is_empty());
        let delta =
            r.target.num_complexes() - linkage_classes(&r.target).len() - stoichiometric_subspace(&r.target).dim();
        assert_eq!(delta, 0);
        assert!(r.balanced);
    }
    let identity = out
        .results
        .iter()
        .find(|r| r.witness.c == qs(&["1", "1"]))
        .expect("T = I target");
    assert_eq!(identity.witness.b, qs(&["1", "1", "1/3", "1/3"]));
    check_all_results(&n, &out);
}

#[test]
fn horn_jackson_has_an_identity_balanced_realization_at_one_half() {
    let n = load("horn_jackson.crn")
        .with_rates(&qs(&["1", "1/2", "1", "1/2"]))
        .unwrap();
    let cfg = SearchConfig {
        scaling: Scaling::Identity,
        ..no_phantoms(cb_only())
    };
    let out = search_conjugate_targets(&n, &cfg).unwrap();
    assert!(!out.results.is_empty());
    for r in &out.results {
        assert_eq!(r.witness.c, qs(&["1", "1"]));
    }
    check_all_results(&n, &out);
}

#[test]
fn results_are_deterministic_and_deduplicated() {
    let n = load("ex4.crn");
    let a = search_conjugate_targets(&n, &cb_only()).unwrap();
    let b = search_conjugate_targets(&n, &cb_only()).unwrap();
    assert_eq!(a.results.len(), b.results.len());
    for (x, y) in a.results.iter().zip(&b.results) {
        assert_eq!(x.edges, y.edges);
        assert_eq!(x.witness, y.witness);
    }
    let mut keys: Vec<_> = a.results.iter().map(|r| r.edges.clone()).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), a.results.len());
    let order: Vec<_> = a.results.iter().map(|r| (r.num_complexes(), r.edges.len())).collect();
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(order, sorted);
}

#[test]
fn candidate_cap_reports_partial_results() {
    let n = load("ex4.crn");
    let cfg = SearchConfig {
        max_candidates: 2,
        ..SearchConfig::default()
    };
    let out = search_conjugate_targets(&n, &cfg).unwrap();
    assert!(out.cap_exhausted);
    assert!(out.candidates_evaluated <= 2);
}

#[test]
fn too_many_reactant_complexes_is_an_error() {
    let n = load("ex3.crn");
    let cfg = SearchConfig {
        max_complexes: 3,
        ..SearchConfig::default()
    };
    assert!(search_conjugate_targets(&n, &cfg).is_err());
}

#[test]
fn enumeration_over_example_one_reactants_contains_the_target() {
    let n = load("example1_N.crn");
    let reactants: Vec<_> = n
        .reactant_complexes()
        .iter()
        .map(|&i| n.complexes()[i].clone())
        .collect();
    let target = load("example1_Nprime.crn");
    let wanted: Vec<(usize, usize)> = {
        let mut e: Vec<_> = target
            .reaction_ends()
            .iter()
            .map(|&(a, b)| {
                let pa = reactants.iter().position(|c| *c == target.complexes()[a]).unwrap();
                let pb = reactants.iter().position(|c| *c == target.complexes()[b]).unwrap();
                (pa, pb)
            })
            .collect();
        e.sort_unstable();
        e
    };
    let all: Vec<Vec<(usize, usize)>> = enumerate_wr_digraphs(&reactants, usize::MAX)
        .unwrap()
        .map(|mut e| {
            e.sort_unstable();
            e
        })
        .collect();
    assert!(all.contains(&wanted));
}
