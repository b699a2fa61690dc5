use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crn_core::balance::is_complex_balanced_system;
use crn_core::conjugacy::{satisfies_condition, solve_conjugacy, validate_linear_map, ConjugacyOptions};
use crn_core::dynamics::{integrate, IntegrationControls};
use crn_core::linalg::{solve_linear, Matrix};
use crn_core::model::{Complex, Reaction, SpeciesTable};
use crn_core::scalar::{parse_rational, Scalar};
use crn_core::structure::{is_weakly_reversible, kinetic_subspace_for, stoichiometric_subspace};
use crn_core::{Network, OdeSystem64, Rational};

fn rational(p: u32, d: u32) -> Rational {
    parse_rational(&format!("{p}/{d}")).unwrap()
}

fn rate() -> impl Strategy<Value = Rational> {
    (1u32..50, 1u32..10).prop_map(|(p, d)| rational(p, d))
}

/// Distinct complexes over `m` species with coefficients up to 2.
fn complexes(m: usize, n: usize) -> impl Strategy<Value = Vec<Complex>> {
    proptest::collection::btree_set(proptest::collection::vec(0u32..3, m), n)
        .prop_map(|set| set.into_iter().map(Complex::new).collect())
}

/// A weakly reversible network: one directed cycle through all complexes plus chords.
fn wr_network() -> impl Strategy<Value = Network> {
    (2usize..4, 2usize..6)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                complexes(m, n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_flat_map(|(m, cs, chords)| {
            let n = cs.len();
            let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            for a in 0..n {
                for b in 0..n {
                    if a != b && chords[a * n + b] && !edges.contains(&(a, b)) {
                        edges.push((a, b));
                    }
                }
            }
            let len = edges.len();
            (Just(m), Just(cs), Just(edges), proptest::collection::vec(rate(), len))
        })
        .prop_map(|(m, cs, edges, ks)| {
            let reactions = edges
                .iter()
                .zip(ks)
                .map(|(&(a, b), k)| Reaction::new(cs[a].clone(), cs[b].clone(), k))
                .collect();
            Network::new(SpeciesTable::numbered(m), reactions).unwrap()
        })
}

/// Any network with at most 3 species and 5 reactions.
fn any_network() -> impl Strategy<Value = Network> {
    (1usize..4)
        .prop_flat_map(|m| {
            proptest::collection::vec(
                (
                    proptest::collection::vec(0u32..3, m),
                    proptest::collection::vec(0u32..3, m),
                    rate(),
                ),
                1..6,
            )
            .prop_map(move |rs| (m, rs))
        })
        .prop_filter_map("trivial reaction", |(m, rs)| {
            let reactions = rs
                .into_iter()
                .map(|(a, b, k)| Reaction::new(Complex::new(a), Complex::new(b), k))
                .collect();
            Network::new(SpeciesTable::numbered(m), reactions).ok()
        })
}

fn positive_point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.2f64..3.0, m)
}

fn monomial_oracle(m: &Matrix<Rational>) -> bool {
    let n = m.rows();
    let zero = rational(0, 1);
    if (0..n).any(|i| (0..n).any(|j| m[(i, j)] < zero)) || m.determinant() == zero {
        return false;
    }
    (0..n).all(|j| {
        let mut e = vec![zero.clone(); n];
        e[j] = rational(1, 1);
        solve_linear(m, &e).is_some_and(|col| col.iter().all(|v| *v >= zero))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weakly_reversible_networks_have_equal_subspaces(net in wr_network()) {
        prop_assert!(is_weakly_reversible(&net));
        prop_assert_eq!(stoichiometric_subspace(&net).dim(), kinetic_subspace_for(&net, &net.rates()).dim());
    }

    #[test]
    fn kinetic_subspace_is_inside_stoichiometric(net in any_network()) {
        let s = stoichiometric_subspace(&net);
        let k = kinetic_subspace_for(&net, &net.rates());
        prop_assert!(k.dim() <= s.dim());
        let mut both = s.basis.clone();
        both.extend(k.basis.iter().cloned());
        prop_assert_eq!(crn_core::linalg::span_rank(&both, net.num_species()), s.dim());
    }

    #[test]
    fn text_format_round_trips(net in any_network()) {
        prop_assert_eq!(Network::parse(&net.to_text()).unwrap(), net);
    }

    #[test]
    fn every_network_is_conjugate_to_itself(net in any_network()) {
        let w = solve_conjugacy(&net, &net, &ConjugacyOptions::default()).unwrap().expect("identity witness");
        prop_assert!(satisfies_condition(&net, &net, &w));
        let sys = OdeSystem64::with_rates(&net, &w.k_tilde).unwrap();
        let orig = OdeSystem64::new(&net);
        let x = vec![0.7; net.num_species()];
        let y = w.map_state(&x);
        let fy = sys.rhs(&y).unwrap();
        let fx = orig.rhs(&x).unwrap();
        for ((a, b), c) in fx.iter().zip(&fy).zip(&w.c) {
            prop_assert!((a / c.as_f64() - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn two_complex_reversible_pairs_are_complex_balanced(
        cs in complexes(2, 2),
        kf in rate(),
        kr in rate(),
    ) {
        let net = Network::new(
            SpeciesTable::numbered(2),
            vec![
                Reaction::new(cs[0].clone(), cs[1].clone(), kf),
                Reaction::new(cs[1].clone(), cs[0].clone(), kr),
            ],
        )
        .unwrap();
        prop_assert!(is_complex_balanced_system(&OdeSystem64::new(&net)));
    }

    #[test]
    fn linear_map_validation_agrees_with_inverse_positivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..5);
        let mut m = Matrix::zeros(n, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for (i, &p) in perm.iter().enumerate() {
            m[(i, p)] = rational(rng.gen_range(1..20), rng.gen_range(1..5));
        }
        if rng.gen_bool(0.5) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let v = rational(rng.gen_range(1..20), 1);
            m[(i, j)] = if rng.gen_bool(0.5) { -v } else { v };
        }
        prop_assert_eq!(validate_linear_map(&m), monomial_oracle(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_central_differences((net, x) in any_network().prop_flat_map(|n| {
        let m = n.num_species();
        (Just(n), positive_point(m))
    })) {
        let sys = OdeSystem64::new(&net);
        let jac = sys.jacobian(&x).unwrap();
        let m = x.len();
        let mut scale = 0.0f64;
        let mut err = 0.0f64;
        for j in 0..m {
            let h = 1e-6 * x[j].max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (sys.rhs(&xp).unwrap(), sys.rhs(&xm).unwrap());
            for i in 0..m {
                scale = scale.max(jac[(i, j)].abs());
                err = err.max((jac[(i, j)] - (fp[i] - fm[i]) / (2.0 * h)).abs());
            }
        }
        prop_assert!(err <= 1e-5 * scale.max(1e-12), "err {} scale {}", err, scale);
    }

    #[test]
    fn conservation_laws_hold_along_trajectories((net, x0) in wr_network().prop_flat_map(|n| {
        let m = n.num_species();
        (Just(n), positive_point(m))
    })) {
        let m = net.num_species();
        let rows: Vec<Vec<Rational>> = net
            .reactions()
            .iter()
            .map(|rx| rx.reaction_vector().iter().map(|&v| parse_rational(&v.to_string()).unwrap()).collect())
            .collect();
        let laws = Matrix::from_rows(&rows, m).nullspace();
        let sys = OdeSystem64::new(&net);
        let traj = integrate(&sys, &x0, 2.0, &IntegrationControls::default()).unwrap();
        for w in &laws {
            let wf: Vec<f64> = w.iter().map(|v| v.as_f64()).collect();
            let dot = |x: &[f64]| x.iter().zip(&wf).map(|(a, b)| a * b).sum::<f64>();
            let c0 = dot(&x0);
            for x in &traj.states {
                prop_assert!((dot(x) - c0).abs() <= 1e-8 * c0.abs().max(1.0));
            }
        }
    }
}
