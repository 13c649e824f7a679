use frink_core::balls::{delta_ball, distance_ball, Metric};
use frink_core::diffusion::{
    diffusion_distance_matrix, eig_symmetric, graph_laplacian, laplacian_spectrum, DEFAULT_EIGEN_TOL,
};
use frink_core::frink::{
    compute_lambda_sequence, delta_matrix, frink_chain_metric, is_shortest_path_fixed_point,
    lambda_inverse, InverseVariant,
};
use frink_core::relation::{level_set, Inequality};
use frink_core::{AffinityMatrix, BinaryRelation, SquareMatrix};
use proptest::prelude::*;

const VARIANTS: [InverseVariant; 3] = [InverseVariant::Script, InverseVariant::Upper, InverseVariant::Lower];

fn kernel_strategy(max_n: usize) -> impl Strategy<Value = AffinityMatrix> {
    (3..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.001f64..=1.0, n * n).prop_map(move |raw| {
            let m = SquareMatrix::from_fn(n, |i, j| {
                if i == j {
                    2.0
                } else {
                    raw[i.min(j) * n + i.max(j)]
                }
            });
            AffinityMatrix::new(m, frink_core::kernel::Source::Generated).unwrap()
        })
    })
}

fn relation_strategy(max_n: usize) -> impl Strategy<Value = BinaryRelation> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n)
            .prop_map(move |bits| BinaryRelation::from_fn(n, |i, j| bits[i * n + j]))
    })
}

fn relation_pair(max_n: usize) -> impl Strategy<Value = (BinaryRelation, BinaryRelation, BinaryRelation)> {
    (1..=max_n).prop_flat_map(|n| {
        let rel = move || {
            prop::collection::vec(any::<bool>(), n * n)
                .prop_map(move |bits| BinaryRelation::from_fn(n, |i, j| bits[i * n + j]))
        };
        (rel(), rel(), rel())
    })
}

fn brute_compose(a: &BinaryRelation, b: &BinaryRelation) -> BinaryRelation {
    let n = a.n();
    BinaryRelation::from_fn(n, |i, j| (0..n).any(|m| a.contains(i, m) && b.contains(m, j)))
}

fn symmetric_strategy(max_n: usize) -> impl Strategy<Value = SquareMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |raw| {
            SquareMatrix::from_fn(n, |i, j| raw[i.min(j) * n + i.max(j)])
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_matches_brute_force((a, b, _) in relation_pair(70)) {
        prop_assert_eq!(a.compose(&b).unwrap(), brute_compose(&a, &b));
    }

    #[test]
    fn compose_is_associative((a, b, c) in relation_pair(20)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reflexive_relations_grow_under_cubing(r in relation_strategy(30)) {
        let n = r.n();
        let u = BinaryRelation::from_fn(n, |i, j| i == j || r.contains(i, j));
        let cube = u.power3();
        prop_assert!(u.is_subset_of(&cube));
        prop_assert_eq!(cube, brute_compose(&brute_compose(&u, &u), &u));
    }

    #[test]
    fn band_covers_within_n(n in 2usize..40) {
        let m = BinaryRelation::band(n, 1).covering_index(n).unwrap();
        prop_assert_eq!(m, n - 1);
    }

    #[test]
    fn lambda_sequence_structure(k in kernel_strategy(14)) {
        let l = compute_lambda_sequence(&k).unwrap();
        let values = l.values();
        prop_assert!(values.windows(2).all(|w| w[0] < w[1]));
        let entries = k.distinct_values();
        for &v in values {
            prop_assert!(entries.contains(&v));
        }
        let levels: Vec<_> = values.iter().map(|&t| level_set(&k, t, Inequality::NonStrict)).collect();
        prop_assert!(levels[0].is_full());
        for i in 1..levels.len() {
            prop_assert!(brute_compose(&brute_compose(&levels[i], &levels[i]), &levels[i]).is_subset_of(&levels[i - 1]));
            prop_assert!(levels[i].contains_diagonal());
        }
    }

    #[test]
    fn inverse_is_monotone(k in kernel_strategy(10), a in 0.0f64..2.5, b in 0.0f64..2.5) {
        let l = compute_lambda_sequence(&k).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for variant in VARIANTS {
            prop_assert!(lambda_inverse(lo, &l, variant).unwrap() <= lambda_inverse(hi, &l, variant).unwrap());
        }
    }

    #[test]
    fn delta_is_symmetric_dyadic_and_antitone(k in kernel_strategy(12)) {
        let l = compute_lambda_sequence(&k).unwrap();
        let n = k.n();
        for variant in VARIANTS {
            let d = delta_matrix(&k, &l, variant);
            for i in 0..n {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    if i != j {
                        let e = -d.get(i, j).log2();
                        prop_assert_eq!(e, e.round());
                        prop_assert!(d.get(i, j) <= 1.0);
                    }
                }
            }
            let off: Vec<(f64, f64)> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| (k.get(i, j), d.get(i, j)))
                .collect();
            for &(ka, da) in &off {
                for &(kb, db) in &off {
                    if ka >= kb {
                        prop_assert!(da <= db);
                    }
                }
            }
        }
    }

    #[test]
    fn chain_metric_is_a_pseudo_metric_below_its_weights(k in kernel_strategy(14)) {
        let l = compute_lambda_sequence(&k).unwrap();
        let d = frink_chain_metric(&k, &l);
        let f = d.chain_weights();
        let n = k.n();
        prop_assert!(is_shortest_path_fixed_point(d.values()));
        prop_assert!(d.values().is_symmetric(0.0));
        for i in 0..n {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..n {
                prop_assert!(d.get(i, j) <= f.get(i, j));
            }
        }
        let delta = delta_matrix(&k, &l, InverseVariant::Script);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let ratio = d.get(i, j) / delta.get(i, j);
                    prop_assert!((0.5..=1.0).contains(&ratio), "ratio {} at ({}, {})", ratio, i, j);
                }
            }
        }
    }

    #[test]
    fn delta_ball_matches_matrix_ball(k in kernel_strategy(12), center_seed in 0usize..64, r in 0.001f64..=1.0) {
        let l = compute_lambda_sequence(&k).unwrap();
        let center = center_seed % k.n();
        for variant in VARIANTS {
            let d = delta_matrix(&k, &l, variant);
            let ball = delta_ball(&k, &l, center, r, variant).unwrap();
            let expected: Vec<usize> = (0..k.n()).filter(|&y| d.get(center, y) < r).collect();
            prop_assert_eq!(ball.members, expected);
        }
    }

    #[test]
    fn balls_are_nested(k in kernel_strategy(12), center_seed in 0usize..64, a in 0.001f64..=1.0, b in 0.001f64..=1.0) {
        let l = compute_lambda_sequence(&k).unwrap();
        let center = center_seed % k.n();
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        for variant in VARIANTS {
            let inner = delta_ball(&k, &l, center, small, variant).unwrap();
            let outer = delta_ball(&k, &l, center, large, variant).unwrap();
            prop_assert!(inner.members.iter().all(|&v| outer.contains(v)));
        }
        let d = frink_chain_metric(&k, &l);
        let inner = distance_ball(d.row(center), center, small, Metric::D).unwrap();
        let outer = distance_ball(d.row(center), center, large, Metric::D).unwrap();
        prop_assert!(inner.members.iter().all(|&v| outer.contains(v)));
    }

    #[test]
    fn eigenvalues_match_reference(s in symmetric_strategy(16)) {
        let ours = eig_symmetric(&s, DEFAULT_EIGEN_TOL).unwrap();
        let n = s.n();
        let reference = nalgebra::DMatrix::from_fn(n, n, |i, j| s.get(i, j)).symmetric_eigenvalues();
        let mut expected: Vec<f64> = reference.iter().copied().collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ours.eigenvalues().iter().zip(&expected) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
        prop_assert!(ours.reconstruct().max_abs_diff(&s) < 1e-8);
        prop_assert!(ours.orthonormality_error() < 1e-8);
    }

    #[test]
    fn diffusion_distance_is_a_decaying_metric(k in kernel_strategy(12), t in 0.01f64..5.0, dt in 0.01f64..5.0) {
        let decomp = laplacian_spectrum(&k, DEFAULT_EIGEN_TOL).unwrap();
        let early = diffusion_distance_matrix(&decomp, t).unwrap();
        let late = diffusion_distance_matrix(&decomp, t + dt).unwrap();
        let n = k.n();
        prop_assert!(early.is_symmetric(1e-12));
        for i in 0..n {
            prop_assert!(early.get(i, i).abs() < 1e-12);
            for j in 0..n {
                prop_assert!(late.get(i, j) <= early.get(i, j) + 1e-12);
                for m in 0..n {
                    prop_assert!(early.get(i, m) <= early.get(i, j) + early.get(j, m) + 1e-9);
                }
            }
        }
        let spectrum_ok = decomp.eigenvalues().iter().all(|&v| (-2.0 - 1e-10..=1e-10).contains(&v));
        prop_assert!(spectrum_ok);
        prop_assert!(graph_laplacian(&k).unwrap().is_symmetric(1e-15));
    }

    #[test]
    fn kernel_csv_round_trip(k in kernel_strategy(10)) {
        let back = AffinityMatrix::from_csv_str(&k.to_csv_string()).unwrap();
        prop_assert_eq!(back.values(), k.values());
        let back = AffinityMatrix::from_json_str(&k.to_json_string().unwrap()).unwrap();
        prop_assert_eq!(back.values(), k.values());
    }
}
