use isospec::baselines::{
    bottleneck_distance, distance_matrix, h0_persistence, isospectrality_from_spectra, knn_graph, laplacian_spectrum,
    LaplacianSpectrum, NeighborGraph, PersistenceDiagram,
};
use isospec::synth::{gaussian_space, rng};
use isospec_oracles::{brute_bottleneck, jacobi_eigenvalues, laplacian, mst_weights};
use proptest::prelude::*;
use rand::Rng;

fn random_diagram(r: &mut impl Rng, max: usize) -> Vec<(f64, f64)> {
    let k = r.random_range(0..=max);
    (0..k)
        .map(|_| {
            // coarse grid values produce ties
            let b = if r.random_bool(0.5) { 0.0 } else { r.random_range(0..8) as f64 * 0.25 };
            let life = if r.random_bool(0.5) {
                r.random_range(0..8) as f64 * 0.25
            } else {
                r.random_range(0.0..3.0)
            };
            (b, b + life)
        })
        .collect()
}

#[test]
fn bottleneck_matches_brute_force() {
    let mut r = rng(42);
    for _ in 0..200 {
        let a = random_diagram(&mut r, 6);
        let b = random_diagram(&mut r, 6);
        let fast = bottleneck_distance(
            &PersistenceDiagram::new(a.clone()).unwrap(),
            &PersistenceDiagram::new(b.clone()).unwrap(),
        );
        assert_eq!(fast, brute_bottleneck(&a, &b), "{a:?} vs {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bottleneck_is_a_metric_on_small_diagrams(seed in 0u64..100_000) {
        let mut r = rng(seed);
        let a = PersistenceDiagram::new(random_diagram(&mut r, 5)).unwrap();
        let b = PersistenceDiagram::new(random_diagram(&mut r, 5)).unwrap();
        let c = PersistenceDiagram::new(random_diagram(&mut r, 5)).unwrap();
        prop_assert_eq!(bottleneck_distance(&a, &a), 0.0);
        prop_assert_eq!(bottleneck_distance(&a, &b), bottleneck_distance(&b, &a));
        prop_assert!(bottleneck_distance(&a, &c) <= bottleneck_distance(&a, &b) + bottleneck_distance(&b, &c) + 1e-12);
    }

    #[test]
    fn h0_deaths_match_kruskal(seed in 0u64..100_000, n in 2usize..40) {
        let s = gaussian_space("p", n, 4, seed);
        let diag = h0_persistence(&distance_matrix(&s, n).unwrap());
        let rows: Vec<Vec<f64>> = (0..n).map(|i| s.row(i).to_vec()).collect();
        let want = mst_weights(&rows);
        prop_assert_eq!(diag.len(), n - 1);
        for (&(b, d), w) in diag.points().iter().zip(&want) {
            prop_assert_eq!(b, 0.0);
            prop_assert!((d - w).abs() <= 1e-12);
        }
    }
}

#[test]
fn laplacian_matches_jacobi() {
    for seed in 0..6u64 {
        let s = gaussian_space("g", 60, 5, seed).length_normalize().unwrap();
        let g = knn_graph(&s, 60, 4).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let want = jacobi_eigenvalues(laplacian(60, &edges));
        let got = laplacian_spectrum(&g).unwrap();
        for (a, b) in got.eigenvalues().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn zero_eigenvalues_count_components() {
    // a triangle, a path of four and two isolated nodes
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6)];
    let g = NeighborGraph::from_edges(9, &edges).unwrap();
    let spec = laplacian_spectrum(&g).unwrap();
    let zeros = spec.eigenvalues().iter().filter(|&&v| v < 1e-9).count();
    assert_eq!(zeros, 4);
    assert_eq!(g.component_count(), 4);
}

#[test]
fn hand_traced_isospectrality() {
    let a = LaplacianSpectrum::new(vec![3.0, 1.0, 0.0]).unwrap();
    let b = LaplacianSpectrum::new(vec![3.0, 3.0, 0.0]).unwrap();
    assert_eq!(isospectrality_from_spectra(&a, &b, 0.9).unwrap(), 4.0);
}

#[test]
fn knn_graph_is_symmetric_with_min_degree_k() {
    let s = gaussian_space("g", 120, 8, 3).length_normalize().unwrap();
    let g = knn_graph(&s, 120, 6).unwrap();
    for i in 0..120 {
        assert!(g.degree(i) >= 6);
        for &j in g.neighbors(i) {
            assert!(g.has_edge(j, i));
            assert_ne!(i, j);
        }
    }
}
