//! PCA, LLE and Laplacian eigenmaps against plain-loop oracles and
//! configurations with known answers.

#![allow(clippy::needless_range_loop)]

use manifold_core::baselines::{
    embed_lem, embed_lle, embed_pca, fit_pca, lem_graph, lem_spectrum, lle_alignment_matrix, lle_weights,
    BaselineConfig,
};
use manifold_core::numerics::seeded_rng;
use manifold_core::{DataMatrix, Error, Matrix, Method, Reducer};
use proptest::prelude::*;

mod common;
use common::{dot, jacobi_sorted, random_data};

fn column_variance(m: &Matrix, j: usize) -> f64 {
    let col = m.column(j);
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn covariance_oracle(x: &DataMatrix) -> Matrix {
    let (n, dim) = (x.n(), x.dim());
    let mean: Vec<f64> = (0..dim)
        .map(|c| (0..n).map(|i| x.row(i)[c]).sum::<f64>() / n as f64)
        .collect();
    let mut cov = Matrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let s: f64 = (0..n).map(|i| (x.row(i)[a] - mean[a]) * (x.row(i)[b] - mean[b])).sum();
            cov[(a, b)] = s / (n - 1) as f64;
        }
    }
    cov
}

#[test]
fn pca_projection_variance_matches_covariance_oracle() {
    let x = random_data(20, 6, 31);
    let fit = fit_pca(&x, 3).unwrap();
    let coords = fit.transform(&x).unwrap();
    let oracle = jacobi_sorted(&covariance_oracle(&x));
    for j in 0..3 {
        let var = column_variance(&coords, j);
        assert!(
            (var - oracle[j].0).abs() < 1e-8,
            "component {j}: {var} vs {}",
            oracle[j].0
        );
        assert!((fit.variances[j] - oracle[j].0).abs() < 1e-8);
        let dir = fit.components.column(j);
        assert!((dot(&dir, &oracle[j].1).abs() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn pca_recovers_exact_plane() {
    // 30 points on a 2-D affine subspace of R^5.
    let mut rng = seeded_rng(5);
    let u = [1.0, 2.0, 0.0, -1.0, 0.5];
    let v = [0.0, 1.0, 1.0, 1.0, -2.0];
    let origin = [3.0, -1.0, 2.0, 0.0, 1.0];
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|_| {
            let (a, b) = (rng.normal(), rng.normal());
            (0..5).map(|c| origin[c] + a * u[c] + b * v[c]).collect()
        })
        .collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    let fit = fit_pca(&x, 2).unwrap();
    let back = fit.reconstruct(&fit.transform(&x).unwrap());
    let err = (0..30)
        .flat_map(|i| (0..5).map(move |c| (i, c)))
        .map(|(i, c)| (back[(i, c)] - rows[i][c]).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "reconstruction error {err}");
}

#[test]
fn pca_full_dimension_preserves_total_variance() {
    let x = random_data(25, 4, 8);
    let emb = embed_pca(&x, 4).unwrap();
    let total: f64 = (0..4).map(|c| column_variance(x.as_matrix(), c)).sum();
    let kept: f64 = (0..4).map(|j| column_variance(&emb.coords, j)).sum();
    assert!((total - kept).abs() < 1e-9 * total);
}

#[test]
fn lle_orders_points_on_a_line() {
    // Irregularly spaced points on a line in R^3.
    let ts = [0.0, 0.7, 1.1, 2.0, 2.4, 3.3, 4.1, 4.5, 5.6, 6.0, 7.2, 7.5];
    let dir = [1.0, -2.0, 0.5];
    let rows: Vec<Vec<f64>> = ts.iter().map(|&t| dir.iter().map(|d| 1.0 + t * d).collect()).collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    let emb = embed_lle(&x, &BaselineConfig::new(1).with_knn(2)).unwrap();
    let y = emb.coords.column(0);
    let increasing = y.windows(2).all(|w| w[1] > w[0]);
    let decreasing = y.windows(2).all(|w| w[1] < w[0]);
    assert!(increasing || decreasing, "{y:?}");
}

#[test]
fn lle_drops_constant_eigenvector() {
    // The alignment matrix annihilates the constant vector.
    let x = random_data(30, 3, 12);
    let cfg = BaselineConfig::new(2).with_knn(6);
    let m = lle_alignment_matrix(&lle_weights(&x, &cfg).unwrap());
    let m1 = m.mul_vec(&[1.0; 30]);
    assert!(m1.iter().all(|v| v.abs() < 1e-10));
    // Retained coordinates are orthogonal to it.
    let emb = embed_lle(&x, &cfg).unwrap();
    for j in 0..2 {
        let s: f64 = emb.coords.column(j).iter().sum();
        assert!(s.abs() < 1e-8, "column {j} sums to {s}");
    }
    assert!(emb.eigenvalues.iter().all(|&l| l >= -1e-10));
}

#[test]
fn lle_needs_more_neighbors_than_dimensions() {
    let x = random_data(20, 3, 1);
    assert!(matches!(
        embed_lle(&x, &BaselineConfig::new(4).with_knn(4)),
        Err(Error::InvalidParameter { name: "k_nn", .. })
    ));
}

#[test]
fn lem_bottom_pair_is_zero_and_constant() {
    let x = random_data(40, 3, 2);
    let cfg = BaselineConfig::new(3).with_knn(8);
    let dec = lem_spectrum(&x, &cfg, 4).unwrap();
    assert!(dec.eigenvalues[0].abs() < 1e-8);
    let v0 = dec.vector(0);
    assert!(v0.iter().all(|v| (v - v0[0]).abs() < 1e-8));
    assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    assert!(dec.eigenvalues.iter().all(|&l| l >= -1e-10));

    // Generalized eigenpairs of L v = λ D v with vᵀ D v = 1.
    let (w, _) = lem_graph(&x, &cfg).unwrap();
    let deg: Vec<f64> = (0..40).map(|i| w.row(i).iter().sum()).collect();
    for j in 0..4 {
        let v = dec.vector(j);
        let norm: f64 = v.iter().zip(&deg).map(|(a, g)| a * a * g).sum();
        assert!((norm - 1.0).abs() < 1e-9);
        let wv = w.mul_vec(&v);
        for i in 0..40 {
            let lv = deg[i] * v[i] - wv[i];
            assert!((lv - dec.eigenvalues[j] * deg[i] * v[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn lem_separates_two_clusters_by_sign() {
    let mut rng = seeded_rng(3);
    let rows: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let cx = if i < 4 { -5.0 } else { 5.0 };
            vec![cx + 0.3 * rng.normal(), 0.3 * rng.normal()]
        })
        .collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    // Four neighbors reach across the gap, so the graph is connected.
    let emb = embed_lem(&x, &BaselineConfig::new(1).with_knn(4)).unwrap();
    let y = emb.coords.column(0);
    let left = y[0].signum();
    assert!(y[..4].iter().all(|v| v.signum() == left), "{y:?}");
    assert!(y[4..].iter().all(|v| v.signum() == -left), "{y:?}");
}

#[test]
fn lem_rejects_disconnected_graph() {
    let rows: Vec<Vec<f64>> = (0..10)
        .map(|i| vec![if i < 5 { 0.0 } else { 100.0 } + i as f64 * 0.01, 0.0])
        .collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    assert!(matches!(
        embed_lem(&x, &BaselineConfig::new(1).with_knn(2)),
        Err(Error::DisconnectedGraph { components: 2 })
    ));
}

#[test]
fn every_reducer_returns_finite_n_by_d() {
    let x = random_data(60, 8, 4);
    for method in Method::REDUCERS {
        let reducer = match method {
            Method::Pca => Reducer::Pca { d: 5 },
            Method::Lle => Reducer::Lle(BaselineConfig::new(5)),
            Method::Lem => Reducer::Lem(BaselineConfig::new(5)),
            Method::Dm => Reducer::Dm(manifold_core::diffusion::DmConfig::new(2.0, 5)),
            Method::Identity => unreachable!(),
        };
        let emb = reducer.reduce(&x).unwrap();
        assert_eq!((emb.n(), emb.dim()), (60, 5), "{method}");
        assert!(emb.coords.as_slice().iter().all(|v| v.is_finite()), "{method}");
        assert_eq!(emb.method, method);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lle_weights_sum_to_one(seed in any::<u64>(), n in 6usize..30, k in 2usize..6) {
        let x = random_data(n, 3, seed);
        let w = lle_weights(&x, &BaselineConfig::new(1).with_knn(k)).unwrap();
        for (i, row) in w.iter().enumerate() {
            prop_assert_eq!(row.len(), k);
            prop_assert!(row.iter().all(|&(j, _)| j != i));
            let s: f64 = row.iter().map(|&(_, v)| v).sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pca_is_translation_invariant(seed in any::<u64>(), shift in -100.0f64..100.0) {
        let x = random_data(15, 4, seed);
        let moved: Vec<Vec<f64>> = (0..15).map(|i| x.row(i).iter().map(|v| v + shift).collect()).collect();
        let y = DataMatrix::from_rows(&moved).unwrap();
        let a = embed_pca(&x, 2).unwrap();
        let b = embed_pca(&y, 2).unwrap();
        for i in 0..15 {
            for j in 0..2 {
                prop_assert!((a.coords[(i, j)] - b.coords[(i, j)]).abs() < 1e-9);
            }
        }
    }
}
