use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use roseland::affinity::{affinity_from_squared_distances, squared_distances};
use roseland::config::{Bandwidth, EmbedderConfig, LandmarkSpec, Method};
use roseland::embed::{
    diffusion_distance, dm_embed, dm_embed_capped, embed, hkc_decompose, hkc_embed, nystrom_embed,
    nystrom_embed_external, roseland_embed,
};
use roseland::error::Error;
use roseland::kernels::Kernel;
use roseland::matrix::Matrix;
use roseland::rng::Rng;

fn cloud(n: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    let v: Vec<f64> = (0..n * p).map(|_| rng.uniform()).collect();
    Matrix::new(n, p, v).unwrap()
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn dense_kernel(a: &Matrix, b: &Matrix, eps: f64) -> DMatrix<f64> {
    let sq = squared_distances(a, b).unwrap();
    to_na(&affinity_from_squared_distances(sq, Kernel::Gaussian, eps).unwrap())
}

/// Eigenvalues of the row-stochastic `D^{-1} K` for symmetric `K`, descending.
fn stochastic_spectrum(k: &DMatrix<f64>) -> Vec<f64> {
    let d: Vec<f64> = k.row_iter().map(|r| r.sum()).collect();
    let s = DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] / (d[i] * d[j]).sqrt());
    let mut v: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn cfg(eps: f64, q: usize) -> EmbedderConfig {
    EmbedderConfig::default().with_epsilon(eps).with_embed_dim(q)
}

#[test]
fn roseland_spectrum_matches_dense_two_step_operator() {
    let data = cloud(150, 3, 1);
    let lm = cloud(25, 3, 2);
    let eps = 0.3;
    let r = roseland_embed(&data, &lm, &cfg(eps, 6)).unwrap();
    let w = dense_kernel(&data, &lm, eps);
    let oracle = stochastic_spectrum(&(&w * w.transpose()));
    for (a, b) in r.spectrum.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
    // eigenvector residual of D^{-1} W W^T
    let wwt = &w * w.transpose();
    for j in 0..7 {
        let v = DMatrix::from_column_slice(150, 1, &r.vectors.column(j));
        let lhs = &wwt * &v;
        let mut res = 0.0f64;
        for i in 0..150 {
            let di = wwt.row(i).sum();
            res = res.max((lhs[i] / di - r.spectrum[j] * v[i]).abs());
        }
        assert!(res <= 1e-8 * v.amax(), "vector {j}: {res}");
    }
}

#[test]
fn nystrom_with_all_points_is_the_diffusion_map() {
    let data = cloud(120, 2, 3);
    let c = cfg(0.2, 5);
    let idx: Vec<usize> = (0..120).collect();
    let ny = nystrom_embed(&data, &idx, &c).unwrap();
    let dm = dm_embed(&data, &c).unwrap();
    let oracle = stochastic_spectrum(&dense_kernel(&data, &data, 0.2));
    for j in 0..6 {
        assert!((ny.spectrum[j] - dm.spectrum[j]).abs() <= 1e-8);
        assert!((dm.spectrum[j] - oracle[j]).abs() <= 1e-8);
        for i in 0..120 {
            assert!((ny.vectors.get(i, j) - dm.vectors.get(i, j)).abs() <= 1e-8);
        }
    }
}

#[test]
fn nystrom_reproduces_landmark_rows_at_coincident_points() {
    let lm = cloud(20, 2, 4);
    let extra = cloud(30, 2, 5);
    let data = lm.vstack(&extra).unwrap();
    let c = cfg(0.4, 4);
    let ext = nystrom_embed_external(&data, &lm, &c).unwrap();
    let idx: Vec<usize> = (0..20).collect();
    let sub = nystrom_embed(&data, &idx, &c).unwrap();
    for i in 0..50 {
        for j in 0..5 {
            assert!((ext.vectors.get(i, j) - sub.vectors.get(i, j)).abs() <= 1e-10);
        }
    }
}

#[test]
fn hkc_lifts_are_eigenvectors_of_a_at() {
    let data = cloud(100, 3, 6);
    let lm = cloud(20, 3, 7);
    let c = cfg(0.3, 5);
    let parts = hkc_decompose(&data, &lm, &c, 6).unwrap();
    let a = to_na(&parts.a);
    let aat = &a * a.transpose();
    for j in 0..6 {
        let psi = DMatrix::from_column_slice(100, 1, &parts.psi.column(j));
        let phi = DMatrix::from_column_slice(20, 1, &parts.phi.column(j));
        let res = (&aat * &psi - &psi * parts.lambda[j]).amax();
        assert!(res <= 1e-8, "residual {res}");
        assert!((psi.norm() - phi.norm()).abs() <= 1e-8);
    }
    let r = hkc_embed(&data, &lm, &c).unwrap();
    assert_eq!(r.spectrum, parts.lambda);
}

#[test]
fn roseland_is_permutation_equivariant() {
    let data = cloud(90, 2, 8);
    let lm = cloud(15, 2, 9);
    let perm: Vec<usize> = (0..90).map(|i| (i * 37 + 11) % 90).collect();
    let c = cfg(0.25, 4);
    let a = roseland_embed(&data, &lm, &c).unwrap();
    let b = roseland_embed(&data.select_rows(&perm), &lm, &c).unwrap();
    for (j, (x, y)) in a.spectrum.iter().zip(&b.spectrum).enumerate() {
        assert!((x - y).abs() <= 1e-12, "value {j}");
    }
    for (new, &old) in perm.iter().enumerate() {
        for j in 0..5 {
            assert!((a.vectors.get(old, j) - b.vectors.get(new, j)).abs() <= 1e-9);
        }
    }
    // landmark order does not matter either
    let lperm: Vec<usize> = (0..15).rev().collect();
    let c2 = roseland_embed(&data, &lm.select_rows(&lperm), &c).unwrap();
    assert!(c2.vectors.max_abs_diff(&a.vectors) <= 1e-9);
}

#[test]
fn embeddings_are_deterministic() {
    let data = cloud(200, 4, 10);
    let lm = cloud(20, 4, 11);
    let c = EmbedderConfig::default().with_embed_dim(3);
    for method in Method::ALL {
        let a = embed(method, &data, &lm, None, &c).unwrap();
        let b = embed(method, &data, &lm, None, &c).unwrap();
        assert_eq!(a.coords, b.coords, "{}", method.name());
        assert_eq!(a.spectrum, b.spectrum);
    }
}

#[test]
fn error_cases() {
    let data = cloud(30, 2, 12);
    let lm = cloud(5, 2, 13);
    assert!(matches!(
        roseland_embed(&data, &lm, &cfg(0.3, 5)),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        dm_embed_capped(&data, &cfg(0.3, 2), 29),
        Err(Error::Capacity(_))
    ));
    assert!(matches!(
        nystrom_embed(&data, &[1, 1, 2, 3], &cfg(0.3, 2)),
        Err(Error::Index(_))
    ));
    assert!(matches!(
        nystrom_embed(&data, &[1, 40, 2, 3], &cfg(0.3, 2)),
        Err(Error::Index(_))
    ));
    let bad = EmbedderConfig {
        bandwidth: Bandwidth::Fixed(-1.0),
        ..Default::default()
    };
    assert!(matches!(roseland_embed(&data, &lm, &bad), Err(Error::Config(_))));
    let wrong_dim = cloud(5, 3, 14);
    assert!(roseland_embed(&data, &wrong_dim, &cfg(0.3, 2)).is_err());
    // tiny bandwidth leaves points without landmark affinity
    let far = Matrix::from_rows(&[[100.0, 100.0], [101.0, 100.0], [100.0, 101.0]]).unwrap();
    assert!(hkc_embed(&data, &far, &cfg(1e-3, 1)).is_err());
}

#[test]
fn diffusion_distance_properties() {
    let data = cloud(60, 2, 15);
    let lm = cloud(12, 2, 16);
    let c = cfg(0.3, 4).with_diffusion_time(2.0);
    let r = roseland_embed(&data, &lm, &c).unwrap();
    for i in 0..10 {
        assert_eq!(diffusion_distance(&r, i, i, 2.0).unwrap(), 0.0);
        for j in 0..10 {
            let d = diffusion_distance(&r, i, j, 2.0).unwrap();
            assert_eq!(d, diffusion_distance(&r, j, i, 2.0).unwrap());
            let recomputed = diffusion_distance(&r, i, j, 2.0f64.next_up()).unwrap();
            assert!((d - recomputed).abs() <= 1e-12);
        }
    }
    let r1 = roseland_embed(&data, &lm, &c.clone().with_diffusion_time(1.0)).unwrap();
    let from_other_t = diffusion_distance(&r, 3, 7, 1.0).unwrap();
    assert!((from_other_t - diffusion_distance(&r1, 3, 7, 1.0).unwrap()).abs() <= 1e-10);
    assert!(matches!(diffusion_distance(&r, 0, 60, 1.0), Err(Error::Index(_))));
}

#[test]
fn landmark_count_spec_does_not_affect_explicit_landmarks() {
    let data = cloud(80, 2, 17);
    let lm = cloud(10, 2, 18);
    let a = roseland_embed(&data, &lm, &cfg(0.3, 3)).unwrap();
    let b = roseland_embed(&data, &lm, &cfg(0.3, 3).with_landmarks(LandmarkSpec::Count(3))).unwrap();
    assert_eq!(a.coords, b.coords);
    assert_eq!(a.landmarks, 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roseland_trivial_pair(seed in 0u64..1000, n in 20usize..120, m in 4usize..20, eps in 0.05f64..2.0) {
        let data = cloud(n, 3, seed);
        let lm = cloud(m, 3, seed + 7919);
        let r = roseland_embed(&data, &lm, &cfg(eps, 2)).unwrap();
        let v0 = r.vectors.column(0);
        let mean = v0.iter().sum::<f64>() / n as f64;
        prop_assert!(v0.iter().all(|x| ((x - mean) / mean).abs() <= 1e-6));
        prop_assert!(r.spectrum.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        prop_assert!(r.spectrum.iter().all(|s| *s >= -1e-12 && *s <= 1.0 + 1e-10));
    }
}

fn col_sign_aligned_diff(a: &Matrix, rows_a: &[usize], b: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..a.cols() {
        let dot: f64 = rows_a.iter().enumerate().map(|(new, &old)| a.get(old, j) * b.get(new, j)).sum();
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        for (new, &old) in rows_a.iter().enumerate() {
            worst = worst.max((a.get(old, j) - s * b.get(new, j)).abs());
        }
    }
    worst
}

#[test]
fn every_method_is_permutation_equivariant() {
    let data = cloud(70, 2, 21);
    let lm = cloud(12, 2, 22);
    let perm: Vec<usize> = (0..70).map(|i| (i * 29 + 5) % 70).collect();
    let c = cfg(0.3, 3);
    for method in Method::ALL {
        let a = embed(method, &data, &lm, None, &c).unwrap();
        let b = embed(method, &data.select_rows(&perm), &lm, None, &c).unwrap();
        for (x, y) in a.spectrum.iter().zip(&b.spectrum) {
            assert!((x - y).abs() <= 1e-10, "{}", method.name());
        }
        let d = col_sign_aligned_diff(&a.coords, &perm, &b.coords);
        assert!(d <= 1e-8, "{}: {d}", method.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn embedding_weights_are_non_increasing(
        seed in 0u64..1000,
        n in 30usize..90,
        m in 8usize..16,
        eps in 0.1f64..1.0,
        t in 0.5f64..4.0,
    ) {
        let data = cloud(n, 2, seed);
        let lm = cloud(m, 2, seed + 1);
        let c = cfg(eps, 4).with_diffusion_time(t);
        for method in Method::ALL {
            let r = embed(method, &data, &lm, None, &c).unwrap();
            let weights: Vec<f64> = (0..r.coords.cols())
                .map(|j| {
                    let (num, den) = (0..n).fold((0.0, 0.0), |(a, b), i| {
                        let v = r.vectors.get(i, j + 1);
                        (a + r.coords.get(i, j) * v, b + v * v)
                    });
                    num / den
                })
                .collect();
            for w in weights.windows(2) {
                prop_assert!(w[0].abs() >= w[1].abs() * (1.0 - 1e-9), "{}: {:?}", method.name(), weights);
            }
            for (j, w) in weights.iter().enumerate() {
                let s = r.spectrum[j + 1];
                prop_assert!((w - s.signum() * s.abs().powf(t)).abs() <= 1e-9 * (1.0 + w.abs()));
            }
        }
    }

    #[test]
    fn diffusion_distance_is_a_metric(seed in 0u64..1000, i in 0usize..40, j in 0usize..40, k in 0usize..40) {
        let data = cloud(40, 3, seed);
        let lm = cloud(10, 3, seed + 3);
        let r = roseland_embed(&data, &lm, &cfg(0.4, 5)).unwrap();
        let d = |a, b| diffusion_distance(&r, a, b, 1.0).unwrap();
        prop_assert!(d(i, j) >= 0.0);
        prop_assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
    }
}
