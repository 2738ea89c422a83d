//! Landmark-set affinities, degrees and the normalised landmark operator.
//!
//! Nothing here ever forms an `n x n` object: the implied two-step affinity
//! `W^(R) = W^(r) W^(r)^T` is only ever touched through its factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::matrix::{dot, Matrix};

const ROW_CHUNK: usize = 64;

/// `n x m` kernel matrix between data points and landmarks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LandmarkAffinity {
    pub w: Matrix,
    pub epsilon: f64,
}

impl LandmarkAffinity {
    pub fn n(&self) -> usize {
        self.w.rows()
    }

    pub fn m(&self) -> usize {
        self.w.cols()
    }
}

/// Diagonal of the landmark degree matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub values: Vec<f64>,
}

impl DegreeVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Squared Euclidean distances between every row of `a` and every row of
/// `b`, via `|x|^2 + |y|^2 - 2<x, y>` with negatives clamped to zero.
pub fn squared_distances(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::Dim(format!(
            "data has {} columns, landmarks have {}",
            a.cols(),
            b.cols()
        )));
    }
    let (n, m) = (a.rows(), b.rows());
    let nb: Vec<f64> = b.row_iter().map(|y| dot(y, y)).collect();
    let mut out = vec![0.0; n * m];
    out.par_chunks_mut(ROW_CHUNK * m.max(1))
        .enumerate()
        .for_each(|(c, block)| {
            for (r, dst) in block.chunks_mut(m).enumerate() {
                let x = a.row(c * ROW_CHUNK + r);
                let nx = dot(x, x);
                for (k, v) in dst.iter_mut().enumerate() {
                    *v = (nx + nb[k] - 2.0 * dot(x, b.row(k))).max(0.0);
                }
            }
        });
    Ok(Matrix::from_raw(n, m, out))
}

/// Applies the kernel entrywise to a matrix of squared distances.
pub fn affinity_from_squared_distances(mut sq: Matrix, kernel: Kernel, epsilon: f64) -> Result<Matrix> {
    check_epsilon(epsilon)?;
    sq.as_mut_slice()
        .par_iter_mut()
        .for_each(|v| *v = kernel.eval(*v, epsilon));
    Ok(sq)
}

pub fn build_landmark_affinity(
    data: &Matrix,
    landmarks: &Matrix,
    kernel: Kernel,
    epsilon: f64,
) -> Result<LandmarkAffinity> {
    check_epsilon(epsilon)?;
    let sq = squared_distances(data, landmarks)?;
    Ok(LandmarkAffinity {
        w: affinity_from_squared_distances(sq, kernel, epsilon)?,
        epsilon,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Exact median of all entries (lower median for even counts is averaged
/// with the upper one).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if v.len() % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Largest number of entries the bandwidth median is taken over exactly;
/// bigger distance matrices are read with a fixed stride.
pub const MEDIAN_SAMPLE_CAP: usize = 32_000_000;

/// Median of the entries of a squared-distance matrix. With
/// `exclude_diagonal` the zero self-distances of a square data-to-data
/// matrix are skipped.
pub fn median_squared_distance(sq: &Matrix, exclude_diagonal: bool) -> f64 {
    let (n, m) = sq.shape();
    let total = n * m;
    let stride = total.div_ceil(MEDIAN_SAMPLE_CAP).max(1);
    let values: Vec<f64> = sq
        .as_slice()
        .iter()
        .enumerate()
        .step_by(stride)
        .filter(|(idx, _)| !(exclude_diagonal && idx / m == idx % m))
        .map(|(_, v)| *v)
        .collect();
    if values.is_empty() {
        return 0.0;
    }
    median(&values)
}

/// `d = W^(r) (W^(r)^T 1)`, computed in `O(nm)`.
pub fn landmark_degrees(aff: &LandmarkAffinity) -> DegreeVector {
    let colsum = aff.w.col_sums();
    DegreeVector {
        values: aff.w.matvec(&colsum),
    }
}

/// Row `i` of the result is `W^(r)_{i,:} / sqrt(d_i)`.
pub fn normalized_landmark_operator(aff: &LandmarkAffinity, deg: &DegreeVector) -> Matrix {
    let inv: Vec<f64> = deg.values.iter().map(|d| 1.0 / d.sqrt()).collect();
    aff.w.scale_rows(&inv)
}

/// Factored form of one row of the landmark transition matrix
/// `A^(R) = D^-1 W^(r) W^(r)^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRow {
    /// `W^(r)_{i,:} / d_i`
    pub weights: Vec<f64>,
    /// Column sums of `W^(r)`.
    pub col_sums: Vec<f64>,
}

impl TransitionRow {
    /// Materialises the length-`n` row `weights . W^(r)^T`.
    pub fn implied_row(&self, aff: &LandmarkAffinity) -> Vec<f64> {
        aff.w.matvec(&self.weights)
    }

    /// Sum of the implied row, `weights . col_sums`, without materialising it.
    pub fn implied_row_sum(&self) -> f64 {
        dot(&self.weights, &self.col_sums)
    }
}

pub fn landmark_transition_row(
    aff: &LandmarkAffinity,
    deg: &DegreeVector,
    i: usize,
) -> Result<TransitionRow> {
    if i >= aff.n() || deg.len() != aff.n() {
        return Err(Error::Index(format!("row {i} of a {}-point affinity", aff.n())));
    }
    let di = deg.values[i];
    Ok(TransitionRow {
        weights: aff.w.row(i).iter().map(|w| w / di).collect(),
        col_sums: aff.w.col_sums(),
    })
}

/// Effective landmark kernel on the unit circle: for each query angle `x`,
/// `y -> (1/m) sum_k K_eps(x, y_k) K_eps(y_k, y)` on a uniform grid of
/// `grid` angles `2 pi j / grid`. Distances are chordal in the plane.
pub fn landmark_kernel_profile(
    landmark_angles: &[f64],
    query_angles: &[f64],
    grid: usize,
    epsilon: f64,
    kernel: Kernel,
) -> Result<Matrix> {
    check_epsilon(epsilon)?;
    if landmark_angles.is_empty() || grid == 0 {
        return Err(Error::Config("need at least one landmark and one grid point".into()));
    }
    let chord = |a: f64, b: f64| 2.0 - 2.0 * (a - b).cos();
    let m = landmark_angles.len() as f64;
    let grid_angles = profile_grid(grid);
    let mut data = Vec::with_capacity(query_angles.len() * grid);
    for &x in query_angles {
        let to_landmark: Vec<f64> = landmark_angles
            .iter()
            .map(|&y| kernel.eval(chord(x, y), epsilon))
            .collect();
        for &g in &grid_angles {
            let s: f64 = landmark_angles
                .iter()
                .zip(&to_landmark)
                .map(|(&y, &k1)| k1 * kernel.eval(chord(y, g), epsilon))
                .sum();
            data.push(s / m);
        }
    }
    Matrix::new(query_angles.len(), grid, data)
}

/// Angles of the grid used by [`landmark_kernel_profile`].
pub fn profile_grid(grid: usize) -> Vec<f64> {
    (0..grid)
        .map(|j| std::f64::consts::TAU * j as f64 / grid as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn single_point_is_one() {
        let x = Matrix::new(1, 3, vec![0.3, -1.2, 4.0]).unwrap();
        let aff = build_landmark_affinity(&x, &x, Kernel::Gaussian, 0.7).unwrap();
        assert_eq!(aff.w.as_slice(), &[1.0]);
        assert_eq!(landmark_degrees(&aff).values, vec![1.0]);
        assert_eq!(normalized_landmark_operator(&aff, &landmark_degrees(&aff)).as_slice(), &[1.0]);
    }

    #[test]
    fn two_points_at_epsilon() {
        let eps = 0.25;
        let y = Matrix::new(1, 2, vec![0.0, 0.0]).unwrap();
        let x = Matrix::new(2, 2, vec![0.5, 0.0, 0.0, -0.5]).unwrap();
        let aff = build_landmark_affinity(&x, &y, Kernel::Gaussian, eps).unwrap();
        for v in aff.w.as_slice() {
            assert_relative_eq!(*v, (-1.0f64).exp(), epsilon = 1e-15);
        }
    }

    #[test]
    fn affinity_matches_pairwise_recomputation() {
        let mut rng = Rng::new(3);
        let x = random_matrix(50, 3, &mut rng);
        let y = random_matrix(5, 3, &mut rng);
        let aff = build_landmark_affinity(&x, &y, Kernel::Gaussian, 0.4).unwrap();
        for i in 0..50 {
            for k in 0..5 {
                let d: f64 = x.row(i).iter().zip(y.row(k)).map(|(a, b)| (a - b) * (a - b)).sum();
                assert_relative_eq!(aff.w.get(i, k), (-d / 0.4).exp(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn column_mismatch_is_dim_error() {
        let x = Matrix::zeros(3, 2);
        let y = Matrix::zeros(2, 3);
        assert!(matches!(
            build_landmark_affinity(&x, &y, Kernel::Gaussian, 1.0),
            Err(Error::Dim(_))
        ));
    }

    #[test]
    fn degrees_by_hand() {
        let (a, b) = (0.3, 0.8);
        let aff = LandmarkAffinity {
            w: Matrix::new(2, 1, vec![a, b]).unwrap(),
            epsilon: 1.0,
        };
        let d = landmark_degrees(&aff);
        assert_relative_eq!(d.values[0], a * (a + b), epsilon = 1e-15);
        assert_relative_eq!(d.values[1], b * (a + b), epsilon = 1e-15);
        let op = normalized_landmark_operator(&aff, &d);
        assert_relative_eq!(op.get(0, 0), a / (a * (a + b)).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(op.get(1, 0), b / (b * (a + b)).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn degrees_match_dense_two_step_affinity() {
        let mut rng = Rng::new(11);
        let x = random_matrix(50, 4, &mut rng);
        let y = random_matrix(5, 4, &mut rng);
        let aff = build_landmark_affinity(&x, &y, Kernel::Gaussian, 0.9).unwrap();
        let dense = aff.w.matmul(&aff.w.transpose()).unwrap();
        let d = landmark_degrees(&aff);
        for (di, ri) in d.values.iter().zip(dense.row_sums()) {
            assert_relative_eq!(*di, ri, max_relative = 1e-13);
        }
    }

    #[test]
    fn transition_row_matches_dense_oracle() {
        let mut rng = Rng::new(12);
        let x = random_matrix(60, 3, &mut rng);
        let y = random_matrix(5, 3, &mut rng);
        let aff = build_landmark_affinity(&x, &y, Kernel::Gaussian, 0.5).unwrap();
        let deg = landmark_degrees(&aff);
        let dense = aff.w.matmul(&aff.w.transpose()).unwrap();
        for i in [0, 17, 59] {
            let row = landmark_transition_row(&aff, &deg, i).unwrap();
            let implied = row.implied_row(&aff);
            assert!((implied.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((row.implied_row_sum() - 1.0).abs() < 1e-12);
            for (j, v) in implied.iter().enumerate() {
                assert_relative_eq!(*v, dense.get(i, j) / deg.values[i], max_relative = 1e-12);
            }
        }
        assert!(matches!(
            landmark_transition_row(&aff, &deg, 60),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn median_squared_distance_skips_diagonal() {
        let x = Matrix::new(3, 1, vec![0.0, 1.0, 3.0]).unwrap();
        let sq = squared_distances(&x, &x).unwrap();
        // off-diagonal entries 1, 9, 4 (twice each)
        assert_eq!(median_squared_distance(&sq, true), 4.0);
        assert_eq!(median_squared_distance(&sq, false), 1.0);
    }

    #[test]
    fn median_of_small_sets() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn kernel_profile_single_landmark() {
        let x = 1.0;
        let eps = 0.1;
        let prof = landmark_kernel_profile(&[x], &[x], 64, eps, Kernel::Gaussian).unwrap();
        let grid = profile_grid(64);
        for (j, g) in grid.iter().enumerate() {
            let expected = (-(2.0 - 2.0 * (x - g).cos()) / eps).exp();
            assert_relative_eq!(prof.get(0, j), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_profile_matches_double_loop() {
        let landmarks: Vec<f64> = (0..20).map(|k| k as f64 * 0.31).collect();
        let queries = [0.05, 2.0, 5.5];
        let eps = 0.05;
        let prof = landmark_kernel_profile(&landmarks, &queries, 50, eps, Kernel::Gaussian).unwrap();
        let grid = profile_grid(50);
        for (q, &x) in queries.iter().enumerate() {
            for (j, &g) in grid.iter().enumerate() {
                let mut s = 0.0;
                for &y in &landmarks {
                    let a = (x - y).cos();
                    let b = (y - g).cos();
                    s += (-(2.0 - 2.0 * a) / eps).exp() * (-(2.0 - 2.0 * b) / eps).exp();
                }
                assert_relative_eq!(prof.get(q, j), s / 20.0, max_relative = 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn markov_rows_and_permutation(seed in 0u64..1000, n in 2usize..40, m in 1usize..8, eps in 0.05f64..5.0) {
            let mut rng = Rng::new(seed);
            let x = random_matrix(n, 3, &mut rng);
            let y = random_matrix(m, 3, &mut rng);
            let aff = build_landmark_affinity(&x, &y, Kernel::Gaussian, eps).unwrap();
            let deg = landmark_degrees(&aff);
            prop_assert!(deg.values.iter().all(|d| *d > 0.0));
            for i in 0..n {
                let row = landmark_transition_row(&aff, &deg, i).unwrap();
                prop_assert!((row.implied_row(&aff).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            let perm: Vec<usize> = (0..n).rev().collect();
            let xp = x.select_rows(&perm);
            let affp = build_landmark_affinity(&xp, &y, Kernel::Gaussian, eps).unwrap();
            let degp = landmark_degrees(&affp);
            let op = normalized_landmark_operator(&aff, &deg);
            let opp = normalized_landmark_operator(&affp, &degp);
            for (a, &b) in perm.iter().enumerate() {
                prop_assert!((degp.values[a] - deg.values[b]).abs() <= 1e-12 * deg.values[b]);
                for k in 0..m {
                    prop_assert!((opp.get(a, k) - op.get(b, k)).abs() <= 1e-12);
                }
            }
        }
    }
}
