use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::config::EmbeddingResult;
use crate::embed::operator_kind;
use crate::error::{Error, Result};
use crate::kernels::{laplacian_eigenvalue_estimate, KernelMoment, OperatorKind};
use crate::matrix::Matrix;

/// `L^2(S^1)`-orthonormal Laplacian eigenfunction `index` at `theta`:
/// `1/sqrt(2 pi)`, then `cos(k theta)/sqrt(pi)`, `sin(k theta)/sqrt(pi)` for
/// `k = 1, 2, ...`.
pub fn circle_eigenfunction(index: usize, theta: f64) -> f64 {
    if index == 0 {
        return 1.0 / TAU.sqrt();
    }
    let k = index.div_ceil(2) as f64;
    if index % 2 == 1 {
        (k * theta).cos() / PI.sqrt()
    } else {
        (k * theta).sin() / PI.sqrt()
    }
}

/// Eigenvalue paired with `circle_eigenfunction(index, .)`.
pub fn circle_eigenvalue(index: usize) -> f64 {
    let k = index.div_ceil(2) as f64;
    k * k
}

/// Laplacian spectrum of the unit circle sampled at given angles.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleGroundTruth {
    pub k_max: usize,
    /// `0, 1, 1, 4, 4, ..., k_max^2, k_max^2`.
    pub eigenvalues: Vec<f64>,
    pub angles: Vec<f64>,
    /// `n x (2 k_max + 1)` eigenfunction values. Multiply the Gram matrix by
    /// `2 pi / n` to get the Monte-Carlo estimate of the `L^2` inner product.
    pub values: Matrix,
}

impl CircleGroundTruth {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Column `j` scaled to unit Euclidean norm.
    pub fn unit_column(&self, j: usize) -> Vec<f64> {
        unit(self.values.column(j))
    }

    /// `(2 pi / n) V^T V`, which tends to the identity for uniform angles.
    pub fn empirical_gram(&self) -> Matrix {
        let n = self.angles.len() as f64;
        let g = self.values.gram();
        Matrix::from_fn(g.rows(), g.cols(), |i, j| g.get(i, j) * TAU / n).expect("square")
    }
}

pub fn circle_ground_truth(k_max: usize, angles: &[f64]) -> Result<CircleGroundTruth> {
    if k_max < 1 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    let cols = 2 * k_max + 1;
    let values = Matrix::from_fn(angles.len(), cols, |i, j| circle_eigenfunction(j, angles[i]))?;
    Ok(CircleGroundTruth {
        k_max,
        eigenvalues: (0..cols).map(circle_eigenvalue).collect(),
        angles: angles.to_vec(),
        values,
    })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EigenReport {
    pub eigenvalue_estimates: Vec<f64>,
    /// `|lambda_hat - lambda| / max(lambda, 1)`.
    pub eigenvalue_errors: Vec<f64>,
    /// `|v - u|_2 / |u|_2` after alignment.
    pub l2_errors: Vec<f64>,
    /// `|v - u|_inf / |u|_inf` after alignment.
    pub linf_errors: Vec<f64>,
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn errors(est: &[f64], truth: &[f64]) -> (f64, f64) {
    let diff: Vec<f64> = est.iter().zip(truth).map(|(a, b)| a - b).collect();
    let l2 = diff.iter().map(|x| x * x).sum::<f64>().sqrt() / truth.iter().map(|x| x * x).sum::<f64>().sqrt();
    let linf = diff.iter().fold(0.0f64, |m, x| m.max(x.abs())) / truth.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (l2, linf)
}

/// Orthogonal `R` maximising `tr(R^T M)` for a 2x2 `M`, as `[[r00, r01], [r10, r11]]`.
/// Compares the best rotation with the best reflection.
fn procrustes_2x2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let (rx, ry) = (m[0][0] + m[1][1], m[1][0] - m[0][1]);
    let (fx, fy) = (m[0][0] - m[1][1], m[0][1] + m[1][0]);
    if rx.hypot(ry) >= fx.hypot(fy) {
        let a = ry.atan2(rx);
        let (s, c) = a.sin_cos();
        [[c, -s], [s, c]]
    } else {
        let a = fy.atan2(fx);
        let (s, c) = a.sin_cos();
        [[c, s], [s, -c]]
    }
}

/// Scores estimated eigenpairs (trivial pair first) against the circle
/// truth. Eigenvalues go through the Laplacian estimate for `kind`; each
/// estimated vector is unit-normalised and compared with the truth column
/// rotated optimally inside its degenerate `{cos k, sin k}` plane (which also
/// fixes signs).
pub fn align_and_score_vectors(
    vectors: &Matrix,
    spectrum: &[f64],
    truth: &CircleGroundTruth,
    epsilon: f64,
    moment: &KernelMoment,
    kind: OperatorKind,
) -> Result<EigenReport> {
    if vectors.rows() != truth.values.rows() {
        return Err(Error::Dim(format!(
            "{} estimated rows against {} truth rows",
            vectors.rows(),
            truth.values.rows()
        )));
    }
    if spectrum.len() != vectors.cols() {
        return Err(Error::Dim(format!(
            "{} spectral values for {} vectors",
            spectrum.len(),
            vectors.cols()
        )));
    }
    let count = vectors.cols().min(truth.len());
    let mut report = EigenReport::default();
    for j in 0..count {
        let est = laplacian_eigenvalue_estimate(spectrum[j], epsilon, moment, kind);
        let lambda = truth.eigenvalues[j];
        report.eigenvalue_estimates.push(est);
        report.eigenvalue_errors.push((est - lambda).abs() / lambda.max(1.0));
    }
    let est: Vec<Vec<f64>> = (0..count).map(|j| unit(vectors.column(j))).collect();
    let mut aligned: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut j = 0;
    while j < count {
        if j == 0 || j + 1 >= count {
            let t = if j == 0 {
                truth.unit_column(0)
            } else {
                // lone member of a degenerate pair: best unit vector of the plane
                let (c, s) = (truth.unit_column(j), truth.unit_column(j + 1));
                let (a, b) = (dot(&c, &est[j]), dot(&s, &est[j]));
                unit(c.iter().zip(&s).map(|(x, y)| a * x + b * y).collect())
            };
            let sign = if dot(&t, &est[j]) < 0.0 { -1.0 } else { 1.0 };
            aligned.push(t.into_iter().map(|x| sign * x).collect());
            j += 1;
            continue;
        }
        let (c, s) = (truth.unit_column(j), truth.unit_column(j + 1));
        let m = [
            [dot(&c, &est[j]), dot(&c, &est[j + 1])],
            [dot(&s, &est[j]), dot(&s, &est[j + 1])],
        ];
        let r = procrustes_2x2(m);
        for col in 0..2 {
            aligned.push(c.iter().zip(&s).map(|(x, y)| x * r[0][col] + y * r[1][col]).collect());
        }
        j += 2;
    }
    for (e, t) in est.iter().zip(&aligned) {
        let (l2, linf) = errors(e, t);
        report.l2_errors.push(l2);
        report.linf_errors.push(linf);
    }
    Ok(report)
}

/// [`align_and_score_vectors`] on an embedding result.
pub fn align_and_score(r: &EmbeddingResult, truth: &CircleGroundTruth, moment: &KernelMoment) -> Result<EigenReport> {
    align_and_score_vectors(&r.vectors, &r.spectrum, truth, r.epsilon, moment, operator_kind(r.method))
}
