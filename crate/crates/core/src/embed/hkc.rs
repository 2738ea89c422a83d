use std::time::Instant;

use super::{check_data, check_embed_dim, resolve_epsilon, weighted_coords};
use crate::affinity::{affinity_from_squared_distances, squared_distances};
use crate::config::{EmbedderConfig, EmbeddingResult, Method};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{apply_sign_convention, columns_of, dense_symmetric_eigen};

const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Intermediate quantities of the HKC construction.
#[derive(Clone, Debug)]
pub struct HkcParts {
    /// Row-normalised landmark affinity `A` (`n x m`).
    pub a: Matrix,
    /// Row sums of the raw affinity.
    pub row_sums: Vec<f64>,
    /// Leading eigenvalues of `A^T A`.
    pub lambda: Vec<f64>,
    /// Matching eigenvectors of `A^T A` (`m x k`).
    pub phi: Matrix,
    /// `psi_j = lambda_j^{-1/2} A phi_j` (`n x k`).
    pub psi: Matrix,
    pub epsilon: f64,
}

/// Computes `A`, the top `k` eigenpairs of `A^T A` and their lifts `psi`.
pub fn hkc_decompose(data: &Matrix, landmarks: &Matrix, cfg: &EmbedderConfig, k: usize) -> Result<HkcParts> {
    check_data(data, "data")?;
    check_data(landmarks, "landmark set")?;
    let sq = squared_distances(data, landmarks)?;
    let epsilon = resolve_epsilon(cfg.bandwidth, &sq, false)?;
    let w = affinity_from_squared_distances(sq, cfg.kernel, epsilon)?;
    let row_sums = w.row_sums();
    if let Some(i) = row_sums.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::Value(format!(
            "point {i} has zero affinity to every landmark; increase the bandwidth"
        )));
    }
    let inv: Vec<f64> = row_sums.iter().map(|d| 1.0 / d).collect();
    let a = w.scale_rows(&inv);
    drop(w);
    let (values, vectors) = dense_symmetric_eigen(&a.gram());
    let k = k.min(values.len());
    if let Some((j, v)) = values[..k].iter().enumerate().find(|(_, v)| **v <= EIGENVALUE_FLOOR) {
        return Err(Error::Value(format!(
            "eigenvalue {j} of A^T A is {v:e}; psi would divide by its square root"
        )));
    }
    let lambda = values[..k].to_vec();
    let phi = vectors.select_columns(&(0..k).collect::<Vec<_>>());
    let inv_sqrt: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
    let mut psi_cols = columns_of(&a.matmul(&phi)?.scale_columns(&inv_sqrt));
    let mut phi_cols = columns_of(&phi);
    apply_sign_convention(&mut psi_cols, &mut [&mut phi_cols]);
    let psi = Matrix::from_columns(&psi_cols)?;
    let phi = Matrix::from_columns(&phi_cols)?;
    Ok(HkcParts {
        a,
        row_sums,
        lambda,
        phi,
        psi,
        epsilon,
    })
}

/// HKC embedding: coordinates `lambda_{j+1}^t psi_{j+1}`.
pub fn hkc_embed(data: &Matrix, landmarks: &Matrix, cfg: &EmbedderConfig) -> Result<EmbeddingResult> {
    let start = Instant::now();
    cfg.validate()?;
    check_embed_dim(cfg, landmarks.rows(), "landmarks")?;
    let parts = hkc_decompose(data, landmarks, cfg, cfg.embed_dim + 1)?;
    let coords = weighted_coords(&parts.psi, &parts.lambda, cfg.diffusion_time);
    Ok(EmbeddingResult {
        coords,
        vectors: parts.psi,
        spectrum: parts.lambda,
        degrees: parts.row_sums,
        method: Method::Hkc,
        epsilon: parts.epsilon,
        diffusion_time: cfg.diffusion_time,
        landmarks: landmarks.rows(),
        elapsed: start.elapsed().as_secs_f64(),
    })
}
