use std::time::Instant;

use super::{check_data, check_embed_dim, resolve_epsilon, weighted_coords};
use crate::affinity::{
    affinity_from_squared_distances, landmark_degrees, normalized_landmark_operator,
    squared_distances, LandmarkAffinity,
};
use crate::config::{EmbedderConfig, EmbeddingResult, Method};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::spectral::thin_svd;

/// Landmark diffusion embedding.
///
/// Builds `W^(r)`, the degrees `d = W^(r) W^(r)^T 1`, takes the thin SVD of
/// `D^{-1/2} W^(r)` and returns `Ubar = D^{-1/2} U`. Coordinates are
/// `sigma_{j+1}^{2t} Ubar_{:, j+1}` for `j = 1..q'`. Cost is `O(nmq + nm^2)`
/// time and `O(nm)` memory.
pub fn roseland_embed(data: &Matrix, landmarks: &Matrix, cfg: &EmbedderConfig) -> Result<EmbeddingResult> {
    let start = Instant::now();
    cfg.validate()?;
    check_data(data, "data")?;
    check_data(landmarks, "landmark set")?;
    check_embed_dim(cfg, landmarks.rows(), "landmarks")?;
    let sq = squared_distances(data, landmarks)?;
    let epsilon = resolve_epsilon(cfg.bandwidth, &sq, false)?;
    let aff = LandmarkAffinity {
        w: affinity_from_squared_distances(sq, cfg.kernel, epsilon)?,
        epsilon,
    };
    let deg = landmark_degrees(&aff);
    let op = normalized_landmark_operator(&aff, &deg);
    drop(aff);
    let svd = thin_svd(&op, cfg.embed_dim + 1)?;
    drop(op);
    let inv_sqrt: Vec<f64> = deg.values.iter().map(|d| 1.0 / d.sqrt()).collect();
    let vectors = svd.u.scale_rows(&inv_sqrt);
    let spectrum: Vec<f64> = svd.s.iter().map(|s| s * s).collect();
    let coords = weighted_coords(&vectors, &spectrum, cfg.diffusion_time);
    Ok(EmbeddingResult {
        coords,
        vectors,
        spectrum,
        degrees: deg.values,
        method: Method::Roseland,
        epsilon,
        diffusion_time: cfg.diffusion_time,
        landmarks: landmarks.rows(),
        elapsed: start.elapsed().as_secs_f64(),
    })
}
