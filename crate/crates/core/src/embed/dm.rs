use std::time::Instant;

use super::{check_data, check_embed_dim, resolve_epsilon, weighted_coords};
use crate::affinity::{affinity_from_squared_distances, squared_distances};
use crate::config::{EmbedderConfig, EmbeddingResult, Method};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::sym_eig_stochastic;

/// Largest dataset the dense diffusion map accepts by default.
pub const DEFAULT_DM_CAP: usize = 20_000;

/// Diffusion map (`alpha = 0`) with the default size cap.
pub fn dm_embed(data: &Matrix, cfg: &EmbedderConfig) -> Result<EmbeddingResult> {
    dm_embed_capped(data, cfg, DEFAULT_DM_CAP)
}

/// Diffusion map on the dense `n x n` kernel. The bandwidth median, when
/// used, is taken over distinct pairs.
pub fn dm_embed_capped(data: &Matrix, cfg: &EmbedderConfig, cap: usize) -> Result<EmbeddingResult> {
    let start = Instant::now();
    cfg.validate()?;
    check_data(data, "data")?;
    let n = data.rows();
    if n > cap {
        return Err(Error::Capacity(format!(
            "diffusion map needs a dense {n}x{n} kernel; the cap is {cap} points"
        )));
    }
    check_embed_dim(cfg, n, "points")?;
    let sq = squared_distances(data, data)?;
    let epsilon = resolve_epsilon(cfg.bandwidth, &sq, true)?;
    let w = affinity_from_squared_distances(sq, cfg.kernel, epsilon)?;
    let degrees = w.row_sums();
    let eig = sym_eig_stochastic(&w, &degrees, cfg.embed_dim + 1)?;
    drop(w);
    let coords = weighted_coords(&eig.vectors, &eig.values, cfg.diffusion_time);
    Ok(EmbeddingResult {
        coords,
        vectors: eig.vectors,
        spectrum: eig.values,
        degrees,
        method: Method::Dm,
        epsilon,
        diffusion_time: cfg.diffusion_time,
        landmarks: n,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
