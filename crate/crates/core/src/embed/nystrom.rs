use std::time::Instant;

use rayon::prelude::*;

use super::{check_data, check_embed_dim, resolve_epsilon, weighted_coords};
use crate::affinity::{affinity_from_squared_distances, squared_distances};
use crate::config::{EmbedderConfig, EmbeddingResult, Method};
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::spectral::{sym_eig_stochastic, SymEig};

/// Directions whose eigenvalue is at or below this are not extended.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Modified Nystrom extension with landmarks taken as a subset of the data.
///
/// The landmark block `W_L` is eigendecomposed through
/// `D_L^{-1/2} W_L D_L^{-1/2} = V L V^T` with `Utilde_L = D_L^{-1/2} V`;
/// every other point gets `D_{n-L}^{-1} E Utilde_L L^{-1}`, where `E` holds
/// its affinities to the landmarks.
pub fn nystrom_embed(data: &Matrix, landmark_indices: &[usize], cfg: &EmbedderConfig) -> Result<EmbeddingResult> {
    let start = Instant::now();
    cfg.validate()?;
    check_data(data, "data")?;
    let n = data.rows();
    let mut is_landmark = vec![usize::MAX; n];
    for (pos, &i) in landmark_indices.iter().enumerate() {
        if i >= n {
            return Err(Error::Index(format!("landmark index {i} of {n} points")));
        }
        if is_landmark[i] != usize::MAX {
            return Err(Error::Index(format!("landmark index {i} repeated")));
        }
        is_landmark[i] = pos;
    }
    check_nystrom_size(cfg, landmark_indices.len())?;
    let landmarks = data.select_rows(landmark_indices);
    let sq = squared_distances(data, &landmarks)?;
    let epsilon = resolve_epsilon(cfg.bandwidth, &sq, false)?;
    let k = affinity_from_squared_distances(sq, cfg.kernel, epsilon)?;
    let wl = k.select_rows(landmark_indices);
    let dl = wl.row_sums();
    let eig = sym_eig_stochastic(&wl, &dl, cfg.embed_dim + 1)?;
    warn_floor(&eig);

    let q1 = cfg.embed_dim + 1;
    let mut degrees = vec![0.0; n];
    let mut rows = vec![0.0; n * q1];
    rows.par_chunks_mut(q1)
        .zip(degrees.par_iter_mut())
        .enumerate()
        .for_each(|(i, (dst, deg))| match is_landmark[i] {
            usize::MAX => *deg = extend_row(k.row(i), &eig, dst),
            pos => {
                *deg = dl[pos];
                for (j, d) in dst.iter_mut().enumerate() {
                    *d = eig.vectors.get(pos, j);
                }
            }
        });
    finish(rows, degrees, eig, epsilon, cfg, landmark_indices.len(), start)
}

/// Nystrom extension from landmarks that are not part of the data: the
/// eigenproblem is solved on the landmarks alone and every data point is
/// extended.
pub fn nystrom_embed_external(data: &Matrix, landmarks: &Matrix, cfg: &EmbedderConfig) -> Result<EmbeddingResult> {
    let start = Instant::now();
    cfg.validate()?;
    check_data(data, "data")?;
    check_data(landmarks, "landmark set")?;
    check_nystrom_size(cfg, landmarks.rows())?;
    let sq = squared_distances(data, landmarks)?;
    let epsilon = resolve_epsilon(cfg.bandwidth, &sq, false)?;
    let e = affinity_from_squared_distances(sq, cfg.kernel, epsilon)?;
    let wl = affinity_from_squared_distances(squared_distances(landmarks, landmarks)?, cfg.kernel, epsilon)?;
    let dl = wl.row_sums();
    let eig = sym_eig_stochastic(&wl, &dl, cfg.embed_dim + 1)?;
    warn_floor(&eig);

    let n = data.rows();
    let q1 = cfg.embed_dim + 1;
    let mut degrees = vec![0.0; n];
    let mut rows = vec![0.0; n * q1];
    rows.par_chunks_mut(q1)
        .zip(degrees.par_iter_mut())
        .enumerate()
        .for_each(|(i, (dst, deg))| *deg = extend_row(e.row(i), &eig, dst));
    finish(rows, degrees, eig, epsilon, cfg, landmarks.rows(), start)
}

fn check_nystrom_size(cfg: &EmbedderConfig, l: usize) -> Result<()> {
    check_embed_dim(cfg, l, "landmarks")?;
    if l < cfg.embed_dim + 2 {
        return Err(Error::Config(format!(
            "the Nystrom extension needs at least {} landmarks, got {l}",
            cfg.embed_dim + 2
        )));
    }
    Ok(())
}

fn warn_floor(eig: &SymEig) {
    for (j, v) in eig.values.iter().enumerate().filter(|(_, v)| **v <= EIGENVALUE_FLOOR) {
        log::warn!("landmark eigenvalue {j} is {v:e}; its extension is set to zero");
    }
}

/// Writes the extended row and returns its degree.
fn extend_row(e_row: &[f64], eig: &SymEig, dst: &mut [f64]) -> f64 {
    let deg: f64 = e_row.iter().sum();
    let l = e_row.len();
    let mut col = vec![0.0; l];
    for (j, d) in dst.iter_mut().enumerate() {
        for (r, c) in col.iter_mut().enumerate() {
            *c = eig.vectors.get(r, j);
        }
        *d = if eig.values[j] > EIGENVALUE_FLOOR {
            dot(e_row, &col) / (deg * eig.values[j])
        } else {
            0.0
        };
    }
    deg
}

fn finish(
    rows: Vec<f64>,
    degrees: Vec<f64>,
    eig: SymEig,
    epsilon: f64,
    cfg: &EmbedderConfig,
    landmarks: usize,
    start: Instant,
) -> Result<EmbeddingResult> {
    if let Some(i) = degrees.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::Value(format!(
            "point {i} has zero affinity to every landmark; increase the bandwidth"
        )));
    }
    let q1 = cfg.embed_dim + 1;
    let vectors = Matrix::new(degrees.len(), q1, rows)?;
    let coords = weighted_coords(&vectors, &eig.values, cfg.diffusion_time);
    Ok(EmbeddingResult {
        coords,
        vectors,
        spectrum: eig.values,
        degrees,
        method: Method::Nystrom,
        epsilon,
        diffusion_time: cfg.diffusion_time,
        landmarks,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_directions_are_zeroed_not_amplified() {
        // two coincident pairs give a rank-2 landmark kernel
        let lm = Matrix::from_rows(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).unwrap();
        let data = Matrix::from_rows(&[[0.1, 0.0], [0.5, 0.1], [0.9, 0.0], [0.3, -0.1], [0.7, 0.2]]).unwrap();
        let cfg = EmbedderConfig::default().with_epsilon(0.5).with_embed_dim(2);
        let r = nystrom_embed_external(&data, &lm, &cfg).unwrap();
        assert!(r.spectrum[2].abs() <= EIGENVALUE_FLOOR);
        assert!(r.coords.as_slice().iter().all(|v| v.is_finite()));
        assert!((0..5).all(|i| r.vectors.get(i, 2) == 0.0));
        assert!((0..5).any(|i| r.vectors.get(i, 1).abs() > 1e-3));
    }
}
