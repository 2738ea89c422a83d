//! The four embedders and the distances built on their output.
//!
//! Every method returns an [`EmbeddingResult`] whose `vectors` hold the
//! unweighted eigenvectors (trivial one first) and whose `coords` are
//! `spectrum[j]^t * vectors[:, j]` for the non-trivial `j`. For Roseland the
//! spectrum holds squared singular values, so the weight is `sigma_j^{2t}`.

mod dm;
mod hkc;
mod nystrom;
mod roseland;

pub use dm::{dm_embed, dm_embed_capped, DEFAULT_DM_CAP};
pub use hkc::{hkc_decompose, hkc_embed, HkcParts};
pub use nystrom::{nystrom_embed, nystrom_embed_external};
pub use roseland::roseland_embed;

use serde::{Deserialize, Serialize};

use crate::affinity::median_squared_distance;
use crate::config::{Bandwidth, EmbedderConfig, EmbeddingResult, Method};
use crate::error::{Error, Result};
use crate::kernels::{laplacian_eigenvalue_estimate, KernelMoment, OperatorKind};
use crate::matrix::{norm, Matrix};

pub(crate) fn resolve_epsilon(bandwidth: Bandwidth, sq: &Matrix, exclude_diagonal: bool) -> Result<f64> {
    let eps = match bandwidth {
        Bandwidth::Fixed(e) => e,
        Bandwidth::MedianScaled(scale) => scale * median_squared_distance(sq, exclude_diagonal),
    };
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!(
            "bandwidth resolved to {eps}; the data may be degenerate"
        )));
    }
    Ok(eps)
}

/// `value^t`, keeping the sign of negative eigenvalues.
pub fn spectral_weight(value: f64, t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        value.signum() * value.abs().powf(t)
    }
}

pub(crate) fn weighted_coords(vectors: &Matrix, spectrum: &[f64], t: f64) -> Matrix {
    let q = vectors.cols() - 1;
    let weights: Vec<f64> = spectrum[1..=q].iter().map(|&s| spectral_weight(s, t)).collect();
    Matrix::from_fn(vectors.rows(), q, |i, j| weights[j] * vectors.get(i, j + 1))
        .expect("weighted eigenvectors stay finite")
}

pub(crate) fn check_data(data: &Matrix, what: &str) -> Result<()> {
    if data.rows() == 0 || data.cols() == 0 {
        return Err(Error::Dim(format!("{what} is empty")));
    }
    Ok(())
}

pub(crate) fn check_embed_dim(cfg: &EmbedderConfig, available: usize, what: &str) -> Result<()> {
    if cfg.embed_dim + 1 > available {
        return Err(Error::Config(format!(
            "embedding dimension {} needs at least {} {what}, got {available}",
            cfg.embed_dim,
            cfg.embed_dim + 1
        )));
    }
    Ok(())
}

/// Euclidean distance between rows `i` and `j` of the diffusion coordinates
/// at time `t`. When `t` differs from the time the result was built with,
/// the coordinates are recomputed from the stored spectrum and vectors.
pub fn diffusion_distance(r: &EmbeddingResult, i: usize, j: usize, t: f64) -> Result<f64> {
    let n = r.n();
    if i >= n || j >= n {
        return Err(Error::Index(format!("points ({i}, {j}) of {n}")));
    }
    if t == r.diffusion_time {
        return Ok(crate::matrix::squared_distance(r.coords.row(i), r.coords.row(j)).sqrt());
    }
    let s: f64 = (1..r.vectors.cols())
        .map(|c| {
            let w = spectral_weight(r.spectrum[c], t);
            (w * (r.vectors.get(i, c) - r.vectors.get(j, c))).powi(2)
        })
        .sum();
    Ok(s.sqrt())
}

/// Which operator family a method's spectrum belongs to when converting it
/// to Laplacian eigenvalues.
pub fn operator_kind(method: Method) -> OperatorKind {
    match method {
        Method::Roseland | Method::Hkc => OperatorKind::Roseland,
        Method::Dm | Method::Nystrom => OperatorKind::Dm,
    }
}

/// Laplace-Beltrami eigenvalue estimates for the non-trivial part of the
/// spectrum.
pub fn eigenvalue_estimates(r: &EmbeddingResult, moment: &KernelMoment) -> Vec<f64> {
    let kind = operator_kind(r.method);
    r.spectrum[1..]
        .iter()
        .map(|&s| laplacian_eigenvalue_estimate(s, r.epsilon, moment, kind))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `spectrum^t`-weighted eigenvectors as produced by the embedder.
    Raw,
    /// Heat-kernel scaling that makes the truncated embedding almost
    /// isometric. `volume` is the Riemannian volume of the manifold, used to
    /// normalise eigenvectors to unit `L^2(M)` norm.
    Portegies { dim: usize, time: f64, volume: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffusionCoordinates {
    pub coords: Matrix,
    pub scaling: Scaling,
}

/// `2 t^{(d+2)/4} sqrt(2) (4 pi)^{d/4} e^{-lambda t}`.
pub fn portegies_factor(t: f64, dim: usize, lambda: f64) -> f64 {
    let d = dim as f64;
    2.0 * t.powf((d + 2.0) / 4.0)
        * std::f64::consts::SQRT_2
        * (4.0 * std::f64::consts::PI).powf(d / 4.0)
        * (-lambda * t).exp()
}

/// Rescales every non-trivial eigenvector `j` to
/// `portegies_factor(t, d, lambda_j) * u_j`, where `u_j` is the eigenvector
/// normalised so that `(volume / n) * |u_j|^2 = 1`. `eigenvalues` are the
/// Laplacian eigenvalues paired with the non-trivial vectors (estimated or
/// known).
pub fn portegies_scale(
    r: &EmbeddingResult,
    eigenvalues: &[f64],
    t: f64,
    dim: usize,
    volume: f64,
) -> Result<DiffusionCoordinates> {
    let q = r.vectors.cols() - 1;
    if eigenvalues.len() < q {
        return Err(Error::Dim(format!(
            "{} eigenvalues for {q} non-trivial vectors",
            eigenvalues.len()
        )));
    }
    if !(t > 0.0 && volume > 0.0) {
        return Err(Error::Config("scaling time and volume must be positive".into()));
    }
    let n = r.n();
    let cols: Vec<Vec<f64>> = (1..=q)
        .map(|c| {
            let v = r.vectors.column(c);
            let nv = norm(&v);
            let f = portegies_factor(t, dim, eigenvalues[c - 1]) * (n as f64 / volume).sqrt()
                / if nv > 0.0 { nv } else { 1.0 };
            v.into_iter().map(|x| x * f).collect()
        })
        .collect();
    Ok(DiffusionCoordinates {
        coords: Matrix::from_columns(&cols)?,
        scaling: Scaling::Portegies { dim, time: t, volume },
    })
}

/// Runs `method` with landmarks as appropriate: Roseland and HKC use
/// `landmarks`, Nystrom treats them as external landmarks (or as a subset
/// when `landmark_indices` is given), and the diffusion map ignores them.
pub fn embed(
    method: Method,
    data: &Matrix,
    landmarks: &Matrix,
    landmark_indices: Option<&[usize]>,
    cfg: &EmbedderConfig,
) -> Result<EmbeddingResult> {
    match method {
        Method::Roseland => roseland_embed(data, landmarks, cfg),
        Method::Dm => dm_embed(data, cfg),
        Method::Hkc => hkc_embed(data, landmarks, cfg),
        Method::Nystrom => match landmark_indices {
            Some(idx) => nystrom_embed(data, idx, cfg),
            None => nystrom_embed_external(data, landmarks, cfg),
        },
    }
}
