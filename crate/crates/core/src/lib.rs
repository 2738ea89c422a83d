//! Landmark-diffusion spectral embedding.
//!
//! Roseland embeds a point cloud by letting diffusion pass through a small
//! landmark set: with `W` the `n x m` kernel matrix between data and
//! landmarks, the embedding comes from the thin SVD of `D^{-1/2} W`, where
//! `D` holds the degrees of the implied `n x n` affinity `W W^T`. The
//! diffusion map, Nystrom extension and HKC are provided as baselines, along
//! with synthetic datasets, evaluation metrics and a scaling benchmark.

pub mod affinity;
pub mod alloc;
pub mod bench;
pub mod config;
pub mod datasets;
pub mod embed;
pub mod error;
pub mod eval;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod quadrature;
pub mod rng;
pub mod spectral;

pub use config::{Bandwidth, EmbedderConfig, EmbeddingResult, LandmarkSpec, Method};
pub use embed::{dm_embed, embed, hkc_embed, nystrom_embed, nystrom_embed_external, roseland_embed};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rng::Rng;
