//! Embedding configuration and results shared by all methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::matrix::Matrix;

/// How many landmarks to use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandmarkSpec {
    /// Exactly this many landmarks.
    Count(usize),
    /// `m = round(n^beta)` with `0 < beta <= 1`.
    Exponent(f64),
}

/// Resolves the landmark count for a dataset of `n` points. Rounding is
/// half-away-from-zero.
pub fn resolve_landmark_count(n: usize, spec: LandmarkSpec) -> Result<usize> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 points, got {n}")));
    }
    let m = match spec {
        LandmarkSpec::Count(m) => m,
        LandmarkSpec::Exponent(beta) => {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::Config(format!("beta must lie in (0, 1], got {beta}")));
            }
            (n as f64).powf(beta).round() as usize
        }
    };
    if m < 1 || m > n {
        return Err(Error::Config(format!(
            "landmark count {m} outside [1, {n}]"
        )));
    }
    Ok(m)
}

/// Kernel bandwidth in squared-distance units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Use this epsilon as is.
    Fixed(f64),
    /// Median squared distance between data and landmarks (data and data
    /// for the diffusion map) times this factor.
    MedianScaled(f64),
}

impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::MedianScaled(0.05)
    }
}

impl Bandwidth {
    pub fn validate(&self) -> Result<()> {
        let v = match self {
            Bandwidth::Fixed(e) | Bandwidth::MedianScaled(e) => *e,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("bandwidth must be positive, got {v}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    #[serde(default)]
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
    /// Diffusion time `t >= 0` applied to the spectrum.
    pub diffusion_time: f64,
    /// Number of non-trivial coordinates `q'`.
    pub embed_dim: usize,
    pub landmarks: LandmarkSpec,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Gaussian,
            bandwidth: Bandwidth::default(),
            diffusion_time: 1.0,
            embed_dim: 3,
            landmarks: LandmarkSpec::Exponent(0.5),
        }
    }
}

impl EmbedderConfig {
    pub fn validate(&self) -> Result<()> {
        self.bandwidth.validate()?;
        if !(self.diffusion_time >= 0.0 && self.diffusion_time.is_finite()) {
            return Err(Error::Config(format!(
                "diffusion time must be non-negative, got {}",
                self.diffusion_time
            )));
        }
        if self.embed_dim < 1 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        if let LandmarkSpec::Exponent(beta) = self.landmarks {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::Config(format!("beta must lie in (0, 1], got {beta}")));
            }
        }
        Ok(())
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.bandwidth = Bandwidth::Fixed(epsilon);
        self
    }

    pub fn with_epsilon_scale(mut self, scale: f64) -> Self {
        self.bandwidth = Bandwidth::MedianScaled(scale);
        self
    }

    pub fn with_landmarks(mut self, spec: LandmarkSpec) -> Self {
        self.landmarks = spec;
        self
    }

    pub fn with_embed_dim(mut self, q: usize) -> Self {
        self.embed_dim = q;
        self
    }

    pub fn with_diffusion_time(mut self, t: f64) -> Self {
        self.diffusion_time = t;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Roseland,
    Dm,
    Nystrom,
    Hkc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Roseland, Method::Dm, Method::Nystrom, Method::Hkc];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Roseland => "roseland",
            Method::Dm => "dm",
            Method::Nystrom => "nystrom",
            Method::Hkc => "hkc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "roseland" => Ok(Method::Roseland),
            "dm" | "diffusion-map" => Ok(Method::Dm),
            "nystrom" => Ok(Method::Nystrom),
            "hkc" => Ok(Method::Hkc),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// Output of any embedder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingResult {
    /// `n x q'` diffusion coordinates (trivial pair skipped, weights applied).
    pub coords: Matrix,
    /// Unweighted eigenvectors `n x (q'+1)`, trivial vector first.
    pub vectors: Matrix,
    /// `q'+1` non-increasing spectral values, trivial value first. For
    /// Roseland these are squared singular values.
    pub spectrum: Vec<f64>,
    /// Degree of each point under the method's normalisation.
    pub degrees: Vec<f64>,
    pub method: Method,
    pub epsilon: f64,
    pub diffusion_time: f64,
    /// Number of landmarks (equal to `n` for the diffusion map).
    pub landmarks: usize,
    /// Wall-clock seconds spent inside the embedder.
    pub elapsed: f64,
}

impl EmbeddingResult {
    pub fn n(&self) -> usize {
        self.coords.rows()
    }

    pub fn embed_dim(&self) -> usize {
        self.coords.cols()
    }

    /// Non-trivial eigenvector `j` (1-based over non-trivial vectors).
    pub fn nontrivial_vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landmark_counts_from_exponent() {
        assert_eq!(resolve_landmark_count(90_000, LandmarkSpec::Exponent(0.5)).unwrap(), 300);
        assert_eq!(resolve_landmark_count(2_500, LandmarkSpec::Exponent(0.5)).unwrap(), 50);
        assert_eq!(resolve_landmark_count(10, LandmarkSpec::Count(10)).unwrap(), 10);
        assert_eq!(resolve_landmark_count(10, LandmarkSpec::Exponent(1.0)).unwrap(), 10);
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        // 6.25^0.5 = 2.5 -> 3 is not representable with integer n, so check
        // the rounding primitive directly on a tie.
        assert_eq!(2.5f64.round(), 3.0);
        // n = 12, beta = 0.5: sqrt(12) = 3.46 -> 3
        assert_eq!(resolve_landmark_count(12, LandmarkSpec::Exponent(0.5)).unwrap(), 3);
    }

    #[test]
    fn landmark_count_errors() {
        assert!(matches!(
            resolve_landmark_count(10, LandmarkSpec::Count(11)),
            Err(Error::Config(_))
        ));
        assert!(resolve_landmark_count(10, LandmarkSpec::Count(0)).is_err());
        assert!(resolve_landmark_count(10, LandmarkSpec::Exponent(0.0)).is_err());
        assert!(resolve_landmark_count(10, LandmarkSpec::Exponent(1.5)).is_err());
        assert!(resolve_landmark_count(1, LandmarkSpec::Count(1)).is_err());
    }

    #[test]
    fn landmark_count_is_monotone_in_n() {
        for beta in [0.1, 0.3, 0.5, 0.77, 1.0] {
            let mut prev = 0;
            for n in 2..3000 {
                let m = resolve_landmark_count(n, LandmarkSpec::Exponent(beta)).unwrap();
                assert!(m >= prev);
                prev = m;
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(EmbedderConfig::default().validate().is_ok());
        assert!(EmbedderConfig::default().with_epsilon(0.0).validate().is_err());
        assert!(EmbedderConfig::default().with_embed_dim(0).validate().is_err());
        assert!(EmbedderConfig::default()
            .with_diffusion_time(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn method_parsing() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("pca".parse::<Method>().is_err());
    }
}
