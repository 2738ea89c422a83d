use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::DensitySpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Angles drawn from a density on the unit circle and their embedding in
/// the first two coordinates of `R^p`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleSample {
    pub angles: Vec<f64>,
    pub points: Matrix,
    pub density: DensitySpec,
}

pub fn sample_angles(n: usize, density: &DensitySpec, rng: &mut Rng) -> Result<Vec<f64>> {
    let d = density.compile()?;
    Ok((0..n).map(|_| d.sample(rng)).collect())
}

/// Rows `(cos theta, sin theta, 0, ..., 0)` in `R^p`.
pub fn embed_angles(angles: &[f64], ambient_dim: usize) -> Result<Matrix> {
    if ambient_dim < 2 {
        return Err(Error::Config(format!("ambient dimension must be at least 2, got {ambient_dim}")));
    }
    let mut data = vec![0.0; angles.len() * ambient_dim];
    for (row, &t) in data.chunks_mut(ambient_dim).zip(angles) {
        row[0] = t.cos();
        row[1] = t.sin();
    }
    Matrix::new(angles.len(), ambient_dim, data)
}

pub fn sample_circle(n: usize, density: &DensitySpec, ambient_dim: usize, rng: &mut Rng) -> Result<CircleSample> {
    if n < 1 {
        return Err(Error::Config("need at least one point".into()));
    }
    if ambient_dim < 2 {
        return Err(Error::Config(format!("ambient dimension must be at least 2, got {ambient_dim}")));
    }
    let angles = sample_angles(n, density, rng)?;
    let points = embed_angles(&angles, ambient_dim)?;
    Ok(CircleSample {
        angles,
        points,
        density: density.clone(),
    })
}

/// Per-coordinate noise variance `p^{-1/2}`, i.e. covariance `(1/sqrt(p)) I`.
pub fn default_noise_variance(ambient_dim: usize) -> f64 {
    1.0 / (ambient_dim as f64).sqrt()
}

fn check_variance(sigma_sq: f64) -> Result<()> {
    if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
        return Err(Error::Value(format!("noise variance must be non-negative, got {sigma_sq}")));
    }
    Ok(())
}

/// Adds i.i.d. `N(0, sigma_sq)` to every entry. Row `i` draws from the child
/// stream `rng.split(i)`, so the output does not depend on scheduling.
pub fn add_gaussian_noise(points: &Matrix, sigma_sq: f64, rng: &Rng) -> Result<Matrix> {
    check_variance(sigma_sq)?;
    let sigma = sigma_sq.sqrt();
    perturb(points, rng, |r| {
        let z: f64 = StandardNormal.sample(r);
        sigma * z
    })
}

/// Adds i.i.d. uniform noise on `[-a, a]` with `a = sqrt(3 sigma_sq)`, which
/// has variance `sigma_sq` and bounded support.
pub fn add_uniform_noise(points: &Matrix, sigma_sq: f64, rng: &Rng) -> Result<Matrix> {
    check_variance(sigma_sq)?;
    let half = (3.0 * sigma_sq).sqrt();
    perturb(points, rng, |r| half * (2.0 * r.uniform() - 1.0))
}

fn perturb(points: &Matrix, rng: &Rng, draw: impl Fn(&mut Rng) -> f64 + Sync) -> Result<Matrix> {
    let p = points.cols();
    let mut data = points.as_slice().to_vec();
    data.par_chunks_mut(p.max(1)).enumerate().for_each(|(i, row)| {
        let mut r = rng.split(i as u64);
        row.iter_mut().for_each(|v| *v += draw(&mut r));
    });
    Matrix::new(points.rows(), p, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_points_lie_on_the_circle() {
        let mut rng = Rng::new(1);
        let s = sample_circle(500, &DensitySpec::Uniform, 100, &mut rng).unwrap();
        for (i, row) in s.points.row_iter().enumerate() {
            assert!((row[0] * row[0] + row[1] * row[1] - 1.0).abs() < 1e-14);
            assert!(row[2..].iter().all(|v| *v == 0.0));
            assert_eq!(row[0], s.angles[i].cos());
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = Rng::new(2);
        let s = sample_circle(10, &DensitySpec::Uniform, 5, &mut rng).unwrap();
        assert_eq!(add_gaussian_noise(&s.points, 0.0, &rng).unwrap(), s.points);
        assert!(matches!(add_gaussian_noise(&s.points, -1.0, &rng), Err(Error::Value(_))));
    }

    #[test]
    fn generation_errors() {
        let mut rng = Rng::new(0);
        assert!(matches!(sample_circle(0, &DensitySpec::Uniform, 2, &mut rng), Err(Error::Config(_))));
        assert!(matches!(sample_circle(5, &DensitySpec::Uniform, 1, &mut rng), Err(Error::Config(_))));
        assert!(matches!(
            sample_circle(5, &DensitySpec::sinusoidal(2.0), 2, &mut rng),
            Err(Error::Density(_))
        ));
    }

    #[test]
    fn default_variance_for_p100() {
        assert_eq!(default_noise_variance(100), 0.1);
    }
}
