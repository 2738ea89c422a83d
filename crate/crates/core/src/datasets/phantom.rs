use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

const SHEPP_LOGAN: &str = include_str!("../../data/shepp_logan.csv");
const MODIFIED_SHEPP_LOGAN: &str = include_str!("../../data/modified_shepp_logan.csv");

/// A filled ellipse of constant intensity: centre, semi-axes, rotation of
/// the first axis from the x-axis in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub x0: f64,
    pub y0: f64,
    pub a: f64,
    pub b: f64,
    pub rotation_deg: f64,
    pub intensity: f64,
}

impl Ellipse {
    /// Line integral along `{x : <x, (cos t, sin t)> = s}`.
    pub fn projection(&self, theta: f64, s: f64) -> f64 {
        let alpha = self.rotation_deg.to_radians();
        let (c, d) = ((theta - alpha).cos(), (theta - alpha).sin());
        let a2 = self.a * self.a * c * c + self.b * self.b * d * d;
        let s0 = self.x0 * theta.cos() + self.y0 * theta.sin();
        let r = a2 - (s - s0) * (s - s0);
        if r <= 0.0 {
            0.0
        } else {
            2.0 * self.intensity * self.a * self.b / a2 * r.sqrt()
        }
    }

    /// Whether `(x, y)` lies inside the ellipse.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let alpha = self.rotation_deg.to_radians();
        let (dx, dy) = (x - self.x0, y - self.y0);
        let u = dx * alpha.cos() + dy * alpha.sin();
        let v = -dx * alpha.sin() + dy * alpha.cos();
        (u / self.a).powi(2) + (v / self.b).powi(2) <= 1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub ellipses: Vec<Ellipse>,
    /// Offsets per projection, equally spaced on `[-1, 1]`.
    pub p: usize,
}

impl PhantomSpec {
    /// Shepp-Logan geometry with the higher-contrast intensities; this is
    /// the default phantom.
    pub fn modified_shepp_logan(p: usize) -> Result<Self> {
        Self::from_table(MODIFIED_SHEPP_LOGAN, p)
    }

    /// Shepp-Logan with the original intensities.
    pub fn shepp_logan(p: usize) -> Result<Self> {
        Self::from_table(SHEPP_LOGAN, p)
    }

    /// Parses `x0,y0,a,b,rotation_deg,intensity` rows; `#` starts a comment.
    pub fn from_table(text: &str, p: usize) -> Result<Self> {
        let mut ellipses = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("ellipse table line {}: {e}", lineno + 1)))?;
            if v.len() != 6 {
                return Err(Error::Format(format!(
                    "ellipse table line {}: expected 6 fields, found {}",
                    lineno + 1,
                    v.len()
                )));
            }
            if !(v[2] > 0.0 && v[3] > 0.0) {
                return Err(Error::Value(format!("ellipse table line {}: non-positive semi-axis", lineno + 1)));
            }
            ellipses.push(Ellipse {
                x0: v[0],
                y0: v[1],
                a: v[2],
                b: v[3],
                rotation_deg: v[4],
                intensity: v[5],
            });
        }
        let spec = PhantomSpec { ellipses, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("need at least 2 offsets per projection, got {}", self.p)));
        }
        if self.ellipses.is_empty() {
            return Err(Error::Config("phantom has no ellipses".into()));
        }
        Ok(())
    }

    pub fn offsets(&self) -> Vec<f64> {
        let h = 2.0 / (self.p - 1) as f64;
        (0..self.p).map(|k| -1.0 + k as f64 * h).collect()
    }

    /// Image intensity at `(x, y)`.
    pub fn intensity(&self, x: f64, y: f64) -> f64 {
        self.ellipses
            .iter()
            .filter(|e| e.contains(x, y))
            .map(|e| e.intensity)
            .sum()
    }
}

/// Analytic Radon transform of the phantom at angle `theta`, sampled at the
/// spec's offsets.
pub fn radon_projection(spec: &PhantomSpec, theta: f64) -> Vec<f64> {
    spec.offsets()
        .into_iter()
        .map(|s| spec.ellipses.iter().map(|e| e.projection(theta, s)).sum())
        .collect()
}

/// `n` projection angles uniform on the circle and the matching `n x p`
/// matrix of projections.
pub fn phantom_radon_dataset(n: usize, spec: &PhantomSpec, rng: &mut Rng) -> Result<(Vec<f64>, Matrix)> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::Config("need at least one projection".into()));
    }
    let angles: Vec<f64> = (0..n).map(|_| TAU * rng.uniform()).collect();
    let data = radon_rows(spec, &angles);
    Ok((angles, Matrix::new(n, spec.p, data)?))
}

pub fn radon_rows(spec: &PhantomSpec, angles: &[f64]) -> Vec<f64> {
    let p = spec.p;
    let mut data = vec![0.0; angles.len() * p];
    data.par_chunks_mut(p)
        .zip(angles.par_iter())
        .for_each(|(row, &t)| row.copy_from_slice(&radon_projection(spec, t)));
    data
}
