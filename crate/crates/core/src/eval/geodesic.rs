use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affinity::median;
use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

/// How the `K`-th neighbour of a point is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborMode {
    /// By true arc length on the circle.
    #[default]
    Geodesic,
    /// By Euclidean distance between embedding rows.
    Embedding,
}

/// Arc length between two angles on the unit circle.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Relative geodesic errors for several neighbour ranks; `errors[k][i]` is
/// the error of point `i` for rank `ks[k]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicErrors {
    pub ks: Vec<usize>,
    pub errors: Vec<Vec<f64>>,
}

impl GeodesicErrors {
    /// Median over every point and every rank.
    pub fn pooled_median(&self) -> f64 {
        let all: Vec<f64> = self.errors.iter().flatten().copied().collect();
        median(&all)
    }

    pub fn medians(&self) -> Vec<f64> {
        self.errors.iter().map(|e| median(e)).collect()
    }

    /// `q`-quantile per rank by linear interpolation of order statistics.
    pub fn quantiles(&self, q: f64) -> Vec<f64> {
        self.errors
            .iter()
            .map(|e| {
                let mut s = e.clone();
                s.sort_by(f64::total_cmp);
                let x = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
                let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
                s[lo] + (x - lo as f64) * (s[hi] - s[lo])
            })
            .collect()
    }
}

/// For every point `x_i` with `K`-th neighbour `x_i^(K)`, the error
/// `|D(x_i, x_i^(K)) - d(x_i, x_i^(K))| / d(x_i, x_i^(K))` where `D` is the
/// Euclidean distance between rows of `coords` (typically heat-kernel scaled
/// diffusion coordinates) and `d` the arc length.
pub fn geodesic_recovery_errors(
    coords: &Matrix,
    true_angles: &[f64],
    ks: &[usize],
    mode: NeighborMode,
) -> Result<GeodesicErrors> {
    let n = coords.rows();
    if true_angles.len() != n {
        return Err(Error::Dim(format!("{} angles for {n} points", true_angles.len())));
    }
    if ks.is_empty() || ks.iter().any(|&k| k < 1 || k >= n) {
        return Err(Error::Config(format!("neighbour ranks must lie in 1..{n}")));
    }
    let k_max = *ks.iter().max().expect("non-empty");
    let per_point: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let key = match mode {
                        NeighborMode::Geodesic => arc_distance(true_angles[i], true_angles[j]),
                        NeighborMode::Embedding => squared_distance(coords.row(i), coords.row(j)),
                    };
                    (key, j)
                })
                .collect();
            others.select_nth_unstable_by(k_max - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others[..k_max].sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            ks.iter()
                .map(|&k| {
                    let j = others[k - 1].1;
                    let d = arc_distance(true_angles[i], true_angles[j]);
                    if !(d > 0.0) {
                        return Err(Error::Value(format!(
                            "points {i} and {j} coincide on the circle; relative error undefined"
                        )));
                    }
                    let est = squared_distance(coords.row(i), coords.row(j)).sqrt();
                    Ok((est - d).abs() / d)
                })
                .collect()
        })
        .collect();
    let mut errors = vec![Vec::with_capacity(n); ks.len()];
    for row in per_point {
        for (k, e) in row?.into_iter().enumerate() {
            errors[k].push(e);
        }
    }
    Ok(GeodesicErrors { ks: ks.to_vec(), errors })
}

/// Single-rank convenience wrapper.
pub fn geodesic_recovery_error(coords: &Matrix, true_angles: &[f64], k: usize, mode: NeighborMode) -> Result<Vec<f64>> {
    Ok(geodesic_recovery_errors(coords, true_angles, &[k], mode)?.errors.remove(0))
}
