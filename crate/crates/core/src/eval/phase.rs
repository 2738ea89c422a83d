use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase and amplitude of a pair of eigenvectors, ordered by true angle.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PhaseAmplitude {
    pub angles: Vec<f64>,
    /// `atan2(v1, v2)` in `[0, 2 pi)`; zero where both inputs vanish.
    pub phase: Vec<f64>,
    pub amplitude: Vec<f64>,
}

pub fn phase_amplitude(v1: &[f64], v2: &[f64], true_angles: &[f64]) -> Result<PhaseAmplitude> {
    let n = true_angles.len();
    if v1.len() != n || v2.len() != n {
        return Err(Error::Dim(format!(
            "phase inputs of length {} and {} for {n} angles",
            v1.len(),
            v2.len()
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| true_angles[a].total_cmp(&true_angles[b]));
    let mut out = PhaseAmplitude::default();
    for i in order {
        let (a, b) = (v1[i], v2[i]);
        let phase = if a == 0.0 && b == 0.0 { 0.0 } else { a.atan2(b).rem_euclid(TAU) };
        out.angles.push(true_angles[i]);
        out.phase.push(if phase >= TAU { 0.0 } else { phase });
        out.amplitude.push(a.hypot(b));
    }
    Ok(out)
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}

fn circular_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].rem_euclid(TAU).total_cmp(&x[b].rem_euclid(TAU)));
    let mut r = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        r[i] = TAU * (rank + 1) as f64 / n as f64;
    }
    r
}

/// Fisher-Lee circular rank correlation: angles are replaced by their
/// uniform rank angles `2 pi r / n` and the statistic is the larger of
/// `|mean e^{i(a - b)}|^2` and `|mean e^{i(a + b)}|^2`, so it is 1 for any
/// rotation or reflection of a monotone circular relationship.
pub fn circular_rank_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dim(format!("angle vectors of length {} and {}", a.len(), b.len())));
    }
    let (ra, rb) = (circular_ranks(a), circular_ranks(b));
    let n = a.len() as f64;
    let resultant = |sign: f64| {
        let (mut c, mut s) = (0.0, 0.0);
        for (x, y) in ra.iter().zip(&rb) {
            let d = x + sign * y;
            c += d.cos();
            s += d.sin();
        }
        (c * c + s * s) / (n * n)
    };
    Ok(resultant(-1.0).max(resultant(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use approx::assert_relative_eq;

    #[test]
    fn sin_cos_gives_identity_phase() {
        let angles: Vec<f64> = (0..100).map(|i| 0.06 * i as f64).collect();
        let v1: Vec<f64> = angles.iter().map(|t| t.sin()).collect();
        let v2: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
        let pa = phase_amplitude(&v1, &v2, &angles).unwrap();
        for (p, t) in pa.phase.iter().zip(&pa.angles) {
            assert!((p - t).abs() < 1e-12);
        }
        assert!(pa.amplitude.iter().all(|a| (a - 1.0).abs() < 1e-14));
    }

    #[test]
    fn zero_pair_convention() {
        let pa = phase_amplitude(&[0.0], &[0.0], &[1.0]).unwrap();
        assert_eq!((pa.phase[0], pa.amplitude[0]), (0.0, 0.0));
        assert!(phase_amplitude(&[0.0], &[0.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn output_is_sorted_by_angle() {
        let pa = phase_amplitude(&[1.0, 0.0, -1.0], &[0.0, 1.0, 0.0], &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(pa.angles, vec![1.0, 2.0, 3.0]);
        assert_eq!(pa.amplitude, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rank_correlation_of_rotations_and_reflections() {
        let mut rng = Rng::new(2);
        let a: Vec<f64> = (0..500).map(|_| TAU * rng.uniform()).collect();
        let rotated: Vec<f64> = a.iter().map(|t| t + 1.3).collect();
        let reflected: Vec<f64> = a.iter().map(|t| 5.0 - t).collect();
        assert_relative_eq!(circular_rank_correlation(&a, &rotated).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(circular_rank_correlation(&a, &reflected).unwrap(), 1.0, epsilon = 1e-12);
        let noise: Vec<f64> = (0..500).map(|_| TAU * rng.uniform()).collect();
        assert!(circular_rank_correlation(&a, &noise).unwrap() < 0.05);
    }

    #[test]
    fn cv_of_constant_is_zero() {
        assert_eq!(coefficient_of_variation(&[2.0; 10]), 0.0);
        assert_relative_eq!(coefficient_of_variation(&[1.0, 3.0]), 0.5);
    }
}
