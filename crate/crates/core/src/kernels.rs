//! Radial kernels, their moments, and the conversion from discrete spectra to
//! Laplace-Beltrami eigenvalue estimates.
//!
//! Kernels are written as a radial profile `K(t)` with `t = |x - y| / sqrt(eps)`.
//! The Gaussian profile is the unnormalised `K(t) = exp(-t^2)`, so that
//! `K_eps(x, y) = exp(-|x - y|^2 / eps)`. Normalising constants cancel in every
//! row-stochastic operator built here; the moment below is taken as a ratio so
//! the `mu_{1,0} = 1` normalisation is implicit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_half_line, QuadOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[non_exhaustive]
pub enum Kernel {
    #[default]
    Gaussian,
}

impl Kernel {
    /// Radial profile `K(t)` for `t >= 0`.
    #[inline]
    pub fn profile(&self, t: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-t * t).exp(),
        }
    }

    /// `K(sqrt(sq_dist / epsilon))`.
    #[inline]
    pub fn eval(&self, sq_dist: f64, epsilon: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-sq_dist / epsilon).exp(),
        }
    }
}

/// Second moment of a radial kernel in `d` dimensions, normalised by its
/// zeroth moment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMoment {
    pub dim: usize,
    pub mu_12_0: f64,
}

/// Closed form where one exists: for `exp(-t^2)` the ratio is `d / 2`.
pub fn kernel_moment(kernel: Kernel, dim: usize) -> Result<KernelMoment> {
    if dim < 1 {
        return Err(Error::Config("intrinsic dimension must be at least 1".into()));
    }
    let mu_12_0 = match kernel {
        Kernel::Gaussian => dim as f64 / 2.0,
    };
    Ok(KernelMoment { dim, mu_12_0 })
}

/// Same ratio computed by adaptive quadrature of an arbitrary profile:
/// `int_0^inf r^{d+1} K(r) dr / int_0^inf r^{d-1} K(r) dr`
/// (the sphere-surface factor cancels).
pub fn kernel_moment_by_quadrature(profile: impl Fn(f64) -> f64, dim: usize) -> Result<KernelMoment> {
    if dim < 1 {
        return Err(Error::Config("intrinsic dimension must be at least 1".into()));
    }
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    };
    let d = dim as i32;
    let second = integrate_half_line(|r| r.powi(d + 1) * profile(r), opts)?;
    let zeroth = integrate_half_line(|r| r.powi(d - 1) * profile(r), opts)?;
    if !(zeroth > 0.0) {
        return Err(Error::Quadrature("kernel has non-positive mass".into()));
    }
    Ok(KernelMoment {
        dim,
        mu_12_0: second / zeroth,
    })
}

/// Which discrete operator produced a spectral value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// Landmark diffusion; the spectral value is a squared singular value and
    /// the operator has twice the kernel variance of a single step.
    Roseland,
    /// Single-step row-stochastic kernel operator (diffusion map, Nystrom).
    Dm,
}

/// Maps a spectral value of a row-stochastic kernel operator to an estimate
/// of the corresponding Laplace-Beltrami eigenvalue.
pub fn laplacian_eigenvalue_estimate(
    spectral_value: f64,
    epsilon: f64,
    moment: &KernelMoment,
    kind: OperatorKind,
) -> f64 {
    let d = moment.dim as f64;
    let prefactor = match kind {
        OperatorKind::Roseland => d / (epsilon * moment.mu_12_0),
        OperatorKind::Dm => 2.0 * d / (epsilon * moment.mu_12_0),
    };
    ((1.0 - spectral_value) * prefactor).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_eval_values() {
        let k = Kernel::Gaussian;
        assert_eq!(k.eval(0.0, 0.3), 1.0);
        assert_relative_eq!(k.eval(0.3, 0.3), 0.367_879_441_171_442_33, epsilon = 1e-15);
        assert_relative_eq!(k.eval(3.0, 0.3), (-10.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(k.eval(2.0, 4.0), k.profile((2.0f64 / 4.0).sqrt()), epsilon = 1e-15);
    }

    #[test]
    fn gaussian_eval_is_decreasing_and_scale_invariant() {
        let k = Kernel::Gaussian;
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let s = i as f64 * 0.05;
            let v = k.eval(s, 0.7);
            assert!(v < prev && v > 0.0);
            prev = v;
            for c in [0.1, 3.0, 17.0] {
                assert_relative_eq!(v, k.eval(c * s, c * 0.7), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_moments_match_quadrature_oracle() {
        for (d, expected) in [(1, 0.5), (2, 1.0), (3, 1.5)] {
            let analytic = kernel_moment(Kernel::Gaussian, d).unwrap();
            let quad = kernel_moment_by_quadrature(|t| (-t * t).exp(), d).unwrap();
            assert_eq!(analytic.mu_12_0, expected);
            assert_relative_eq!(quad.mu_12_0, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn quadrature_handles_other_profiles() {
        // K(t) = exp(-t): ratio = Gamma(d+2)/Gamma(d) = d(d+1)
        for d in 1..5 {
            let m = kernel_moment_by_quadrature(|t| (-t).exp(), d).unwrap();
            assert_relative_eq!(m.mu_12_0, (d * (d + 1)) as f64, max_relative = 1e-8);
        }
    }

    #[test]
    fn eigenvalue_estimate_examples() {
        let m = KernelMoment { dim: 1, mu_12_0: 0.5 };
        assert_eq!(laplacian_eigenvalue_estimate(1.0, 0.01, &m, OperatorKind::Roseland), 0.0);
        assert_relative_eq!(
            laplacian_eigenvalue_estimate(0.995, 0.01, &m, OperatorKind::Roseland),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            laplacian_eigenvalue_estimate(0.995, 0.01, &m, OperatorKind::Dm),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn eigenvalue_estimate_is_monotone_and_non_negative() {
        let m = kernel_moment(Kernel::Gaussian, 2).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=100 {
            let v = i as f64 / 100.0;
            for kind in [OperatorKind::Roseland, OperatorKind::Dm] {
                assert!(laplacian_eigenvalue_estimate(v, 0.1, &m, kind) >= 0.0);
            }
            let e = laplacian_eigenvalue_estimate(v, 0.1, &m, OperatorKind::Roseland);
            assert!(e <= prev);
            prev = e;
        }
        assert_eq!(
            laplacian_eigenvalue_estimate(1.0 + 1e-9, 0.1, &m, OperatorKind::Dm),
            0.0
        );
    }
}
