use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_kronrod_15;
use crate::rng::Rng;

/// Number of cells of the grid the inverse CDF is tabulated on.
pub const CDF_KNOTS: usize = 10_000;

/// A sampling density on the circle `[0, 2 pi)`, given up to normalisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySpec {
    Uniform,
    /// `p(theta) ∝ 1 + a sin(theta)` with `|a| < 1`.
    Sinusoidal { a: f64 },
    /// Values on the uniform grid `2 pi k / len`, interpolated linearly and
    /// periodically.
    Tabulated { values: Vec<f64> },
    /// `q(theta) ∝ 1 / p(theta)^2` for the wrapped density `p`.
    InverseSquare(Box<DensitySpec>),
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec::Uniform
    }
}

impl DensitySpec {
    pub fn sinusoidal(a: f64) -> Self {
        DensitySpec::Sinusoidal { a }
    }

    /// Unnormalised value; `inner_norm` carries the normalising constant of
    /// a wrapped density for the inverse-square case.
    fn raw(&self, theta: f64, inner_norm: f64) -> f64 {
        match self {
            DensitySpec::Uniform => 1.0,
            DensitySpec::Sinusoidal { a } => 1.0 + a * theta.sin(),
            DensitySpec::Tabulated { values } => {
                let len = values.len();
                let x = theta.rem_euclid(TAU) / TAU * len as f64;
                let k = (x.floor() as usize).min(len - 1);
                let frac = x - k as f64;
                values[k] * (1.0 - frac) + values[(k + 1) % len] * frac
            }
            DensitySpec::InverseSquare(inner) => {
                let p = inner.raw(theta, 1.0) / inner_norm;
                1.0 / (p * p)
            }
        }
    }

    fn check_parameters(&self) -> Result<()> {
        match self {
            DensitySpec::Uniform => Ok(()),
            DensitySpec::Sinusoidal { a } => {
                if a.is_finite() && a.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Density(format!(
                        "sinusoidal amplitude must satisfy |a| < 1, got {a}"
                    )))
                }
            }
            DensitySpec::Tabulated { values } => {
                if values.len() < 2 {
                    return Err(Error::Density("a tabulated density needs at least 2 values".into()));
                }
                if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                    return Err(Error::Density(format!("tabulated density has invalid value {v}")));
                }
                Ok(())
            }
            DensitySpec::InverseSquare(inner) => inner.check_parameters(),
        }
    }

    /// Validates the density and tabulates its CDF.
    pub fn compile(&self) -> Result<Density> {
        self.check_parameters()?;
        let inner_norm = match self {
            DensitySpec::InverseSquare(inner) => {
                let d = inner.compile()?;
                if !(d.infimum() > 0.0) {
                    return Err(Error::Density(
                        "cannot invert a density that touches zero".into(),
                    ));
                }
                d.norm
            }
            _ => 1.0,
        };
        let h = TAU / CDF_KNOTS as f64;
        let mut cdf = Vec::with_capacity(CDF_KNOTS + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        let mut min_value = f64::INFINITY;
        for c in 0..CDF_KNOTS {
            let a = c as f64 * h;
            let v = self.raw(a, inner_norm);
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Density(format!("density is {v} at angle {a}")));
            }
            min_value = min_value.min(v);
            let (cell, _) = gauss_kronrod_15(|t| self.raw(t, inner_norm), a, a + h);
            acc += cell.max(0.0);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Density("density has no mass".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(Density {
            spec: self.clone(),
            norm: acc,
            inner_norm,
            min_raw: min_value,
            cdf,
        })
    }
}

/// A validated density with its tabulated CDF.
#[derive(Clone, Debug)]
pub struct Density {
    spec: DensitySpec,
    norm: f64,
    inner_norm: f64,
    min_raw: f64,
    cdf: Vec<f64>,
}

impl Density {
    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    /// Normalised pdf with respect to `d theta`; integrates to one over the
    /// circle.
    pub fn pdf(&self, theta: f64) -> f64 {
        self.spec.raw(theta, self.inner_norm) / self.norm
    }

    /// Smallest normalised value on the CDF grid.
    pub fn infimum(&self) -> f64 {
        self.min_raw / self.norm
    }

    /// Probability mass of `[a, b]` with `0 <= a <= b <= 2 pi`, read from
    /// the tabulated CDF.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.cdf_at(b) - self.cdf_at(a)
    }

    fn cdf_at(&self, theta: f64) -> f64 {
        let h = TAU / CDF_KNOTS as f64;
        let x = (theta / h).clamp(0.0, CDF_KNOTS as f64);
        let c = (x.floor() as usize).min(CDF_KNOTS - 1);
        let frac = x - c as f64;
        self.cdf[c] + frac * (self.cdf[c + 1] - self.cdf[c])
    }

    /// One angle by inverse-CDF lookup (direct for the uniform density).
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let u = rng.uniform();
        if self.spec == DensitySpec::Uniform {
            return TAU * u;
        }
        let c = self.cdf.partition_point(|&v| v <= u).clamp(1, CDF_KNOTS) - 1;
        let (lo, hi) = (self.cdf[c], self.cdf[c + 1]);
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.5 };
        let h = TAU / CDF_KNOTS as f64;
        ((c as f64 + frac) * h).min(TAU.next_down())
    }
}

/// Landmark density `q ∝ 1 / p^2` for data density `p`.
pub fn design_landmark_density(data_density: &DensitySpec) -> Result<DensitySpec> {
    let d = data_density.compile()?;
    if !(d.infimum() > 0.0) {
        return Err(Error::Density("data density touches zero".into()));
    }
    let designed = DensitySpec::InverseSquare(Box::new(data_density.clone()));
    designed.compile()?;
    Ok(designed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sinusoidal_is_normalised() {
        let d = DensitySpec::sinusoidal(0.5).compile().unwrap();
        assert_relative_eq!(d.pdf(0.0), 1.0 / TAU, max_relative = 1e-10);
        assert_relative_eq!(d.pdf(std::f64::consts::FRAC_PI_2), 1.5 / TAU, max_relative = 1e-10);
        assert_relative_eq!(d.mass(0.0, TAU), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_square_closed_form_normaliser() {
        // int_0^{2pi} (1 + a sin)^-2 = 2 pi / (1 - a^2)^{3/2}
        let a: f64 = 0.5;
        let q = design_landmark_density(&DensitySpec::sinusoidal(a)).unwrap().compile().unwrap();
        let expected = (1.0 - a * a).powf(1.5) / TAU;
        assert_relative_eq!(q.pdf(0.0), expected, max_relative = 1e-9);
        let ratio = q.pdf(std::f64::consts::FRAC_PI_2) / q.pdf(3.0 * std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(ratio, 1.0 / 9.0, max_relative = 1e-12);
    }

    #[test]
    fn uniform_design_is_uniform() {
        let q = design_landmark_density(&DensitySpec::Uniform).unwrap().compile().unwrap();
        for k in 0..50 {
            assert_relative_eq!(q.pdf(k as f64 * 0.1), 1.0 / TAU, max_relative = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_densities() {
        assert!(matches!(DensitySpec::sinusoidal(1.0).compile(), Err(Error::Density(_))));
        assert!(matches!(
            DensitySpec::Tabulated { values: vec![1.0, -0.1, 2.0] }.compile(),
            Err(Error::Density(_))
        ));
        assert!(matches!(
            DensitySpec::Tabulated { values: vec![0.0, 0.0] }.compile(),
            Err(Error::Density(_))
        ));
        let touching = DensitySpec::Tabulated { values: vec![0.0, 1.0, 2.0, 1.0] };
        assert!(touching.compile().is_ok());
        assert!(matches!(design_landmark_density(&touching), Err(Error::Density(_))));
    }

    #[test]
    fn tabulated_interpolates_periodically() {
        let d = DensitySpec::Tabulated { values: vec![1.0, 3.0] }.compile().unwrap();
        // piecewise linear 1 -> 3 -> 1, mean value 2
        assert_relative_eq!(d.pdf(0.0), 1.0 / (2.0 * TAU), max_relative = 1e-8);
        assert_relative_eq!(d.pdf(std::f64::consts::PI), 3.0 / (2.0 * TAU), max_relative = 1e-8);
        assert_relative_eq!(d.pdf(TAU.next_down()), 1.0 / (2.0 * TAU), max_relative = 1e-6);
    }

    #[test]
    fn samples_stay_in_range() {
        let d = DensitySpec::sinusoidal(-0.9).compile().unwrap();
        let mut rng = Rng::new(4);
        for _ in 0..10_000 {
            let t = d.sample(&mut rng);
            assert!((0.0..TAU).contains(&t));
        }
    }
}
