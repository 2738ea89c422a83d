use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{integrate_2d, QuadOptions};
use crate::rng::Rng;

/// Test functions for the grid-sampling experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `f(x, y) = x y` with `x, y ~ U[0, 6]`.
    Product,
    /// `f(x, y) = 100 exp(-100 [(y - 1/2)^2 + (x - y)^2])` with `x, y ~ U[0, 1]`.
    Bump,
}

impl TestFunction {
    pub fn upper(&self) -> f64 {
        match self {
            TestFunction::Product => 6.0,
            TestFunction::Bump => 1.0,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            TestFunction::Product => x * y,
            TestFunction::Bump => 100.0 * (-100.0 * ((y - 0.5).powi(2) + (x - y).powi(2))).exp(),
        }
    }

    /// `E f(X, Y)` for independent uniforms.
    pub fn expectation(&self) -> Result<f64> {
        match self {
            TestFunction::Product => Ok(9.0),
            TestFunction::Bump => integrate_2d(
                |x, y| self.eval(x, y),
                (0.0, 1.0),
                (0.0, 1.0),
                QuadOptions {
                    abs_tol: 1e-10,
                    rel_tol: 1e-10,
                    max_intervals: 20_000,
                },
            ),
        }
    }
}

/// Errors of the three estimators at one `N`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    /// Mean absolute relative error of the mean over `M` i.i.d. pairs.
    pub iid_m: f64,
    /// Same for `N` i.i.d. pairs.
    pub iid_n: f64,
    /// Same for the `N x M` grid average.
    pub grid: f64,
    /// Signed mean relative error of the grid estimator and its standard error.
    pub grid_bias: f64,
    pub grid_bias_se: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub function: TestFunction,
    pub expectation: f64,
    pub rows: Vec<ConcentrationRow>,
}

/// Monte-Carlo comparison of grid sampling with i.i.d. sampling. For every
/// `N` in `ns`, `M = round(sqrt(N))`; each trial draws `x_1..x_N` and
/// `y_1..y_M` for the grid average, `N` further `y` values for the i.i.d.-`N`
/// pairs, and uses the first `M` pairs `(x_i, y_i)` for the i.i.d.-`M` mean.
pub fn grid_concentration_experiment(
    f: TestFunction,
    ns: &[usize],
    trials: usize,
    rng: &Rng,
) -> Result<ConcentrationTable> {
    let expectation = f.expectation()?;
    let u = f.upper();
    let rows = ns
        .iter()
        .enumerate()
        .map(|(row, &n)| {
            let m = ((n as f64).sqrt().round() as usize).max(1);
            let per_trial: Vec<[f64; 3]> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut r = rng.split(row as u64).split(trial as u64);
                    let x: Vec<f64> = (0..n).map(|_| u * r.uniform()).collect();
                    let y: Vec<f64> = (0..m).map(|_| u * r.uniform()).collect();
                    let y_pair: Vec<f64> = (0..n).map(|_| u * r.uniform()).collect();
                    let iid_m = x.iter().zip(&y).map(|(a, b)| f.eval(*a, *b)).sum::<f64>() / m.min(n) as f64;
                    let iid_n = x.iter().zip(&y_pair).map(|(a, b)| f.eval(*a, *b)).sum::<f64>() / n as f64;
                    let grid = x
                        .iter()
                        .map(|a| y.iter().map(|b| f.eval(*a, *b)).sum::<f64>())
                        .sum::<f64>()
                        / (n * m) as f64;
                    [iid_m, iid_n, grid].map(|e| (e - expectation) / expectation)
                })
                .collect();
            let t = trials as f64;
            let mean_abs = |k: usize| per_trial.iter().map(|e| e[k].abs()).sum::<f64>() / t;
            let bias = per_trial.iter().map(|e| e[2]).sum::<f64>() / t;
            let var = per_trial.iter().map(|e| (e[2] - bias).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
            ConcentrationRow {
                n,
                m,
                trials,
                iid_m: mean_abs(0),
                iid_n: mean_abs(1),
                grid: mean_abs(2),
                grid_bias: bias,
                grid_bias_se: (var / t).sqrt(),
            }
        })
        .collect();
    Ok(ConcentrationTable {
        function: f,
        expectation,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bump_expectation_is_close_to_pi() {
        // reference from an independent adaptive cubature (scipy dblquad);
        // the whole-plane integral is pi and the square cuts off about 2e-6
        let e = TestFunction::Bump.expectation().unwrap();
        assert!((e - 3.141_590_852_502_692).abs() < 1e-8, "{e}");
        assert!(e < PI && PI - e < 1e-5);
    }

    #[test]
    fn grid_estimator_is_unbiased() {
        let t = grid_concentration_experiment(TestFunction::Product, &[400], 200, &Rng::new(3)).unwrap();
        let row = &t.rows[0];
        assert_eq!(row.m, 20);
        assert!(row.grid_bias.abs() <= 3.0 * row.grid_bias_se);
    }
}
