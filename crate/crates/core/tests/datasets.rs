use std::f64::consts::{PI, TAU};

use roseland::datasets::{
    add_gaussian_noise, add_uniform_noise, design_landmark_density, default_noise_variance, phantom_radon_dataset,
    pick_landmarks, radon_projection, sample_angles, sample_circle, DensitySpec, LandmarkSource, PhantomSpec,
    CDF_KNOTS,
};
use roseland::quadrature::{integrate, QuadOptions};
use roseland::rng::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail p-value of Pearson's statistic for `angles` against bin
/// probabilities from `bin_mass`.
fn chi_square_p(angles: &[f64], bins: usize, bin_mass: impl Fn(f64, f64) -> f64) -> f64 {
    let mut counts = vec![0usize; bins];
    for &t in angles {
        counts[((t / TAU * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let n = angles.len() as f64;
    let h = TAU / bins as f64;
    let stat: f64 = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let e = n * bin_mass(k as f64 * h, (k + 1) as f64 * h);
            (c as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn uniform_angles_have_vanishing_cosine_mean() {
    let angles = sample_angles(100_000, &DensitySpec::Uniform, &mut Rng::new(1)).unwrap();
    let mean = angles.iter().map(|t| t.cos()).sum::<f64>() / angles.len() as f64;
    assert!(mean.abs() < 0.02);
    assert!(angles.iter().all(|t| (0.0..TAU).contains(t)));
}

#[test]
fn sinusoidal_histogram_fits_closed_form_pdf() {
    let a = 0.5;
    let angles = sample_angles(100_000, &DensitySpec::sinusoidal(a), &mut Rng::new(2)).unwrap();
    // int_lo^hi (1 + a sin t) / (2 pi) dt
    let p = chi_square_p(&angles, 36, |lo, hi| ((hi - lo) - a * (hi.cos() - lo.cos())) / TAU);
    assert!(p > 0.01, "p-value {p}");
}

#[test]
fn designed_landmarks_follow_inverse_square_density() {
    let a: f64 = 0.5;
    let q = design_landmark_density(&DensitySpec::sinusoidal(a)).unwrap();
    let lm = pick_landmarks(
        LandmarkSource::IidFromDensity {
            density: &q,
            ambient_dim: 2,
        },
        10_000,
        &mut Rng::new(3),
    )
    .unwrap();
    let norm = TAU / (1.0 - a * a).powf(1.5);
    let p = chi_square_p(lm.angles.as_ref().unwrap(), 36, |lo, hi| {
        integrate(|t| (1.0 + a * t.sin()).powi(-2), lo, hi, QuadOptions::default()).unwrap() / norm
    });
    assert!(p > 0.01, "p-value {p}");
}

#[test]
fn designed_density_cancels_the_drift_term() {
    let pd = DensitySpec::sinusoidal(0.5).compile().unwrap();
    let qd = design_landmark_density(&DensitySpec::sinusoidal(0.5)).unwrap().compile().unwrap();
    let h = TAU / CDF_KNOTS as f64;
    let mut worst = 0.0f64;
    for k in 0..CDF_KNOTS {
        let t = k as f64 * h;
        let dp = (pd.pdf(t + h) - pd.pdf(t - h)) / (2.0 * h);
        let dq = (qd.pdf(t + h) - qd.pdf(t - h)) / (2.0 * h);
        worst = worst.max((2.0 * dp / pd.pdf(t) + dq / qd.pdf(t)).abs());
    }
    assert!(worst <= 1e-3, "{worst}");
}

#[test]
fn default_noise_has_variance_inverse_root_p() {
    let p = 100;
    let s = sample_circle(100_000, &DensitySpec::Uniform, p, &mut Rng::new(4)).unwrap();
    let sigma_sq = default_noise_variance(p);
    assert_eq!(sigma_sq, 0.1);
    let noisy = add_gaussian_noise(&s.points, sigma_sq, &Rng::new(5)).unwrap();
    let n = s.points.rows() as f64;
    let mut energy = 0.0;
    for c in [0, 1, 2, 50, 99] {
        let diffs: Vec<f64> = (0..s.points.rows())
            .map(|i| noisy.get(i, c) - s.points.get(i, c))
            .collect();
        let mean = diffs.iter().sum::<f64>() / n;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 0.1).abs() <= 0.005, "column {c}: {var}");
    }
    for i in 0..s.points.rows() {
        energy += (0..p).map(|c| (noisy.get(i, c) - s.points.get(i, c)).powi(2)).sum::<f64>();
    }
    assert!((energy / n - 10.0).abs() < 0.1);
}

#[test]
fn uniform_noise_matches_variance_and_is_bounded() {
    let s = sample_circle(20_000, &DensitySpec::Uniform, 10, &mut Rng::new(6)).unwrap();
    let noisy = add_uniform_noise(&s.points, 0.1, &Rng::new(7)).unwrap();
    let half = (0.3f64).sqrt();
    let diffs: Vec<f64> = noisy
        .as_slice()
        .iter()
        .zip(s.points.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    assert!(diffs.iter().all(|d| d.abs() <= half));
    let var = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
    assert!((var - 0.1).abs() < 0.003);
}

#[test]
fn generators_are_pure_functions_of_seed() {
    let a = sample_circle(500, &DensitySpec::sinusoidal(0.3), 5, &mut Rng::new(9)).unwrap();
    let b = sample_circle(500, &DensitySpec::sinusoidal(0.3), 5, &mut Rng::new(9)).unwrap();
    assert_eq!(a.angles, b.angles);
    let na = add_gaussian_noise(&a.points, 0.2, &Rng::new(1)).unwrap();
    let nb = add_gaussian_noise(&b.points, 0.2, &Rng::new(1)).unwrap();
    assert_eq!(na, nb);
    let spec = PhantomSpec::modified_shepp_logan(32).unwrap();
    let pa = phantom_radon_dataset(50, &spec, &mut Rng::new(2)).unwrap();
    let pb = phantom_radon_dataset(50, &spec, &mut Rng::new(2)).unwrap();
    assert_eq!(pa.1, pb.1);
}

#[test]
fn phantom_rows_match_numeric_line_integrals() {
    for spec in [PhantomSpec::shepp_logan(128).unwrap(), PhantomSpec::modified_shepp_logan(128).unwrap()] {
        let samples = 200_000;
        let h = 2.0 / samples as f64;
        for k in 0..4 {
            let theta = 0.37 + k as f64 * 1.51;
            let (c, s) = (theta.cos(), theta.sin());
            let row = radon_projection(&spec, theta);
            for (o, &offset) in spec.offsets().iter().enumerate().step_by(3) {
                let numeric: f64 = (0..samples)
                    .map(|i| {
                        let u = -1.0 + (i as f64 + 0.5) * h;
                        spec.intensity(offset * c - u * s, offset * s + u * c)
                    })
                    .sum::<f64>()
                    * h;
                assert!((numeric - row[o]).abs() <= 1e-4, "theta {theta} s {offset}: {numeric} vs {}", row[o]);
            }
        }
    }
}

#[test]
fn phantom_rows_are_non_negative() {
    let spec = PhantomSpec::modified_shepp_logan(128).unwrap();
    let (angles, x) = phantom_radon_dataset(200, &spec, &mut Rng::new(11)).unwrap();
    assert_eq!(x.shape(), (200, 128));
    assert!(angles.iter().all(|t| (0.0..TAU).contains(t)));
    assert!(x.as_slice().iter().all(|v| *v >= -1e-12));
    // a projection and its antipode are mirror images
    let a = radon_projection(&spec, 0.8);
    let b = radon_projection(&spec, 0.8 + PI);
    for (u, v) in a.iter().zip(b.iter().rev()) {
        assert!((u - v).abs() < 1e-12);
    }
}
