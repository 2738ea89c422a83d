pub mod bench;
pub mod embed;
pub mod eval;
pub mod generate;
pub mod landmark;

use roseland::datasets::{
    add_gaussian_noise, default_noise_variance, phantom_radon_dataset, sample_circle, DensitySpec, PhantomSpec,
};
use roseland::{Bandwidth, Matrix, Rng};

use crate::args::{DataParams, DatasetKind, PhantomTable};
use crate::error::{CliError, CliResult};
use crate::settings::{layered, resolve, Settings};

/// A synthetic dataset and the circle angle of every row.
pub struct Generated {
    pub points: Matrix,
    pub angles: Vec<f64>,
}

pub fn generate_dataset(kind: DatasetKind, params: &DataParams, settings: &Settings, seed: u64) -> CliResult<Generated> {
    let n = resolve(params.n, settings, "n", 2500)?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let default_p = match kind {
        DatasetKind::Circle => 2,
        DatasetKind::CircleNoisy => 100,
        DatasetKind::Phantom => 128,
    };
    let p = resolve(params.p, settings, "p", default_p)?;
    let mut rng = Rng::new(seed);
    match kind {
        DatasetKind::Circle | DatasetKind::CircleNoisy => {
            let a = resolve(params.density_a, settings, "density-a", 0.0)?;
            let density = if a == 0.0 { DensitySpec::Uniform } else { DensitySpec::sinusoidal(a) };
            let s = sample_circle(n, &density, p, &mut rng)?;
            let points = if kind == DatasetKind::CircleNoisy {
                let var = resolve(params.noise_var, settings, "noise-var", default_noise_variance(p))?;
                add_gaussian_noise(&s.points, var, &rng.split(1))?
            } else {
                s.points
            };
            Ok(Generated { points, angles: s.angles })
        }
        DatasetKind::Phantom => {
            let spec = match resolve(params.phantom, settings, "phantom", PhantomTable::Modified)? {
                PhantomTable::Modified => PhantomSpec::modified_shepp_logan(p)?,
                PhantomTable::Original => PhantomSpec::shepp_logan(p)?,
            };
            let (angles, points) = phantom_radon_dataset(n, &spec, &mut rng)?;
            Ok(Generated { points, angles })
        }
    }
}

/// `--epsilon` beats `--epsilon-scale` only at the same precedence level.
pub fn bandwidth(epsilon: Option<f64>, scale: Option<f64>, settings: &Settings) -> CliResult<Bandwidth> {
    Ok(match (epsilon, scale) {
        (Some(e), _) => Bandwidth::Fixed(e),
        (None, Some(s)) => Bandwidth::MedianScaled(s),
        (None, None) => match (settings.get("epsilon")?, settings.get("epsilon-scale")?) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("config sets both epsilon and epsilon-scale".into()));
            }
            (Some(e), None) => Bandwidth::Fixed(e),
            (None, Some(s)) => Bandwidth::MedianScaled(s),
            (None, None) => Bandwidth::default(),
        },
    })
}

/// Landmark count from `--m` or `--beta` (flags first, then file).
pub fn landmark_spec(
    m: Option<usize>,
    beta: Option<f64>,
    settings: &Settings,
    default_beta: f64,
) -> CliResult<roseland::LandmarkSpec> {
    use roseland::LandmarkSpec;
    Ok(match (m, beta) {
        (Some(m), _) => LandmarkSpec::Count(m),
        (None, Some(b)) => LandmarkSpec::Exponent(b),
        (None, None) => match (layered::<usize>(None, settings, "m")?, settings.get::<f64>("beta")?) {
            (Some(_), Some(_)) => return Err(CliError::Usage("config sets both m and beta".into())),
            (Some(m), None) => LandmarkSpec::Count(m),
            (None, Some(b)) => LandmarkSpec::Exponent(b),
            (None, None) => LandmarkSpec::Exponent(default_beta),
        },
    })
}
