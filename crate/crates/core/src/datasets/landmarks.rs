use rand::seq::index;

use super::circle::sample_circle;
use super::density::DensitySpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Where landmarks come from.
pub enum LandmarkSource<'a> {
    /// Uniformly without replacement from the rows of the data.
    RandomSubset(&'a Matrix),
    /// Fresh circle points with angles drawn from `density`.
    IidFromDensity {
        density: &'a DensitySpec,
        ambient_dim: usize,
    },
    /// Fresh draws from the process that generated the data.
    IndependentSample(&'a (dyn Fn(usize, &mut Rng) -> Result<Matrix> + Sync)),
}

#[derive(Clone, Debug)]
pub struct Landmarks {
    pub points: Matrix,
    /// Row indices into the data for subset landmarks.
    pub indices: Option<Vec<usize>>,
    /// Angles for landmarks drawn on the circle.
    pub angles: Option<Vec<f64>>,
}

pub fn pick_landmarks(source: LandmarkSource<'_>, m: usize, rng: &mut Rng) -> Result<Landmarks> {
    if m < 1 {
        return Err(Error::Config("need at least one landmark".into()));
    }
    match source {
        LandmarkSource::RandomSubset(data) => {
            let n = data.rows();
            if m > n {
                return Err(Error::Config(format!("cannot pick {m} landmarks from {n} points")));
            }
            let indices = index::sample(rng, n, m).into_vec();
            Ok(Landmarks {
                points: data.select_rows(&indices),
                indices: Some(indices),
                angles: None,
            })
        }
        LandmarkSource::IidFromDensity { density, ambient_dim } => {
            let s = sample_circle(m, density, ambient_dim, rng)?;
            Ok(Landmarks {
                points: s.points,
                indices: None,
                angles: Some(s.angles),
            })
        }
        LandmarkSource::IndependentSample(generate) => {
            let points = generate(m, rng)?;
            if points.rows() != m {
                return Err(Error::Dim(format!(
                    "landmark generator returned {} points, wanted {m}",
                    points.rows()
                )));
            }
            Ok(Landmarks {
                points,
                indices: None,
                angles: None,
            })
        }
    }
}
