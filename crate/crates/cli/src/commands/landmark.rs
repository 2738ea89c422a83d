use std::f64::consts::TAU;

use roseland::affinity::{landmark_kernel_profile, profile_grid};
use roseland::datasets::{design_landmark_density, pick_landmarks, DensitySpec, LandmarkSource};
use roseland::kernels::Kernel;
use roseland::Rng;

use crate::args::{LandmarkArgs, LandmarkMode};
use crate::error::{CliError, CliResult};
use crate::output::{out_dir, read_input, write_column, write_csv, write_text};
use crate::settings::{layered, resolve, Settings};
use crate::svg;

const KEYS: &[&str] = &[
    "mode", "data", "density-a", "p", "m", "seed", "profile", "epsilon", "queries", "grid", "plot", "out",
];

pub fn run(args: LandmarkArgs, settings: &Settings) -> CliResult<()> {
    settings.check_keys(KEYS)?;
    let mode = resolve(args.mode, settings, "mode", LandmarkMode::Uniform)?;
    let m = resolve(args.m, settings, "m", 50)?;
    let seed = resolve(args.seed, settings, "seed", 0)?;
    let mut rng = Rng::new(seed);
    let p = resolve(args.p, settings, "p", 2)?;
    let landmarks = match mode {
        LandmarkMode::RandomSubset => {
            let path = layered::<std::path::PathBuf>(args.data, settings, "data")?
                .ok_or_else(|| CliError::MissingInput("random-subset mode needs --data".into()))?;
            let data = read_input(&path, "data")?;
            pick_landmarks(LandmarkSource::RandomSubset(&data), m, &mut rng)?
        }
        LandmarkMode::Designed | LandmarkMode::Uniform => {
            let density = if mode == LandmarkMode::Designed {
                let a = resolve(args.density_a, settings, "density-a", 0.5)?;
                design_landmark_density(&DensitySpec::sinusoidal(a))?
            } else {
                DensitySpec::Uniform
            };
            pick_landmarks(
                LandmarkSource::IidFromDensity {
                    density: &density,
                    ambient_dim: p,
                },
                m,
                &mut rng,
            )?
        }
    };
    let dir = out_dir(layered(args.out, settings, "out")?)?;
    write_csv(&landmarks.points, &dir, "landmarks.csv")?;
    if let Some(idx) = &landmarks.indices {
        let as_f: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
        write_column(&as_f, &dir, "landmark_indices.csv")?;
    }
    if let Some(angles) = &landmarks.angles {
        write_column(angles, &dir, "landmark_angles.csv")?;
    }
    if args.profile || settings.flag("profile")? {
        let angles = landmarks
            .angles
            .as_ref()
            .ok_or_else(|| CliError::Usage("--profile needs circle landmarks (designed or uniform mode)".into()))?;
        let epsilon = resolve(args.epsilon, settings, "epsilon", 0.05)?;
        let queries = resolve(args.queries, settings, "queries", 4)?;
        let grid = resolve(args.grid, settings, "grid", 400)?;
        let query_angles: Vec<f64> = (0..queries).map(|k| TAU * k as f64 / queries.max(1) as f64).collect();
        let profile = landmark_kernel_profile(angles, &query_angles, grid, epsilon, Kernel::Gaussian)?;
        write_csv(&profile, &dir, "profile.csv")?;
        write_column(&query_angles, &dir, "profile_queries.csv")?;
        if args.plot || settings.flag("plot")? {
            let g = profile_grid(grid);
            let series: Vec<(String, Vec<(f64, f64)>)> = (0..queries)
                .map(|q| {
                    let row = profile.row(q);
                    (format!("x = {:.3}", query_angles[q]), g.iter().copied().zip(row.iter().copied()).collect())
                })
                .collect();
            write_text(&svg::lines(&series, "landmark-kernel profile", "angle", "kernel value"), &dir, "profile.svg")?;
        }
    }
    println!("wrote {} landmarks to {}", landmarks.points.rows(), dir.display());
    Ok(())
}
