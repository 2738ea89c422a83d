use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use roseland::embed::{eigenvalue_estimates, operator_kind, portegies_scale};
use roseland::eval::{
    align_and_score_vectors, circle_eigenvalue, circle_ground_truth, circular_rank_correlation,
    coefficient_of_variation, geodesic_recovery_errors, grid_concentration_experiment, phase_amplitude,
    NeighborMode, TestFunction,
};
use roseland::io::read_vector;
use roseland::kernels::{kernel_moment, Kernel};
use roseland::{EmbeddingResult, Matrix, Rng};
use serde::Serialize;

use super::embed::RunMetadata;
use crate::args::{EvalArgs, EvalKind, TestFn};
use crate::error::{CliError, CliResult};
use crate::output::{columns, out_dir, read_column, read_input, write_csv, write_json, write_text};
use crate::settings::{layered, resolve, List, Settings};
use crate::svg;

const KEYS: &[&str] = &[
    "run", "angles", "k-max", "neighbors", "scaling-time", "true-eigenvalues", "function", "n", "trials", "seed",
    "plot", "out",
];

pub fn run(args: EvalArgs, settings: &Settings) -> CliResult<()> {
    settings.check_keys(KEYS)?;
    let dir = out_dir(layered(args.out.clone(), settings, "out")?)?;
    let plot = args.plot || settings.flag("plot")?;
    match args.kind {
        EvalKind::Gridconc => gridconc(&args, settings, &dir, plot),
        kind => {
            let run_dir: PathBuf = layered(args.run.clone(), settings, "run")?
                .ok_or_else(|| CliError::MissingInput("--run <embedding directory> is required".into()))?;
            let loaded = load_run(&run_dir)?;
            let angles = load_angles(args.angles.clone(), settings, &run_dir, loaded.vectors.rows())?;
            match kind {
                EvalKind::Eigen => eigen(&args, settings, &loaded, &angles, &dir),
                EvalKind::Phase => phase(&loaded, &angles, &dir, plot),
                _ => geodesic(&args, settings, &loaded, &angles, &dir, plot),
            }
        }
    }
}

/// The parts of an embedding run the evaluations need.
struct Loaded {
    meta: RunMetadata,
    vectors: Matrix,
    spectrum: Vec<f64>,
}

fn load_run(dir: &Path) -> CliResult<Loaded> {
    let meta = RunMetadata::load(dir)?;
    let vectors = read_input(&dir.join("vectors.csv"), "eigenvector")?;
    let spec_path = dir.join("spectrum.csv");
    if !spec_path.exists() {
        return Err(CliError::MissingInput(format!("{} not found", spec_path.display())));
    }
    let spectrum = read_vector(spec_path)?;
    if spectrum.len() != vectors.cols() {
        return Err(CliError::Usage(format!(
            "{} spectral values for {} eigenvectors",
            spectrum.len(),
            vectors.cols()
        )));
    }
    Ok(Loaded { meta, vectors, spectrum })
}

/// `--angles`, else the run's own `angles.csv`; circle metrics need one.
fn load_angles(flag: Option<PathBuf>, settings: &Settings, run_dir: &Path, n: usize) -> CliResult<Vec<f64>> {
    let path = match layered(flag, settings, "angles")? {
        Some(p) => p,
        None => {
            let p = run_dir.join("angles.csv");
            if !p.exists() {
                return Err(CliError::MissingInput(
                    "ground-truth angles are required (--angles or angles.csv in the run directory)".into(),
                ));
            }
            p
        }
    };
    let angles = read_column(&path, "angles")?;
    if angles.len() != n {
        return Err(CliError::Usage(format!("{} angles for {n} embedded points", angles.len())));
    }
    Ok(angles)
}

#[derive(Serialize)]
struct EigenOutput {
    method: String,
    epsilon: f64,
    truth_eigenvalues: Vec<f64>,
    #[serde(flatten)]
    report: roseland::eval::EigenReport,
}

fn eigen(args: &EvalArgs, settings: &Settings, run: &Loaded, angles: &[f64], dir: &Path) -> CliResult<()> {
    let k_max = resolve(args.k_max, settings, "k-max", 9)?;
    let truth = circle_ground_truth(k_max, angles)?;
    let moment = kernel_moment(Kernel::Gaussian, 1)?;
    let report = align_and_score_vectors(
        &run.vectors,
        &run.spectrum,
        &truth,
        run.meta.epsilon,
        &moment,
        operator_kind(run.meta.method),
    )?;
    let count = report.eigenvalue_errors.len();
    let index: Vec<f64> = (0..count).map(|j| j as f64).collect();
    let lambda: Vec<f64> = truth.eigenvalues[..count].to_vec();
    let table = columns(&[
        &index,
        &lambda,
        &report.eigenvalue_estimates,
        &report.eigenvalue_errors,
        &report.l2_errors,
        &report.linf_errors,
    ])?;
    write_csv(&table, dir, "eigen.csv")?;
    write_json(
        &EigenOutput {
            method: run.meta.method.to_string(),
            epsilon: run.meta.epsilon,
            truth_eigenvalues: lambda,
            report,
        },
        dir,
        "eigen.json",
    )?;
    println!("scored {count} eigenpairs against the circle truth; wrote {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct PhaseOutput {
    circular_rank_correlation: f64,
    amplitude_cv: f64,
}

fn phase(run: &Loaded, angles: &[f64], dir: &Path, plot: bool) -> CliResult<()> {
    if run.vectors.cols() < 3 {
        return Err(CliError::Usage("phase needs at least two non-trivial eigenvectors".into()));
    }
    let pa = phase_amplitude(&run.vectors.column(1), &run.vectors.column(2), angles)?;
    let out = PhaseOutput {
        circular_rank_correlation: circular_rank_correlation(&pa.phase, &pa.angles)?,
        amplitude_cv: coefficient_of_variation(&pa.amplitude),
    };
    write_csv(&columns(&[&pa.angles, &pa.phase, &pa.amplitude])?, dir, "phase.csv")?;
    write_json(&out, dir, "phase.json")?;
    if plot {
        let pts: Vec<(f64, f64)> = pa.angles.iter().copied().zip(pa.phase.iter().copied()).collect();
        write_text(
            &svg::scatter(&pts, Some(&pa.amplitude), "phase against true angle", "true angle", "phase"),
            dir,
            "phase.svg",
        )?;
    }
    println!(
        "phase correlation {:.4}, amplitude CV {:.4}; wrote {}",
        out.circular_rank_correlation,
        out.amplitude_cv,
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct GeodesicOutput {
    scaling_time: f64,
    true_eigenvalues: bool,
    pooled_median: f64,
    ks: Vec<usize>,
    medians: Vec<f64>,
    q25: Vec<f64>,
    q75: Vec<f64>,
    q90: Vec<f64>,
}

fn geodesic(
    args: &EvalArgs,
    settings: &Settings,
    run: &Loaded,
    angles: &[f64],
    dir: &Path,
    plot: bool,
) -> CliResult<()> {
    let max_k = resolve(args.neighbors, settings, "neighbors", 50)?;
    let time = resolve(args.scaling_time, settings, "scaling-time", 0.1)?;
    let use_truth = args.true_eigenvalues || settings.flag("true-eigenvalues")?;
    let q = run.vectors.cols().saturating_sub(1);
    if q == 0 {
        return Err(CliError::Usage("geodesic needs at least one non-trivial eigenvector".into()));
    }
    let r = EmbeddingResult {
        coords: Matrix::zeros(run.vectors.rows(), q),
        vectors: run.vectors.clone(),
        spectrum: run.spectrum.clone(),
        degrees: Vec::new(),
        method: run.meta.method,
        epsilon: run.meta.epsilon,
        diffusion_time: run.meta.diffusion_time,
        landmarks: run.meta.m,
        elapsed: 0.0,
    };
    let eigenvalues: Vec<f64> = if use_truth {
        (1..=q).map(circle_eigenvalue).collect()
    } else {
        eigenvalue_estimates(&r, &kernel_moment(Kernel::Gaussian, 1)?)
    };
    let scaled = portegies_scale(&r, &eigenvalues, time, 1, TAU)?;
    let ks: Vec<usize> = (1..=max_k).collect();
    let errs = geodesic_recovery_errors(&scaled.coords, angles, &ks, NeighborMode::Geodesic)?;
    let out = GeodesicOutput {
        scaling_time: time,
        true_eigenvalues: use_truth,
        pooled_median: errs.pooled_median(),
        medians: errs.medians(),
        q25: errs.quantiles(0.25),
        q75: errs.quantiles(0.75),
        q90: errs.quantiles(0.9),
        ks,
    };
    let kf: Vec<f64> = out.ks.iter().map(|&k| k as f64).collect();
    write_csv(&columns(&[&kf, &out.medians, &out.q25, &out.q75, &out.q90])?, dir, "geodesic.csv")?;
    write_json(&out, dir, "geodesic.json")?;
    if plot {
        let series = vec![
            ("median".to_string(), kf.iter().copied().zip(out.medians.iter().copied()).collect()),
            ("90% quantile".to_string(), kf.iter().copied().zip(out.q90.iter().copied()).collect()),
        ];
        write_text(
            &svg::lines(&series, "relative geodesic error", "neighbour rank K", "relative error"),
            dir,
            "geodesic.svg",
        )?;
    }
    println!("pooled median geodesic error {:.4}; wrote {}", out.pooled_median, dir.display());
    Ok(())
}

fn gridconc(args: &EvalArgs, settings: &Settings, dir: &Path, plot: bool) -> CliResult<()> {
    let f = match resolve(args.function, settings, "function", TestFn::Xy)? {
        TestFn::Xy => TestFunction::Product,
        TestFn::Bump => TestFunction::Bump,
    };
    let ns: List<usize> = resolve(
        args.n.as_deref().map(str::parse).transpose().map_err(CliError::Usage)?,
        settings,
        "n",
        List(vec![10_000]),
    )?;
    if ns.0.is_empty() || ns.0.contains(&0) {
        return Err(CliError::Usage("--n needs positive sample sizes".into()));
    }
    let trials = resolve(args.trials, settings, "trials", 100)?;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = resolve(args.seed, settings, "seed", 0)?;
    let table = grid_concentration_experiment(f, &ns.0, trials, &Rng::new(seed))?;
    let col = |g: fn(&roseland::eval::ConcentrationRow) -> f64| table.rows.iter().map(g).collect::<Vec<f64>>();
    let (n, m, t) = (col(|r| r.n as f64), col(|r| r.m as f64), col(|r| r.trials as f64));
    let (iid_m, iid_n, grid) = (col(|r| r.iid_m), col(|r| r.iid_n), col(|r| r.grid));
    let (bias, se) = (col(|r| r.grid_bias), col(|r| r.grid_bias_se));
    write_csv(&columns(&[&n, &m, &t, &iid_m, &iid_n, &grid, &bias, &se])?, dir, "gridconc.csv")?;
    write_json(&table, dir, "gridconc.json")?;
    if plot {
        let logn: Vec<f64> = n.iter().map(|v| v.ln()).collect();
        let series = [("iid M", &iid_m), ("iid N", &iid_n), ("grid", &grid)]
            .iter()
            .map(|(name, v)| (name.to_string(), logn.iter().copied().zip(v.iter().map(|e| e.ln())).collect()))
            .collect::<Vec<_>>();
        write_text(&svg::lines(&series, "mean absolute error", "ln N", "ln error"), dir, "gridconc.svg")?;
    }
    for r in &table.rows {
        println!(
            "N = {} M = {}: iid-M {:.3e}, grid {:.3e}, iid-N {:.3e}",
            r.n, r.m, r.iid_m, r.grid, r.iid_n
        );
    }
    Ok(())
}
