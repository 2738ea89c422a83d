use roseland::bench::{run_scaling_bench, BenchDataset, BenchOptions, BenchReport};
use roseland::embed::DEFAULT_DM_CAP;
use roseland::{EmbedderConfig, Matrix, Method};

use super::{bandwidth, landmark_spec};
use crate::args::BenchArgs;
use crate::error::{CliError, CliResult};
use crate::output::{out_dir, write_csv, write_json, write_text};
use crate::settings::{layered, resolve, List, Settings};
use crate::svg;

const KEYS: &[&str] = &[
    "methods", "n-grid", "m", "beta", "dataset", "p", "repeats", "seed", "dm-cap", "epsilon", "epsilon-scale",
    "qprime", "plot", "out",
];

fn parse_list<T: std::str::FromStr>(flag: Option<&str>) -> CliResult<Option<List<T>>>
where
    T::Err: std::fmt::Display,
{
    flag.map(str::parse).transpose().map_err(CliError::Usage)
}

pub fn run(args: BenchArgs, settings: &Settings) -> CliResult<()> {
    settings.check_keys(KEYS)?;
    let methods: List<Method> = resolve(
        parse_list(args.methods.as_deref())?,
        settings,
        "methods",
        List(vec![Method::Roseland]),
    )?;
    let n_grid: List<usize> = resolve(
        parse_list(args.n_grid.as_deref())?,
        settings,
        "n-grid",
        List(vec![10_000, 20_000, 40_000, 80_000, 160_000, 320_000]),
    )?;
    let dataset_name = resolve(args.dataset, settings, "dataset", "circle".to_string())?;
    let dataset = match dataset_name.as_str() {
        "circle" => BenchDataset::Circle {
            p: resolve(args.p, settings, "p", 100)?,
        },
        "phantom" => BenchDataset::Phantom {
            p: resolve(args.p, settings, "p", 128)?,
        },
        other => return Err(CliError::Usage(format!("unknown bench dataset {other:?}"))),
    };
    if methods.0.is_empty() || n_grid.0.is_empty() {
        return Err(CliError::Usage("need at least one method and one n".into()));
    }
    let opts = BenchOptions {
        methods: methods.0,
        n_grid: n_grid.0,
        landmarks: landmark_spec(args.m, args.beta, settings, 0.3)?,
        dataset,
        repeats: resolve(args.repeats, settings, "repeats", 1)?,
        config: EmbedderConfig {
            bandwidth: bandwidth(args.epsilon, args.epsilon_scale, settings)?,
            embed_dim: resolve(args.qprime, settings, "qprime", 3)?,
            ..Default::default()
        },
        dm_cap: resolve(args.dm_cap, settings, "dm-cap", DEFAULT_DM_CAP)?,
        seed: resolve(args.seed, settings, "seed", 0)?,
    };
    let report = run_scaling_bench(&opts)?;
    let dir = out_dir(layered(args.out, settings, "out")?)?;
    write_csv(&numeric_table(&report)?, &dir, "bench.csv")?;
    write_json(&report, &dir, "bench.json")?;
    for &method in &opts.methods {
        match report.time_slope(method) {
            Some(s) => println!("{method}: log-log time slope {s:.3}"),
            None => println!("{method}: too few successful runs for a slope"),
        }
    }
    if args.plot || settings.flag("plot")? {
        let series: Vec<(String, Vec<(f64, f64)>)> = opts
            .methods
            .iter()
            .map(|&m| {
                let pts = report
                    .entries_for(m)
                    .filter_map(|e| e.seconds.map(|s| ((e.n as f64).ln(), s.ln())))
                    .collect();
                (m.to_string(), pts)
            })
            .collect();
        write_text(&svg::lines(&series, "runtime scaling", "ln n", "ln seconds"), &dir, "bench.svg")?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}

/// One row per entry: method code (position in roseland, dm, nystrom, hkc),
/// n, m, seconds, peak bytes, epsilon, seed. Refused or failed runs and
/// unmeasured memory are written as -1 so the file stays a finite matrix.
const REFUSED: f64 = -1.0;

fn numeric_table(report: &BenchReport) -> CliResult<Matrix> {
    let rows: Vec<[f64; 7]> = report
        .entries
        .iter()
        .map(|e| {
            [
                Method::ALL.iter().position(|&m| m == e.method).unwrap_or(0) as f64,
                e.n as f64,
                e.m as f64,
                e.seconds.unwrap_or(REFUSED),
                e.peak_bytes.map_or(REFUSED, |b| b as f64),
                e.epsilon.unwrap_or(REFUSED),
                e.seed as f64,
            ]
        })
        .collect();
    Ok(Matrix::from_rows(&rows)?)
}
