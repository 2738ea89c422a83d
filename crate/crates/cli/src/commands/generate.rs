use roseland::io::{matrix_write, MatrixFormat};

use super::generate_dataset;
use crate::args::{FileFormat, GenerateArgs, DATA_KEYS};
use crate::error::CliResult;
use crate::output::{out_dir, write_column};
use crate::settings::{resolve, Settings};

pub fn run(args: GenerateArgs, settings: &Settings) -> CliResult<()> {
    let mut keys = DATA_KEYS.to_vec();
    keys.extend(["seed", "format", "out"]);
    settings.check_keys(&keys)?;
    let seed = resolve(args.seed, settings, "seed", 0)?;
    let format = resolve(args.format, settings, "format", FileFormat::Csv)?;
    let data = generate_dataset(args.kind, &args.data, settings, seed)?;
    let dir = out_dir(args.out.or(settings.get("out")?))?;
    let (name, fmt) = match format {
        FileFormat::Csv => ("points.csv", MatrixFormat::Csv),
        FileFormat::Lmdf => ("points.lmdf", MatrixFormat::Bin),
    };
    matrix_write(&data.points, dir.join(name), fmt)?;
    write_column(&data.angles, &dir, "angles.csv")?;
    println!(
        "wrote {}x{} points to {} and {} angles",
        data.points.rows(),
        data.points.cols(),
        dir.join(name).display(),
        data.angles.len()
    );
    Ok(())
}
