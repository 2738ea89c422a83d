use std::path::{Path, PathBuf};

use roseland::config::resolve_landmark_count;
use roseland::datasets::{pick_landmarks, LandmarkSource};
use roseland::embed::{dm_embed_capped, nystrom_embed, nystrom_embed_external, DEFAULT_DM_CAP};
use roseland::{hkc_embed, roseland_embed, EmbedderConfig, EmbeddingResult, Method, Rng};
use serde::{Deserialize, Serialize};

use super::{bandwidth, generate_dataset, landmark_spec};
use crate::args::{DatasetKind, EmbedArgs, DATA_KEYS};
use crate::error::{CliError, CliResult};
use crate::output::{out_dir, read_column, read_input, write_column, write_csv, write_json, write_text};
use crate::settings::{layered, resolve, Settings};
use crate::svg;

/// Metadata written next to every embedding.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMetadata {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub diffusion_time: f64,
    pub embed_dim: usize,
    pub seed: u64,
    pub elapsed: f64,
    pub data: String,
    pub landmarks: String,
}

impl RunMetadata {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join("run.json");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Lib(roseland::Error::Format(format!("{}: {e}", path.display()))))
    }
}

const KEYS: &[&str] = &[
    "method", "data", "dataset", "landmarks", "m", "beta", "epsilon", "epsilon-scale", "t", "qprime", "seed",
    "dm-cap", "labels", "plot", "out",
];

pub fn run(args: EmbedArgs, settings: &Settings) -> CliResult<()> {
    let mut keys = KEYS.to_vec();
    keys.extend(DATA_KEYS);
    settings.check_keys(&keys)?;
    let method: Method = resolve(args.method, settings, "method", "roseland".to_string())?.parse()?;
    let seed = resolve(args.seed, settings, "seed", 0)?;
    let cfg = EmbedderConfig {
        bandwidth: bandwidth(args.epsilon, args.epsilon_scale, settings)?,
        diffusion_time: resolve(args.t, settings, "t", 1.0)?,
        embed_dim: resolve(args.qprime, settings, "qprime", 3)?,
        landmarks: landmark_spec(args.m, args.beta, settings, 0.5)?,
        ..Default::default()
    };
    cfg.validate()?;

    let data_path: Option<PathBuf> = layered(args.data, settings, "data")?;
    let (data, mut labels, data_desc) = match &data_path {
        Some(p) => (read_input(p, "data")?, None, p.display().to_string()),
        None => {
            let kind = resolve(args.dataset, settings, "dataset", DatasetKind::Circle)?;
            let g = generate_dataset(kind, &args.params, settings, seed)?;
            (g.points, Some(g.angles), format!("generated {kind:?}"))
        }
    };
    if let Some(p) = layered::<PathBuf>(args.labels, settings, "labels")? {
        let l = read_column(&p, "labels")?;
        if l.len() != data.rows() {
            return Err(CliError::Usage(format!("{} labels for {} points", l.len(), data.rows())));
        }
        labels = Some(l);
    }

    let landmark_path: Option<PathBuf> = layered(args.landmarks, settings, "landmarks")?;
    let mut landmark_desc = String::from("none");
    let mut indices_out = None;
    let result: EmbeddingResult = if method == Method::Dm {
        let cap = resolve(args.dm_cap, settings, "dm-cap", DEFAULT_DM_CAP)?;
        dm_embed_capped(&data, &cfg, cap)?
    } else if let Some(p) = &landmark_path {
        let lm = read_input(p, "landmark")?;
        landmark_desc = p.display().to_string();
        match method {
            Method::Roseland => roseland_embed(&data, &lm, &cfg)?,
            Method::Hkc => hkc_embed(&data, &lm, &cfg)?,
            _ => nystrom_embed_external(&data, &lm, &cfg)?,
        }
    } else {
        let m = resolve_landmark_count(data.rows(), cfg.landmarks)?;
        let lm = pick_landmarks(LandmarkSource::RandomSubset(&data), m, &mut Rng::new(seed).split(7))?;
        landmark_desc = format!("random subset of {m} rows");
        let idx = lm.indices.clone().unwrap_or_default();
        let r = match method {
            Method::Roseland => roseland_embed(&data, &lm.points, &cfg)?,
            Method::Hkc => hkc_embed(&data, &lm.points, &cfg)?,
            _ => nystrom_embed(&data, &idx, &cfg)?,
        };
        indices_out = Some(idx);
        r
    };

    let dir = out_dir(layered(args.out, settings, "out")?)?;
    write_csv(&result.coords, &dir, "coords.csv")?;
    write_csv(&result.vectors, &dir, "vectors.csv")?;
    write_column(&result.spectrum, &dir, "spectrum.csv")?;
    if let Some(idx) = &indices_out {
        let as_f: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
        write_column(&as_f, &dir, "landmark_indices.csv")?;
    }
    if data_path.is_none() {
        if let Some(a) = &labels {
            write_column(a, &dir, "angles.csv")?;
        }
    }
    let meta = RunMetadata {
        method,
        n: result.n(),
        m: result.landmarks,
        epsilon: result.epsilon,
        diffusion_time: result.diffusion_time,
        embed_dim: result.embed_dim(),
        seed,
        elapsed: result.elapsed,
        data: data_desc,
        landmarks: landmark_desc,
    };
    write_json(&meta, &dir, "run.json")?;
    if args.plot || settings.flag("plot")? {
        write_text(&scatter_svg(&result, labels.as_deref()), &dir, "embedding.svg")?;
    }
    println!(
        "{} embedding of {} points with m = {}, epsilon = {:.6}: {:.3}s, wrote {}",
        method,
        meta.n,
        meta.m,
        meta.epsilon,
        meta.elapsed,
        dir.display()
    );
    Ok(())
}

/// 2-D scatter of the first two coordinates, or an oblique projection of the
/// first three.
fn scatter_svg(r: &EmbeddingResult, labels: Option<&[f64]>) -> String {
    let c = &r.coords;
    let pts: Vec<(f64, f64)> = (0..c.rows())
        .map(|i| {
            let x = c.get(i, 0);
            let y = if c.cols() > 1 { c.get(i, 1) } else { 0.0 };
            if c.cols() > 2 {
                let z = c.get(i, 2);
                (x + 0.45 * z, y + 0.3 * z)
            } else {
                (x, y)
            }
        })
        .collect();
    let title = format!("{} embedding (n = {}, m = {})", r.method, r.n(), r.landmarks);
    svg::scatter(&pts, labels, &title, "coordinate 1", "coordinate 2")
}
