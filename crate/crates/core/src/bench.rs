//! Runtime and memory scaling harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::affinity::median;
use crate::alloc;
use crate::config::{resolve_landmark_count, EmbedderConfig, LandmarkSpec, Method};
use crate::datasets::{
    add_gaussian_noise, default_noise_variance, phantom_radon_dataset, pick_landmarks, sample_circle, DensitySpec,
    LandmarkSource, PhantomSpec,
};
use crate::embed::{embed, DEFAULT_DM_CAP};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchDataset {
    /// Uniform circle in `R^p` with per-coordinate noise variance `p^{-1/2}`.
    Circle { p: usize },
    /// Radon projections of the default phantom with `p` offsets.
    Phantom { p: usize },
}

impl BenchDataset {
    pub fn generate(&self, n: usize, rng: &mut Rng) -> Result<Matrix> {
        match *self {
            BenchDataset::Circle { p } => {
                let clean = sample_circle(n, &DensitySpec::Uniform, p, rng)?;
                add_gaussian_noise(&clean.points, default_noise_variance(p), &rng.split(1))
            }
            BenchDataset::Phantom { p } => Ok(phantom_radon_dataset(n, &PhantomSpec::modified_shepp_logan(p)?, rng)?.1),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchOptions {
    pub methods: Vec<Method>,
    /// Ascending sample sizes.
    pub n_grid: Vec<usize>,
    pub landmarks: LandmarkSpec,
    pub dataset: BenchDataset,
    pub repeats: usize,
    pub config: EmbedderConfig,
    /// Largest `n` the diffusion map is attempted on.
    pub dm_cap: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            methods: vec![Method::Roseland],
            n_grid: vec![10_000, 20_000, 40_000, 80_000, 160_000, 320_000],
            landmarks: LandmarkSpec::Exponent(0.3),
            dataset: BenchDataset::Circle { p: 100 },
            repeats: 1,
            config: EmbedderConfig::default(),
            dm_cap: DEFAULT_DM_CAP,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchEntry {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    /// Median wall seconds over repeats; `None` when the run was refused.
    pub seconds: Option<f64>,
    /// Peak heap growth during the embedding; `None` without the tracking
    /// allocator or when refused.
    pub peak_bytes: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchEnvironment {
    pub threads: usize,
    pub cpus: usize,
    pub os: String,
    pub arch: String,
}

impl BenchEnvironment {
    pub fn detect() -> Self {
        Self {
            threads: rayon::current_num_threads(),
            cpus: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub environment: BenchEnvironment,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    pub fn entries_for(&self, method: Method) -> impl Iterator<Item = &BenchEntry> {
        self.entries.iter().filter(move |e| e.method == method)
    }

    /// Least-squares slope of `log time` against `log n` over completed runs.
    pub fn time_slope(&self, method: Method) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .entries_for(method)
            .filter_map(|e| e.seconds.map(|s| ((e.n as f64).ln(), s.ln())))
            .unzip();
        loglog_fit(&x, &y).map(|(slope, _)| slope)
    }

    /// Largest ratio between measured peak memory and its linear fit in `n`
    /// (either direction), i.e. 1 for perfectly linear growth.
    pub fn memory_linearity(&self, method: Method) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .entries_for(method)
            .filter_map(|e| e.peak_bytes.map(|b| (e.n as f64, b as f64)))
            .unzip();
        let (b, a) = linear_fit(&x, &y)?;
        x.iter()
            .zip(&y)
            .map(|(xi, yi)| {
                let fit = a + b * xi;
                if fit <= 0.0 {
                    f64::INFINITY
                } else {
                    (yi / fit).max(fit / yi)
                }
            })
            .reduce(f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,n,m,seconds,peak_bytes,epsilon,seed,error\n");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.method.name(),
                e.n,
                e.m,
                opt(e.seconds.map(|v| v.to_string())),
                opt(e.peak_bytes.map(|v| v.to_string())),
                opt(e.epsilon.map(|v| v.to_string())),
                e.seed,
                e.error.clone().unwrap_or_default().replace(',', ";")
            ));
        }
        s
    }
}

/// Ordinary least squares `y = slope x + intercept`; `None` for fewer than
/// two distinct `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Same fit on already log-transformed values.
pub fn loglog_fit(log_x: &[f64], log_y: &[f64]) -> Option<(f64, f64)> {
    linear_fit(log_x, log_y)
}

/// Times each method on each `n`. Data generation and landmark selection are
/// excluded from the timing; refusals and numeric failures are recorded in
/// the entry instead of aborting the run.
pub fn run_scaling_bench(opts: &BenchOptions) -> Result<BenchReport> {
    if opts.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("n grid must be strictly ascending".into()));
    }
    if opts.repeats < 1 {
        return Err(Error::Config("need at least one repeat".into()));
    }
    opts.config.validate()?;
    let tracking = alloc::is_active();
    let base = Rng::new(opts.seed);
    let mut entries = Vec::new();
    for &n in &opts.n_grid {
        let mut rng = base.split(n as u64);
        let data = opts.dataset.generate(n, &mut rng)?;
        let m = resolve_landmark_count(n, opts.landmarks)?;
        let lm = pick_landmarks(LandmarkSource::RandomSubset(&data), m, &mut rng.split(2))?;
        for &method in &opts.methods {
            let mut entry = BenchEntry {
                method,
                n,
                m: if method == Method::Dm { n } else { m },
                seconds: None,
                peak_bytes: None,
                epsilon: None,
                seed: opts.seed,
                error: None,
            };
            if method == Method::Dm && n > opts.dm_cap {
                entry.error = Some(Error::Capacity(format!("diffusion map capped at n = {}", opts.dm_cap)).to_string());
                entries.push(entry);
                continue;
            }
            let mut times = Vec::with_capacity(opts.repeats);
            let mut peak = 0usize;
            for _ in 0..opts.repeats {
                let baseline = alloc::reset_peak();
                let start = Instant::now();
                let out = embed(method, &data, &lm.points, lm.indices.as_deref(), &opts.config);
                let secs = start.elapsed().as_secs_f64();
                peak = peak.max(alloc::peak_bytes().saturating_sub(baseline));
                match out {
                    Ok(r) => {
                        times.push(secs.max(f64::MIN_POSITIVE));
                        entry.epsilon = Some(r.epsilon);
                    }
                    Err(e) => {
                        entry.error = Some(e.to_string());
                        break;
                    }
                }
            }
            if entry.error.is_none() {
                entry.seconds = Some(median(&times));
                entry.peak_bytes = tracking.then_some(peak);
            }
            entries.push(entry);
        }
    }
    Ok(BenchReport {
        environment: BenchEnvironment::detect(),
        entries,
    })
}
