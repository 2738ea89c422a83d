use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const PRECEDENCE: &str = "\
Settings are resolved as: command-line flags, then the --config file, then \
built-in defaults. The config file holds one `key = value` per line, keys \
being flag names without dashes (e.g. `epsilon-scale = 0.1`); `#` starts a \
comment.

Exit codes: 0 success, 2 usage, 3 numeric failure, 4 capacity refusal, \
5 missing input.";

#[derive(Debug, Parser)]
#[command(name = "roseland", version, about = "Landmark-diffusion spectral embedding", after_help = PRECEDENCE)]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "LMDF_THREADS")]
    pub threads: Option<usize>,

    /// key = value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesise a dataset (points matrix plus angle sidecar).
    Generate(GenerateArgs),
    /// Embed a dataset with one of the four methods.
    Embed(EmbedArgs),
    /// Score an embedding or run the grid-sampling experiment.
    Eval(EvalArgs),
    /// Time and memory scaling over a grid of sample sizes.
    Bench(BenchArgs),
    /// Draw a landmark set, optionally with its landmark-kernel profile.
    Landmark(LandmarkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Circle,
    CircleNoisy,
    Phantom,
}

impl std::str::FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhantomTable {
    Modified,
    Original,
}

impl std::str::FromStr for PhantomTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Lmdf,
}

impl std::str::FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Dataset synthesis parameters shared by `generate` and `embed`.
#[derive(Clone, Debug, Default, Args)]
pub struct DataParams {
    /// Number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Ambient dimension (circle) or offsets per projection (phantom).
    #[arg(long)]
    pub p: Option<usize>,
    /// Sinusoidal density parameter `a` for circle angles (0 = uniform).
    #[arg(long)]
    pub density_a: Option<f64>,
    /// Per-coordinate Gaussian noise variance (default p^-1/2).
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Phantom ellipse table.
    #[arg(long)]
    pub phantom: Option<PhantomTable>,
}

pub const DATA_KEYS: &[&str] = &["n", "p", "density-a", "noise-var", "phantom"];

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: DatasetKind,
    #[command(flatten)]
    pub data: DataParams,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matrix format of the points file.
    #[arg(long)]
    pub format: Option<FileFormat>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// roseland, dm, nystrom or hkc.
    #[arg(long)]
    pub method: Option<String>,
    /// Data matrix (CSV or LMDF). Without it a dataset is generated.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dataset to generate when --data is absent.
    #[arg(long)]
    pub dataset: Option<DatasetKind>,
    #[command(flatten)]
    pub params: DataParams,
    /// Landmark matrix; by default a random subset of the data is used.
    #[arg(long)]
    pub landmarks: Option<PathBuf>,
    /// Landmark count.
    #[arg(long, conflicts_with = "beta")]
    pub m: Option<usize>,
    /// Landmark exponent: m = round(n^beta).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Fixed bandwidth in squared-distance units.
    #[arg(long, conflicts_with = "epsilon_scale")]
    pub epsilon: Option<f64>,
    /// Bandwidth as a multiple of the median squared distance.
    #[arg(long)]
    pub epsilon_scale: Option<f64>,
    /// Diffusion time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of non-trivial coordinates.
    #[arg(long)]
    pub qprime: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest n the diffusion map accepts.
    #[arg(long)]
    pub dm_cap: Option<usize>,
    /// One-column file of values colouring the scatter plot.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also write embedding.svg.
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    Eigen,
    Phase,
    Geodesic,
    Gridconc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestFn {
    Xy,
    Bump,
}

impl std::str::FromStr for TestFn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub kind: EvalKind,
    /// Output directory of an `embed` run.
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// True angles of the embedded points (one column).
    #[arg(long)]
    pub angles: Option<PathBuf>,
    /// Highest circle frequency in the eigen report (2 k_max + 1 functions).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Largest neighbour rank K for geodesic errors.
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Heat-kernel time of the almost-isometric scaling.
    #[arg(long)]
    pub scaling_time: Option<f64>,
    /// Scale with the circle's true eigenvalues instead of estimates.
    #[arg(long)]
    pub true_eigenvalues: bool,
    /// Test function for gridconc.
    #[arg(long)]
    pub function: Option<TestFn>,
    /// Comma-separated sample sizes N for gridconc.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// Comma-separated ascending sample sizes.
    #[arg(long)]
    pub n_grid: Option<String>,
    #[arg(long, conflicts_with = "beta")]
    pub m: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// circle (noisy, in R^p) or phantom.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dm_cap: Option<usize>,
    #[arg(long, conflicts_with = "epsilon_scale")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub epsilon_scale: Option<f64>,
    #[arg(long)]
    pub qprime: Option<usize>,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LandmarkMode {
    /// Random rows of --data.
    RandomSubset,
    /// i.i.d. from q ∝ 1/p² for the sinusoidal data density.
    Designed,
    /// i.i.d. uniform on the circle.
    Uniform,
}

impl std::str::FromStr for LandmarkMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct LandmarkArgs {
    #[arg(long)]
    pub mode: Option<LandmarkMode>,
    /// Data matrix for random-subset mode.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Sinusoidal data density parameter for designed mode.
    #[arg(long)]
    pub density_a: Option<f64>,
    /// Ambient dimension of circle landmarks.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the landmark-kernel profile (circle modes only).
    #[arg(long)]
    pub profile: bool,
    /// Bandwidth of the profile kernel.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of query angles in the profile.
    #[arg(long)]
    pub queries: Option<usize>,
    /// Grid size of the profile.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
