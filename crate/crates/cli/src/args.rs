use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "biharm", version, about = "Weighted biharmonic identity checks, exponent tables, plate solves and decay fits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON config; explicit flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance of the quadrature budget.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_nodes: Option<u64>,
    /// Repeat for more log output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponent table over a dimension range.
    Constants(ConstantsArgs),
    /// Identity residuals over a matrix of dimensions, domains, weights and poles.
    Verify(VerifyArgs),
    /// Positivity chain at the critical weight on random clamped fields.
    Positivity(PositivityArgs),
    /// Sign of the surface term on convex domains and the pair probe.
    Convexity(ConvexityArgs),
    /// Clamped plate on a grid-aligned polygon.
    Solve(SolveArgs),
    /// Local energy decay exponents.
    Decay(DecayArgs),
    /// Caccioppoli ratio across radii.
    Caccioppoli(CaccioppoliArgs),
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// `lo..hi` (inclusive) or a comma list.
    #[arg(long, default_value = "4..12")]
    pub dims: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `all` or a comma list such as `I2_13,I3_1`.
    #[arg(long)]
    pub identity: Option<String>,
    /// Comma list of `ball`, `cube`, `simplex`, or a domain as JSON text or a `.json` path.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long, alias = "dims")]
    pub dim: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Comma list of `exterior`, `boundary`, `boundary-vertex`, `boundary-facet-center`, `boundary-sphere-point`.
    #[arg(long)]
    pub pole: Option<String>,
    /// Smooth factor of the test field as a JSON monomial list or a `.json` path.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub degree_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PositivityArgs {
    #[arg(long, alias = "dims")]
    pub dim: Option<String>,
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long)]
    pub degree_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConvexityArgs {
    #[arg(long, alias = "dims")]
    pub dim: Option<String>,
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub pole: Option<String>,
    #[arg(long)]
    pub probe_samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveData {
    /// Clamped data of `x^3 + x y^2`; reports the discrete L2 error.
    Cubic,
    Zero,
    /// Random cubic data cut off near the corners.
    Random,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// `l-shape`, `square`, or a polygon as JSON text or a `.json` path.
    #[arg(long)]
    pub domain: Option<String>,
    /// Mesh width, or a comma list for a convergence study.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long, value_enum)]
    pub data: Option<SolveData>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Binary grid dump of the finest solve.
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Cg,
    Banded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecaySource {
    /// Exact half-plane fixtures.
    Fixtures,
    /// Finite-difference solves on the L-shape.
    LShape,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[arg(long, value_enum)]
    pub source: Option<DecaySource>,
    /// Fixture names (`y^2`, `xy^2`) or `all`.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub radii: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Seeds of the L-shape runs; five consecutive seeds from `--seed` otherwise.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
}

#[derive(Args, Debug)]
pub struct CaccioppoliArgs {
    #[arg(long)]
    pub fixture: Option<String>,
    /// Comma list of radii.
    #[arg(long)]
    pub r: Option<String>,
    /// Also evaluate on a finite-difference solve with this mesh width.
    #[arg(long)]
    pub grid_h: Option<f64>,
}
