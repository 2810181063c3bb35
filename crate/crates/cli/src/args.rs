use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gasket::packing::{RadiusLimit, Variant};
use gasket::sweep::Strategy;

#[derive(Debug, Parser)]
#[command(
    name = "gasket",
    version,
    about = "Density estimates for the Sierpinski gasket"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Centred measure estimate and bracket at one level.
    Centred(CentredArgs),
    /// Packing measure estimate and bracket at one level.
    Packing(PackingArgs),
    /// Density sweep at the barycentre and spherical measure bounds.
    Spherical(SphericalArgs),
    /// Centred estimates over a range of levels, compared with the reference table.
    Table(TableArgs),
    /// Density curve at one centre, written as CSV.
    Profile(ProfileArgs),
    /// Bracket for the centred measure of the gasket restricted to a ball.
    RestrictedBall(RestrictedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Pruned,
    Profile,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Pruned => Strategy::Pruned,
            StrategyArg::Profile => Strategy::Profile,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Original,
    Improved,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Original => Variant::Original,
            VariantArg::Improved => Variant::Improved,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitArg {
    Boundary,
    FarthestVertex,
}

impl From<LimitArg> for RadiusLimit {
    fn from(l: LimitArg) -> Self {
        match l {
            LimitArg::Boundary => RadiusLimit::Boundary,
            LimitArg::FarthestVertex => RadiusLimit::FarthestVertex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsArg {
    /// Six-decimal values from the embedded reference table.
    Golden,
    /// Six-decimal values from a centred computation at the same level.
    Computed,
}

/// Flags shared by every command; each has a `GASKET_` environment override.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format; defaults to `human` for `table`, `csv` for `profile` and `json` otherwise.
    #[arg(long, value_enum, env = "GASKET_FORMAT")]
    pub format: Option<Format>,

    /// Write the primary output here instead of stdout.
    #[arg(long, env = "GASKET_OUT")]
    pub out: Option<PathBuf>,

    /// Directory for cached approximation sets.
    #[arg(long, env = "GASKET_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for centre sweeps; defaults to one per core.
    #[arg(long, env = "GASKET_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,

    /// Allow runs whose estimated work reaches that of a level-13 centred sweep.
    #[arg(long, env = "GASKET_CONFIRM_LONG")]
    pub confirm_long: bool,

    /// Largest level accepted.
    #[arg(long, env = "GASKET_CAPACITY", default_value_t = gasket::lattice::DEFAULT_MAX_LEVEL)]
    pub capacity: u32,

    /// Per-centre evaluator.
    #[arg(long, value_enum, env = "GASKET_STRATEGY", default_value = "pruned")]
    pub strategy: StrategyArg,
}

#[derive(Debug, Args)]
pub struct CentredArgs {
    #[arg(long, env = "GASKET_K")]
    pub k: u32,

    /// Search every centre of the approximation instead of the symmetry-reduced set.
    #[arg(long, env = "GASKET_FULL_SWEEP")]
    pub full_sweep: bool,

    /// Also write the density curve at the optimal centre to this CSV file.
    #[arg(long)]
    pub emit_profile: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PackingArgs {
    #[arg(long, env = "GASKET_K")]
    pub k: u32,

    #[arg(long, value_enum, env = "GASKET_VARIANT", default_value = "original")]
    pub variant: VariantArg,

    /// Upper limit on the radius at each centre.
    #[arg(long, value_enum, env = "GASKET_LIMIT", default_value = "boundary")]
    pub limit: LimitArg,

    #[arg(long)]
    pub emit_profile: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SphericalArgs {
    #[arg(long, env = "GASKET_K")]
    pub k: u32,

    /// Let every point supply candidate radii, not only the symmetry-reduced set.
    #[arg(long, env = "GASKET_FULL_SWEEP")]
    pub full_sweep: bool,

    #[arg(long)]
    pub emit_profile: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, env = "GASKET_K_MIN", default_value_t = 5)]
    pub k_min: u32,

    #[arg(long, env = "GASKET_K_MAX", default_value_t = 10)]
    pub k_max: u32,

    #[arg(long, env = "GASKET_FULL_SWEEP")]
    pub full_sweep: bool,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, env = "GASKET_K")]
    pub k: u32,

    /// `barycentre`, a word image such as `f010(z2)`, or `a/den,b/den` in level-k lattice units.
    #[arg(long)]
    pub centre: String,

    /// `centred`, `barycentric`, `packing`, `all`, or `LO..HI` with exact radius expressions.
    #[arg(long, default_value = "all")]
    pub window: String,

    /// Radius floor used by the `packing` window.
    #[arg(long, value_enum, env = "GASKET_VARIANT", default_value = "original")]
    pub variant: VariantArg,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RestrictedArgs {
    #[arg(long, env = "GASKET_K")]
    pub k: u32,

    #[arg(long, default_value = "barycentre")]
    pub centre: String,

    /// `optimal` (the spherical optimum at the barycentre) or an exact radius
    /// expression such as `sqrt(233374692)/49152` or `3/10`.
    #[arg(long, default_value = "optimal")]
    pub radius: String,

    #[arg(long, value_enum, env = "GASKET_BOUNDS", default_value = "golden")]
    pub bounds: BoundsArg,

    #[command(flatten)]
    pub common: Common,
}
