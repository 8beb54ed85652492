use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rep2ldc", version, about = "Locally decodable codes from matrix group representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check rank(g - I) against its lower bound for every element.
    RankScan(RankScanArgs),
    /// Build an LDC from a group and write its certificate.
    Construct(ConstructArgs),
    /// Verify an LDC or certificate file.
    Verify(VerifyArgs),
    /// Run the whole story on the signed-shift group.
    Demo(DemoArgs),
    /// List or export built-in fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GroupSource {
    /// Group spec JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in fixture such as `signed-shift(4,3)`.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Debug, Args)]
pub struct CapArg {
    /// Maximum group order to enumerate.
    #[arg(long, env = "REP2LDC_CAP")]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RankScanArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[command(flatten)]
    pub cap: CapArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[command(flatten)]
    pub cap: CapArg,
    /// Element index (position in enumeration order, `5` or `g5`).
    #[arg(long, conflicts_with_all = ["hs", "alphas"])]
    pub h: Option<String>,
    /// Comma-separated element indices for a general combination.
    #[arg(long, value_delimiter = ',', requires = "alphas")]
    pub hs: Vec<String>,
    /// Comma-separated coefficients matching `--hs`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "hs")]
    pub alphas: Vec<String>,
    /// Use `rho(h) - lambda I` on the doubled code.
    #[arg(long, allow_hyphen_values = true, requires = "h", conflicts_with_all = ["special2", "q"])]
    pub lambda: Option<String>,
    /// Number of queries for the general construction.
    #[arg(long, conflicts_with = "special2")]
    pub q: Option<usize>,
    /// Special-form pairs from `rho(h) - I` (the default with `--h`).
    #[arg(long, requires = "h")]
    pub special2: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the certificate.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// LDC or certificate JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Field characteristic; 0 for the rationals.
    #[arg(long, default_value_t = 3)]
    pub field: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Show the available fixture families.
    List,
    /// Write a fixture as group-spec (or LDC) JSON.
    Export {
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}
