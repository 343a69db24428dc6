//! The `sobolev-lab` command-line driver.
//!
//! Settings resolve as: flags, then `--config` file keys, then
//! `SOBOLEV_LAB_SEED` (seed only), then per-command defaults. Every command
//! writes `<out>/results.csv` (or `.tsv`) and `<out>/summary.txt`; the exit
//! status is 0 iff the summary has no FAIL line, 1 otherwise, and 2 for an
//! invalid configuration.

mod commands;
pub mod config;
pub mod summary;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::sampling::DEFAULT_SEED;
use crate::sobolev::distance::{P_MAX, P_MIN};
pub use summary::Summary;

pub const SEED_ENV: &str = "SOBOLEV_LAB_SEED";
pub const MIN_NODES: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "sobolev-lab", version, about = "Sobolev distances between manifold-valued maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Sobolev exponent, in [1, 16]
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Comma-separated family parameters λ
    #[arg(long, global = true)]
    pub lambdas: Option<String>,
    /// Comma-separated increasing ℓ for the Chiron family
    #[arg(long, global = true)]
    pub ells: Option<String>,
    /// Grid nodes per axis (at least 64)
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Random samples per property
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Sampling seed; defaults to $SOBOLEV_LAB_SEED, then 1729
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or tsv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// INI-style file of key=value settings
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Geometry, Frobenius, strong-concordance and CG ≤ Sasaki checks on random samples
    Props,
    /// One of the counterexample families
    Family {
        /// cg-sasaki, sasaki-embedding or s1-disk
        #[arg(long)]
        name: Option<String>,
        /// Target dimension for cg-sasaki (ℝ^n) and sasaki-embedding (𝕊^n)
        #[arg(long)]
        n: Option<usize>,
        /// Disk radius for s1-disk
        #[arg(long)]
        radius: Option<f64>,
    },
    /// The Cauchy sequence without a limit
    Chiron,
    /// Energy of a CSV map, or a convergence study when no map is given
    Energy {
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Props,
    Family,
    Chiron,
    Energy,
}

impl FromStr for CommandKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "props" => Ok(CommandKind::Props),
            "family" => Ok(CommandKind::Family),
            "chiron" => Ok(CommandKind::Chiron),
            "energy" => Ok(CommandKind::Energy),
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    CgSasaki,
    SasakiEmbedding,
    S1Disk,
}

impl FromStr for FamilyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "cg-sasaki" => Ok(FamilyName::CgSasaki),
            "sasaki-embedding" => Ok(FamilyName::SasakiEmbedding),
            "s1-disk" => Ok(FamilyName::S1Disk),
            other => Err(format!("unknown family `{other}` (cg-sasaki, sasaki-embedding, s1-disk)")),
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyName::CgSasaki => "cg-sasaki",
            FamilyName::SasakiEmbedding => "sasaki-embedding",
            FamilyName::S1Disk => "s1-disk",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }

    pub fn results_file(self) -> &'static str {
        match self {
            Format::Csv => "results.csv",
            Format::Tsv => "results.tsv",
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub p: f64,
    pub lambdas: Vec<f64>,
    pub ells: Vec<usize>,
    pub nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub family: Option<FamilyName>,
    pub n: usize,
    pub radius: f64,
    pub map: Option<PathBuf>,
}

/// Outcome of [`run`]: the exit status and a message for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub message: Option<String>,
}

fn default_lambdas(family: Option<FamilyName>) -> Vec<f64> {
    match family {
        Some(FamilyName::SasakiEmbedding) => vec![1.0, 0.1, 0.01],
        Some(FamilyName::S1Disk) => vec![0.2, 0.1, 0.05],
        _ => vec![1.0, 0.3, 0.1, 0.03, 0.01],
    }
}

/// Merges flags, config keys, the seed variable and defaults, and
/// validates the result.
pub fn resolve(cli: &Cli, env_seed: Option<&str>) -> Result<RunConfig, String> {
    let file: BTreeMap<String, String> = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
            config::parse_config(&text).map_err(|e| format!("config {}: {e}", path.display()))?
        }
        None => BTreeMap::new(),
    };
    let key = |k: &str| file.get(k).map(String::as_str);
    fn parsed<T: FromStr>(k: &str, v: Option<&str>) -> Result<Option<T>, String> {
        v.map(|s| s.trim().parse::<T>().map_err(|_| format!("{k}: cannot parse `{s}`"))).transpose()
    }

    let (sub_name, sub_n, sub_radius, sub_map) = match &cli.command {
        Some(Command::Family { name, n, radius }) => (name.clone(), *n, *radius, None),
        Some(Command::Energy { map }) => (None, None, None, map.clone()),
        _ => (None, None, None, None),
    };
    let command = match &cli.command {
        Some(Command::Props) => CommandKind::Props,
        Some(Command::Family { .. }) => CommandKind::Family,
        Some(Command::Chiron) => CommandKind::Chiron,
        Some(Command::Energy { .. }) => CommandKind::Energy,
        None => key("command").ok_or("no command given (props, family, chiron, energy)")?.parse()?,
    };
    let family = match command {
        CommandKind::Family => Some(
            sub_name
                .as_deref()
                .or(key("name"))
                .ok_or("family needs --name (cg-sasaki, sasaki-embedding, s1-disk)")?
                .parse::<FamilyName>()?,
        ),
        _ => None,
    };
    let default_p = match (command, family) {
        (CommandKind::Chiron, _) | (_, Some(FamilyName::S1Disk)) => 1.0,
        _ => 2.0,
    };
    let p = match cli.common.p {
        Some(p) => p,
        None => parsed::<f64>("p", key("p"))?.unwrap_or(default_p),
    };
    let lambdas = match cli.common.lambdas.as_deref().or(key("lambdas")) {
        Some(text) => config::parse_list::<f64>("lambdas", text).map_err(|e| e.to_string())?,
        None => default_lambdas(family),
    };
    let ells = match cli.common.ells.as_deref().or(key("ells")) {
        Some(text) => config::parse_list::<usize>("ells", text).map_err(|e| e.to_string())?,
        None => vec![4, 16, 64, 256],
    };
    let default_nodes = match (command, family) {
        (CommandKind::Chiron, _) => 8192,
        (_, Some(FamilyName::S1Disk)) => 256,
        _ => 4096,
    };
    let nodes = match cli.common.nodes {
        Some(n) => n,
        None => parsed::<usize>("nodes", key("nodes"))?.unwrap_or(default_nodes),
    };
    let samples = match cli.common.samples {
        Some(s) => s,
        None => parsed::<usize>("samples", key("samples"))?.unwrap_or(10_000),
    };
    let seed = match cli.common.seed {
        Some(s) => s,
        None => match parsed::<u64>("seed", key("seed"))? {
            Some(s) => s,
            None => parsed::<u64>(SEED_ENV, env_seed)?.unwrap_or(DEFAULT_SEED),
        },
    };
    let out = cli.common.out.clone().or_else(|| key("out").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let format = match cli.common.format.as_deref().or(key("format")).unwrap_or("csv") {
        "csv" => Format::Csv,
        "tsv" => Format::Tsv,
        other => return Err(format!("format must be csv or tsv, got `{other}`")),
    };
    let n = match sub_n {
        Some(n) => n,
        None => parsed::<usize>("n", key("n"))?.unwrap_or(2),
    };
    let radius = match sub_radius {
        Some(r) => r,
        None => parsed::<f64>("radius", key("radius"))?.unwrap_or(1.0),
    };
    let map = sub_map.or_else(|| key("map").map(PathBuf::from));

    if !(P_MIN..=P_MAX).contains(&p) {
        return Err(format!("p must lie in [{P_MIN}, {P_MAX}], got {p}"));
    }
    if nodes < MIN_NODES {
        return Err(format!("nodes must be at least {MIN_NODES}, got {nodes}"));
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(format!("lambdas must be positive and finite, got {lambdas:?}"));
    }
    if ells.is_empty() || ells[0] == 0 || ells.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("ells must be positive and increasing, got {ells:?}"));
    }
    if samples == 0 {
        return Err("samples must be positive".into());
    }
    Ok(RunConfig { command, p, lambdas, ells, nodes, samples, seed, out, format, family, n, radius, map })
}

/// Runs a resolved configuration, writing the artifacts.
pub fn run(config: &RunConfig) -> Outcome {
    match commands::execute(config) {
        Ok(summary) if summary.passed() => Outcome { status: 0, message: None },
        Ok(summary) => Outcome { status: 1, message: Some(format!("failed: {}", summary.failed().join(", "))) },
        // the command could not run on these inputs: unreadable map, grid
        // too coarse for it, unwritable output
        Err(e) => Outcome { status: 2, message: Some(e.to_string()) },
    }
}

/// Parses `args`, resolves and runs.
pub fn main_with_args<I, T>(args: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            return Outcome { status, message: Some(e.to_string()) };
        }
    };
    match resolve(&cli, env_seed) {
        Ok(config) => run(&config),
        Err(message) => Outcome { status: 2, message: Some(format!("invalid configuration: {message}")) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("sobolev-lab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_per_command() {
        let c = resolve(&cli(&["chiron"]), None).unwrap();
        assert_eq!((c.p, c.nodes, c.ells.clone()), (1.0, 8192, vec![4, 16, 64, 256]));
        assert_eq!(c.seed, DEFAULT_SEED);
        let f = resolve(&cli(&["family", "--name", "s1-disk"]), None).unwrap();
        assert_eq!(f.lambdas, vec![0.2, 0.1, 0.05]);
        assert_eq!(f.p, 1.0);
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ini");
        std::fs::write(&path, "command=family\nname=cg-sasaki\np=3\nseed=11\nnodes=128\n").unwrap();
        let cfg = path.to_str().unwrap();
        let c = resolve(&cli(&["--config", cfg, "--p", "4"]), Some("99")).unwrap();
        assert_eq!((c.command, c.family, c.p, c.seed, c.nodes), (CommandKind::Family, Some(FamilyName::CgSasaki), 4.0, 11, 128));
        let no_seed_key = dir.path().join("b.ini");
        std::fs::write(&no_seed_key, "p=2\n").unwrap();
        let c = resolve(&cli(&["props", "--config", no_seed_key.to_str().unwrap()]), Some("99")).unwrap();
        assert_eq!(c.seed, 99);
        let c = resolve(&cli(&["props", "--seed", "5"]), Some("99")).unwrap();
        assert_eq!(c.seed, 5);
    }

    #[test]
    fn invalid_configurations() {
        assert!(resolve(&cli(&["family", "--name", "nope"]), None).is_err());
        assert!(resolve(&cli(&["family"]), None).is_err());
        assert!(resolve(&cli(&["chiron", "--p", "0.5"]), None).is_err());
        assert!(resolve(&cli(&["chiron", "--nodes", "32"]), None).is_err());
        assert!(resolve(&cli(&["family", "--name", "cg-sasaki", "--lambdas", "1,-2"]), None).is_err());
        assert!(resolve(&cli(&["chiron", "--ells", "4,4"]), None).is_err());
        assert!(resolve(&cli(&["props", "--format", "xml"]), None).is_err());
        assert!(resolve(&cli(&["props"]), Some("abc")).is_err());
        assert!(resolve(&cli(&[]), None).is_err());
        let out = main_with_args(["sobolev-lab", "chiron", "--p", "40"], None);
        assert_eq!(out.status, 2);
    }
}
