//! Command-line arguments and TOML config files.
//!
//! A config file is a flat key-value document whose keys are the long flag
//! names (`im-rule = "sqrt"`, `m-max = 80`). Flags given on the command line
//! win over the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dtn", version, about = "Disk Dirichlet-to-Neumann and transmission-eigenvalue checks")]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact disk DN values against the free symbol along a frequency grid.
    DnCompare(DnCompareArgs),
    /// Elliptic residual slopes and the disk identities of the boundary symbols.
    ParametrixCheck(ParametrixArgs),
    /// All transmission eigenvalues in a box.
    Scan(ScanArgs),
    /// Certify an eigenvalue-free region inside a window.
    FreeRegion(FreeRegionArgs),
    /// Eigenvalue counts against the Weyl prediction.
    Weyl(WeylArgs),
    /// Boundary symbols of a medium pair over a grid of tangential frequencies.
    Symbols(SymbolsArgs),
}

/// Comma-separated numbers on the command line; a string, number or array
/// in a config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(NumList(Vec::new()));
        }
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(NumList)
    }
}

impl<'de> Deserialize<'de> for NumList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            One(f64),
            Many(Vec<f64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
            Raw::One(v) => Ok(NumList(vec![v])),
            Raw::Many(v) => Ok(NumList(v)),
        }
    }
}

/// Fill every `None` field of `$a` from `$b`.
macro_rules! overlay {
    ($a:ident, $b:ident, $($f:ident),+) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )+
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DnCompareArgs {
    /// Real parts, e.g. 100,200,400,800.
    #[arg(long)]
    pub re: Option<NumList>,
    /// sqrt, fixed:V or power:EPS (Im = Re^(1-EPS)).
    #[arg(long)]
    pub im_rule: Option<String>,
    /// Mode cap margin: modes up to margin |l| + 20 are compared.
    #[arg(long)]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ParametrixArgs {
    #[arg(long)]
    pub re: Option<NumList>,
    #[arg(long)]
    pub im: Option<f64>,
    /// Rescaled tangential frequency `h m` of the compared mode.
    #[arg(long)]
    pub hm: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScanArgs {
    /// c1,n1,c2,n2.
    #[arg(long)]
    pub pair: Option<NumList>,
    /// re_min,re_max,im_min,im_max.
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub search_box: Option<NumList>,
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Write a heatmap of log10 min_m |f_m| over the box.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FreeRegionArgs {
    #[arg(long)]
    pub pair: Option<NumList>,
    /// strip, log or power.
    #[arg(long)]
    pub kind: Option<String>,
    /// Strip height, or power-curve factor.
    #[arg(long)]
    pub c: Option<f64>,
    /// Log-curve intercept.
    #[arg(long)]
    pub a: Option<f64>,
    /// Log-curve slope.
    #[arg(long)]
    pub b: Option<f64>,
    /// Power-curve exponent.
    #[arg(long)]
    pub eps: Option<f64>,
    /// re_min,re_max,im_min,im_max.
    #[arg(long)]
    pub window: Option<NumList>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub slabs: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct WeylArgs {
    #[arg(long)]
    pub pair: Option<NumList>,
    /// One or more radii.
    #[arg(long)]
    pub r: Option<NumList>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SymbolsArgs {
    #[arg(long)]
    pub pair: Option<NumList>,
    #[arg(long)]
    pub xi_max: Option<f64>,
    #[arg(long)]
    pub xi_steps: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
}

/// Keys shared by every command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommonFile {
    out: Option<PathBuf>,
    threads: Option<usize>,
    format: Option<Format>,
}

pub fn load_table(path: &Path) -> Result<toml::Table, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merge a config file into the parsed command line.
pub fn apply_file(cli: &mut Cli, mut table: toml::Table) -> Result<(), CliError> {
    let mut common = toml::Table::new();
    for key in ["out", "threads", "format"] {
        if let Some(v) = table.remove(key) {
            common.insert(key.to_string(), v);
        }
    }
    let bad = |e: toml::de::Error| CliError::Config(format!("config file: {e}"));
    let common: CommonFile = common.try_into().map_err(bad)?;
    overlay!(cli, common, out, threads, format);
    match &mut cli.command {
        Command::DnCompare(a) => {
            let f: DnCompareArgs = table.try_into().map_err(bad)?;
            overlay!(a, f, re, im_rule, margin);
        }
        Command::ParametrixCheck(a) => {
            let f: ParametrixArgs = table.try_into().map_err(bad)?;
            overlay!(a, f, re, im, hm, c, n);
        }
        Command::Scan(a) => {
            let f: ScanArgs = table.try_into().map_err(bad)?;
            overlay!(a, f, pair, search_box, m_max, svg);
        }
        Command::FreeRegion(args) => {
            let f: FreeRegionArgs = table.try_into().map_err(bad)?;
            overlay!(args, f, pair, kind, c, a, b, eps, window, m_max, slabs);
        }
        Command::Weyl(a) => {
            let f: WeylArgs = table.try_into().map_err(bad)?;
            overlay!(a, f, pair, r);
        }
        Command::Symbols(a) => {
            let f: SymbolsArgs = table.try_into().map_err(bad)?;
            overlay!(a, f, pair, xi_max, xi_steps, theta);
        }
    }
    Ok(())
}
