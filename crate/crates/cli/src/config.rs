//! Run configuration. Every flag of every subcommand lives here, so the
//! same value can be parsed from the command line, read back from a JSON
//! file, and echoed into the output it produced.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Print a prefix of Kol(p,q).
    Generate(GenerateArgs),
    /// Build a derived substitution for Kol(2m,2n) and analyse it.
    Derive(DeriveArgs),
    /// Run the height, coincidence and spectrum pipeline for Kol(2m,2n).
    Analyze(AnalyzeArgs),
    /// Decompose the positions of one letter into lattice cosets.
    Cosets(CosetsArgs),
    /// Bragg peaks of Kol(2m,2n) with an exponential-sum cross-check.
    Diffract(DiffractArgs),
    /// Draw the letter cells of the internal space as SVG.
    Visualize(VisualizeArgs),
    /// Everything above for one (m,n) in a single JSON document.
    Report(ReportArgs),
}

impl RunConfig {
    pub fn output(&self) -> Option<&Path> {
        match self {
            RunConfig::Generate(a) => a.output.as_deref(),
            RunConfig::Derive(a) => a.output.as_deref(),
            RunConfig::Analyze(a) => a.output.as_deref(),
            RunConfig::Cosets(a) => a.output.as_deref(),
            RunConfig::Diffract(a) => a.output.as_deref(),
            RunConfig::Visualize(a) => a.output.as_deref(),
            RunConfig::Report(a) => a.output.as_deref(),
        }
    }

    /// Compact JSON, as echoed into output files.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Read the sequence off its own run lengths.
    RunLength,
    /// Apply the two alternating substitutions.
    Substitution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
}

/// Which derived substitution to build. `auto` picks the height-one one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Auto,
    BlockedSigma,
    Numbered,
    Theta,
    ThetaTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelArg {
    Sigma,
    Kolakoski,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    /// Number of terms.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Method::RunLength)]
    pub method: Method,
    /// `left` prints the left half read outward, which is Kol(q,p).
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = KindArg::Auto)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = LevelArg::Kolakoski)]
    pub level: LevelArg,
    /// Also write the rules in the plain-text format to this file.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Either `--m/--n` or `--substitution FILE` (text or JSON rule format).
#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetsArgs {
    #[arg(long, requires = "n", conflicts_with = "substitution")]
    pub m: Option<u32>,
    #[arg(long, requires = "m")]
    pub n: Option<u32>,
    #[arg(long)]
    pub substitution: Option<PathBuf>,
    /// Label of the letter to decompose, e.g. `b1`.
    #[arg(long)]
    pub letter: String,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Also write `modulus,residue` rows to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffractArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    /// Scattering weight of the letter 2m, as `re,im`.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub cp: String,
    /// Scattering weight of the letter 2n, as `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub cq: String,
    /// Coset depth behind each amplitude.
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Block frequencies `k/ℓ^s` are taken up to `s = max-denom`.
    #[arg(long, default_value_t = 2)]
    pub max_denom: u32,
    /// Prefix length of the exponential-sum oracle; 0 skips it.
    #[arg(long = "oracle-n", default_value_t = 100_000)]
    pub oracle_n: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualizeArgs {
    #[arg(long, requires = "n", conflicts_with = "substitution")]
    pub m: Option<u32>,
    #[arg(long, requires = "m")]
    pub n: Option<u32>,
    #[arg(long)]
    pub substitution: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// 2 for the polygon gasket, 1 for the Cantor-style line.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dimension: u8,
    /// Contraction as a fraction, e.g. `3/10`. Defaults per dimension.
    #[arg(long)]
    pub contraction: Option<String>,
    /// Comma-separated `#rrggbb` colours, one per letter.
    #[arg(long)]
    pub colors: Option<String>,
    #[arg(long, default_value = "#dddddd")]
    pub mixed_color: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    /// Coset depth for the decompositions.
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

const SVG_MARKER: &str = "kolakoski config: ";

/// The comment line an SVG carries so that it can be regenerated.
pub fn svg_comment(config: &RunConfig) -> String {
    format!("{SVG_MARKER}{}", config.to_json())
}

/// Reads a config from a JSON file holding either the config itself or a
/// whole output document with a `config` key, or from an SVG we wrote.
pub fn load(path: &Path) -> Result<RunConfig, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = if let Some(start) = text.find(SVG_MARKER) {
        let rest = &text[start + SVG_MARKER.len()..];
        let end = rest.find("-->").unwrap_or(rest.len());
        serde_json::from_str(rest[..end].trim())
    } else {
        serde_json::from_str(&text)
    }
    .map_err(|e| UsageError(format!("{} is not a config: {e}", path.display())))?;
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap(),
        v => v,
    };
    serde_json::from_value(value).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}
