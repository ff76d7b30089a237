use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use curveop::genus2::Form;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "curveop", version, about = "Curve operators of SU(2) TQFT and their semiclassical limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one curve operator and write its diagonals as JSON.
    Operator(OperatorArgs),
    /// Run a verification suite and write `check,id,value,threshold,pass` CSV.
    Verify(VerifyArgs),
    /// Tabulate exact and asymptotic eigenbasis pairings along `r̄`.
    Pairing(PairingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Torus,
    Sphere4,
    Genus2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveName {
    Gamma,
    Delta,
    Xi,
    Zeta,
    Eta,
}

impl CurveName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gamma => "gamma",
            Self::Delta => "delta",
            Self::Xi => "xi",
            Self::Zeta => "zeta",
            Self::Eta => "eta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormArg {
    Corrected,
    Printed,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Corrected => Form::Corrected,
            FormArg::Printed => Form::Printed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Products,
    Spectra,
    Toeplitz,
    Subprincipal,
    Genus2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingKind {
    Sixj,
    Smatrix,
}

#[derive(Debug, Args, Serialize)]
pub struct OperatorArgs {
    #[arg(long, value_enum)]
    pub surface: SurfaceKind,
    /// Level.
    #[arg(long)]
    pub r: u32,
    /// Torus marked color.
    #[arg(long)]
    pub a: Option<u32>,
    /// Sphere boundary colors `a,b,c,d`.
    #[arg(long)]
    pub colors: Option<String>,
    /// Torus slope `p,q`.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    #[arg(long, value_enum)]
    pub curve: Option<CurveName>,
    /// Genus-2 coefficients: corrected, or as printed.
    #[arg(long, value_enum, default_value = "corrected")]
    pub form: FormArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, value_enum)]
    pub surface: Option<SurfaceKind>,
    /// Level or comma-separated levels.
    #[arg(long)]
    pub r: Option<String>,
    /// Torus marked color or comma-separated colors.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub colors: Option<String>,
    /// Farey depth for the torus suites.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, value_enum, default_value = "corrected")]
    pub form: FormArg,
    /// Operator JSON from `curveop operator` to check instead of building one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Overrides thresholds of absolute-error checks.
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Overrides thresholds of relative-error checks.
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Seed for randomly drawn sphere colorings.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PairingArgs {
    #[arg(value_enum)]
    pub kind: PairingKind,
    /// Base level `D`; the sweep runs at `r = D·r̄`.
    #[arg(long)]
    pub r: u32,
    /// Torus marked color at the base level.
    #[arg(long)]
    pub a: Option<u32>,
    /// Sphere colors at the base level.
    #[arg(long)]
    pub colors: Option<String>,
    /// Base label of the first eigenvector.
    #[arg(long)]
    pub m0: i64,
    /// Base label of the second eigenvector.
    #[arg(long)]
    pub m1: i64,
    /// Comma-separated odd multipliers; may be empty.
    #[arg(long, default_value = "3,5,7,9,11")]
    pub rbar_list: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Comma-separated values; the empty string is the empty list.
pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().with_context(|| format!("invalid {what} {s:?}")))
        .collect()
}

pub fn parse_colors(text: &str) -> Result<[i64; 4]> {
    let v: Vec<i64> = parse_list(text, "color")?;
    match v[..] {
        [a, b, c, d] => Ok([a, b, c, d]),
        _ => bail!("--colors needs four values a,b,c,d, got {}", v.len()),
    }
}

pub fn required<T: Copy>(value: Option<T>, flag: &str, surface: &str) -> Result<T> {
    value.with_context(|| format!("{flag} is required for {surface}"))
}
