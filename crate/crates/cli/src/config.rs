use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qpot", version, about = "Quantum potential and uncertainty-bound toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Run every applicable check on a state; exit 1 if any fails
    Verify,
    /// Quantum-potential, covariance and bound summary of a state
    Report,
    /// L_Q(tanh^n q) for the Poschl-Teller ground states
    Figure1,
    /// <Q> minus the linear bound for the Poschl-Teller ground states
    Figure2,
    /// Bound quantities of a state across a list of hbar values
    Sweep,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Built-in state (ho, pt, gaussian, coherent, squeezed, inverted, thermal)
    /// or a path to a state CSV / mixture JSON file
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Oscillator level; for figure1 a comma-separated list of powers
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub n: Vec<i64>,
    /// Poschl-Teller well depth (defaults to mu)
    #[arg(long, global = true)]
    pub lambda: Option<i64>,
    /// Poschl-Teller order; for figures a list `1,2,5` or range `1..40`
    #[arg(long, global = true)]
    pub mu: Option<String>,
    /// Thermal parameter beta*hbar*nu
    #[arg(long = "beta-hnu", global = true)]
    pub beta_hnu: Option<f64>,
    /// Thermal truncation (adaptive when omitted)
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Number of degrees of freedom
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Diagonal of the position covariance of a Gaussian state
    #[arg(long, global = true, value_delimiter = ',')]
    pub vdiag: Vec<f64>,
    /// Squeeze factors
    #[arg(long, global = true, value_delimiter = ',')]
    pub a: Vec<f64>,
    /// Evolution time
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    /// Oscillator frequencies, one value or one per degree of freedom
    #[arg(long, global = true, value_delimiter = ',')]
    pub nu: Vec<f64>,
    /// Reduced Planck constant; sweep accepts a list
    #[arg(long, global = true, value_delimiter = ',')]
    pub hbar: Vec<f64>,
    /// Grid points per axis
    #[arg(long = "grid-points", global = true)]
    pub grid_points: Option<usize>,
    /// Grid half-width per axis, centred on the origin
    #[arg(long = "grid-box", global = true)]
    pub grid_box: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl Options {
    pub fn single_hbar(&self) -> anyhow::Result<f64> {
        match self.hbar.as_slice() {
            [] => Ok(1.0),
            [h] if *h > 0.0 && h.is_finite() => Ok(*h),
            [h] => anyhow::bail!("--hbar must be positive, got {h}"),
            _ => anyhow::bail!("--hbar takes a single value except for sweep"),
        }
    }

    pub fn mu_list(&self, default: (i64, i64)) -> anyhow::Result<Vec<i64>> {
        match &self.mu {
            None => Ok((default.0..=default.1).collect()),
            Some(text) => parse_int_list(text),
        }
    }

    pub fn single_mu(&self) -> anyhow::Result<i64> {
        match self.mu_list((1, 1))?.as_slice() {
            [m] => Ok(*m),
            _ => anyhow::bail!("--mu takes a single value for this command"),
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// `3`, `1,2,5` or the inclusive range `1..40`.
pub fn parse_int_list(text: &str) -> anyhow::Result<Vec<i64>> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| anyhow::anyhow!("bad range start in {text:?}"))?;
        let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| anyhow::anyhow!("bad range end in {text:?}"))?;
        anyhow::ensure!(lo <= hi, "empty range {text:?}");
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| anyhow::anyhow!("bad integer {p:?} in {text:?}")))
        .collect()
}
