//! Command-line front end: premium queries, parameter sweeps, figure series
//! and the Monte Carlo validation campaign.

pub mod args;
pub mod curve;
pub mod figures;
pub mod validate;

use std::io::Write;
use std::path::{Path, PathBuf};

use rci_core::{premium_with, PremiumQuery, PricerConfig};
use thiserror::Error;

use args::{Cli, Command, PremiumArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rci_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float");
    format!("{rounded}")
}

/// `start, start + step, …` up to `stop` inclusive, each rounded to 12
/// significant digits so that written values are the ones evaluated.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Usage("grid bounds must be finite".into()));
    }
    if !(step > 0.0) {
        return Err(CliError::Usage(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(start < stop) {
        return Err(CliError::Usage(format!(
            "empty range: start {start} is not below stop {stop}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            fmt_num(start + i as f64 * step)
                .parse()
                .expect("formatted float")
        })
        .collect())
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Premium(args) => cmd_premium(&args, out),
        Command::Curve(args) => curve::cmd_curve(&args, out),
        Command::Validate(args) => validate::cmd_validate(&args, out),
        Command::Figures(args) => figures::cmd_figures(&args, out),
    }
}

pub fn cmd_premium(args: &PremiumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = args.model.build()?;
    let contract = args.contract()?;
    let query = if args.contract.allow_full_share {
        PremiumQuery::with_share_override(args.q, args.x, contract)?
    } else {
        PremiumQuery::new(args.q, args.x, contract)?
    };
    let cfg = PricerConfig {
        boundary: args.contract.boundary_terms.into(),
        ..PricerConfig::default()
    };
    let b = premium_with(&model, &query, cfg)?;
    let lines = [
        ("model", model.kind().to_string()),
        ("premium", fmt_num(b.premium)),
        ("phi_term", fmt_num(b.phi_term)),
        ("kappa_term", fmt_num(b.kappa_term)),
        ("delta_factor", fmt_num(b.delta_factor)),
        ("i_factor", fmt_num(b.i_factor)),
        ("i_m", fmt_num(b.i_m_value)),
        ("share", fmt_num(b.share)),
    ];
    let stdout = PathBuf::from("<stdout>");
    for (k, v) in lines {
        writeln!(out, "{k:<13}{v}").map_err(|e| CliError::io(&stdout, e))?;
    }
    Ok(())
}
