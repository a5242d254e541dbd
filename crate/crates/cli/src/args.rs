use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rci_core::{make_model, BoundaryTerms, Contract, ModelKind, ModelSpec, RawModel};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "rci",
    version,
    about = "Fair net premiums for reinsurance by capital injections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Premium of one contract with its breakdown
    Premium(PremiumArgs),
    /// Premium curve over a grid of one variable, as CSV
    Curve(CurveArgs),
    /// Monte Carlo validation campaign against the premium formulas
    Validate(ValidateArgs),
    /// CSV series for the six figure panels
    Figures(FiguresArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    ClassicalExp,
    PerturbedExp,
    Stable,
}

impl From<ModelChoice> for ModelKind {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::ClassicalExp => ModelKind::ClassicalExp,
            ModelChoice::PerturbedExp => ModelKind::PerturbedExp,
            ModelChoice::Stable => ModelKind::StableSN,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractChoice {
    ExtremeLoss,
    Proportional,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryChoice {
    /// κ = f∗t and φ = f∗h_m as they stand
    #[default]
    Omitted,
    /// Add the W(0) and σ² f/2 terms at the boundary
    Included,
}

impl From<BoundaryChoice> for BoundaryTerms {
    fn from(b: BoundaryChoice) -> Self {
        match b {
            BoundaryChoice::Omitted => BoundaryTerms::Omitted,
            BoundaryChoice::Included => BoundaryTerms::Included,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    M,
    Theta,
    Q,
    X,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::M => "m",
            Variable::Theta => "theta",
            Variable::Q => "q",
            Variable::X => "x",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelChoice::ClassicalExp)]
    pub model: ModelChoice,
    /// Claim arrival intensity
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Rate of the exponential claim sizes
    #[arg(long)]
    pub mu: Option<f64>,
    /// Diffusion volatility
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Stability index in (1, 2)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Premium rate, or the stable model's tempering parameter
    #[arg(long)]
    pub c: Option<f64>,
    /// Safety loading; sets c = (1 + theta) lambda / mu
    #[arg(long)]
    pub theta: Option<f64>,
}

impl ModelArgs {
    pub fn raw(&self) -> RawModel {
        RawModel {
            kind: self.model.into(),
            lambda: self.lambda,
            mu: self.mu,
            sigma: self.sigma,
            alpha: self.alpha,
            c: self.c,
            theta: self.theta,
        }
    }

    pub fn build(&self) -> Result<ModelSpec, CliError> {
        Ok(make_model(&self.raw()).map_err(rci_core::Error::from)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ContractArgs {
    #[arg(long, value_enum, default_value_t = ContractChoice::ExtremeLoss)]
    pub contract: ContractChoice,
    /// Share of every injection paid by a proportional contract
    #[arg(long)]
    pub a: Option<f64>,
    /// Accept proportional shares a >= 1
    #[arg(long)]
    pub allow_full_share: bool,
    #[arg(long, value_enum, default_value_t = BoundaryChoice::Omitted)]
    pub boundary_terms: BoundaryChoice,
}

#[derive(Args, Debug, Clone)]
pub struct PremiumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub contract: ContractArgs,
    /// Discount rate
    #[arg(long)]
    pub q: f64,
    /// Initial surplus
    #[arg(long)]
    pub x: f64,
    /// Retention level of an extreme-loss contract
    #[arg(long, default_value_t = 0.0)]
    pub m: f64,
}

impl PremiumArgs {
    pub fn contract(&self) -> Result<Contract, CliError> {
        contract_for(&self.contract, self.m)
    }
}

pub fn contract_for(args: &ContractArgs, m: f64) -> Result<Contract, CliError> {
    match args.contract {
        ContractChoice::ExtremeLoss => {
            if args.a.is_some() {
                return Err(CliError::Usage(
                    "--a applies to proportional contracts only".into(),
                ));
            }
            Ok(Contract::ExtremeLoss { m })
        }
        ContractChoice::Proportional => match args.a {
            Some(a) => Ok(Contract::Proportional { a }),
            None => Err(CliError::Usage("a proportional contract needs --a".into())),
        },
    }
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub contract: ContractArgs,
    /// Swept variable
    #[arg(long = "var", value_enum)]
    pub variable: Variable,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long)]
    pub step: f64,
    /// Discount rates, one series each
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Initial surplus levels, one series each
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Retention levels, one series each
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Euler step for the Brownian part
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Paths stop once the discount factor falls below this value
    #[arg(long, default_value_t = 1e-4)]
    pub horizon_eps: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    #[arg(long, default_value_t = 2.5)]
    pub x: f64,
    /// Output directory
    #[arg(long, default_value = "validation")]
    pub out: PathBuf,
}

impl ValidateArgs {
    /// Model with λ = μ = 1 and θ = 0.25 filled in where nothing was given.
    pub fn build_model(&self) -> Result<ModelSpec, CliError> {
        let mut m = self.model.clone();
        if m.model != ModelChoice::Stable {
            m.lambda.get_or_insert(1.0);
            m.mu.get_or_insert(1.0);
            if m.c.is_none() {
                m.theta.get_or_insert(0.25);
            }
        }
        m.build()
    }
}

#[derive(Args, Debug, Clone)]
pub struct FiguresArgs {
    /// Output directory
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = BoundaryChoice::Omitted)]
    pub boundary_terms: BoundaryChoice,
}
