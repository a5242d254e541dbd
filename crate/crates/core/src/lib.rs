//! Fair net premiums for reinsurance by capital injections (RCI) on
//! spectrally negative Lévy risk models, with a Monte Carlo oracle.

pub mod error;
pub mod exec;
pub mod model;
pub mod numerics;
pub mod premium;
pub mod scale;
pub mod simulate;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{make_model, ModelError, ModelKind, ModelSpec, RawModel};
pub use premium::{
    premium, premium_extreme_loss, premium_proportional, premium_sweep, premium_with,
    BoundaryTerms, Contract, DeltaCheck, PremiumBreakdown, PremiumQuery, Pricer, PricerConfig,
};
pub use scale::ScaleEvaluator;
pub use simulate::{
    estimate_functionals, estimate_kappa_mc, estimate_premium_mc, estimate_ruin_probability,
    estimate_varphi_mc, simulate_path, Functional, McConfig, McEstimate, PathOutcome,
};
