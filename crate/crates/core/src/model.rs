//! Risk-model catalogue and the analytic primitives ψ, Φ(q), Θ(q) and ν.

use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

use crate::numerics::{find_root, gamma, integrate, NumericsError, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter {name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("sigma must be nonnegative and finite, got {0}")]
    NegativeSigma(f64),
    #[error("{kind} requires sigma {requirement}, got {sigma}")]
    SigmaMismatch {
        kind: ModelKind,
        requirement: &'static str,
        sigma: f64,
    },
    #[error("stability index alpha must lie in (1, 2), got {0}")]
    AlphaOutOfRange(f64),
    #[error("net profit condition violated: mean claim rate {mean} >= premium rate {c}")]
    NetProfitViolated { mean: f64, c: f64 },
    #[error("{kind} model is missing parameter {name}")]
    MissingParameter { kind: ModelKind, name: &'static str },
    #[error("give either c or theta for {0}, not both")]
    ConflictingRate(ModelKind),
    #[error("discount rate must be nonnegative and finite, got {0}")]
    InvalidRate(f64),
    #[error("{op} is not defined for the {kind} model")]
    NotApplicable { op: &'static str, kind: ModelKind },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    ClassicalExp,
    PerturbedExp,
    StableSN,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ClassicalExp => "classical-exp",
            ModelKind::PerturbedExp => "perturbed-exp",
            ModelKind::StableSN => "stable",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated risk model.
///
/// For the exponential-claims models `c` is the premium rate. For the
/// tempered stable model `c` is the parameter of `ψ(s) = (s + c)^α − c^α`,
/// which also plays the role of the premium rate in the premium formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    ClassicalExp {
        lambda: f64,
        mu: f64,
        c: f64,
    },
    PerturbedExp {
        lambda: f64,
        mu: f64,
        sigma: f64,
        c: f64,
    },
    StableSN {
        alpha: f64,
        c: f64,
    },
}

/// Unvalidated parameters as they arrive from a user interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawModel {
    pub kind: ModelKind,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub theta: Option<f64>,
}

impl RawModel {
    pub fn new(kind: ModelKind) -> Self {
        RawModel {
            kind,
            lambda: None,
            mu: None,
            sigma: None,
            alpha: None,
            c: None,
            theta: None,
        }
    }
}

/// Validates a raw parameter set.
///
/// For the exponential-claims models the premium rate may be given directly
/// as `c` or through a safety loading, `c = (1 + θ) λ / μ`.
pub fn make_model(raw: &RawModel) -> Result<ModelSpec, ModelError> {
    let need = |v: Option<f64>, name| {
        v.ok_or(ModelError::MissingParameter {
            kind: raw.kind,
            name,
        })
    };
    match raw.kind {
        ModelKind::ClassicalExp | ModelKind::PerturbedExp => {
            let lambda = positive("lambda", need(raw.lambda, "lambda")?)?;
            let mu = positive("mu", need(raw.mu, "mu")?)?;
            let c = match (raw.c, raw.theta) {
                (Some(_), Some(_)) => return Err(ModelError::ConflictingRate(raw.kind)),
                (Some(c), None) => c,
                (None, Some(theta)) => (1.0 + theta) * lambda / mu,
                (None, None) => {
                    return Err(ModelError::MissingParameter {
                        kind: raw.kind,
                        name: "c or theta",
                    })
                }
            };
            if raw.kind == ModelKind::ClassicalExp {
                if let Some(s) = raw.sigma {
                    if s != 0.0 {
                        return Err(ModelError::SigmaMismatch {
                            kind: raw.kind,
                            requirement: "= 0",
                            sigma: s,
                        });
                    }
                }
                ModelSpec::classical_exp(lambda, mu, c)
            } else {
                ModelSpec::perturbed_exp(lambda, mu, need(raw.sigma, "sigma")?, c)
            }
        }
        ModelKind::StableSN => {
            if let Some(s) = raw.sigma {
                if s != 0.0 {
                    return Err(ModelError::SigmaMismatch {
                        kind: raw.kind,
                        requirement: "= 0",
                        sigma: s,
                    });
                }
            }
            ModelSpec::stable(need(raw.alpha, "alpha")?, need(raw.c, "c")?)
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

fn check_net_profit(lambda: f64, mu: f64, c: f64) -> Result<(), ModelError> {
    let mean = lambda / mu;
    if mean >= c {
        Err(ModelError::NetProfitViolated { mean, c })
    } else {
        Ok(())
    }
}

const TAIL_QUADRATURE: QuadratureConfig = QuadratureConfig {
    abs_tol: 1e-13,
    rel_tol: 1e-11,
    max_subdivisions: 10_000,
};

impl ModelSpec {
    pub fn classical_exp(lambda: f64, mu: f64, c: f64) -> Result<Self, ModelError> {
        let lambda = positive("lambda", lambda)?;
        let mu = positive("mu", mu)?;
        let c = positive("c", c)?;
        check_net_profit(lambda, mu, c)?;
        Ok(ModelSpec::ClassicalExp { lambda, mu, c })
    }

    /// Classical model with `c = (1 + θ) λ / μ`.
    pub fn classical_from_loading(lambda: f64, mu: f64, theta: f64) -> Result<Self, ModelError> {
        Self::classical_exp(lambda, mu, (1.0 + theta) * lambda / mu)
    }

    pub fn perturbed_exp(lambda: f64, mu: f64, sigma: f64, c: f64) -> Result<Self, ModelError> {
        let lambda = positive("lambda", lambda)?;
        let mu = positive("mu", mu)?;
        let c = positive("c", c)?;
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(ModelError::NegativeSigma(sigma));
        }
        if sigma == 0.0 {
            return Err(ModelError::SigmaMismatch {
                kind: ModelKind::PerturbedExp,
                requirement: "> 0",
                sigma,
            });
        }
        check_net_profit(lambda, mu, c)?;
        Ok(ModelSpec::PerturbedExp {
            lambda,
            mu,
            sigma,
            c,
        })
    }

    pub fn perturbed_from_loading(
        lambda: f64,
        mu: f64,
        sigma: f64,
        theta: f64,
    ) -> Result<Self, ModelError> {
        Self::perturbed_exp(lambda, mu, sigma, (1.0 + theta) * lambda / mu)
    }

    pub fn stable(alpha: f64, c: f64) -> Result<Self, ModelError> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(ModelError::AlphaOutOfRange(alpha));
        }
        let c = positive("c", c)?;
        Ok(ModelSpec::StableSN { alpha, c })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::ClassicalExp { .. } => ModelKind::ClassicalExp,
            ModelSpec::PerturbedExp { .. } => ModelKind::PerturbedExp,
            ModelSpec::StableSN { .. } => ModelKind::StableSN,
        }
    }

    pub fn premium_rate(&self) -> f64 {
        match *self {
            ModelSpec::ClassicalExp { c, .. }
            | ModelSpec::PerturbedExp { c, .. }
            | ModelSpec::StableSN { c, .. } => c,
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            ModelSpec::PerturbedExp { sigma, .. } => sigma,
            _ => 0.0,
        }
    }

    /// `(λ, μ)` for the exponential-claims models.
    pub fn exponential_claims(&self) -> Option<(f64, f64)> {
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, .. }
            | ModelSpec::PerturbedExp { lambda, mu, .. } => Some((lambda, mu)),
            ModelSpec::StableSN { .. } => None,
        }
    }

    /// Safety loading `θ = cμ/λ − 1`.
    pub fn theta(&self) -> Option<f64> {
        self.exponential_claims()
            .map(|(lambda, mu)| self.premium_rate() * mu / lambda - 1.0)
    }

    /// ψ(s), defined for `s > −μ` (exponential claims) or `s > −c` (stable).
    pub fn laplace_exponent(&self, s: f64) -> f64 {
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, c } => c * s - lambda * s / (mu + s),
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => c * s + 0.5 * sigma * sigma * s * s - lambda * s / (mu + s),
            ModelSpec::StableSN { alpha, c } => (s + c).powf(alpha) - c.powf(alpha),
        }
    }

    /// ψ'(s) on the same domain as `laplace_exponent`.
    pub fn laplace_exponent_prime(&self, s: f64) -> f64 {
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, c } => c - lambda * mu / ((mu + s) * (mu + s)),
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => c + sigma * sigma * s - lambda * mu / ((mu + s) * (mu + s)),
            ModelSpec::StableSN { alpha, c } => alpha * (s + c).powf(alpha - 1.0),
        }
    }

    /// ψ continued analytically to the complex plane (principal branch for stable).
    pub fn laplace_exponent_complex(&self, s: Complex64) -> Complex64 {
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, c } => c * s - lambda * s / (mu + s),
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => c * s + 0.5 * sigma * sigma * s * s - lambda * s / (mu + s),
            ModelSpec::StableSN { alpha, c } => (s + c).powf(alpha) - c.powf(alpha),
        }
    }

    /// Right inverse Φ(q) = sup{s ≥ 0 : ψ(s) = q}.
    pub fn phi_inverse(&self, q: f64) -> Result<f64, ModelError> {
        check_rate(q)?;
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, c } => Ok(classical_roots(lambda, mu, c, q).0),
            ModelSpec::StableSN { alpha, c } => Ok((q + c.powf(alpha)).powf(1.0 / alpha) - c),
            ModelSpec::PerturbedExp { sigma, c, .. } => {
                if q == 0.0 {
                    return Ok(0.0);
                }
                self.perturbed_phi(q, (q / c).max((2.0 * q).sqrt() / sigma))
            }
        }
    }

    fn perturbed_phi(&self, q: f64, guess: f64) -> Result<f64, ModelError> {
        let g = |s: f64| self.laplace_exponent(s) - q;
        let mut hi = guess.max(1e-3);
        while g(hi) <= 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        let mut s = guess.min(hi);
        for _ in 0..200 {
            let value = g(s);
            if value > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let mut next = s - value / self.laplace_exponent_prime(s);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-15 * next.abs() || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            s = next;
        }
        Err(NumericsError::RootNotConverged {
            lo,
            hi,
            iterations: 200,
        }
        .into())
    }

    /// The negative root Θ(q) of ψ(s) = q for the exponential-claims models.
    ///
    /// At `q = 0` this is the nonzero root of ψ, e.g. `λ/c − μ` for the
    /// classical model.
    pub fn theta_root(&self, q: f64) -> Result<f64, ModelError> {
        check_rate(q)?;
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, c } => Ok(classical_roots(lambda, mu, c, q).1),
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => {
                let root = if q == 0.0 {
                    let g = |s: f64| c + 0.5 * sigma * sigma * s - lambda / (mu + s);
                    find_root(g, -mu * (1.0 - 1e-12), 0.0, 1e-15)?
                } else {
                    let g = |s: f64| self.laplace_exponent(s) - q;
                    let mut eps = 0.5 * mu;
                    while g(-mu + eps) <= 0.0 {
                        eps *= 0.5;
                    }
                    find_root(g, -mu + eps, 0.0, 1e-15)?
                };
                // One Newton step removes the residual left by the bracket tolerance.
                let polished =
                    root - (self.laplace_exponent(root) - q) / self.laplace_exponent_prime(root);
                Ok(if polished < 0.0 && polished > -mu {
                    polished
                } else {
                    root
                })
            }
            ModelSpec::StableSN { .. } => Err(ModelError::NotApplicable {
                op: "theta_root",
                kind: self.kind(),
            }),
        }
    }

    /// Density of the Lévy measure ν of the claims process.
    pub fn levy_density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, .. }
            | ModelSpec::PerturbedExp { lambda, mu, .. } => lambda * mu * (-mu * y).exp(),
            ModelSpec::StableSN { alpha, c } => {
                (-c * y - (1.0 + alpha) * y.ln()).exp() / gamma(-alpha)
            }
        }
    }

    /// Tail ν(y, ∞).
    pub fn levy_tail(&self, y: f64) -> Result<f64, ModelError> {
        if !(y > 0.0) {
            return Err(NumericsError::Domain {
                what: "Levy tail",
                arg: y,
            }
            .into());
        }
        match *self {
            ModelSpec::ClassicalExp { lambda, mu, .. }
            | ModelSpec::PerturbedExp { lambda, mu, .. } => Ok(lambda * (-mu * y).exp()),
            ModelSpec::StableSN { .. } => Ok(integrate(
                |u| self.levy_density(u),
                y,
                f64::INFINITY,
                &TAIL_QUADRATURE,
            )?),
        }
    }

    /// E[S₁] = ∫ y ν(dy); infinite for the stable model, whose small jumps
    /// are not summable.
    pub fn mean_jump(&self) -> f64 {
        match self.exponential_claims() {
            Some((lambda, mu)) => lambda / mu,
            None => f64::INFINITY,
        }
    }

    /// ρ = E[S₁]/c, only defined when the mean jump is finite.
    pub fn rho(&self) -> Option<f64> {
        let mean = self.mean_jump();
        mean.is_finite().then(|| mean / self.premium_rate())
    }
}

fn check_rate(q: f64) -> Result<(), ModelError> {
    if q >= 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidRate(q))
    }
}

/// Both roots of `c s² + (cμ − λ − q) s − qμ = 0`, largest first, each taken
/// from the cancellation-free branch of the quadratic formula.
fn classical_roots(lambda: f64, mu: f64, c: f64, q: f64) -> (f64, f64) {
    let b = q + lambda - c * mu;
    let eta = (b * b + 4.0 * q * mu * c).sqrt();
    if b < 0.0 {
        let theta = (b - eta) / (2.0 * c);
        (-q * mu / (c * theta), theta)
    } else {
        let phi = (b + eta) / (2.0 * c);
        let theta = if phi > 0.0 {
            -q * mu / (c * phi)
        } else {
            (b - eta) / (2.0 * c)
        };
        (phi, theta)
    }
}
