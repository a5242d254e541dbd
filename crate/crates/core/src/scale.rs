//! q-scale functions W^(q), their derivatives and the density factor
//! `f = W' − Φ(q) W`.

use num_complex::Complex64;

use crate::model::{ModelError, ModelSpec};
use crate::numerics::{laplace_invert, mittag_leffler, InversionMethod, NumericsError};

/// Agreement required between the two Talbot evaluations.
const INVERSION_TOL: f64 = 1e-7;

/// Evaluates W^(q) for a fixed model and discount rate.
///
/// Holds only plain numbers, so it is `Send + Sync` and evaluation is
/// read-only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEvaluator {
    model: ModelSpec,
    q: f64,
    phi: f64,
    theta: Option<f64>,
    inversion: InversionMethod,
}

impl ScaleEvaluator {
    pub fn new(model: ModelSpec, q: f64) -> Result<Self, ModelError> {
        let phi = model.phi_inverse(q)?;
        let theta = match model {
            ModelSpec::StableSN { .. } => None,
            _ => Some(model.theta_root(q)?),
        };
        Ok(ScaleEvaluator {
            model,
            q,
            phi,
            theta,
            inversion: InversionMethod::default(),
        })
    }

    /// Replaces the inversion scheme used for the perturbed model and for
    /// `w_q_by_inversion`.
    pub fn with_inversion(mut self, method: InversionMethod) -> Self {
        self.inversion = method;
        self
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Θ(q) for the exponential-claims models.
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// η_q = c (Φ − Θ) for the classical model.
    fn eta(&self) -> f64 {
        self.model.premium_rate() * (self.phi - self.theta.unwrap_or(0.0))
    }

    /// W^(q)(0): 1/c for the classical model, 0 otherwise.
    pub fn w_q_at_zero(&self) -> f64 {
        match self.model {
            ModelSpec::ClassicalExp { c, .. } => 1.0 / c,
            _ => 0.0,
        }
    }

    /// W^(q)(x); zero for negative `x`.
    pub fn w_q(&self, x: f64) -> Result<f64, NumericsError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        match self.model {
            ModelSpec::ClassicalExp { mu, .. } => {
                let theta = self.theta.unwrap_or(0.0);
                Ok(
                    ((mu + self.phi) * (self.phi * x).exp() - (mu + theta) * (theta * x).exp())
                        / self.eta(),
                )
            }
            ModelSpec::StableSN { alpha, c } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let z = (self.q + c.powf(alpha)) * x.powf(alpha);
                Ok((-c * x).exp() * x.powf(alpha - 1.0) * mittag_leffler(alpha, alpha, z)?)
            }
            ModelSpec::PerturbedExp { .. } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                self.w_q_by_inversion(x)
            }
        }
    }

    /// W'^(q)(x) for `x > 0`; at `x = 0` the right derivative, which is
    /// infinite for the stable model.
    pub fn w_q_prime(&self, x: f64) -> Result<f64, NumericsError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        match self.model {
            ModelSpec::ClassicalExp { mu, .. } => {
                let theta = self.theta.unwrap_or(0.0);
                Ok(((mu + self.phi) * self.phi * (self.phi * x).exp()
                    - (mu + theta) * theta * (theta * x).exp())
                    / self.eta())
            }
            ModelSpec::StableSN { alpha, c } => {
                if x == 0.0 {
                    return Ok(f64::INFINITY);
                }
                let z = (self.q + c.powf(alpha)) * x.powf(alpha);
                let lead = -c * x.powf(alpha - 1.0) * mittag_leffler(alpha, alpha, z)?;
                let series = x.powf(alpha - 2.0) * mittag_leffler(alpha, alpha - 1.0, z)?;
                Ok((-c * x).exp() * (lead + series))
            }
            ModelSpec::PerturbedExp { sigma, .. } => {
                if x == 0.0 {
                    return Ok(2.0 / (sigma * sigma));
                }
                // W(0) = 0, so s / (ψ(s) − q) transforms W'.
                let model = self.model;
                let q = self.q;
                laplace_invert(
                    move |s: Complex64| s / (model.laplace_exponent_complex(s) - q),
                    x,
                    self.inversion,
                    self.phi,
                    INVERSION_TOL,
                )
            }
        }
    }

    /// `f(x) = W'^(q)(x) − Φ(q) W^(q)(x)` for `x > 0`.
    pub fn f_density(&self, x: f64) -> Result<f64, NumericsError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        match self.model {
            ModelSpec::ClassicalExp { mu, c, .. } => {
                let theta = self.theta.unwrap_or(0.0);
                Ok((mu + theta) / c * (theta * x).exp())
            }
            ModelSpec::PerturbedExp { sigma, .. } => {
                if x == 0.0 {
                    return Ok(2.0 / (sigma * sigma));
                }
                // (s − Φ) / (ψ(s) − q) has a removable singularity at Φ; its
                // rightmost pole is Θ, so the shifted inverse does not decay.
                let model = self.model;
                let (q, phi) = (self.q, self.phi);
                laplace_invert(
                    move |s: Complex64| (s - phi) / (model.laplace_exponent_complex(s) - q),
                    x,
                    self.inversion,
                    self.theta.unwrap_or(0.0),
                    INVERSION_TOL,
                )
            }
            ModelSpec::StableSN { .. } => Ok(self.w_q_prime(x)? - self.phi * self.w_q(x)?),
        }
    }

    /// W^(q)(x) by numerical inversion of `1 / (ψ(s) − q)`, for any model.
    pub fn w_q_by_inversion(&self, x: f64) -> Result<f64, NumericsError> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let model = self.model;
        let q = self.q;
        laplace_invert(
            move |s: Complex64| 1.0 / (model.laplace_exponent_complex(s) - q),
            x,
            self.inversion,
            self.phi,
            INVERSION_TOL,
        )
    }
}
