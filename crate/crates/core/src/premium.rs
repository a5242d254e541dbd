//! Fair net premiums of extreme-loss and proportional RCI contracts.
//!
//! A premium is assembled as `Π₁(q,x,m) = φ(q,x,m) + δ(q,σ,m) κ(q,x)` where
//! `φ = f∗h_m`, `κ = f∗t`, `f = W' − Φ W` and `δ = I_m / (1 − I)`. The
//! proportional premium is `Π₂(q,x,a) = a Π₁(q,x,0)`.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{ModelError, ModelSpec};
use crate::numerics::{
    convolve_at_singular, integrate, integrate_singular, NumericsError, QuadratureConfig,
};
use crate::scale::ScaleEvaluator;

/// Smallest accepted discount rate.
pub const MIN_RATE: f64 = 1e-8;
/// Below this discount rate a warning is logged.
pub const LOW_RATE_WARNING: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contract {
    /// Pays each injection `C` in full when `C >= m`.
    ExtremeLoss { m: f64 },
    /// Pays the share `a C` of every injection.
    Proportional { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumQuery {
    pub q: f64,
    pub x: f64,
    pub contract: Contract,
}

impl PremiumQuery {
    /// Validated query; proportional shares must lie in `[0, 1)`.
    pub fn new(q: f64, x: f64, contract: Contract) -> Result<Self> {
        Self::validate(q, x, contract, false)
    }

    /// Like `new` but also accepts proportional shares `a >= 1`.
    pub fn with_share_override(q: f64, x: f64, contract: Contract) -> Result<Self> {
        Self::validate(q, x, contract, true)
    }

    fn validate(q: f64, x: f64, contract: Contract, allow_full_share: bool) -> Result<Self> {
        if q == 0.0 {
            return Err(Error::InvalidQuery(
                "q = 0 is not allowed: the discount rate must be positive".into(),
            ));
        }
        if !(q >= MIN_RATE) || !q.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "discount rate q must be finite and at least {MIN_RATE:e}, got {q}"
            )));
        }
        if q < LOW_RATE_WARNING {
            log::warn!("discount rate q = {q:e} is below {LOW_RATE_WARNING:e}, close to the undiscounted limit");
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "initial surplus x must be positive and finite, got {x}"
            )));
        }
        match contract {
            Contract::ExtremeLoss { m } => {
                if !(m >= 0.0) || !m.is_finite() {
                    return Err(Error::InvalidQuery(format!(
                        "retention m must be nonnegative and finite, got {m}"
                    )));
                }
            }
            Contract::Proportional { a } => {
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidQuery(format!(
                        "share a must be nonnegative and finite, got {a}"
                    )));
                }
                if a >= 1.0 && !allow_full_share {
                    return Err(Error::InvalidQuery(format!(
                        "share a must be below 1, got {a}; use the share override to allow it"
                    )));
                }
            }
        }
        Ok(PremiumQuery { q, x, contract })
    }
}

/// Whether κ and φ carry the terms that the convolution representation
/// `f∗t`, `f∗h_m` leaves out at the boundary.
///
/// With `Included`, κ gains `W(0) t(x) + σ² f(x) / 2` and φ gains
/// `W(0) h_m(x)`; κ then equals `E[e^{−qτ_x}; τ_x < ∞]` and φ the discounted
/// overshoot functional. Both extra terms vanish when `W(0) = 0` and `σ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryTerms {
    #[default]
    Omitted,
    Included,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricerConfig {
    /// Tolerances for integrals nested inside another integrand.
    pub inner: QuadratureConfig,
    /// Tolerances for outermost integrals and convolutions.
    pub outer: QuadratureConfig,
    pub boundary: BoundaryTerms,
}

impl Default for PricerConfig {
    fn default() -> Self {
        PricerConfig {
            inner: QuadratureConfig {
                abs_tol: 1e-14,
                rel_tol: 1e-12,
                max_subdivisions: 10_000,
            },
            outer: QuadratureConfig {
                abs_tol: 1e-13,
                rel_tol: 1e-10,
                max_subdivisions: 10_000,
            },
            boundary: BoundaryTerms::Omitted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumBreakdown {
    /// φ(q, x, m), at `m = 0` for proportional contracts.
    pub phi_term: f64,
    /// κ(q, x).
    pub kappa_term: f64,
    /// δ(q, σ, m).
    pub delta_factor: f64,
    /// I = ∫ e^{Φu} H∗G(du).
    pub i_factor: f64,
    /// I_m.
    pub i_m_value: f64,
    /// 1 for extreme-loss contracts, `a` for proportional ones.
    pub share: f64,
    /// `share * (phi_term + delta_factor * kappa_term)`.
    pub premium: f64,
}

/// Two evaluations of δ: through the kernel integral and through the closed
/// expression parameterised by ρ = E[S₁]/c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCheck {
    pub m: f64,
    pub via_kernel: f64,
    /// `None` where the closed expression needs ρ and ρ is undefined.
    pub closed_form: Option<f64>,
    /// The ρ that makes the closed expression reproduce `via_kernel`, when ρ
    /// enters it.
    pub implied_rho: Option<f64>,
    pub rel_gap: Option<f64>,
}

/// Carries the first error raised inside a quadrature integrand, which must
/// itself return a plain `f64`.
struct ErrorSlot(RefCell<Option<Error>>);

impl ErrorSlot {
    fn new() -> Self {
        ErrorSlot(RefCell::new(None))
    }

    fn unwrap<E: Into<Error>>(&self, value: std::result::Result<f64, E>) -> f64 {
        match value {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e.into());
                f64::NAN
            }
        }
    }

    fn finish(self, outer: std::result::Result<f64, NumericsError>) -> Result<f64> {
        match (self.0.into_inner(), outer) {
            (Some(e), _) => Err(e),
            (None, r) => Ok(r?),
        }
    }
}

/// `(ΦL + e^{−ΦL} − 1) / Φ² = ∫_0^L (L − s) e^{−Φs} ds`.
fn ramp(phi: f64, l: f64) -> f64 {
    let a = phi * l;
    if a < 1e-3 {
        0.5 * l * l * (1.0 - a / 3.0 + a * a / 12.0 - a * a * a / 60.0)
    } else {
        (a + (-a).exp_m1()) / (phi * phi)
    }
}

/// `∫_0^L (m + L − s) e^{−Φs} ds`.
fn overshoot_kernel(phi: f64, m: f64, l: f64) -> f64 {
    m * -(-phi * l).exp_m1() / phi + ramp(phi, l)
}

/// `(e^z − 1) / z`.
fn exprel(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

/// Premium calculator bound to a model and a discount rate.
#[derive(Debug, Clone, Copy)]
pub struct Pricer {
    model: ModelSpec,
    q: f64,
    scale: ScaleEvaluator,
    cfg: PricerConfig,
}

impl Pricer {
    pub fn new(model: ModelSpec, q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "discount rate q must be positive and finite, got {q}"
            )));
        }
        Ok(Pricer {
            model,
            q,
            scale: ScaleEvaluator::new(model, q)?,
            cfg: PricerConfig::default(),
        })
    }

    pub fn with_config(mut self, cfg: PricerConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn with_boundary_terms(mut self, boundary: BoundaryTerms) -> Self {
        self.cfg.boundary = boundary;
        self
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn phi(&self) -> f64 {
        self.scale.phi()
    }

    pub fn scale(&self) -> &ScaleEvaluator {
        &self.scale
    }

    pub fn config(&self) -> &PricerConfig {
        &self.cfg
    }

    /// Blumenthal–Getoor index of ν: α for the stable model, 0 otherwise.
    fn jump_index(&self) -> f64 {
        match self.model {
            ModelSpec::StableSN { alpha, .. } => alpha,
            _ => 0.0,
        }
    }

    /// `∫_0^∞ ν'(lo + L) g(L) dL`, where `ν'(L) g(L) ~ L^beta` near 0 when `lo = 0`.
    ///
    /// For `0 < lo < 1` the variable is rescaled by `lo`, the width of the
    /// peak of `ν'` near its singularity.
    fn levy_integral<G>(&self, lo: f64, g: G, beta: f64) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        let cfg = &self.cfg.inner;
        let nu = |l: f64| self.model.levy_density(lo + l) * g(l);
        if lo > 0.0 {
            let s = lo.min(1.0);
            return Ok(integrate(|z| s * nu(s * z), 0.0, f64::INFINITY, cfg)?);
        }
        let near = integrate_singular(nu, 0.0, 1.0, beta, cfg)?;
        Ok(near + integrate(nu, 1.0, f64::INFINITY, cfg)?)
    }

    fn check_x(x: f64) -> Result<()> {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(NumericsError::Domain {
                what: "surplus level",
                arg: x,
            }
            .into())
        }
    }

    /// `t(x) = e^{Φx} ∫_x^∞ e^{−Φv} ν(v,∞) dv`.
    pub fn t(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        match self.model {
            ModelSpec::ClassicalExp { lambda, mu, .. }
            | ModelSpec::PerturbedExp { lambda, mu, .. } => {
                Ok(lambda * (-mu * x).exp() / (self.phi() + mu))
            }
            ModelSpec::StableSN { .. } => self.t_by_quadrature(x),
        }
    }

    /// `t(x)` from the Lévy density, `Φ⁻¹ ∫_x^∞ ν'(u) (1 − e^{−Φ(u−x)}) du`.
    pub fn t_by_quadrature(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x == 0.0 && self.model.kind() == crate::model::ModelKind::StableSN {
            return Ok(f64::INFINITY);
        }
        let phi = self.phi();
        let v = self.levy_integral(x, |l| -(-phi * l).exp_m1(), -self.jump_index())?;
        Ok(v / phi)
    }

    /// `h_m(x) = e^{Φx} ∫_x^∞ e^{−Φv} ∫_{(0,∞)} (u + m) ν(du + v + m) dv`.
    pub fn h_m(&self, m: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        match self.model {
            ModelSpec::ClassicalExp { lambda, mu, .. }
            | ModelSpec::PerturbedExp { lambda, mu, .. } => {
                Ok(lambda * (m * mu + 1.0) * (-mu * (x + m)).exp() / (mu * (self.phi() + mu)))
            }
            ModelSpec::StableSN { .. } => self.h_m_by_quadrature(m, x),
        }
    }

    /// `h_m(x)` reduced to a single integral over the Lévy density,
    /// `∫_{x+m}^∞ ν'(w) ∫_0^{w−m−x} (w − x − s) e^{−Φs} ds dw`.
    pub fn h_m_by_quadrature(&self, m: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let phi = self.phi();
        self.levy_integral(
            x + m,
            |l| overshoot_kernel(phi, m, l),
            1.0 - self.jump_index(),
        )
    }

    /// Variant of `h_m` whose inner integral is `∫_{(v,∞)} (u − v) ν(du + m)`;
    /// it differs from `h_m` by `m t(x + m)`.
    pub fn h_m_statement_variant(&self, m: f64, x: f64) -> Result<f64> {
        Ok(self.h_m(m, x)? - m * self.t(x + m)?)
    }

    /// `f∗g(x)` for `g(y) ~ y^beta_g` at the origin. For the stable model
    /// `f(y) ~ y^{α−2}`.
    fn convolve_with_f<G>(&self, g: G, x: f64, beta_g: f64) -> Result<f64>
    where
        G: Fn(f64) -> Result<f64>,
    {
        let slot = ErrorSlot::new();
        let beta_f = match self.model {
            ModelSpec::StableSN { alpha, .. } => alpha - 2.0,
            _ => 0.0,
        };
        let outer = convolve_at_singular(
            |y| slot.unwrap(self.scale.f_density(y)),
            |y| slot.unwrap(g(y)),
            x,
            beta_f,
            beta_g,
            &self.cfg.outer,
        );
        slot.finish(outer)
    }

    /// κ(q, x). Closed form for the classical model, convolution otherwise.
    pub fn kappa(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        match self.model {
            ModelSpec::ClassicalExp { lambda, mu, c } => {
                let theta = self.scale.theta().unwrap_or(0.0);
                let pre = lambda / (c * (mu + self.phi()));
                Ok(match self.cfg.boundary {
                    BoundaryTerms::Omitted => pre * ((theta * x).exp() - (-mu * x).exp()),
                    BoundaryTerms::Included => pre * (theta * x).exp(),
                })
            }
            _ => self.kappa_by_convolution(x),
        }
    }

    /// κ(q, x) = f∗t(x), plus the boundary terms when configured.
    pub fn kappa_by_convolution(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let core = self.convolve_with_f(|y| self.t(y), x, 1.0 - self.jump_index())?;
        Ok(core + self.kappa_boundary(x)?)
    }

    /// `W(0) t(x) + σ² f(x) / 2` when boundary terms are included, else 0.
    pub fn kappa_boundary(&self, x: f64) -> Result<f64> {
        if self.cfg.boundary == BoundaryTerms::Omitted {
            return Ok(0.0);
        }
        let sigma = self.model.sigma();
        let mut extra = 0.0;
        if self.scale.w_q_at_zero() > 0.0 {
            extra += self.scale.w_q_at_zero() * self.t(x)?;
        }
        if sigma > 0.0 {
            extra += 0.5 * sigma * sigma * self.scale.f_density(x)?;
        }
        Ok(extra)
    }

    /// φ(q, x, m). Closed form for the classical model, convolution otherwise.
    pub fn varphi(&self, x: f64, m: f64) -> Result<f64> {
        Self::check_x(x)?;
        match self.model {
            ModelSpec::ClassicalExp { mu, .. } => {
                Ok(self.kappa(x)? * (-mu * m).exp() * (m * mu + 1.0) / mu)
            }
            _ => self.varphi_by_convolution(x, m),
        }
    }

    /// φ(q, x, m) = f∗h_m(x), plus `W(0) h_m(x)` when configured.
    pub fn varphi_by_convolution(&self, x: f64, m: f64) -> Result<f64> {
        Self::check_x(x)?;
        let core = self.convolve_with_f(|y| self.h_m(m, y), x, 0.0)?;
        let w0 = self.scale.w_q_at_zero();
        let extra = if self.cfg.boundary == BoundaryTerms::Included && w0 > 0.0 {
            w0 * self.h_m(m, x)?
        } else {
            0.0
        };
        Ok(core + extra)
    }

    /// `I = ∫ e^{Φu} H∗G(du)`, required to lie in (0, 1).
    pub fn geometric_factor_i(&self) -> Result<f64> {
        let phi = self.phi();
        let c = self.model.premium_rate();
        let sigma = self.model.sigma();
        let value = if sigma > 0.0 {
            1.0 - 2.0 * self.q / (phi * (2.0 * c + sigma * sigma * phi))
        } else {
            1.0 - self.q / (phi * c)
        };
        if value > 0.0 && value < 1.0 {
            Ok(value)
        } else {
            Err(Error::GeometricFactor { value })
        }
    }

    /// `I_m = ∫_{u+v>m} e^{Φ(u+v)} (u + v) H(du) G(dv)`.
    pub fn i_m_kernel(&self, m: f64) -> Result<f64> {
        match self.model {
            ModelSpec::ClassicalExp { lambda, mu, c } => {
                Ok(lambda * (m * mu + 1.0) * (-mu * m).exp() / (c * mu * (self.phi() + mu)))
            }
            ModelSpec::StableSN { c, .. } => Ok(self.h_m_by_quadrature(m, 0.0)? / c),
            ModelSpec::PerturbedExp { .. } => {
                let (a, b) = self.i_m_split(m)?;
                Ok(a + b)
            }
        }
    }

    /// `(I_m¹, I_m²)`: the parts of `I_m` with `v > m` and with `v < m`.
    /// For σ = 0 the whole kernel sits in the first part.
    pub fn i_m_split(&self, m: f64) -> Result<(f64, f64)> {
        match self.model {
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => {
                let phi = self.phi();
                let s2 = sigma * sigma;
                let d = 2.0 * c + phi * s2;
                let gamma = d / s2;
                let first =
                    2.0 * lambda / (d * (mu + phi)) * (-gamma * m).exp() * (s2 / d + m + 1.0 / mu);
                let second = 2.0 / (phi * s2) * self.closed_tail_integral(m);
                Ok((first, second))
            }
            _ => Ok((self.i_m_kernel(m)?, 0.0)),
        }
    }

    /// `∫_0^m e^{−γv} ∫_0^∞ [1 + (mΦ − 1) e^{−Φu}] ν(u + m − v, ∞) du dv`
    /// with `γ = (2c + Φσ²)/σ²`, for the perturbed model.
    fn closed_tail_integral(&self, m: f64) -> f64 {
        match self.model {
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => {
                let phi = self.phi();
                let gamma = (2.0 * c + phi * sigma * sigma) / (sigma * sigma);
                let inner = 1.0 / mu + (m * phi - 1.0) / (mu + phi);
                lambda * (-mu * m).exp() * inner * m * exprel((mu - gamma) * m)
            }
            _ => 0.0,
        }
    }

    /// δ(q, σ, m) = I_m / (1 − I).
    pub fn delta_factor(&self, m: f64) -> Result<f64> {
        let i = self.geometric_factor_i()?;
        Ok(self.i_m_kernel(m)? / (1.0 - i))
    }

    /// Compares `delta_factor` with the closed expression in ρ = E[S₁]/c.
    pub fn delta_dual_check(&self, m: f64) -> Result<DeltaCheck> {
        let via_kernel = self.delta_factor(m)?;
        let q = self.q;
        let phi = self.phi();
        let c = self.model.premium_rate();
        let sigma = self.model.sigma();
        let rho = self.model.rho();
        let (closed_form, implied_rho) = if sigma > 0.0 {
            let s2 = sigma * sigma;
            let d = 2.0 * c + phi * s2;
            let gamma = d / s2;
            let tail = d / (q * s2) * self.closed_tail_integral(m);
            let closed = rho.map(|rho| {
                c * (2.0 * q + phi * (rho + m - 1.0) * d) / (q * phi * d) * (-gamma * m).exp()
                    + tail
            });
            let implied = (gamma * m < 700.0).then(|| {
                let first = via_kernel - tail;
                (first * q * phi * d * (gamma * m).exp() / c - 2.0 * q) / (phi * d) + 1.0 - m
            });
            (closed, implied)
        } else if m == 0.0 {
            let closed = rho.map(|rho| 1.0 / phi + c * (rho - 1.0) / q);
            (closed, Some((via_kernel - 1.0 / phi) * q / c + 1.0))
        } else {
            // The ρ term is multiplied by e^{−γm}, which vanishes as σ → 0.
            (Some(self.sigma_zero_tail(m)? / q), None)
        };
        let rel_gap = closed_form.map(|v| (v - via_kernel).abs() / via_kernel.abs());
        Ok(DeltaCheck {
            m,
            via_kernel,
            closed_form,
            implied_rho,
            rel_gap,
        })
    }

    /// `∫_0^∞ [1 + (mΦ − 1) e^{−Φu}] ν(u + m, ∞) du` for σ = 0.
    fn sigma_zero_tail(&self, m: f64) -> Result<f64> {
        let phi = self.phi();
        match self.model.exponential_claims() {
            Some((lambda, mu)) => {
                Ok(lambda * (-mu * m).exp() * (1.0 / mu + (m * phi - 1.0) / (mu + phi)))
            }
            None => {
                let slot = ErrorSlot::new();
                let outer = integrate(
                    |u| {
                        (1.0 + (m * phi - 1.0) * (-phi * u).exp())
                            * slot.unwrap(self.model.levy_tail(u + m))
                    },
                    0.0,
                    f64::INFINITY,
                    &self.cfg.outer,
                );
                slot.finish(outer)
            }
        }
    }

    /// `e^{Φu}` times the density of H at `u`, from a quadrature over ν.
    fn weighted_h_density(&self, u: f64) -> Result<f64> {
        let phi = self.phi();
        let sigma = self.model.sigma();
        let inner = self.levy_integral(u, |y| (-phi * y).exp(), -1.0 - self.jump_index())?;
        Ok(inner / (self.model.premium_rate() + phi * sigma * sigma))
    }

    /// Rate β of the exponential law G for σ > 0.
    fn g_rate(&self) -> f64 {
        let s2 = self.model.sigma().powi(2);
        2.0 * (self.model.premium_rate() + s2 * self.phi()) / s2
    }

    /// `I_m` by brute-force nested quadrature of its defining double
    /// integral against the densities of H and G.
    pub fn i_m_by_direct_integration(&self, m: f64) -> Result<f64> {
        let phi = self.phi();
        let slot = ErrorSlot::new();
        if self.model.sigma() == 0.0 {
            let integrand = |u: f64| u * slot.unwrap(self.weighted_h_density(u));
            let outer = if m > 0.0 {
                integrate(integrand, m, f64::INFINITY, &self.cfg.outer)
            } else {
                // The weighted H density behaves like u^{−α} at the origin.
                let beta = 1.0 - self.jump_index();
                integrate_singular(integrand, 0.0, 1.0, beta, &self.cfg.outer).and_then(|near| {
                    Ok(near + integrate(integrand, 1.0, f64::INFINITY, &self.cfg.outer)?)
                })
            };
            return slot.finish(outer);
        }
        let beta = self.g_rate();
        let integrand = |u: f64| {
            let h = slot.unwrap(self.weighted_h_density(u));
            let v_lo = (m - u).max(0.0);
            let inner = integrate(
                |v| (u + v) * beta * (-(beta - phi) * v).exp(),
                v_lo,
                f64::INFINITY,
                &self.cfg.inner,
            );
            h * slot.unwrap(inner)
        };
        let below = integrate(integrand, 0.0, m, &self.cfg.outer);
        let above = integrate(integrand, m, f64::INFINITY, &self.cfg.outer);
        let total = match (below, above) {
            (Ok(a), Ok(b)) => Ok(a + b),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        slot.finish(total)
    }

    /// `I` by brute-force quadrature against the densities of H and G.
    /// Diverges for the stable model, which is rejected.
    pub fn i_by_direct_integration(&self) -> Result<f64> {
        if self.model.mean_jump().is_infinite() {
            return Err(ModelError::NotApplicable {
                op: "direct integration of I",
                kind: self.model.kind(),
            }
            .into());
        }
        let slot = ErrorSlot::new();
        let h_part = integrate(
            |u| slot.unwrap(self.weighted_h_density(u)),
            0.0,
            f64::INFINITY,
            &self.cfg.outer,
        );
        let h_part = slot.finish(h_part)?;
        if self.model.sigma() == 0.0 {
            return Ok(h_part);
        }
        let beta = self.g_rate();
        let phi = self.phi();
        let g_part = integrate(
            |v| beta * (-(beta - phi) * v).exp(),
            0.0,
            f64::INFINITY,
            &self.cfg.outer,
        )?;
        Ok(h_part * g_part)
    }

    /// Extreme-loss premium Π₁(q, x, m).
    pub fn premium_extreme_loss(&self, x: f64, m: f64) -> Result<PremiumBreakdown> {
        let i_factor = self.geometric_factor_i()?;
        let i_m_value = self.i_m_kernel(m)?;
        let delta_factor = i_m_value / (1.0 - i_factor);
        let phi_term = self.varphi(x, m)?;
        let kappa_term = self.kappa(x)?;
        let premium = phi_term + delta_factor * kappa_term;
        if let Some(closed) = self.classical_premium(x, m) {
            if (closed - premium).abs() > 1e-10 * closed.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::Inconsistent {
                    what: "classical premium closed form disagrees with the assembled value",
                    left: closed,
                    right: premium,
                });
            }
        }
        Ok(PremiumBreakdown {
            phi_term,
            kappa_term,
            delta_factor,
            i_factor,
            i_m_value,
            share: 1.0,
            premium,
        })
    }

    /// Proportional premium Π₂(q, x, a) = a Π₁(q, x, 0).
    pub fn premium_proportional(&self, x: f64, a: f64) -> Result<PremiumBreakdown> {
        let base = self.premium_extreme_loss(x, 0.0)?;
        Ok(PremiumBreakdown {
            share: a,
            premium: a * base.premium,
            ..base
        })
    }

    /// Classical Π₁ in one expression:
    /// `λΦ e^{−μm}(mμ + 1)/(μq(μ + Φ)) [e^{Θx} − e^{−μx}]`, the bracket
    /// reduced to `e^{Θx}` when boundary terms are included.
    pub fn classical_premium(&self, x: f64, m: f64) -> Option<f64> {
        match self.model {
            ModelSpec::ClassicalExp { lambda, mu, .. } => {
                let phi = self.phi();
                let theta = self.scale.theta()?;
                let pre =
                    lambda * phi * (-mu * m).exp() * (m * mu + 1.0) / (mu * self.q * (mu + phi));
                let bracket = match self.cfg.boundary {
                    BoundaryTerms::Omitted => (theta * x).exp() - (-mu * x).exp(),
                    BoundaryTerms::Included => (theta * x).exp(),
                };
                Some(pre * bracket)
            }
            _ => None,
        }
    }
}

/// Premium for a validated query under the default configuration.
pub fn premium(model: &ModelSpec, query: &PremiumQuery) -> Result<PremiumBreakdown> {
    premium_with(model, query, PricerConfig::default())
}

pub fn premium_with(
    model: &ModelSpec,
    query: &PremiumQuery,
    cfg: PricerConfig,
) -> Result<PremiumBreakdown> {
    let pricer = Pricer::new(*model, query.q)?.with_config(cfg);
    match query.contract {
        Contract::ExtremeLoss { m } => pricer.premium_extreme_loss(query.x, m),
        Contract::Proportional { a } => pricer.premium_proportional(query.x, a),
    }
}

pub fn premium_extreme_loss(model: &ModelSpec, query: &PremiumQuery) -> Result<PremiumBreakdown> {
    match query.contract {
        Contract::ExtremeLoss { .. } => premium(model, query),
        Contract::Proportional { .. } => Err(Error::InvalidQuery(
            "expected an extreme-loss contract".into(),
        )),
    }
}

pub fn premium_proportional(model: &ModelSpec, query: &PremiumQuery) -> Result<PremiumBreakdown> {
    match query.contract {
        Contract::Proportional { .. } => premium(model, query),
        Contract::ExtremeLoss { .. } => Err(Error::InvalidQuery(
            "expected a proportional contract".into(),
        )),
    }
}

/// Evaluates many independent premium requests, results in input order.
pub fn premium_sweep(
    requests: &[(ModelSpec, PremiumQuery)],
    cfg: PricerConfig,
    exec: Execution,
) -> Vec<Result<PremiumBreakdown>> {
    exec.map(requests, |(model, query)| premium_with(model, query, cfg))
}
