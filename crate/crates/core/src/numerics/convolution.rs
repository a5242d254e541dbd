use super::{integrate_singular, NumericsError, QuadratureConfig};

/// `(f * g)(x) = ∫_0^x f(x - y) g(y) dy`.
///
/// The range is split at `x / 2` and the second half is written as
/// `∫_0^{x/2} f(s) g(x - s) ds`, so both factors are only ever evaluated at
/// their own small arguments exactly at a lower integration limit. This keeps
/// integrable singularities of `f` or `g` at the origin well conditioned.
pub fn convolve_at<F, G>(f: F, g: G, x: f64, cfg: &QuadratureConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    convolve_at_singular(f, g, x, 0.0, 0.0, cfg)
}

/// [`convolve_at`] for factors that behave like `y^{beta_f}` and `y^{beta_g}`
/// at the origin. Nonnegative exponents mean no singularity.
pub fn convolve_at_singular<F, G>(
    f: F,
    g: G,
    x: f64,
    beta_f: f64,
    beta_g: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(x >= 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain {
            what: "convolution point",
            arg: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * x;
    let left = integrate_singular(|y| f(x - y) * g(y), 0.0, half, beta_g, cfg)?;
    let right = integrate_singular(|s| f(s) * g(x - s), 0.0, half, beta_f, cfg)?;
    Ok(left + right)
}
