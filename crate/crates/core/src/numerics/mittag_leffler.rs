use super::special::{ln_gamma, recip_gamma};
use super::NumericsError;

/// Above this argument the exponential asymptotic expansion is used for
/// positive `z`.
pub const ASYMPTOTIC_THRESHOLD: f64 = 150.0;

const NEGATIVE_LIMIT: f64 = -40.0;
const MAX_TERMS: usize = 20_000;

/// Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^k / Γ(αk + β)`
/// for real `z`, `0 < α <= 2` and `β > 0`.
///
/// Negative arguments are restricted to `z >= -40`, where the alternating
/// series still carries about six significant digits.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64, NumericsError> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(NumericsError::Domain {
            what: "Mittag-Leffler alpha",
            arg: alpha,
        });
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(NumericsError::Domain {
            what: "Mittag-Leffler beta",
            arg: beta,
        });
    }
    if z.is_nan() || z < NEGATIVE_LIMIT {
        return Err(NumericsError::Domain {
            what: "Mittag-Leffler argument",
            arg: z,
        });
    }
    if z == 0.0 {
        return Ok(recip_gamma(beta));
    }
    if z > ASYMPTOTIC_THRESHOLD {
        return asymptotic(alpha, beta, z);
    }
    series(alpha, beta, z)
}

fn series(alpha: f64, beta: f64, z: f64) -> Result<f64, NumericsError> {
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = recip_gamma(beta);
    let mut compensation = 0.0;
    let mut small_run = 0;
    for k in 1..MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let (lg, sign) = ln_gamma(arg);
        let ln_term = k as f64 * ln_abs_z - lg;
        if ln_term > 709.0 {
            return Err(NumericsError::Overflow {
                what: "Mittag-Leffler series",
                arg: z,
            });
        }
        let mut term = sign * ln_term.exp();
        if negative && k % 2 == 1 {
            term = -term;
        }
        // Kahan-Babuska summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        if term.abs() < 1e-16 * sum.abs().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(sum + compensation)
}

/// At `α = 2` the dropped second exponential is `e^{−√z}` relative to the
/// leading one, below 1e−10 past the threshold.
fn asymptotic(alpha: f64, beta: f64, z: f64) -> Result<f64, NumericsError> {
    let root = z.powf(1.0 / alpha);
    let ln_lead = root + (1.0 - beta) / alpha * z.ln() - alpha.ln();
    if ln_lead > 709.0 {
        return Err(NumericsError::Overflow {
            what: "Mittag-Leffler asymptotic expansion",
            arg: z,
        });
    }
    let mut value = ln_lead.exp();
    for k in 1..=3 {
        value -= z.powi(-k) * recip_gamma(beta - alpha * k as f64);
    }
    Ok(value)
}
