//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Finite ranges are bisected around the interval with the largest error
//! estimate until the requested tolerance is met. Infinite endpoints are
//! mapped onto `(0, 1]` with `x = a + (1 - t) / t`, which keeps integrable
//! endpoint singularities at the lower limit away from the nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::NumericsError;

/// Tolerances and effort limit for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same limits with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(NumericsError::InvalidConfig(format!(
                "tolerances must be positive and max_subdivisions >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Integral estimate together with its error bound and the number of
/// intervals used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_030,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> Result<Segment, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteIntegrand { x, value: v })
        }
    };

    let f_center = eval(center)?;
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [0.0_f64; 21];
    values[10] = f_center;
    for (j, (&node, &weight)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * node;
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        values[j] = lo;
        values[20 - j] = hi;
        kronrod += weight * (lo + hi);
        abs_sum += weight * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureEstimate, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let first = gauss_kronrod_21(f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Segments too narrow to bisect further keep their error in the budget.
    let mut frozen_err = 0.0;
    let mut frozen_value = 0.0;
    let mut intervals = 1;

    loop {
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
            if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
                break;
            }
        }
        if intervals >= cfg.max_subdivisions {
            return Err(NumericsError::QuadratureNotConverged {
                estimate: total,
                error: total_err,
                intervals,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a).abs() < 4.0 * f64::EPSILON * mid.abs()
        {
            frozen_err += worst.error;
            frozen_value += worst.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gauss_kronrod_21(f, worst.a, mid)?;
        let right = gauss_kronrod_21(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        intervals += 1;
        total_err += left.error + right.error - worst.error;
        // Periodic re-summation bounds the drift of the running error total.
        if intervals % 64 == 0 || total_err <= 0.0 {
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }

    let value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    if total_err > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        return Err(NumericsError::QuadratureNotConverged {
            estimate: value,
            error: total_err,
            intervals,
        });
    }
    Ok(QuadratureEstimate {
        value,
        abs_error: total_err,
        intervals,
    })
}

/// Integrates `f` over `(a, b)`; either limit may be infinite.
pub fn integrate_with_error<F>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureEstimate, NumericsError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(QuadratureEstimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let mut est = integrate_with_error(f, b, a, cfg)?;
        est.value = -est.value;
        return Ok(est);
    }
    match (a.is_infinite(), b.is_infinite()) {
        (false, false) => adaptive(&f, a, b, cfg),
        (false, true) => {
            let g = |t: f64| {
                let x = a + (1.0 - t) / t;
                f(x) / (t * t)
            };
            adaptive(&g, 0.0, 1.0, cfg)
        }
        (true, false) => {
            let g = |t: f64| {
                let x = b - (1.0 - t) / t;
                f(x) / (t * t)
            };
            adaptive(&g, 0.0, 1.0, cfg)
        }
        (true, true) => {
            let g = |t: f64| {
                let x = (1.0 - t) / t;
                (f(x) + f(-x)) / (t * t)
            };
            adaptive(&g, 0.0, 1.0, cfg)
        }
    }
}

/// Value-only convenience wrapper around [`integrate_with_error`].
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    integrate_with_error(f, a, b, cfg).map(|e| e.value)
}

/// `∫_a^b f` for `f(x) ~ (x − a)^β` near a finite `a`, with `β > −1`.
///
/// Substitutes `x = a + (b − a) v^p` with `p = 1/(1 + β)`, which turns the
/// leading power into a constant. For `β ≥ 0` it is plain [`integrate`].
pub fn integrate_singular<F>(
    f: F,
    a: f64,
    b: f64,
    beta: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(beta > -1.0) {
        return Err(NumericsError::Domain {
            what: "endpoint singularity exponent",
            arg: beta,
        });
    }
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if beta >= 0.0 {
        return integrate(f, a, b, cfg);
    }
    let p = 1.0 / (1.0 + beta);
    let width = b - a;
    let g = |v: f64| {
        let offset = width * v.powf(p);
        if offset == 0.0 {
            return 0.0;
        }
        width * p * v.powf(p - 1.0) * f(a + offset)
    };
    integrate(g, 0.0, 1.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::new(1e-13, 1e-12, 10_000).unwrap()
    }

    #[test]
    fn exponential_tail_integrates_to_one() {
        let v = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_two() {
        let v = integrate(|x| x * (-x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn half_gaussian() {
        let v = integrate(|x| (-0.5 * x * x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_relative_eq!(v, (std::f64::consts::PI / 2.0).sqrt(), max_relative = 1e-12);
        let full = integrate(
            |x| (-0.5 * x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(
            full,
            (2.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(|x| x * x, 2.0, 0.0, &cfg()).unwrap();
        assert_relative_eq!(v, -8.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = QuadratureConfig::new(1e-15, 1e-15, 2).unwrap();
        let err = integrate(|x| (1.0 / x).sin(), 1e-3, 1.0, &tight).unwrap_err();
        assert!(matches!(err, NumericsError::QuadratureNotConverged { .. }));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(QuadratureConfig::new(0.0, 1e-8, 10).is_err());
        assert!(QuadratureConfig::new(1e-8, 1e-8, 0).is_err());
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate(|_| f64::NAN, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn singular_endpoint() {
        // ∫_0^1 x^{-0.9} cos x dx against the series Σ (−1)^k / ((2k)! (2k + 0.1)).
        let mut exact = 0.0;
        let mut fact = 1.0;
        for k in 0..15 {
            if k > 0 {
                fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            exact += (-1.0_f64).powi(k) / (fact * (2.0 * k as f64 + 0.1));
        }
        let v = integrate_singular(|x| x.powf(-0.9) * x.cos(), 0.0, 1.0, -0.9, &cfg()).unwrap();
        assert_relative_eq!(v, exact, max_relative = 1e-12);
        assert!(integrate_singular(|x| x, 0.0, 1.0, -1.0, &cfg()).is_err());
        let plain = integrate_singular(|x| x, 0.0, 2.0, 0.5, &cfg()).unwrap();
        assert_relative_eq!(plain, 2.0, max_relative = 1e-14);
    }
}
