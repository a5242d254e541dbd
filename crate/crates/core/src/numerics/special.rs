/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> (f64, f64) {
    let (v, sign) = libm::lgamma_r(x);
    (v, if sign < 0 { -1.0 } else { 1.0 })
}

/// `1 / Γ(x)`, which is entire: zero at the non-positive integers.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        return 0.0;
    }
    1.0 / libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma(0.5),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        // Γ(-1/2) = -2 sqrt(pi)
        assert_relative_eq!(
            gamma(-0.5),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        let (l, s) = ln_gamma(-0.5);
        assert_eq!(s, -1.0);
        assert_relative_eq!(
            l,
            (2.0 * std::f64::consts::PI.sqrt()).ln(),
            max_relative = 1e-14
        );
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_relative_eq!(recip_gamma(1.5), 1.0 / gamma(1.5), max_relative = 1e-15);
    }
}
