use approx::assert_relative_eq;
use rci_core::numerics::{integrate, QuadratureConfig};
use rci_core::{ModelSpec, ScaleEvaluator};
use statrs::function::gamma::{gamma, gamma_ur};

/// W for the perturbed model from the partial fractions of
/// `(μ + s) / P(s)`, with `P` the cubic `(ψ(s) − q)(μ + s)`.
struct PartialFractions {
    mu: f64,
    lead: f64,
    roots: [f64; 3],
}

impl PartialFractions {
    fn new(mu: f64, sigma: f64, c: f64, phi: f64, theta: f64) -> Self {
        let lead = 0.5 * sigma * sigma;
        let b = c + lead * mu;
        // Vieta: the three roots sum to −b / lead.
        let third = -b / lead - phi - theta;
        PartialFractions {
            mu,
            lead,
            roots: [phi, theta, third],
        }
    }

    fn coefficient(&self, i: usize) -> f64 {
        let r = self.roots[i];
        let others: f64 = (0..3)
            .filter(|&j| j != i)
            .map(|j| r - self.roots[j])
            .product();
        (self.mu + r) / (self.lead * others)
    }

    fn w(&self, x: f64) -> f64 {
        (0..3)
            .map(|i| self.coefficient(i) * (self.roots[i] * x).exp())
            .sum()
    }

    fn w_prime(&self, x: f64) -> f64 {
        (0..3)
            .map(|i| self.coefficient(i) * self.roots[i] * (self.roots[i] * x).exp())
            .sum()
    }
}

#[test]
fn perturbed_scale_function_matches_partial_fractions() {
    let (lambda, mu, sigma, c) = (1.0, 1.0, 0.5, 1.5);
    let model = ModelSpec::perturbed_exp(lambda, mu, sigma, c).unwrap();
    for &q in &[0.05, 0.5] {
        let ev = ScaleEvaluator::new(model, q).unwrap();
        let pf = PartialFractions::new(mu, sigma, c, ev.phi(), ev.theta().unwrap());
        // The third root is a root of the cubic.
        let r = pf.roots[2];
        let cubic = (model.laplace_exponent(r) - q) * (mu + r);
        assert!(cubic.abs() < 1e-9, "cubic residual {cubic}");
        for &x in &[0.01, 0.3, 1.0, 2.5, 6.0] {
            assert_relative_eq!(ev.w_q(x).unwrap(), pf.w(x), max_relative = 1e-7);
            assert_relative_eq!(ev.w_q_prime(x).unwrap(), pf.w_prime(x), max_relative = 1e-7);
            let f = pf.w_prime(x) - ev.phi() * pf.w(x);
            assert_relative_eq!(ev.f_density(x).unwrap(), f, max_relative = 1e-6);
        }
    }
}

#[test]
fn classical_scale_function_laplace_transform() {
    let model = ModelSpec::classical_from_loading(1.0, 1.0, 0.25).unwrap();
    let cfg = QuadratureConfig::new(1e-13, 1e-11, 10_000).unwrap();
    for &q in &[0.05, 0.5] {
        let ev = ScaleEvaluator::new(model, q).unwrap();
        for &ds in &[0.5, 1.0, 2.0] {
            let s = ev.phi() + ds;
            // The tail beyond X is below e^{−60} relative.
            let upper = 60.0 / ds;
            let lt = integrate(|x| (-s * x).exp() * ev.w_q(x).unwrap(), 0.0, upper, &cfg).unwrap();
            assert_relative_eq!(
                lt,
                1.0 / (model.laplace_exponent(s) - q),
                max_relative = 1e-9
            );
        }
    }
}

/// `ν(y, ∞) = c^α Γ(−α, cy) / Γ(−α)`, with the incomplete gamma function at
/// negative order reached by the recurrence `Γ(a, z) = (Γ(a+1, z) − z^a e^{−z}) / a`.
fn stable_tail(alpha: f64, c: f64, y: f64) -> f64 {
    let z = c * y;
    let g2 = gamma(2.0 - alpha) * gamma_ur(2.0 - alpha, z);
    let g1 = (g2 - z.powf(1.0 - alpha) * (-z).exp()) / (1.0 - alpha);
    let g0 = (g1 - z.powf(-alpha) * (-z).exp()) / (-alpha);
    c.powf(alpha) * g0 / gamma(-alpha)
}

#[test]
fn stable_tail_matches_incomplete_gamma() {
    for &(alpha, c) in &[(1.5, 1.0), (1.2, 0.5), (1.8, 2.0)] {
        let model = ModelSpec::stable(alpha, c).unwrap();
        for &y in &[0.01, 0.2, 1.0, 3.0] {
            assert_relative_eq!(
                model.levy_tail(y).unwrap(),
                stable_tail(alpha, c, y),
                max_relative = 1e-9
            );
        }
    }
}

#[test]
fn stable_laplace_exponent_is_the_transform_of_its_levy_measure() {
    // Compared through ψ''(s) = ∫ y² e^{−sy} ν(dy), with y = t² to remove
    // the endpoint singularity.
    let (alpha, c) = (1.5, 1.0);
    let model = ModelSpec::stable(alpha, c).unwrap();
    let cfg = QuadratureConfig::new(1e-13, 1e-11, 10_000).unwrap();
    for &s in &[0.0, 0.5, 2.0] {
        let second = integrate(
            |t| {
                let y = t * t;
                2.0 * t * y * y * (-s * y).exp() * model.levy_density(y)
            },
            0.0,
            f64::INFINITY,
            &cfg,
        )
        .unwrap();
        let exact = alpha * (alpha - 1.0) * (s + c).powf(alpha - 2.0);
        assert_relative_eq!(second, exact, max_relative = 1e-8);
    }
}
