use approx::assert_relative_eq;
use rci_core::numerics::{integrate, QuadratureConfig};
use rci_core::{
    premium_sweep, BoundaryTerms, Contract, Execution, ModelSpec, PremiumQuery, Pricer,
    PricerConfig, ScaleEvaluator,
};

const CFG: QuadratureConfig = QuadratureConfig {
    abs_tol: 1e-13,
    rel_tol: 1e-10,
    max_subdivisions: 20_000,
};

fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::classical_from_loading(1.0, 1.0, 0.25).unwrap(),
        ModelSpec::perturbed_exp(1.0, 1.0, 0.5, 1.5).unwrap(),
        ModelSpec::perturbed_exp(2.0, 1.5, 0.25, 1.6).unwrap(),
    ]
}

/// `E[e^{−qτ_x}; τ_x < ∞] = Z(x) − (q/Φ) W(x)` with `Z(x) = 1 + q ∫_0^x W`.
fn kappa_via_z(ev: &ScaleEvaluator, x: f64) -> f64 {
    let q = ev.q();
    let int_w = integrate(|y| ev.w_q(y).unwrap(), 0.0, x, &CFG).unwrap();
    1.0 + q * int_w - q / ev.phi() * ev.w_q(x).unwrap()
}

/// Overshoot functional from the resolvent density of the process killed
/// at ruin, `u(x, y) = e^{−Φy} W(x) − W(x − y)`:
/// `∫_0^∞ u(x, y) ∫_{y+m}^∞ (z − y) ν(dz) dy`.
fn varphi_via_resolvent(ev: &ScaleEvaluator, x: f64, m: f64) -> f64 {
    let model = *ev.model();
    let wx = ev.w_q(x).unwrap();
    let phi = ev.phi();
    let penalty = |y: f64| {
        integrate(
            |z| (z - y) * model.levy_density(z),
            y + m,
            f64::INFINITY,
            &CFG,
        )
        .unwrap()
    };
    let density = |y: f64| ((-phi * y).exp() * wx - ev.w_q(x - y).unwrap()) * penalty(y);
    integrate(density, 0.0, x, &CFG).unwrap() + integrate(density, x, f64::INFINITY, &CFG).unwrap()
}

#[test]
fn complete_kappa_matches_ruin_time_transform() {
    for model in models() {
        for &q in &[0.05, 0.5] {
            let pricer = Pricer::new(model, q)
                .unwrap()
                .with_boundary_terms(BoundaryTerms::Included);
            for &x in &[0.3, 1.0, 2.5] {
                let expected = kappa_via_z(pricer.scale(), x);
                assert_relative_eq!(pricer.kappa(x).unwrap(), expected, max_relative = 1e-6);
            }
        }
    }
}

#[test]
fn complete_varphi_matches_resolvent() {
    for model in models() {
        let pricer = Pricer::new(model, 0.2)
            .unwrap()
            .with_boundary_terms(BoundaryTerms::Included);
        for &(x, m) in &[(0.5, 0.0), (2.0, 0.0), (1.0, 0.7)] {
            let expected = varphi_via_resolvent(pricer.scale(), x, m);
            assert_relative_eq!(pricer.varphi(x, m).unwrap(), expected, max_relative = 1e-6);
        }
    }
}

#[test]
fn stable_kappa_and_varphi_match_resolvent_identities() {
    let model = ModelSpec::stable(1.5, 1.0).unwrap();
    let pricer = Pricer::new(model, 0.3).unwrap();
    for &x in &[0.5, 1.5] {
        assert_relative_eq!(
            pricer.kappa(x).unwrap(),
            kappa_via_z(pricer.scale(), x),
            max_relative = 1e-6
        );
        let expected = varphi_via_resolvent(pricer.scale(), x, 0.5);
        assert_relative_eq!(
            pricer.varphi(x, 0.5).unwrap(),
            expected,
            max_relative = 1e-6
        );
    }
}

#[test]
fn perturbed_kernel_matches_double_quadrature() {
    for &sigma in &[0.25, 0.5] {
        for &q in &[0.05, 0.2] {
            let model = ModelSpec::perturbed_exp(1.0, 1.0, sigma, 1.5).unwrap();
            let pricer = Pricer::new(model, q).unwrap();
            for &m in &[0.0, 0.5, 1.2] {
                let direct = pricer.i_m_by_direct_integration(m).unwrap();
                assert_relative_eq!(pricer.i_m_kernel(m).unwrap(), direct, max_relative = 1e-8);
            }
            let i_direct = pricer.i_by_direct_integration().unwrap();
            assert_relative_eq!(
                pricer.geometric_factor_i().unwrap(),
                i_direct,
                max_relative = 1e-8
            );
        }
    }
}

#[test]
fn stable_kernel_matches_double_quadrature() {
    for &alpha in &[1.3, 1.5, 1.7] {
        let model = ModelSpec::stable(alpha, 1.0).unwrap();
        let pricer = Pricer::new(model, 0.3).unwrap();
        for &m in &[0.0, 0.5, 2.0] {
            let direct = pricer.i_m_by_direct_integration(m).unwrap();
            assert_relative_eq!(pricer.i_m_kernel(m).unwrap(), direct, max_relative = 1e-7);
        }
    }
}

#[test]
fn building_blocks_match_their_quadratures() {
    for model in models() {
        let pricer = Pricer::new(model, 0.1).unwrap();
        for &x in &[0.0, 0.8, 3.0] {
            assert_relative_eq!(
                pricer.t(x).unwrap(),
                pricer.t_by_quadrature(x).unwrap(),
                max_relative = 1e-9
            );
            for &m in &[0.0, 1.0] {
                assert_relative_eq!(
                    pricer.h_m(m, x).unwrap(),
                    pricer.h_m_by_quadrature(m, x).unwrap(),
                    max_relative = 1e-9
                );
            }
        }
    }
}

#[test]
fn classical_convolutions_match_closed_forms() {
    let pricer = Pricer::new(
        ModelSpec::classical_from_loading(1.0, 1.0, 0.25).unwrap(),
        0.05,
    )
    .unwrap();
    for &x in &[0.5, 1.0, 2.5, 5.0] {
        assert_relative_eq!(
            pricer.kappa(x).unwrap(),
            pricer.kappa_by_convolution(x).unwrap(),
            max_relative = 1e-9
        );
        for &m in &[0.0, 1.0] {
            assert_relative_eq!(
                pricer.varphi(x, m).unwrap(),
                pricer.varphi_by_convolution(x, m).unwrap(),
                max_relative = 1e-9
            );
        }
    }
}

#[test]
fn sweep_is_ordered_and_mode_independent() {
    let model = ModelSpec::perturbed_exp(1.0, 1.0, 0.5, 1.5).unwrap();
    let requests: Vec<_> = (0..12)
        .map(|i| {
            let q = PremiumQuery::new(
                0.05 + 0.01 * i as f64,
                1.0,
                Contract::ExtremeLoss { m: 0.1 * i as f64 },
            )
            .unwrap();
            (model, q)
        })
        .collect();
    let seq = premium_sweep(&requests, PricerConfig::default(), Execution::Sequential);
    let par = premium_sweep(&requests, PricerConfig::default(), Execution::default());
    for ((s, p), (m, q)) in seq.iter().zip(&par).zip(&requests) {
        let s = s.as_ref().unwrap();
        assert_eq!(s, p.as_ref().unwrap());
        assert_eq!(s.premium, rci_core::premium(m, q).unwrap().premium);
    }
}
