use gaussconv::gauss::SeededStream;
use gaussconv::mgf::{gaussian_chord, lambda_profile, lambda_value, mgf_upper_bound_check, ScalarDistribution};
use gaussconv::oracle::builtin;
use proptest::prelude::*;

// Λ(p) = (1/p) log 𝔼e^{p φ(Z)} from adaptive 40-digit quadrature
const SOFTPLUS: [(f64, f64); 2] = [(-1.0, std::f64::consts::LN_2), (0.5, 0.88131659586676782476)];
const ABS: [(f64, f64); 2] = [(-2.0, 0.54501857656104331971), (1.0, 1.0203934015364954199)];

#[test]
fn pushforward_lambda_matches_reference() {
    let sp = ScalarDistribution::pushforward(builtin::softplus()).unwrap();
    for (p, want) in SOFTPLUS {
        let got = lambda_value(&sp, p).unwrap();
        assert!((got - want).abs() < 1e-10, "softplus Λ({p}) = {got}, want {want}");
    }
    let abs = ScalarDistribution::pushforward(builtin::abs()).unwrap();
    for (p, want) in ABS {
        let got = lambda_value(&abs, p).unwrap();
        assert!((got - want).abs() < 1e-8, "|Z| Λ({p}) = {got}, want {want}");
    }
}

#[test]
fn closed_form_laws() {
    let poisson = ScalarDistribution::poisson(2.5).unwrap();
    let exp = ScalarDistribution::exponential(2.0).unwrap();
    for p in [-3.0, -0.7, 0.4, 1.5] {
        let want = 2.5 * (f64::exp(p) - 1.0) / p;
        assert!((lambda_value(&poisson, p).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0));
        if p < 2.0 {
            let want = -(1.0 - p / 2.0).ln() / p;
            assert!((lambda_value(&exp, p).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn chord_recovers_gaussian_parameters() {
    let g = ScalarDistribution::gaussian(-0.4, 2.25).unwrap();
    let c = gaussian_chord(&g, -1.0, 0.5).unwrap();
    assert!((c.lambda_at(0.3) - (-0.4 + 2.25 * 0.3 / 2.0)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn gaussian_lambda_is_affine(mu in -3.0f64..3.0, s2 in 0.01f64..4.0, p in -2.0f64..2.0) {
        let g = ScalarDistribution::gaussian(mu, s2).unwrap();
        prop_assert!((lambda_value(&g, p).unwrap() - (mu + s2 * p / 2.0)).abs() < 1e-12 * (1.0 + mu.abs() + s2));
    }

    #[test]
    fn convex_pushforwards_have_convex_lambda(idx in 0usize..5, lo in -2.0f64..-0.5, len in 0.3f64..1.2) {
        let phi = builtin::convex_suite_1d().swap_remove(idx);
        let d = ScalarDistribution::pushforward(phi).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| lo + len * i as f64 / 20.0).collect();
        let prof = lambda_profile(&d, &grid).unwrap();
        if let Some(m) = prof.min_second_difference() {
            prop_assert!(m >= -1e-9, "min second difference {}", m);
        }
    }

    #[test]
    fn mgf_bound_holds_for_convex_pushforwards(idx in 0usize..5, lambda in -3.0f64..0.0) {
        let phi = builtin::convex_suite_1d().swap_remove(idx);
        let d = ScalarDistribution::pushforward(phi).unwrap();
        if d.moments().variance.is_finite() {
            prop_assert!(mgf_upper_bound_check(&d, lambda, 1e-9).unwrap().holds);
        }
    }

    #[test]
    fn sample_sets_are_seed_deterministic(seed in any::<u64>()) {
        let d = ScalarDistribution::exponential(1.0).unwrap();
        prop_assert_eq!(d.sample(5000, SeededStream::new(seed)).unwrap(), d.sample(5000, SeededStream::new(seed)).unwrap());
    }
}
