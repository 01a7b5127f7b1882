use gaussconv::gauss::SeededStream;
use gaussconv::renyi::{
    chain_check, comparison_check, divergence, fixtures, kl_divergence, McConfig, Method, RelativeDensity,
};
use proptest::prelude::*;

// D_α(N(0, 0.3) ‖ N(0, 1)) from adaptive 40-digit quadrature of the densities
const SCALE_03: [(f64, f64); 4] = [
    (0.5, 0.17120348607051373893),
    (1.0, 0.25198640216296799631),
    (2.0, 0.3366722766318827982),
    (3.0, 0.3831192178244930124),
];

#[test]
fn gaussian_scale_matches_reference() {
    let rd = RelativeDensity::new(fixtures::gaussian_scale(0.3).unwrap(), McConfig::default()).unwrap();
    assert_eq!(rd.method(), Method::Quadrature);
    for (a, want) in SCALE_03 {
        let got = divergence(&rd, a).unwrap().value;
        // e^{3f} is a narrow Gaussian (variance ≈ 0.13) that 60 Hermite nodes
        // resolve to a few 1e-7
        assert!((got - want).abs() < 1e-6, "D_{a} = {got}, want {want}");
        if a != 1.0 {
            assert!((fixtures::gaussian_scale_renyi(0.3, a) - want).abs() < 1e-14);
        }
    }
    assert!((fixtures::gaussian_scale_kl(0.3) - SCALE_03[1].1).abs() < 1e-14);
}

#[test]
fn monte_carlo_translation_in_four_dimensions() {
    let mc = McConfig { samples: 400_000, stream: SeededStream::new(4) };
    let rd = RelativeDensity::new(fixtures::translation(vec![0.3, -0.2, 0.1, 0.4]), mc).unwrap();
    assert_eq!(rd.method(), Method::Mc);
    let kl = kl_divergence(&rd).unwrap();
    // |a|²/2 = 0.15
    assert!((kl.value - 0.15).abs() <= 4.0 * kl.stderr.unwrap() + 1e-3, "{kl:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translations_are_linear_in_alpha(a in -2.0f64..2.0, b in -2.0f64..2.0, alpha in 0.1f64..4.0) {
        let rd = RelativeDensity::new(fixtures::translation(vec![a, b]), McConfig::default()).unwrap();
        let want = alpha * (a * a + b * b) / 2.0;
        prop_assert!((divergence(&rd, alpha).unwrap().value - want).abs() < 1e-8 * (1.0 + want));
    }

    #[test]
    fn comparison_and_chain_hold(s2 in 0.15f64..1.0, alpha in 0.1f64..2.0, ratio in 1.05f64..3.0) {
        let rd = RelativeDensity::new(fixtures::gaussian_scale(s2).unwrap(), McConfig::default()).unwrap();
        prop_assert!(comparison_check(&rd, alpha, alpha * ratio).unwrap().holds);
        prop_assert!(chain_check(&rd).unwrap().holds);
    }
}
