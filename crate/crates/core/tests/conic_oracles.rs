use gaussconv::conic::{
    convolve, dual_cone, moreau_probe, orthant_volumes, sq_norm_midpoint_gap, ConicSamples, PolyhedralCone,
};
use gaussconv::gauss::SeededStream;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn cone(n: usize, m: usize, pointed: bool, seed: u64) -> PolyhedralCone {
    if pointed {
        PolyhedralCone::random_pointed(n, m, SeededStream::new(seed)).unwrap()
    } else {
        PolyhedralCone::random_general(n, m, SeededStream::new(seed)).unwrap()
    }
}

#[test]
fn degenerate_general_cones() {
    // cones that are the whole space or close to it put more active
    // constraints at the apex than the dimension
    for seed in [1u64, 2, 6, 12, 15, 23, 28] {
        let stream = SeededStream::with_stream(seed, 3);
        let mut rng = stream.rng();
        for i in 0..1000usize {
            let (n, m) = (2 + i % 5, 3 + i % 5 + i % 4);
            let c = if i % 2 == 0 {
                PolyhedralCone::random_pointed(n, m, stream.fork(1000 + i as u64)).unwrap()
            } else {
                PolyhedralCone::random_general(n, m, stream.fork(1000 + i as u64)).unwrap()
            };
            let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let r = moreau_probe(&c, &x).unwrap_or_else(|e| panic!("seed {seed} cone {i}: {e}"));
            assert!(r.residual <= 1e-8, "seed {seed} cone {i}: {r:?}");
            assert!(sq_norm_midpoint_gap(&c, &x, &y).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn product_with_a_line_shifts_the_profile() {
    // ℝ₊² × ℝ: v = Binomial(2, ½) shifted by one
    let c = PolyhedralCone::product(&PolyhedralCone::orthant(2).unwrap(), &PolyhedralCone::full_space(1).unwrap()).unwrap();
    let p = ConicSamples::draw(&c, 100_000, SeededStream::new(2)).unwrap().profile();
    let want = convolve(&orthant_volumes(2), &[0.0, 1.0]);
    for k in 0..=3 {
        assert!((p.v[k] - want[k]).abs() <= 4.0 * p.v_stderr[k] + 1e-12, "k = {k}: {} vs {}", p.v[k], want[k]);
    }
}

#[test]
fn two_dimensional_wedge_is_angle_over_two_pi() {
    // a planar wedge of angle θ has v₂ = θ/2π, v₁ = ½, v₀ = (π − θ)/2π
    let theta = 1.1f64;
    let c = PolyhedralCone::from_generators(2, vec![vec![1.0, 0.0], vec![theta.cos(), theta.sin()]]).unwrap();
    let p = ConicSamples::draw(&c, 200_000, SeededStream::new(5)).unwrap().profile();
    let tau = std::f64::consts::TAU;
    let want = [(std::f64::consts::PI - theta) / tau, 0.5, theta / tau];
    for k in 0..3 {
        assert!((p.v[k] - want[k]).abs() <= 4.0 * p.v_stderr[k], "k = {k}: {} vs {}", p.v[k], want[k]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moreau_decomposition(n in 2usize..7, extra in 0usize..5, pointed: bool, seed in any::<u64>(), xs in prop::collection::vec(-3.0f64..3.0, 6)) {
        let c = cone(n, n + extra, pointed, seed);
        let x = &xs[..n];
        let r = moreau_probe(&c, x).unwrap();
        prop_assert!(r.residual <= 1e-8 && r.inner.abs() <= 1e-8, "{:?}", r);
        // projection is idempotent
        let p = c.project(x).unwrap().point;
        let pp = c.project(p.as_slice()).unwrap().point;
        prop_assert!((&p - &pp).norm() <= 1e-9 * (1.0 + p.norm()));
    }

    #[test]
    fn dual_of_dual_projects_like_the_cone(n in 2usize..5, extra in 0usize..4, seed in any::<u64>(), xs in prop::collection::vec(-3.0f64..3.0, 4)) {
        let c = cone(n, n + extra, true, seed);
        let d = dual_cone(&c).unwrap();
        let x = &xs[..n];
        // Π_{C°}(x) = x − Π_C(x)
        let via_dual = d.project(x).unwrap().point;
        let via_cone = c.project(x).unwrap().point;
        let xv = nalgebra::DVector::from_column_slice(x);
        prop_assert!((&via_dual - (&xv - &via_cone)).norm() <= 1e-8);
    }
}
