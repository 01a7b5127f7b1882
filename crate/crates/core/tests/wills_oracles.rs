use gaussconv::gauss::SeededStream;
use gaussconv::wills::{fixtures, intrinsic_volumes_closed, v1_mc, wills_mc, ConvexBody, SQRT_2PI};

// sup over y ∈ √(2π)·conv(V) of ⟨z,y⟩ − |y|²/2 by a barycentric grid
// followed by repeated zooming around the best cell
fn grid_sup(vertices: &[[f64; 2]], z: [f64; 2]) -> f64 {
    let g = |w: &[f64]| {
        let mut y = [0.0; 2];
        for (wi, v) in w.iter().zip(vertices) {
            y[0] += SQRT_2PI * wi * v[0];
            y[1] += SQRT_2PI * wi * v[1];
        }
        z[0] * y[0] + z[1] * y[1] - 0.5 * (y[0] * y[0] + y[1] * y[1])
    };
    let m = vertices.len();
    let mut center = vec![1.0 / m as f64; m];
    let mut width = 1.0;
    let mut best = g(&center);
    let steps = 24;
    for _ in 0..40 {
        let mut next = center.clone();
        // perturb pairs of weights, staying on the simplex
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                for s in 0..=steps {
                    let d = width * s as f64 / steps as f64;
                    let mut w = center.clone();
                    let moved = d.min(w[b]);
                    w[a] += moved;
                    w[b] -= moved;
                    let v = g(&w);
                    if v > best {
                        best = v;
                        next = w;
                    }
                }
            }
        }
        center = next;
        width *= 0.6;
    }
    best
}

#[test]
fn f_k_matches_grid_sup_on_polytopes() {
    let bodies: Vec<Vec<[f64; 2]>> = vec![
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        vec![[-0.5, -0.2], [0.8, -0.4], [0.9, 0.6], [0.1, 1.0], [-0.7, 0.4]],
    ];
    let zs = [[0.3, 0.2], [3.0, -1.0], [-2.0, -2.5], [0.0, 4.0], [1.2, 1.9], [-0.1, 0.05]];
    for verts in &bodies {
        let body = ConvexBody::polytope(verts.iter().map(|v| v.to_vec()).collect()).unwrap();
        for z in zs {
            let f = body.f_k(&z).unwrap();
            let g = grid_sup(verts, z);
            assert!((f - g).abs() < 1e-6, "{verts:?} {z:?}: {f} vs {g}");
        }
    }
}

#[test]
fn closed_form_cross_check() {
    let bodies = [
        fixtures::segment(1.0),
        fixtures::disk(),
        fixtures::unit_square(),
        ConvexBody::box_sides(vec![1.0, 0.5, 0.25]).unwrap(),
        ConvexBody::centered_ball(3, 0.5).unwrap(),
    ];
    for (i, body) in bodies.iter().enumerate() {
        let v = intrinsic_volumes_closed(body).unwrap();
        let w: f64 = v.iter().sum();
        let r = wills_mc(body, 400_000, SeededStream::new(10 + i as u64)).unwrap();
        assert!((r.w_estimate - w).abs() <= (0.02 * w).max(3.0 * r.w_stderr), "{i}: {} vs {w}", r.w_estimate);
        assert!((r.v1_estimate - v[1]).abs() <= (0.02 * v[1]).max(3.0 * r.v1_stderr));
        assert!(r.w_estimate >= 1.0 - 3.0 * r.w_stderr);
    }
}

#[test]
fn nested_bodies_are_monotone() {
    for (i, (small, big)) in fixtures::nested_pairs().iter().enumerate() {
        let a = wills_mc(small, 100_000, SeededStream::new(20 + i as u64)).unwrap();
        let b = wills_mc(big, 100_000, SeededStream::new(40 + i as u64)).unwrap();
        let se = (a.w_stderr.powi(2) + b.w_stderr.powi(2)).sqrt();
        assert!(a.w_estimate <= b.w_estimate + 3.0 * se, "pair {i}");
        let (va, sa) = v1_mc(small, 100_000, SeededStream::new(60 + i as u64)).unwrap();
        let (vb, sb) = v1_mc(big, 100_000, SeededStream::new(80 + i as u64)).unwrap();
        assert!(va <= vb + 3.0 * (sa * sa + sb * sb).sqrt(), "pair {i}");
    }
}
