//! Projections onto polyhedral cones, Monte Carlo conic intrinsic volumes,
//! statistical dimension, and the identities and tail bounds they satisfy.

mod cone;
mod profile;
pub mod solver;

pub use cone::{ConeSpec, FaceDimension, PolyhedralCone, Projection, TAU_ACT, TAU_RANK};
pub use profile::{ConicProfile, ConicSamples, ConicTailRow, MgfIdentityRow, ProfileSummary, VarianceIdentity};

use serde::Serialize;

use crate::error::Result;
use crate::gauss::SeededStream;

pub fn project_cone(cone: &PolyhedralCone, x: &[f64]) -> Result<Projection> {
    cone.project(x)
}

pub fn dual_cone(cone: &PolyhedralCone) -> Result<PolyhedralCone> {
    cone.dual_cone()
}

pub fn face_dimension(cone: &PolyhedralCone, x: &[f64]) -> Result<FaceDimension> {
    cone.face_dimension(x)
}

pub fn estimate_profile(cone: &PolyhedralCone, samples: usize, stream: SeededStream) -> Result<ConicProfile> {
    Ok(ConicSamples::draw(cone, samples, stream)?.profile())
}

pub fn variance_identity_check(cone: &PolyhedralCone, samples: usize, stream: SeededStream) -> Result<VarianceIdentity> {
    Ok(ConicSamples::draw(cone, samples, stream)?.variance_identity())
}

pub fn mgf_identity_check(
    cone: &PolyhedralCone,
    etas: &[f64],
    samples: usize,
    stream: SeededStream,
) -> Result<Vec<MgfIdentityRow>> {
    Ok(ConicSamples::draw(cone, samples, stream)?.mgf_identity(etas))
}

pub fn tail_bound_check(
    cone: &PolyhedralCone,
    t_grid: &[f64],
    samples: usize,
    stream: SeededStream,
) -> Result<Vec<ConicTailRow>> {
    ConicSamples::draw(cone, samples, stream)?.tail_bounds(t_grid)
}

/// Moreau decomposition diagnostics at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoreauProbe {
    /// |x − Π_C(x) − Π_{C°}(x)|
    pub residual: f64,
    /// ⟨Π_C(x), Π_{C°}(x)⟩
    pub inner: f64,
    /// Largest constraint violation of Π_C(x).
    pub feasibility: f64,
}

pub fn moreau_probe(cone: &PolyhedralCone, x: &[f64]) -> Result<MoreauProbe> {
    let p = cone.project(x)?.point;
    let q = cone.project_polar(x)?;
    let xv = nalgebra::DVector::from_column_slice(x);
    let feasibility = if cone.has_halfspaces() {
        cone.feasibility_residual(p.as_slice())?
    } else {
        0.0
    };
    Ok(MoreauProbe { residual: (&xv - &p - &q).norm(), inner: p.dot(&q), feasibility })
}

/// f((x+y)/2) − (f(x)+f(y))/2 for f = |Π_C|²; nonpositive by convexity.
pub fn sq_norm_midpoint_gap(cone: &PolyhedralCone, x: &[f64], y: &[f64]) -> Result<f64> {
    let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    let f = |v: &[f64]| cone.project(v).map(|p| p.point.norm_squared());
    Ok(f(&m)? - 0.5 * (f(x)? + f(y)?))
}

/// Binomial(n, ½) probabilities, the intrinsic volumes of ℝ₊ⁿ.
pub fn orthant_volumes(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    let mut c = 1.0;
    for (k, vk) in v.iter_mut().enumerate() {
        *vk = c * 0.5f64.powi(n as i32);
        c = c * (n - k) as f64 / (k + 1) as f64;
    }
    v
}

/// Discrete convolution of two profiles.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn orthant_projection_and_faces() {
        let c = PolyhedralCone::orthant(4).unwrap();
        let x = [1.0, -2.0, 0.5, -0.1];
        let p = project_cone(&c, &x).unwrap();
        assert_eq!(p.point.as_slice(), &[1.0, 0.0, 0.5, 0.0]);
        assert_eq!(face_dimension(&c, &x).unwrap(), FaceDimension { k: 2, flagged: false });
        assert_eq!(face_dimension(&c, &[1.0, 2.0, 3.0, 4.0]).unwrap().k, 4);
        let inside = [0.3, 0.0, 2.0, 1.0];
        assert!((project_cone(&c, &inside).unwrap().point - nalgebra::DVector::from_column_slice(&inside)).norm() < 1e-10);
    }

    #[test]
    fn subspace_projection() {
        let c = PolyhedralCone::subspace(2, vec![vec![1.0, 0.0]]).unwrap();
        let p = project_cone(&c, &[3.0, 4.0]).unwrap();
        assert!((p.point[0] - 3.0).abs() < 1e-14 && p.point[1].abs() < 1e-14);
        assert_eq!(c.lineality_dim(), 1);
        for x in [[3.0, 4.0], [-1.0, 0.2], [0.0, -5.0]] {
            assert_eq!(face_dimension(&c, &x).unwrap().k, 1);
        }
        let d = PolyhedralCone::coordinate_subspace(5, 3).unwrap();
        assert_eq!(face_dimension(&d, &[0.1, -0.2, 0.3, 4.0, 5.0]).unwrap().k, 3);
    }

    #[test]
    fn duals() {
        let c = PolyhedralCone::orthant(3).unwrap();
        let d = dual_cone(&c).unwrap();
        // (ℝ₊ⁿ)° = −ℝ₊ⁿ
        let p = project_cone(&d, &[1.0, -2.0, 0.5]).unwrap();
        assert!((p.point - nalgebra::DVector::from_vec(vec![0.0, -2.0, 0.0])).norm() < 1e-14);
        let s = PolyhedralCone::coordinate_subspace(3, 1).unwrap();
        let sd = dual_cone(&s).unwrap();
        let p = project_cone(&sd, &[1.0, 2.0, 3.0]).unwrap();
        assert!((p.point - nalgebra::DVector::from_vec(vec![0.0, 2.0, 3.0])).norm() < 1e-14);
        assert_eq!(face_dimension(&sd, &[1.0, 2.0, 3.0]).unwrap().k, 2);
        let h = PolyhedralCone::from_halfspaces(2, vec![vec![1.0, 0.0]]).unwrap();
        assert!(matches!(dual_cone(&h), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn validation() {
        assert!(PolyhedralCone::from_generators(2, vec![vec![0.0, 0.0]]).is_err());
        assert!(PolyhedralCone::from_generators(2, vec![vec![1.0]]).is_err());
        assert!(PolyhedralCone::new(2, Some(vec![vec![1.0, 0.0]]), Some(vec![vec![1.0, 0.0]])).is_err());
        assert!(PolyhedralCone::new(2, None, None).is_err());
    }

    #[test]
    fn moreau_on_random_cones() {
        let s = SeededStream::new(21);
        let mut rng = s.fork(1).rng();
        for trial in 0..200 {
            let n = 2 + trial % 4;
            let m = 1 + trial % 7;
            let c = if trial % 2 == 0 {
                PolyhedralCone::random_pointed(n, m, s.chunk(trial)).unwrap()
            } else {
                PolyhedralCone::random_general(n, m, s.chunk(trial)).unwrap()
            };
            let d = dual_cone(&c).unwrap();
            for _ in 0..5 {
                let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let r = moreau_probe(&c, &x).unwrap();
                assert!(r.residual <= 1e-8 && r.inner.abs() <= 1e-8, "trial {trial}: {r:?}");
                let r = moreau_probe(&d, &x).unwrap();
                assert!(r.residual <= 1e-8 && r.feasibility <= 1e-9, "dual trial {trial}: {r:?}");
                let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                assert!(sq_norm_midpoint_gap(&c, &x, &y).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn halfspace_faces_match_generator_faces() {
        let s = SeededStream::new(3);
        let mut rng = s.fork(2).rng();
        for trial in 0..50 {
            let c = PolyhedralCone::random_pointed(3, 4, s.chunk(trial)).unwrap();
            let d = dual_cone(&c).unwrap();
            let dd = PolyhedralCone::from_halfspaces(3, d.to_spec().halfspaces.unwrap()).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
                // V_C(x) + V_{C°}(x) = n almost surely
                let k = face_dimension(&c, &x).unwrap().k + face_dimension(&dd, &x).unwrap().k;
                assert_eq!(k, 3, "trial {trial}");
            }
        }
    }

    #[test]
    fn orthant_profile_small() {
        let c = PolyhedralCone::orthant(5).unwrap();
        let prof = estimate_profile(&c, 40_000, SeededStream::new(1)).unwrap();
        let exact = orthant_volumes(5);
        for k in 0..=5 {
            assert!((prof.v[k] - exact[k]).abs() < 4.0 * prof.v_stderr[k] + 1e-3);
        }
        assert!((prof.total_mass() - 1.0).abs() < 1e-12);
        assert!(prof.delta_estimators_agree);
        assert_eq!(prof.flagged, 0);
        assert!(prof.to_csv().starts_with("k,v_k,stderr\n0,"));
    }

    #[test]
    fn subspace_profile_is_exact() {
        let c = PolyhedralCone::coordinate_subspace(4, 2).unwrap();
        let s = ConicSamples::draw(&c, 5_000, SeededStream::new(2)).unwrap();
        let prof = s.profile();
        assert_eq!(prof.v[2], 1.0);
        assert_eq!(prof.delta, 2.0);
        assert_eq!(prof.var_v, 0.0);
        let vi = s.variance_identity();
        assert!(vi.agree);
        for row in s.mgf_identity(&[-1.0, 0.3]) {
            assert!((row.lhs - (2.0 * row.eta).exp()).abs() < 1e-12);
            assert!(row.holds, "{row:?}");
        }
    }

    #[test]
    fn full_space_variance_identity() {
        let c = PolyhedralCone::full_space(3).unwrap();
        let vi = variance_identity_check(&c, 50_000, SeededStream::new(4)).unwrap();
        assert_eq!(vi.var_v, 0.0);
        assert!(vi.agree, "{vi:?}");
    }

    #[test]
    fn orthant_variance_and_tails() {
        let c = PolyhedralCone::orthant(6).unwrap();
        let s = ConicSamples::draw(&c, 50_000, SeededStream::new(5)).unwrap();
        let vi = s.variance_identity();
        assert!(vi.agree && (vi.var_v - 1.5).abs() < 0.05, "{vi:?}");
        let rows = s.tail_bounds(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(rows.iter().all(|r| r.holds));
        assert_eq!(rows[0].two_sided_bound, 2.0);
    }

    #[test]
    fn product_profile_is_a_convolution() {
        let a = PolyhedralCone::random_pointed(2, 3, SeededStream::new(8)).unwrap();
        let b = PolyhedralCone::orthant(2).unwrap();
        let ab = PolyhedralCone::product(&a, &b).unwrap();
        let pa = estimate_profile(&a, 40_000, SeededStream::new(1)).unwrap();
        let pab = estimate_profile(&ab, 40_000, SeededStream::new(2)).unwrap();
        let conv = convolve(&pa.v, &orthant_volumes(2));
        for k in 0..conv.len() {
            let se = (pab.v_stderr[k].powi(2) + 0.25 * pa.v_stderr.iter().map(|s| s * s).sum::<f64>()).sqrt();
            assert!((pab.v[k] - conv[k]).abs() <= 4.0 * se + 1e-3, "k={k}");
        }
    }

    #[test]
    fn binomial_volumes() {
        let v = orthant_volumes(10);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((v[5] - 252.0 / 1024.0).abs() < 1e-15);
    }
}
