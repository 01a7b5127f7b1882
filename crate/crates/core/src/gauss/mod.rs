//! Standard Gaussian primitives: distribution function, quantile, density,
//! χ-distribution mean, quadrature rules and seeded sampling.

mod quadrature;
mod stream;

pub(crate) use quadrature::log_sum_exp_weighted;
pub use quadrature::{gauss_hermite, gauss_legendre, GaussianQuadrature, RealLineIntegrator};
pub use stream::{sample_gaussian, SampleMatrix, SeededStream, GENERATOR_ID};

use crate::error::{ensure_finite, Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn std_normal_pdf(t: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Φ(t) = γ₁((−∞, t)).
///
/// Evaluated through the complementary error function on the negative half
/// line, so the lower tail is accurate in relative terms and the upper tail in
/// absolute terms.
pub fn std_normal_cdf(t: f64) -> Result<f64> {
    ensure_finite("t", t)?;
    Ok(cdf_unchecked(t))
}

/// Upper tail 1 − Φ(t), accurate in relative terms for large positive `t`.
pub fn std_normal_sf(t: f64) -> Result<f64> {
    ensure_finite("t", t)?;
    Ok(cdf_unchecked(-t))
}

pub(crate) fn cdf_unchecked(t: f64) -> f64 {
    if t < 0.0 {
        0.5 * libm::erfc(-t * std::f64::consts::FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * libm::erfc(t * std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// Φ(b) − Φ(a) for a ≤ b, computed on the side of the origin where both
/// tails are representable. Infinite endpoints are allowed.
pub(crate) fn gaussian_interval_mass(a: f64, b: f64) -> f64 {
    let lo = |x: f64| {
        if x == f64::NEG_INFINITY {
            0.0
        } else if x == f64::INFINITY {
            1.0
        } else {
            cdf_unchecked(x)
        }
    };
    if a >= 0.0 {
        // both in the upper half: use survival functions
        (lo(-a) - lo(-b)).max(0.0)
    } else {
        (lo(b) - lo(a)).max(0.0)
    }
}

// Rational approximation of the lower-tail quantile (relative error ~1e-9),
// polished by Newton steps on Φ.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn quantile_initial(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Lower-tail quantile for p ≤ 1/2.
fn lower_quantile(p: f64) -> f64 {
    let mut x = quantile_initial(p);
    for _ in 0..2 {
        let err = cdf_unchecked(x) - p;
        x -= err / std_normal_pdf(x);
    }
    x
}

/// Φ⁻¹(p) for p ∈ (0, 1). The endpoints are rejected rather than mapped to ±∞.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile requires p in (0,1), got {p}")));
    }
    if p <= 0.5 {
        Ok(lower_quantile(p))
    } else {
        // 1 - p is exact for p in [1/2, 1)
        Ok(-lower_quantile(1.0 - p))
    }
}

/// Quantile of the upper tail: the `t` with 1 − Φ(t) = q.
pub fn std_normal_upper_quantile(q: f64) -> Result<f64> {
    std_normal_quantile(q).map(|x| -x)
}

/// 𝔼|Z| for Z standard Gaussian in ℝⁿ, i.e. √2·Γ((n+1)/2)/Γ(n/2).
pub fn chi_mean(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("chi_mean requires n >= 1".into()));
    }
    let n = n as f64;
    Ok(std::f64::consts::SQRT_2 * (libm::lgamma(0.5 * (n + 1.0)) - libm::lgamma(0.5 * n)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Maclaurin series of erf, summed until terms vanish. Accurate to a few
    /// ulps for |x| ≤ 3 and independent of libm.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x * x / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    }

    /// Continued fraction for erfc(x), x ≥ 2, by the modified Lentz method.
    fn erfc_cf(x: f64) -> f64 {
        // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            d = if d == 0.0 { tiny } else { 1.0 / d };
            c = x + a / c;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (-x * x).exp() / PI.sqrt() / f
    }

    fn phi_oracle(t: f64) -> f64 {
        let x = t / 2f64.sqrt();
        if x.abs() <= 2.0 {
            0.5 * (1.0 + erf_series(x))
        } else if x < 0.0 {
            0.5 * erfc_cf(-x)
        } else {
            1.0 - 0.5 * erfc_cf(x)
        }
    }

    #[test]
    fn cdf_at_origin_and_symmetry() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
        for &t in &[0.1, 0.7, 1.3, 2.9, 5.5, 7.9] {
            let s = std_normal_cdf(t).unwrap() + std_normal_cdf(-t).unwrap();
            assert!((s - 1.0).abs() <= 1e-15, "t={t} sum={s}");
        }
    }

    #[test]
    fn cdf_matches_series_oracle() {
        let mut t = -8.0;
        while t <= 8.0 {
            let got = std_normal_cdf(t).unwrap();
            assert!((got - phi_oracle(t)).abs() <= 1e-14, "t={t}");
            t += 0.01;
        }
    }

    #[test]
    fn cdf_975_point_from_bisection() {
        // bisection on the series oracle for Φ(t) = 0.975
        let (mut lo, mut hi) = (1.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi_oracle(mid) < 0.975 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let t975 = 0.5 * (lo + hi);
        assert!((t975 - 1.959964).abs() < 1e-6);
        assert!((std_normal_cdf(1.959964).unwrap() - 0.975).abs() < 1e-6);
        assert!((std_normal_quantile(0.975).unwrap() - t975).abs() < 1e-12);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_monotone_on_dense_grid() {
        let mut prev = -1.0;
        for i in 0..10_000 {
            let t = -8.0 + 16.0 * i as f64 / 9_999.0;
            let v = std_normal_cdf(t).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn quantile_basics() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(-0.1).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            let x = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(x).unwrap() - p).abs() <= 1e-12);
        }
        for &p in &[1e-300, 1e-100, 1e-20, 1e-10, 1e-5] {
            let x = std_normal_quantile(p).unwrap();
            let rel = (std_normal_cdf(x).unwrap() - p).abs() / p;
            assert!(rel < 1e-12, "p={p} rel={rel}");
        }
    }

    #[test]
    fn quantile_strictly_increasing() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..5000 {
            let x = std_normal_quantile(i as f64 / 5000.0).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn round_trip_on_lower_half_and_upper_within_conditioning() {
        // For x ≤ 0, Φ(x) carries full relative precision and the round
        // trip is limited only by the quantile itself.
        let mut x = -6.0;
        while x <= 0.0 {
            let back = std_normal_quantile(std_normal_cdf(x).unwrap()).unwrap();
            assert!((back - x).abs() <= 1e-10, "x={x}");
            x += 0.001;
        }
        // For x > 0 the probability Φ(x) is stored with absolute spacing
        // 2^-53, so the best attainable error is ulp(Φ(x)) / φ(x).
        let mut x = 0.0;
        while x <= 6.0 {
            let p = std_normal_cdf(x).unwrap();
            let floor = f64::EPSILON / std_normal_pdf(x);
            let back = std_normal_quantile(p).unwrap();
            assert!((back - x).abs() <= 1e-10f64.max(2.0 * floor), "x={x}");
            x += 0.001;
        }
        // through the survival function the upper half is exact again
        let mut x = 0.0;
        while x <= 6.0 {
            let q = std_normal_sf(x).unwrap();
            let back = std_normal_upper_quantile(q).unwrap();
            assert!((back - x).abs() <= 1e-10, "x={x}");
            x += 0.001;
        }
    }

    #[test]
    fn chi_mean_values() {
        assert!((chi_mean(1).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-12);
        assert!((chi_mean(2).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((chi_mean(10_000).unwrap() - 100.0).abs() < 0.01);
        assert!(chi_mean(0).is_err());
        let mut prev = 0.0;
        for n in 1..200 {
            let m = chi_mean(n).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn interval_mass_upper_tail() {
        let m = gaussian_interval_mass(8.0, f64::INFINITY);
        let want = std_normal_sf(8.0).unwrap();
        assert!((m - want).abs() / want < 1e-14);
        assert!((gaussian_interval_mass(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-16);
    }
}
