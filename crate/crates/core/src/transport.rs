//! One-dimensional Gaussian transport T = Φ⁻¹∘F, concavity tests for it,
//! convex pushforwards of γ₁, and the exponential-variable lift of the
//! lower-tail bound.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::gauss::{std_normal_pdf, std_normal_quantile, SeededStream};
use crate::mgf::{check_grid, lower_tail_table, normalized_second_difference, ScalarDistribution, TailRow, MIN_SAMPLES};
use crate::oracle::ConvexFunctionOracle;

/// Second-difference tolerance for exactly computed maps.
pub const CLOSED_FORM_TOL: f64 = 1e-9;

/// F(t) = P(X ≤ t).
pub fn distribution_function(dist: &ScalarDistribution, t: f64) -> Result<f64> {
    dist.cdf(t)
}

/// T = Φ⁻¹∘F sampled on a grid. Points where F ∈ {0, 1} are dropped and
/// listed in `excluded`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneMap {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Standard error of each value; zero for exact distribution functions.
    pub stderr: Vec<f64>,
    pub excluded: Vec<f64>,
}

impl MonotoneMap {
    /// Builds a map from raw values, checking that they are nondecreasing.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, stderr: Vec<f64>) -> Result<Self> {
        check_grid(&grid, 1)?;
        if values.len() != grid.len() || stderr.len() != grid.len() {
            return Err(invalid("map grid, values and stderr must have equal length"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("map values must be nondecreasing"));
        }
        Ok(MonotoneMap { grid, values, stderr, excluded: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Normalized second differences at interior points.
    pub fn second_differences(&self) -> Vec<Option<f64>> {
        let n = self.grid.len();
        (0..n)
            .map(|i| {
                (i > 0 && i + 1 < n).then(|| normalized_second_difference(&self.grid, &self.values, i))
            })
            .collect()
    }

    /// Tolerance for the triple centred at `i`: the exact tolerance plus four
    /// propagated standard errors.
    fn triple_tol(&self, i: usize) -> f64 {
        let (a, b, c) = (self.stderr[i - 1], self.stderr[i], self.stderr[i + 1]);
        CLOSED_FORM_TOL + 4.0 * (a * a + 4.0 * b * b + c * c).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,T,second_diff\n");
        for ((t, v), d) in self.grid.iter().zip(&self.values).zip(self.second_differences()) {
            let d = d.map(|d| format!("{d:.16e}")).unwrap_or_default();
            let _ = writeln!(out, "{t:.16e},{v:.16e},{d}");
        }
        out
    }
}

pub fn gaussian_transport_map(dist: &ScalarDistribution, grid: &[f64]) -> Result<MonotoneMap> {
    check_grid(grid, 1)?;
    let n_samples = match dist {
        ScalarDistribution::SampleSet(s) => Some(s.len() as f64),
        _ => None,
    };
    let mut map = MonotoneMap { grid: Vec::new(), values: Vec::new(), stderr: Vec::new(), excluded: Vec::new() };
    for &t in grid {
        let f = dist.cdf(t)?;
        if !(f > 0.0 && f < 1.0) {
            map.excluded.push(t);
            continue;
        }
        let x = std_normal_quantile(f)?;
        let se = match n_samples {
            // delta method through (Φ⁻¹)' = 1/φ(Φ⁻¹)
            Some(n) => (f * (1.0 - f) / n).sqrt() / std_normal_pdf(x),
            None => 0.0,
        };
        map.grid.push(t);
        map.values.push(x);
        map.stderr.push(se);
    }
    Ok(map)
}

/// Outcome of a concavity (or convexity) test on a monotone map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub passes: bool,
    /// First violating grid triple.
    pub witness: Option<[f64; 3]>,
    /// Largest second difference in excess of its tolerance.
    pub worst_excess: f64,
}

fn curvature_test(map: &MonotoneMap, sign: f64) -> Result<ConcavityReport> {
    if map.len() < 3 {
        return Err(Error::InsufficientDomain { finite: map.len(), needed: 3 });
    }
    let mut witness = None;
    let mut worst = f64::NEG_INFINITY;
    for (i, d) in map.second_differences().into_iter().enumerate() {
        let Some(d) = d else { continue };
        let excess = sign * d - map.triple_tol(i);
        worst = worst.max(excess);
        if excess > 0.0 && witness.is_none() {
            witness = Some([map.grid[i - 1], map.grid[i], map.grid[i + 1]]);
        }
    }
    Ok(ConcavityReport { passes: witness.is_none(), witness, worst_excess: worst })
}

/// True iff every second difference is ≤ its tolerance.
pub fn concavity_test(map: &MonotoneMap) -> Result<ConcavityReport> {
    curvature_test(map, 1.0)
}

/// Mirror of [`concavity_test`]; an affine map passes both.
pub fn convexity_test(map: &MonotoneMap) -> Result<ConcavityReport> {
    curvature_test(map, -1.0)
}

/// Moment screen of T(X) against N(0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityScreen {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// Draws with F(x) ∈ {0, 1}, left out of the moments.
    pub dropped: usize,
    pub passes: bool,
}

/// Draws X, maps each draw through Φ⁻¹∘F and checks mean within 3/√N of 0
/// and variance within 5/√N of 1.
pub fn normality_screen(dist: &ScalarDistribution, n: usize, stream: SeededStream) -> Result<NormalityScreen> {
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: n, needed: MIN_SAMPLES });
    }
    let xs = dist.sample(n, stream)?;
    let mut ts = Vec::with_capacity(n);
    for x in xs {
        let f = dist.cdf(x)?;
        if f > 0.0 && f < 1.0 {
            ts.push(std_normal_quantile(f)?);
        }
    }
    let dropped = n - ts.len();
    let m = ts.len() as f64;
    let mean = ts.iter().sum::<f64>() / m;
    let variance = ts.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let root = (n as f64).sqrt();
    let passes = dropped == 0 && mean.abs() <= 3.0 / root && (variance - 1.0).abs() <= 5.0 / root;
    Ok(NormalityScreen { n, mean, variance, dropped, passes })
}

/// Samples φ(Z) for Z ~ γ₁ as an empirical law.
pub fn convex_pushforward(phi: &ConvexFunctionOracle, n: usize, stream: SeededStream) -> Result<ScalarDistribution> {
    if phi.dim() != 1 {
        return Err(invalid(format!("pushforward needs a 1-D oracle, got dim {}", phi.dim())));
    }
    if !phi.shape().admits_convex() {
        return Err(Error::Contract(format!("{} is declared {:?}, not convex", phi.name(), phi.shape())));
    }
    if n == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let pairs = stream.map_gaussian(1, n, |z| (z[0], phi.eval1(z[0])));
    let bad: Vec<f64> = pairs.iter().filter(|(_, v)| !v.is_finite()).map(|(z, _)| *z).take(10).collect();
    if !bad.is_empty() {
        return Err(Error::NumericalFailure(format!("{} is not finite at z = {bad:?}", phi.name())));
    }
    ScalarDistribution::samples(pairs.into_iter().map(|(_, v)| v).collect())
}

/// Largest dimension accepted by [`exponential_adaptation_check`].
pub const MAX_ADAPTATION_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptationReport {
    pub dim: usize,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub rows: Vec<TailRow>,
}

impl AdaptationReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Lower-tail bound for f(X) with X a vector of independent Exp(1)
/// variables, each realised as (x² + y²)/2 of two standard Gaussians.
pub fn exponential_adaptation_check(
    f: &ConvexFunctionOracle,
    t_grid: &[f64],
    n: usize,
    stream: SeededStream,
) -> Result<AdaptationReport> {
    let dim = f.dim();
    if dim > MAX_ADAPTATION_DIM {
        return Err(invalid(format!("dimension {dim} exceeds {MAX_ADAPTATION_DIM}")));
    }
    if !f.shape().admits_convex() {
        return Err(Error::Contract(format!("{} is declared {:?}, not convex", f.name(), f.shape())));
    }
    let decrease = f.monotonicity_probe(500, stream.fork(1), 4.0);
    if decrease > 1e-9 {
        return Err(Error::Contract(format!("{} decreases by {decrease:e} along a coordinate", f.name())));
    }
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: n, needed: MIN_SAMPLES });
    }
    let values = stream.map_gaussian(2 * dim, n, |g| {
        let x: Vec<f64> = g.chunks_exact(2).map(|p| 0.5 * (p[0] * p[0] + p[1] * p[1])).collect();
        f.eval(&x)
    });
    for (i, v) in values.iter().enumerate() {
        ensure_finite(&format!("f(X_{i})"), *v)?;
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let rows = lower_tail_table(&values, mean, variance, t_grid)?;
    Ok(AdaptationReport { dim, n, mean, variance, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::std_normal_cdf;
    use crate::oracle::{builtin, Shape};

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn distribution_function_examples() {
        let g = ScalarDistribution::gaussian(0.0, 1.0).unwrap();
        assert_eq!(distribution_function(&g, 0.3).unwrap(), std_normal_cdf(0.3).unwrap());
        let e = ScalarDistribution::exponential(1.0).unwrap();
        assert!((distribution_function(&e, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-16);
        let s = ScalarDistribution::samples(vec![2.0, 3.0]).unwrap();
        assert_eq!(distribution_function(&s, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_map_is_affine() {
        let g = ScalarDistribution::gaussian(1.0, 4.0).unwrap();
        let grid = linspace(-5.0, 7.0, 101);
        let map = gaussian_transport_map(&g, &grid).unwrap();
        for (t, v) in map.grid.iter().zip(&map.values) {
            assert!((v - (t - 1.0) / 2.0).abs() < 1e-12);
        }
        assert!(concavity_test(&map).unwrap().passes);
        assert!(convexity_test(&map).unwrap().passes);
    }

    #[test]
    fn exponential_map_is_concave() {
        let e = ScalarDistribution::exponential(1.0).unwrap();
        let map = gaussian_transport_map(&e, &linspace(0.01, 10.0, 1000)).unwrap();
        assert!(map.excluded.is_empty());
        let r = concavity_test(&map).unwrap();
        assert!(r.passes, "{r:?}");
        assert!(!convexity_test(&map).unwrap().passes);
        let neg_edge = gaussian_transport_map(&e, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(neg_edge.excluded, vec![-1.0, 0.0]);
    }

    #[test]
    fn lognormal_map_is_log() {
        let d = ScalarDistribution::pushforward(builtin::exp()).unwrap();
        let grid = linspace(0.05, 8.0, 60);
        let map = gaussian_transport_map(&d, &grid).unwrap();
        for (t, v) in map.grid.iter().zip(&map.values) {
            assert!((v - t.ln()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn poisson_sample_fails_with_witness() {
        let p = ScalarDistribution::poisson(1.0).unwrap();
        let s = ScalarDistribution::samples(p.sample(100_000, SeededStream::new(5)).unwrap()).unwrap();
        let map = gaussian_transport_map(&s, &linspace(0.0, 4.0, 81)).unwrap();
        let r = concavity_test(&map).unwrap();
        assert!(!r.passes);
        let w = r.witness.unwrap();
        assert!(w[0] < w[1] && w[1] < w[2]);
    }

    #[test]
    fn convex_suite_pushforwards_pass() {
        for phi in builtin::convex_suite_1d() {
            let s = convex_pushforward(&phi, 100_000, SeededStream::new(11)).unwrap();
            let ScalarDistribution::SampleSet(set) = &s else { unreachable!() };
            let mut v = set.values().to_vec();
            v.sort_by(f64::total_cmp);
            let lo = v[v.len() / 100];
            let hi = v[v.len() - v.len() / 100];
            let map = gaussian_transport_map(&s, &linspace(lo, hi, 40)).unwrap();
            let r = concavity_test(&map).unwrap();
            assert!(r.passes, "{}: {r:?}", phi.name());
        }
    }

    #[test]
    fn pushforward_examples() {
        let s = convex_pushforward(&builtin::affine1(2.0, 1.0), 200_000, SeededStream::new(2)).unwrap();
        let m = s.moments();
        let se = 2.0 / (200_000f64).sqrt();
        assert!((m.mean - 1.0).abs() < 4.0 * se && (m.variance - 4.0).abs() < 0.05);

        let s = convex_pushforward(&builtin::square(), 200_000, SeededStream::new(3)).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let chi2 = 2.0 * std_normal_cdf(f64::sqrt(t)).unwrap() - 1.0;
            let emp = s.cdf(t).unwrap();
            let se = (chi2 * (1.0 - chi2) / 200_000.0).sqrt();
            assert!((emp - chi2).abs() < 4.0 * se + 1e-5, "t={t}");
        }

        let bad = ConvexFunctionOracle::scalar("1/0", Shape::Convex, |z| if z > 2.0 { f64::INFINITY } else { z });
        let err = convex_pushforward(&bad, 10_000, SeededStream::new(0)).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure(ref m) if m.contains("z =")));
        let sin = ConvexFunctionOracle::scalar("sin", Shape::Unknown, f64::sin);
        assert!(matches!(convex_pushforward(&sin, 10, SeededStream::new(0)), Err(Error::Contract(_))));
    }

    #[test]
    fn normality_screens() {
        for d in [
            ScalarDistribution::exponential(1.0).unwrap(),
            ScalarDistribution::gaussian(-2.0, 0.5).unwrap(),
        ] {
            let r = normality_screen(&d, 50_000, SeededStream::new(9)).unwrap();
            assert!(r.passes, "{} {r:?}", d.kind());
        }
    }

    #[test]
    fn closed_form_round_trip() {
        let e = ScalarDistribution::exponential(1.5).unwrap();
        let g = ScalarDistribution::gaussian(0.5, 2.0).unwrap();
        for d in [&e, &g] {
            for i in 1..200 {
                let x = i as f64 * 0.03;
                let back = d.quantile(d.cdf(x).unwrap()).unwrap();
                assert!((back - x).abs() < 1e-8, "{} x={x}", d.kind());
            }
        }
    }

    #[test]
    fn adaptation_gamma_tail() {
        let r = exponential_adaptation_check(&builtin::sum(2), &[0.0, 0.5, 1.0, 1.5], 200_000, SeededStream::new(4))
            .unwrap();
        assert!(r.holds());
        assert_eq!(r.rows[0].bound, 1.0);
        assert!((r.mean - 2.0).abs() < 0.02 && (r.variance - 2.0).abs() < 0.05);
        for row in &r.rows[1..] {
            // Gamma(2) lower tail at 2 − t
            let x: f64 = 2.0 - row.t;
            let exact = 1.0 - (-x).exp() * (1.0 + x);
            assert!((row.empirical - exact).abs() < 5.0 * row.stderr + 2e-3);
        }
    }

    #[test]
    fn adaptation_max_across_seeds() {
        for seed in 0..5 {
            let r = exponential_adaptation_check(&builtin::max(2), &[0.25, 0.5, 1.0], 50_000, SeededStream::new(seed))
                .unwrap();
            assert!(r.holds());
        }
        let concave = builtin::norm_sq(2).negated();
        assert!(matches!(
            exponential_adaptation_check(&concave, &[1.0], 10_000, SeededStream::new(0)),
            Err(Error::Contract(_))
        ));
    }
}
