//! Normalized log-moment generating functions Λ_X(p) = (1/p) log 𝔼e^{pX},
//! their convexity profiles, Gaussian chords, and the lower-tail deviation
//! bounds that follow from convexity.

mod distribution;

pub use distribution::{DensityGrid, Moments, SampleSet, ScalarDistribution};

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::gauss::SeededStream;

/// Below this |p| the mean convention replaces the division by p.
const P_ZERO: f64 = 1e-8;

/// Which side of its chords Λ is expected to lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Lower-tail statement: Λ convex, chords lie above.
    Convex,
    /// Upper-tail mirror: Λ concave, chords lie below.
    Concave,
}

/// Λ_X(p), with Λ_X(0) = 𝔼X. Where 𝔼e^{pX} diverges the value is `+∞` for
/// p > 0 and `−∞` for p < 0.
pub fn lambda_value(dist: &ScalarDistribution, p: f64) -> Result<f64> {
    ensure_finite("p", p)?;
    Ok(match dist {
        ScalarDistribution::Gaussian { mean, variance } => mean + 0.5 * variance * p,
        ScalarDistribution::Poisson { rate } => {
            if p == 0.0 {
                *rate
            } else {
                rate * p.exp_m1() / p
            }
        }
        ScalarDistribution::Exponential { rate } => {
            if p == 0.0 {
                1.0 / rate
            } else if p >= *rate {
                f64::INFINITY
            } else {
                -(-p / rate).ln_1p() / p
            }
        }
        _ => {
            let mean = dist.mean();
            if p.abs() < P_ZERO {
                mean
            } else {
                // a divergent log-MGF gives +∞ for p > 0 and −∞ for p < 0
                let l = dist.log_mgf_centered(p, mean);
                if l.is_infinite() {
                    l / p
                } else {
                    mean + l / p
                }
            }
        }
    })
}

/// Λ evaluated on a grid with normalized second differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Aligned with `grid`; `None` at the endpoints and wherever a
    /// neighbouring value is infinite.
    pub second_differences: Vec<Option<f64>>,
}

impl LambdaProfile {
    /// Smallest second difference (the convexity witness).
    pub fn min_second_difference(&self) -> Option<f64> {
        self.second_differences.iter().flatten().copied().reduce(f64::min)
    }

    pub fn max_second_difference(&self) -> Option<f64> {
        self.second_differences.iter().flatten().copied().reduce(f64::max)
    }

    pub fn max_abs_second_difference(&self) -> Option<f64> {
        self.second_differences.iter().flatten().map(|d| d.abs()).reduce(f64::max)
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_second_difference().is_none_or(|d| d >= -tol)
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        self.max_second_difference().is_none_or(|d| d <= tol)
    }

    /// Index range holding finite values.
    pub fn finite_range(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| v.is_finite())?;
        let last = self.values.iter().rposition(|v| v.is_finite())?;
        Some((first, last))
    }

    /// Whether finite values form one contiguous block of indices.
    pub fn finite_set_is_interval(&self) -> bool {
        match self.finite_range() {
            None => true,
            Some((a, b)) => self.values[a..=b].iter().all(|v| v.is_finite()),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,lambda,second_diff\n");
        for (i, (p, v)) in self.grid.iter().zip(&self.values).enumerate() {
            let sd = self.second_differences[i].map(|d| format!("{d:.16e}")).unwrap_or_default();
            let _ = writeln!(out, "{p:.16e},{v:.16e},{sd}");
        }
        out
    }
}

/// Second difference at interior point `i`, normalized so that it equals
/// y₊ − 2y + y₋ on a uniform grid.
pub(crate) fn normalized_second_difference(x: &[f64], y: &[f64], i: usize) -> f64 {
    let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
    let slope_diff = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    0.5 * (hl + hr) * slope_diff
}

pub(crate) fn check_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(invalid(format!("grid needs at least {min_len} points, got {}", grid.len())));
    }
    for (i, g) in grid.iter().enumerate() {
        ensure_finite(&format!("grid[{i}]"), *g)?;
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Evaluates Λ along `grid` and reports second differences.
pub fn lambda_profile(dist: &ScalarDistribution, grid: &[f64]) -> Result<LambdaProfile> {
    check_grid(grid, 3)?;
    let values = grid.iter().map(|&p| lambda_value(dist, p)).collect::<Result<Vec<_>>>()?;
    let finite = values.iter().filter(|v| v.is_finite()).count();
    if finite < 3 {
        return Err(Error::InsufficientDomain { finite, needed: 3 });
    }
    let mut second_differences = vec![None; grid.len()];
    for i in 1..grid.len() - 1 {
        if values[i - 1..=i + 1].iter().all(|v| v.is_finite()) {
            second_differences[i] = Some(normalized_second_difference(grid, &values, i));
        }
    }
    Ok(LambdaProfile { grid: grid.to_vec(), values, second_differences })
}

/// The Gaussian X_o = σZ + μ whose Λ matches Λ_X at p₀ and p₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordFit {
    pub p0: f64,
    pub p1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub mu: f64,
    pub sigma2: f64,
    /// Set when Λ(p₁) < Λ(p₀), which forces σ² < 0.
    pub negative_variance: bool,
}

impl ChordFit {
    /// Λ_o(p) = μ + σ²p/2.
    pub fn lambda_at(&self, p: f64) -> f64 {
        self.mu + 0.5 * self.sigma2 * p
    }
}

pub fn gaussian_chord(dist: &ScalarDistribution, p0: f64, p1: f64) -> Result<ChordFit> {
    ensure_finite("p0", p0)?;
    ensure_finite("p1", p1)?;
    if !(p0 < p1) {
        return Err(invalid(format!("chord needs p0 < p1, got {p0}, {p1}")));
    }
    let lambda0 = lambda_value(dist, p0)?;
    let lambda1 = lambda_value(dist, p1)?;
    if !(lambda0.is_finite() && lambda1.is_finite()) {
        return Err(Error::Domain(format!("Λ is infinite at a chord endpoint ({lambda0}, {lambda1})")));
    }
    let mu = (p1 * lambda0 - p0 * lambda1) / (p1 - p0);
    let sigma2 = 2.0 * (lambda1 - lambda0) / (p1 - p0);
    Ok(ChordFit { p0, p1, lambda0, lambda1, mu, sigma2, negative_variance: sigma2 < 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    pub p: f64,
    pub lambda: f64,
    pub chord: f64,
    /// Signed so that it is nonnegative under the declared orientation.
    pub gap: f64,
}

/// Distance between Λ and its Gaussian chord at interior points of (p₀, p₁).
/// Zero everywhere exactly when X is Gaussian.
pub fn strict_convexity_gap(
    dist: &ScalarDistribution,
    p0: f64,
    p1: f64,
    interior: &[f64],
    orientation: Orientation,
) -> Result<Vec<GapPoint>> {
    let chord = gaussian_chord(dist, p0, p1)?;
    interior
        .iter()
        .map(|&p| {
            if !(p > p0 && p < p1) {
                return Err(invalid(format!("interior point {p} outside ({p0}, {p1})")));
            }
            let lambda = lambda_value(dist, p)?;
            let c = chord.lambda_at(p);
            let gap = match orientation {
                Orientation::Convex => c - lambda,
                Orientation::Concave => lambda - c,
            };
            Ok(GapPoint { p, lambda, chord: c, gap })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfBound {
    pub lambda: f64,
    /// 𝔼e^{λX}
    pub lhs: f64,
    /// exp(λ² var/2 + λ 𝔼X)
    pub rhs: f64,
    pub holds: bool,
}

/// 𝔼e^{λX} ≤ exp(λ² var(X)/2 + λ𝔼X) for λ ≤ 0.
pub fn mgf_upper_bound_check(dist: &ScalarDistribution, lambda: f64, tol: f64) -> Result<MgfBound> {
    ensure_finite("lambda", lambda)?;
    if lambda > 0.0 {
        return Err(Error::Domain(format!("the bound is only claimed for λ <= 0, got {lambda}")));
    }
    let m = dist.moments();
    if !m.variance.is_finite() {
        return Err(Error::Domain("variance is not finite".into()));
    }
    let lhs = if lambda == 0.0 { 1.0 } else { (lambda * lambda_value(dist, lambda)?).exp() };
    let rhs = (0.5 * lambda * lambda * m.variance + lambda * m.mean).exp();
    Ok(MgfBound { lambda, lhs, rhs, holds: lhs <= rhs * (1.0 + tol) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Smallest sample size accepted by Monte Carlo checks.
pub const MIN_SAMPLES: usize = 1000;

/// Compares empirical lower tails with a Gaussian-type bound
/// exp(−t²/(2σ²)); a row holds when empirical ≤ bound + 3·stderr.
pub fn lower_tail_table(samples: &[f64], mean: f64, sigma2: f64, t_grid: &[f64]) -> Result<Vec<TailRow>> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: samples.len(), needed: MIN_SAMPLES });
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!("variance proxy must be positive, got {sigma2}")));
    }
    let n = samples.len() as f64;
    t_grid
        .iter()
        .map(|&t| {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid(format!("tail threshold must be >= 0, got {t}")));
            }
            let hits = samples.iter().filter(|&&x| x <= mean - t).count() as f64;
            let empirical = hits / n;
            let stderr = (empirical * (1.0 - empirical) / n).sqrt();
            let bound = (-t * t / (2.0 * sigma2)).exp();
            Ok(TailRow { t, empirical, stderr, bound, holds: empirical <= bound + 3.0 * stderr })
        })
        .collect()
}

/// P(X ≤ 𝔼X − t) ≤ exp(−t²/2var(X)), checked on `n` draws. Sample-set
/// inputs are used as they are and must hold at least 10³ values.
pub fn chernoff_lower_tail_check(
    dist: &ScalarDistribution,
    t_grid: &[f64],
    stream: SeededStream,
    n: usize,
) -> Result<Vec<TailRow>> {
    let m = dist.moments();
    if !(m.variance.is_finite() && m.variance > 0.0) {
        return Err(Error::Domain(format!("variance must be finite and positive, got {}", m.variance)));
    }
    match dist {
        ScalarDistribution::SampleSet(s) => lower_tail_table(s.values(), m.mean, m.variance, t_grid),
        _ => {
            if n < MIN_SAMPLES {
                return Err(Error::InsufficientSamples { got: n, needed: MIN_SAMPLES });
            }
            let xs = dist.sample(n, stream)?;
            lower_tail_table(&xs, m.mean, m.variance, t_grid)
        }
    }
}
