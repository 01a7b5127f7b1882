use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::gauss::{self, gauss_legendre, std_normal_quantile, RealLineIntegrator, SeededStream};
use crate::oracle::ConvexFunctionOracle;

/// Mean and variance of a law.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Piecewise-linear density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    points: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DensityGrid {
    /// Validates nonnegativity and that the trapezoid integral is 1 within 1e-8.
    pub fn new(points: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.len() != density.len() {
            return Err(invalid("density grid needs >= 2 points and matching lengths"));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) || points.iter().any(|x| !x.is_finite()) {
            return Err(invalid("density grid points must be finite and strictly increasing"));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(invalid("density values must be finite and nonnegative"));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        cumulative.push(0.0);
        for i in 1..points.len() {
            let cell = 0.5 * (density[i] + density[i - 1]) * (points[i] - points[i - 1]);
            cumulative.push(cumulative[i - 1] + cell);
        }
        let total = *cumulative.last().unwrap();
        if (total - 1.0).abs() > 1e-8 {
            return Err(invalid(format!("density grid integrates to {total}, expected 1 within 1e-8")));
        }
        Ok(DensityGrid { points, density, cumulative })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Mass of cell `i` up to offset `s` ∈ [0, h].
    fn partial_cell(&self, i: usize, s: f64) -> f64 {
        let h = self.points[i + 1] - self.points[i];
        let slope = (self.density[i + 1] - self.density[i]) / h;
        self.density[i] * s + 0.5 * slope * s * s
    }

    fn cdf(&self, t: f64) -> f64 {
        if t <= self.points[0] {
            return 0.0;
        }
        if t >= *self.points.last().unwrap() {
            return 1.0;
        }
        let i = self.points.partition_point(|&x| x <= t) - 1;
        ((self.cumulative[i] + self.partial_cell(i, t - self.points[i])) / self.total()).min(1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total();
        let i = self
            .cumulative
            .partition_point(|&c| c <= target)
            .clamp(1, self.points.len() - 1)
            - 1;
        let rem = target - self.cumulative[i];
        let h = self.points[i + 1] - self.points[i];
        let a = self.density[i];
        let slope = (self.density[i + 1] - a) / h;
        // solve a s + slope s²/2 = rem for s in [0, h]
        let s = if slope.abs() < 1e-300 {
            if a > 0.0 {
                rem / a
            } else {
                0.0
            }
        } else {
            let disc = (a * a + 2.0 * slope * rem).max(0.0);
            // numerically stable root
            2.0 * rem / (a + disc.sqrt()).max(1e-300)
        };
        self.points[i] + s.clamp(0.0, h)
    }

    /// ∫ g(x) f(x) dx cell-wise with 10-point Gauss–Legendre.
    fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let (gx, gw) = gauss_legendre(10);
        let mut acc = 0.0;
        for i in 0..self.points.len() - 1 {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let (fa, fb) = (self.density[i], self.density[i + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                let s = mid + half * x;
                let f = fa + (fb - fa) * (s - a) / (b - a);
                acc += half * w * f * g(s);
            }
        }
        acc
    }

    fn log_integrate_exp(&self, g: impl Fn(f64) -> f64) -> f64 {
        let (gx, gw) = gauss_legendre(10);
        let mut vals = Vec::new();
        let mut ws = Vec::new();
        for i in 0..self.points.len() - 1 {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let (fa, fb) = (self.density[i], self.density[i + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                let s = mid + half * x;
                let f = fa + (fb - fa) * (s - a) / (b - a);
                if f > 0.0 {
                    vals.push(g(s) + f.ln());
                    ws.push(half * w);
                }
            }
        }
        crate::gauss::log_sum_exp_weighted(&vals, &ws)
    }
}

/// A finite sample treated as an empirical law.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    sorted: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sample set must be nonempty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(SampleSet { values, sorted, mean, variance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Right-continuous empirical distribution function with the
    /// i/(N+1) convention, so it never reaches 0 < F < 1 endpoints at samples.
    pub fn ecdf(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&x| x <= t);
        count as f64 / (self.sorted.len() as f64 + 1.0)
    }
}

/// A one-dimensional law: closed form, density on a grid, or a sample.
#[derive(Debug, Clone)]
pub enum ScalarDistribution {
    Gaussian { mean: f64, variance: f64 },
    Poisson { rate: f64 },
    Exponential { rate: f64 },
    /// Law of φ(Z) for Z ~ γ₁ and a one-dimensional oracle φ.
    Pushforward(ConvexFunctionOracle),
    DensityGrid(DensityGrid),
    SampleSet(SampleSet),
}

/// Half-width of the window scanned for sublevel sets of pushforward maps.
const SCAN_HALF_WIDTH: f64 = 12.0;
const SCAN_STEP: f64 = 0.005;

impl ScalarDistribution {
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        ensure_finite("mean", mean)?;
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(invalid(format!("variance must be finite and >= 0, got {variance}")));
        }
        Ok(ScalarDistribution::Gaussian { mean, variance })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(invalid(format!("poisson rate must be positive, got {rate}")));
        }
        Ok(ScalarDistribution::Poisson { rate })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(invalid(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(ScalarDistribution::Exponential { rate })
    }

    pub fn pushforward(phi: ConvexFunctionOracle) -> Result<Self> {
        if phi.dim() != 1 {
            return Err(invalid(format!("pushforward needs a 1-D oracle, got dim {}", phi.dim())));
        }
        Ok(ScalarDistribution::Pushforward(phi))
    }

    pub fn density_grid(points: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        DensityGrid::new(points, density).map(ScalarDistribution::DensityGrid)
    }

    pub fn samples(values: Vec<f64>) -> Result<Self> {
        SampleSet::new(values).map(ScalarDistribution::SampleSet)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScalarDistribution::Gaussian { .. } => "gaussian",
            ScalarDistribution::Poisson { .. } => "poisson",
            ScalarDistribution::Exponential { .. } => "exponential",
            ScalarDistribution::Pushforward(_) => "pushforward",
            ScalarDistribution::DensityGrid(_) => "density_grid",
            ScalarDistribution::SampleSet(_) => "sample_set",
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, ScalarDistribution::SampleSet(_))
    }

    /// Mean and variance; exact for closed forms, quadrature for pushforwards
    /// and grids, unbiased estimators for samples.
    pub fn moments(&self) -> Moments {
        match self {
            ScalarDistribution::Gaussian { mean, variance } => Moments { mean: *mean, variance: *variance },
            ScalarDistribution::Poisson { rate } => Moments { mean: *rate, variance: *rate },
            ScalarDistribution::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                variance: 1.0 / (rate * rate),
            },
            ScalarDistribution::Pushforward(phi) => {
                let rl = RealLineIntegrator::default();
                let mean = rl.expectation(|z| phi.eval1(z));
                let variance = rl.expectation(|z| (phi.eval1(z) - mean).powi(2));
                Moments { mean, variance }
            }
            ScalarDistribution::DensityGrid(g) => {
                let mean = g.integrate(|x| x) / g.total();
                let variance = g.integrate(|x| (x - mean).powi(2)) / g.total();
                Moments { mean, variance }
            }
            ScalarDistribution::SampleSet(s) => Moments { mean: s.mean, variance: s.variance },
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments().mean
    }

    /// log 𝔼 e^{u(X − c)}, or +∞ when the expectation diverges.
    ///
    /// Not defined for the closed forms, which have exact Λ formulas.
    pub(crate) fn log_mgf_centered(&self, u: f64, c: f64) -> f64 {
        match self {
            ScalarDistribution::Pushforward(phi) => {
                let rl = RealLineIntegrator::default();
                let l = rl.log_expectation_exp(|z| u * (phi.eval1(z) - c));
                if l.is_finite() && l.abs() < 1e-2 {
                    rl.expectation_expm1(|z| u * (phi.eval1(z) - c)).ln_1p()
                } else {
                    l
                }
            }
            ScalarDistribution::DensityGrid(g) => {
                let l = g.log_integrate_exp(|x| u * (x - c)) - g.total().ln();
                if l.is_finite() && l.abs() < 1e-2 {
                    (g.integrate(|x| (u * (x - c)).exp_m1()) / g.total()).ln_1p()
                } else {
                    l
                }
            }
            ScalarDistribution::SampleSet(s) => {
                let n = s.values.len() as f64;
                let max = s.values.iter().map(|x| u * (x - c)).fold(f64::NEG_INFINITY, f64::max);
                if max.abs() < 1e-2 {
                    (s.values.iter().map(|x| (u * (x - c)).exp_m1()).sum::<f64>() / n).ln_1p()
                } else {
                    let sum: f64 = s.values.iter().map(|x| (u * (x - c) - max).exp()).sum();
                    max + (sum / n).ln()
                }
            }
            _ => unreachable!("closed forms use exact formulas"),
        }
    }

    /// P(X ≤ t).
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(invalid("cdf argument is NaN"));
        }
        Ok(match self {
            ScalarDistribution::Gaussian { mean, variance } => {
                if *variance == 0.0 {
                    if t >= *mean {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    gauss::cdf_unchecked(((t - mean) / variance.sqrt()).clamp(-40.0, 40.0))
                }
            }
            ScalarDistribution::Poisson { rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    let kmax = t.floor() as u64;
                    let mut term = (-rate).exp();
                    let mut acc = term;
                    for k in 1..=kmax {
                        term *= rate / k as f64;
                        acc += term;
                        if term < 1e-300 {
                            break;
                        }
                    }
                    acc.min(1.0)
                }
            }
            ScalarDistribution::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
            ScalarDistribution::Pushforward(phi) => sublevel_mass(phi, t),
            ScalarDistribution::DensityGrid(g) => g.cdf(t),
            ScalarDistribution::SampleSet(s) => s.ecdf(t),
        })
    }

    /// Quantile of continuous laws; `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile requires u in (0,1), got {u}")));
        }
        match self {
            ScalarDistribution::Gaussian { mean, variance } => {
                Ok(mean + variance.sqrt() * std_normal_quantile(u)?)
            }
            ScalarDistribution::Exponential { rate } => Ok(-(-u).ln_1p() / rate),
            ScalarDistribution::DensityGrid(g) => Ok(g.quantile(u)),
            ScalarDistribution::Pushforward(_) => {
                // bisection on the monotone distribution function
                let (mut lo, mut hi) = (-1.0, 1.0);
                while self.cdf(lo)? > u {
                    lo *= 2.0;
                    if lo < -1e300 {
                        return Err(Error::NumericalFailure("quantile bracket diverged".into()));
                    }
                }
                while self.cdf(hi)? < u {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return Err(Error::NumericalFailure("quantile bracket diverged".into()));
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cdf(mid)? < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
            other => Err(Error::Unsupported(format!("quantile of a {} law", other.kind()))),
        }
    }

    /// Draws `n` independent variates.
    pub fn sample(&self, n: usize, stream: SeededStream) -> Result<Vec<f64>> {
        let out: Vec<f64> = match self {
            ScalarDistribution::Gaussian { mean, variance } => {
                let sd = variance.sqrt();
                stream.draw(n, |rng| {
                    let z: f64 = StandardNormal.sample(rng);
                    mean + sd * z
                })
            }
            ScalarDistribution::Poisson { rate } => {
                let d = Poisson::new(*rate).map_err(|e| invalid(e.to_string()))?;
                stream.draw(n, |rng| d.sample(rng))
            }
            ScalarDistribution::Exponential { rate } => {
                let d = Exp::new(*rate).map_err(|e| invalid(e.to_string()))?;
                stream.draw(n, |rng| d.sample(rng))
            }
            ScalarDistribution::Pushforward(phi) => stream.map_gaussian(1, n, |z| phi.eval1(z[0])),
            ScalarDistribution::DensityGrid(g) => stream.draw(n, |rng| {
                let u: f64 = rng.random();
                g.quantile(u)
            }),
            ScalarDistribution::SampleSet(s) => {
                let m = s.values.len();
                stream.draw(n, |rng| s.values[rng.random_range(0..m)])
            }
        };
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(format!("draw {i} is not finite")));
        }
        Ok(out)
    }

    /// Law of −X, when it has a structural representation.
    pub fn negated(&self) -> Result<Self> {
        Ok(match self {
            ScalarDistribution::Gaussian { mean, variance } => ScalarDistribution::Gaussian {
                mean: -mean,
                variance: *variance,
            },
            ScalarDistribution::Pushforward(phi) => ScalarDistribution::Pushforward(phi.negated()),
            ScalarDistribution::DensityGrid(g) => {
                let points = g.points.iter().rev().map(|x| -x).collect();
                let density = g.density.iter().rev().copied().collect();
                ScalarDistribution::density_grid(points, density)?
            }
            ScalarDistribution::SampleSet(s) => {
                ScalarDistribution::samples(s.values.iter().map(|x| -x).collect())?
            }
            other => {
                return Err(Error::Unsupported(format!("negation of a {} law", other.kind())));
            }
        })
    }
}

/// γ₁{z : φ(z) ≤ t}, by scanning for sign changes of φ − t and bisecting
/// each crossing.
fn sublevel_mass(phi: &ConvexFunctionOracle, t: f64) -> f64 {
    let below = |z: f64| phi.eval1(z) <= t;
    let steps = (2.0 * SCAN_HALF_WIDTH / SCAN_STEP).round() as usize;
    let grid = |i: usize| -SCAN_HALF_WIDTH + i as f64 * SCAN_STEP;
    let refine = |mut a: f64, mut b: f64| {
        // invariant: below(a) != below(b)
        let inside_a = below(a);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if below(m) == inside_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut mass = 0.0;
    let mut start = if below(grid(0)) { Some(f64::NEG_INFINITY) } else { None };
    let mut prev = below(grid(0));
    for i in 1..=steps {
        let cur = below(grid(i));
        if cur != prev {
            let x = refine(grid(i - 1), grid(i));
            if cur {
                start = Some(x);
            } else if let Some(a) = start.take() {
                mass += gauss::gaussian_interval_mass(a, x);
            }
        }
        prev = cur;
    }
    if let Some(a) = start {
        mass += gauss::gaussian_interval_mass(a, f64::INFINITY);
    }
    mass.min(1.0)
}
