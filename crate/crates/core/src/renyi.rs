//! Rényi divergences D_α(μ‖γ) of laws with density e^f relative to the
//! standard Gaussian, f concave, and the comparison D_β ≤ (β/α)D_α.

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::gauss::{gauss_hermite, gauss_legendre, log_sum_exp_weighted, std_normal_pdf, SeededStream};
use crate::oracle::{ConvexFunctionOracle, Shape};

/// Tensor quadrature is used up to this dimension, Monte Carlo above it.
pub const MAX_QUADRATURE_DIM: usize = 3;
pub const QUADRATURE_NODES: usize = 60;
/// Inputs whose 𝔼_γ e^f is off by more than this are renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Inequality tolerance under quadrature.
pub const QUADRATURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Mc,
}

/// Sampling budget used when the dimension is too large for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: usize,
    pub stream: SeededStream,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 100_000, stream: SeededStream::new(0) }
    }
}

/// A law μ with dμ/dγ = e^{f − log 𝔼_γ e^f}, f concave.
///
/// The values of f at the integration nodes are computed once and shared
/// by every divergence evaluated from it.
#[derive(Debug, Clone)]
pub struct RelativeDensity {
    f: ConvexFunctionOracle,
    method: Method,
    /// f at the nodes (quadrature) or at the draws (Monte Carlo).
    values: Vec<f64>,
    /// Node weights; empty for Monte Carlo, where weights are uniform.
    weights: Vec<f64>,
    /// log 𝔼_γ e^f of the raw input.
    log_norm: f64,
}

impl RelativeDensity {
    pub fn new(f: ConvexFunctionOracle, mc: McConfig) -> Result<Self> {
        if !f.shape().admits_concave() {
            return Err(Error::Contract(format!("{} is declared {:?}, not concave", f.name(), f.shape())));
        }
        let probe = f.midpoint_probe(1000, mc.stream.fork(7), 3.0);
        if !probe.consistent_with(Shape::Concave, 1e-9) {
            return Err(Error::Contract(format!(
                "{} fails the concavity probe by {:e}",
                f.name(),
                probe.concavity_violation
            )));
        }
        let n = f.dim();
        let (method, values, weights) = if n <= MAX_QUADRATURE_DIM {
            let rule = gauss_hermite(QUADRATURE_NODES)?;
            let m = rule.len();
            let total = m.pow(n as u32);
            let mut values = Vec::with_capacity(total);
            let mut weights = Vec::with_capacity(total);
            let mut x = vec![0.0; n];
            for idx in 0..total {
                let mut rem = idx;
                let mut w = 1.0;
                for xi in x.iter_mut() {
                    let k = rem % m;
                    rem /= m;
                    *xi = rule.nodes[k];
                    w *= rule.weights[k];
                }
                values.push(f.eval(&x));
                weights.push(w);
            }
            (Method::Quadrature, values, weights)
        } else {
            if mc.samples < 1000 {
                return Err(Error::InsufficientSamples { got: mc.samples, needed: 1000 });
            }
            (Method::Mc, mc.stream.map_gaussian(n, mc.samples, |z| f.eval(z)), Vec::new())
        };
        if let Some(i) = values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NumericalFailure(format!("f is not finite at node {i}")));
        }
        let mut rd = RelativeDensity { f, method, values, weights, log_norm: 0.0 };
        rd.log_norm = rd.log_mean_exp(1.0);
        if !rd.log_norm.is_finite() {
            return Err(Error::NumericalFailure("𝔼e^f is not finite".into()));
        }
        Ok(rd)
    }

    pub fn oracle(&self) -> &ConvexFunctionOracle {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// 𝔼_γ e^f of the raw input.
    pub fn raw_normalization(&self) -> f64 {
        self.log_norm.exp()
    }

    /// Whether f is shifted by −log 𝔼_γ e^f before use.
    pub fn renormalized(&self) -> bool {
        self.log_norm.exp_m1().abs() > NORMALIZATION_TOL
    }

    /// The shift applied to f.
    fn shift(&self) -> f64 {
        if self.renormalized() {
            self.log_norm
        } else {
            0.0
        }
    }

    /// log of the weighted mean of e^{s·f} over raw f values.
    fn log_mean_exp(&self, s: f64) -> f64 {
        let vals: Vec<f64> = self.values.iter().map(|v| s * v).collect();
        if self.weights.is_empty() {
            let w = vec![1.0 / vals.len() as f64; vals.len()];
            log_sum_exp_weighted(&vals, &w)
        } else {
            log_sum_exp_weighted(&vals, &self.weights)
        }
    }

    /// Weighted mean of h(f − shift).
    fn mean_of(&self, h: impl Fn(f64) -> f64) -> f64 {
        let c = self.shift();
        if self.weights.is_empty() {
            self.values.iter().map(|v| h(v - c)).sum::<f64>() / self.values.len() as f64
        } else {
            self.values.iter().zip(&self.weights).map(|(v, w)| w * h(v - c)).sum()
        }
    }

    /// Sample standard error of the mean of `u` (Monte Carlo only).
    fn mc_stderr(u: &[f64]) -> f64 {
        let n = u.len() as f64;
        let m = u.iter().sum::<f64>() / n;
        (u.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    }

    fn report(&self, alpha: f64, value: f64, raw_value: f64, stderr: Option<f64>) -> DivergenceReport {
        DivergenceReport {
            alpha,
            value,
            raw_value,
            method: self.method,
            stderr,
            diverged: value == f64::INFINITY,
            renormalized: self.renormalized(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub alpha: f64,
    pub value: f64,
    /// The same formula applied to f before renormalization.
    pub raw_value: f64,
    pub method: Method,
    pub stderr: Option<f64>,
    pub diverged: bool,
    pub renormalized: bool,
}

/// D_α = (α − 1)⁻¹ log 𝔼_γ e^{αf}, α > 0, α ≠ 1.
pub fn renyi_divergence(rd: &RelativeDensity, alpha: f64) -> Result<DivergenceReport> {
    ensure_finite("alpha", alpha)?;
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!("α must be positive and ≠ 1, got {alpha}")));
    }
    let la = rd.log_mean_exp(alpha);
    let raw = la / (alpha - 1.0);
    let value = if la == f64::INFINITY {
        f64::INFINITY
    } else {
        (la - alpha * rd.shift()) / (alpha - 1.0)
    };
    let stderr = (rd.method == Method::Mc && value.is_finite()).then(|| {
        // delta method for (α−1)⁻¹ (log mean e^{αf} − α log mean e^f)
        let (a, b) = (la.exp(), rd.log_norm.exp());
        let u: Vec<f64> = rd.values.iter().map(|v| (alpha * v).exp() / a - alpha * v.exp() / b).collect();
        RelativeDensity::mc_stderr(&u) / (alpha - 1.0).abs()
    });
    Ok(rd.report(alpha, value, raw, stderr))
}

/// KL(μ‖γ) = 𝔼_γ[f e^f], computed directly.
pub fn kl_divergence(rd: &RelativeDensity) -> Result<DivergenceReport> {
    let value = rd.mean_of(|g| g * g.exp());
    let raw = match rd.method {
        Method::Quadrature => rd.values.iter().zip(&rd.weights).map(|(v, w)| w * v * v.exp()).sum(),
        Method::Mc => rd.values.iter().map(|v| v * v.exp()).sum::<f64>() / rd.values.len() as f64,
    };
    let value = if rd.method == Method::Mc {
        // self-normalized: C/B − log B
        let b = rd.log_norm.exp();
        raw / b - rd.log_norm
    } else {
        value
    };
    let stderr = (rd.method == Method::Mc).then(|| {
        let b = rd.log_norm.exp();
        let c = raw;
        let u: Vec<f64> = rd.values.iter().map(|v| v * v.exp() / b - (c / (b * b) + 1.0 / b) * v.exp()).collect();
        RelativeDensity::mc_stderr(&u)
    });
    Ok(rd.report(1.0, value, raw, stderr))
}

/// D_α with α = 1 routed to the KL divergence.
pub fn divergence(rd: &RelativeDensity, alpha: f64) -> Result<DivergenceReport> {
    if alpha == 1.0 {
        kl_divergence(rd)
    } else {
        renyi_divergence(rd, alpha)
    }
}

/// Squared Hellinger distance 𝔼_γ(√(dμ/dγ) − 1)², on the scale where
/// D_{1/2} = −2 log(1 − Hel²/2).
pub fn hellinger(rd: &RelativeDensity) -> f64 {
    match rd.method {
        Method::Quadrature => rd.mean_of(|g| (0.5 * g).exp_m1().powi(2)),
        Method::Mc => 2.0 - 2.0 * (rd.log_mean_exp(0.5) - 0.5 * rd.log_norm).exp(),
    }
}

/// χ²(μ‖γ) = 𝔼_γ(dμ/dγ − 1)², with D₂ = log(1 + χ²).
pub fn chi_squared(rd: &RelativeDensity) -> f64 {
    match rd.method {
        Method::Quadrature => rd.mean_of(|g| g.exp_m1().powi(2)),
        Method::Mc => (rd.log_mean_exp(2.0) - 2.0 * rd.log_norm).exp_m1(),
    }
}

fn tolerance(reports: &[&DivergenceReport]) -> f64 {
    let se: f64 = reports.iter().filter_map(|r| r.stderr).map(|s| s * s).sum::<f64>().sqrt();
    if reports.iter().any(|r| r.method == Method::Mc) {
        3.0 * se
    } else {
        QUADRATURE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub beta: f64,
    pub d_alpha: DivergenceReport,
    pub d_beta: DivergenceReport,
    /// (β/α)D_α − D_β
    pub ratio_bound_slack: f64,
    /// D_β − D_α
    pub monotone_slack: f64,
    pub tol: f64,
    pub holds: bool,
}

/// D_α ≤ D_β ≤ (β/α)D_α for 0 < α < β.
pub fn comparison_check(rd: &RelativeDensity, alpha: f64, beta: f64) -> Result<ComparisonReport> {
    if !(alpha > 0.0 && alpha < beta && beta.is_finite()) {
        return Err(Error::Domain(format!("need 0 < α < β < ∞, got α={alpha}, β={beta}")));
    }
    let d_alpha = divergence(rd, alpha)?;
    let d_beta = divergence(rd, beta)?;
    let ratio_bound_slack = beta / alpha * d_alpha.value - d_beta.value;
    let monotone_slack = d_beta.value - d_alpha.value;
    let tol = tolerance(&[&d_alpha, &d_beta]) * (1.0 + beta / alpha);
    Ok(ComparisonReport {
        alpha,
        beta,
        d_alpha,
        d_beta,
        ratio_bound_slack,
        monotone_slack,
        tol,
        holds: ratio_bound_slack >= -tol && monotone_slack >= -tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    pub d2: f64,
    pub two_d1: f64,
    pub four_d_half: f64,
    pub tol: f64,
    pub holds: bool,
}

/// D₂ ≤ 2D₁ ≤ 4D_{1/2}.
pub fn chain_check(rd: &RelativeDensity) -> Result<ChainReport> {
    let d2 = renyi_divergence(rd, 2.0)?;
    let d1 = kl_divergence(rd)?;
    let dh = renyi_divergence(rd, 0.5)?;
    let tol = 4.0 * tolerance(&[&d2, &d1, &dh]);
    let (a, b, c) = (d2.value, 2.0 * d1.value, 4.0 * dh.value);
    Ok(ChainReport { d2: a, two_d1: b, four_d_half: c, tol, holds: a <= b + tol && b <= c + tol })
}

/// D_α(μ‖γ) against (α/(1−α))·D_{1−α}(γ‖μ) for α ∈ (0, 1), with the
/// reverse divergence integrated against Lebesgue measure from the two
/// densities. One-dimensional inputs only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub alpha: f64,
    pub forward: f64,
    pub reverse_scaled: f64,
}

pub fn symmetry_check(rd: &RelativeDensity, alpha: f64) -> Result<SymmetryReport> {
    if rd.dim() != 1 {
        return Err(Error::Unsupported("symmetry check is implemented for n = 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("α must lie in (0, 1), got {alpha}")));
    }
    let forward = renyi_divergence(rd, alpha)?.value;
    let beta = 1.0 - alpha;
    let c = rd.log_norm;
    // log ∫ p_Z^β p_X^{1−β} dx, p_X = e^{f−c}φ, p_Z = φ
    let (gx, gw) = gauss_legendre(10);
    let (half, panel) = (40.0, 0.125);
    let panels = (2.0 * half / panel) as usize;
    let mut vals = Vec::with_capacity(panels * gx.len());
    let mut ws = Vec::with_capacity(panels * gx.len());
    for k in 0..panels {
        let mid = -half + (k as f64 + 0.5) * panel;
        for (x, w) in gx.iter().zip(&gw) {
            let t = mid + 0.5 * panel * x;
            let log_phi = std_normal_pdf(t).ln();
            let log_px = rd.f.eval1(t) - c + log_phi;
            if log_phi.is_finite() && log_px.is_finite() {
                vals.push(beta * log_phi + (1.0 - beta) * log_px);
                ws.push(0.5 * panel * w);
            }
        }
    }
    let reverse = log_sum_exp_weighted(&vals, &ws) / (beta - 1.0);
    Ok(SymmetryReport { alpha, forward, reverse_scaled: alpha / (1.0 - alpha) * reverse })
}

/// Largest |f((1−t)x + ty) − ((1−t)f(x) + tf(y))| over random probes in
/// [−scale, scale]ⁿ; zero for affine f.
pub fn affine_deviation(f: &ConvexFunctionOracle, probes: usize, stream: SeededStream, scale: f64) -> f64 {
    let mut rng = stream.rng();
    let n = f.dim();
    let (mut x, mut y, mut m) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let t: f64 = rng.random();
        for i in 0..n {
            x[i] = rng.random_range(-scale..scale);
            y[i] = rng.random_range(-scale..scale);
            m[i] = (1.0 - t) * x[i] + t * y[i];
        }
        let secant = (1.0 - t) * f.eval(&x) + t * f.eval(&y);
        worst = worst.max((f.eval(&m) - secant).abs());
    }
    worst
}

/// Built-in relative densities.
pub mod fixtures {
    use super::*;

    /// f(x) = ⟨a, x⟩ − |a|²/2: μ is γ translated by a.
    pub fn translation(a: Vec<f64>) -> ConvexFunctionOracle {
        let half_sq = 0.5 * a.iter().map(|v| v * v).sum::<f64>();
        ConvexFunctionOracle::new("translation", a.len(), Shape::Affine, move |x| {
            a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() - half_sq
        })
    }

    /// X ~ N(0, s²) in one dimension: f(x) = (1 − 1/s²)x²/2 − log s.
    pub fn gaussian_scale(variance: f64) -> Result<ConvexFunctionOracle> {
        if !(variance > 0.0 && variance <= 1.0) {
            return Err(invalid(format!("variance must lie in (0, 1] for a concave f, got {variance}")));
        }
        let k = 0.5 * (1.0 - 1.0 / variance);
        let c = 0.5 * variance.ln();
        Ok(ConvexFunctionOracle::scalar(format!("N(0,{variance})"), Shape::Concave, move |x| k * x * x - c))
    }

    pub fn zero(n: usize) -> ConvexFunctionOracle {
        ConvexFunctionOracle::new("zero", n, Shape::Affine, |_| 0.0)
    }

    /// Closed-form D_α(N(0,s²)‖N(0,1)) in one dimension, α ≠ 1.
    pub fn gaussian_scale_renyi(variance: f64, alpha: f64) -> f64 {
        let s2 = variance;
        let mix = alpha + (1.0 - alpha) * s2;
        -(mix.ln() + (alpha - 1.0) * s2.ln()) / (2.0 * (alpha - 1.0))
    }

    /// Closed-form KL(N(0,s²)‖N(0,1)).
    pub fn gaussian_scale_kl(variance: f64) -> f64 {
        0.5 * (variance - 1.0 - variance.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn rd(f: ConvexFunctionOracle) -> RelativeDensity {
        RelativeDensity::new(f, McConfig::default()).unwrap()
    }

    #[test]
    fn closed_form_gaussian_oracle_self_check() {
        // D_α for N(0,s²) from the density integral done by hand:
        // 𝔼_γ e^{αf} = s^{-α} (1 − α(1 − 1/s²))^{-1/2}
        for (s2, a) in [(0.5, 0.5), (0.5, 2.0), (0.8, 3.0)] {
            let k: f64 = 1.0 - a * (1.0 - 1.0 / s2);
            let log_e = -0.5 * a * f64::ln(s2) - 0.5 * k.ln();
            assert!((log_e / (a - 1.0) - gaussian_scale_renyi(s2, a)).abs() < 1e-14);
        }
    }

    #[test]
    fn translation_values() {
        let r = rd(translation(vec![1.0]));
        assert!((renyi_divergence(&r, 2.0).unwrap().value - 1.0).abs() < 1e-10);
        assert!((kl_divergence(&r).unwrap().value - 0.5).abs() < 1e-10);
        assert!((chi_squared(&r) - (1f64.exp() - 1.0)).abs() < 1e-9);
        let r3 = rd(translation(vec![0.6, 0.0, 0.8]));
        assert!((renyi_divergence(&r3, 2.0).unwrap().value - 1.0).abs() < 1e-9);
        assert!(!r3.renormalized());
        assert_eq!(r3.method(), Method::Quadrature);
    }

    #[test]
    fn zero_density() {
        let r = rd(zero(2));
        for a in [0.3, 0.5, 2.0, 5.0] {
            assert!(renyi_divergence(&r, a).unwrap().value.abs() < 1e-14);
        }
        assert_eq!(kl_divergence(&r).unwrap().value, 0.0);
        assert_eq!(hellinger(&r), 0.0);
        assert_eq!(chi_squared(&r), 0.0);
    }

    #[test]
    fn gaussian_scale_values() {
        let r = rd(gaussian_scale(0.5).unwrap());
        let d = renyi_divergence(&r, 0.5).unwrap().value;
        assert!((d - gaussian_scale_renyi(0.5, 0.5)).abs() < 1e-8);
        let kl = kl_divergence(&r).unwrap().value;
        assert!((kl - (0.5 * 2f64.ln() - 0.25)).abs() < 1e-8);
        assert!((kl - gaussian_scale_kl(0.5)).abs() < 1e-12);
    }

    #[test]
    fn bridges() {
        for f in [translation(vec![1.0]), gaussian_scale(0.5).unwrap(), gaussian_scale(0.8).unwrap()] {
            let r = rd(f);
            let h = hellinger(&r);
            let dh = renyi_divergence(&r, 0.5).unwrap().value;
            assert!((dh + 2.0 * (1.0 - h / 2.0).ln()).abs() < 1e-9);
            let d2 = renyi_divergence(&r, 2.0).unwrap().value;
            assert!((d2 - chi_squared(&r).ln_1p()).abs() < 1e-9);
        }
    }

    #[test]
    fn kl_is_the_alpha_limit() {
        for f in [translation(vec![1.0]), gaussian_scale(0.5).unwrap()] {
            let r = rd(f);
            let kl = kl_divergence(&r).unwrap().value;
            for a in [1.0 - 1e-3, 1.0 + 1e-3] {
                // |D_α − D₁| = O(|α − 1|), here below 1e-3
                assert!((renyi_divergence(&r, a).unwrap().value - kl).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn comparisons() {
        let t = rd(translation(vec![1.0]));
        let c = comparison_check(&t, 1.0, 2.0).unwrap();
        assert!(c.ratio_bound_slack.abs() < 1e-8 && c.holds);
        let g = rd(gaussian_scale(0.5).unwrap());
        let c = comparison_check(&g, 1.0, 2.0).unwrap();
        assert!(c.ratio_bound_slack > 1e-3 && c.holds);
        let z = rd(zero(1));
        let c = comparison_check(&z, 0.5, 3.0).unwrap();
        assert!(c.ratio_bound_slack.abs() < 1e-14 && c.holds);
        assert!(matches!(comparison_check(&z, 2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn chains() {
        let c = chain_check(&rd(translation(vec![1.0]))).unwrap();
        assert!((c.d2 - 1.0).abs() < 1e-9 && (c.two_d1 - 1.0).abs() < 1e-9 && (c.four_d_half - 1.0).abs() < 1e-9);
        let c = chain_check(&rd(gaussian_scale(0.8).unwrap())).unwrap();
        assert!(c.holds && c.d2 < c.two_d1 - 1e-6 && c.two_d1 < c.four_d_half - 1e-6);
        let c = chain_check(&rd(zero(1))).unwrap();
        assert!(c.d2.abs() < 1e-14 && c.two_d1.abs() < 1e-14 && c.four_d_half.abs() < 1e-14);
    }

    #[test]
    fn renormalization() {
        let shifted = translation(vec![1.0]).shifted(0.3);
        let r = rd(shifted);
        assert!(r.renormalized());
        assert!((r.raw_normalization() - 0.3f64.exp()).abs() < 1e-10);
        let d = renyi_divergence(&r, 2.0).unwrap();
        assert!((d.value - 1.0).abs() < 1e-10);
        assert!((d.raw_value - (1.0 + 0.6)).abs() < 1e-10);
        assert!((kl_divergence(&r).unwrap().value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn alpha_monotone() {
        let r = rd(fixtures::gaussian_scale(0.6).unwrap());
        let alphas = [0.1, 0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0];
        let ds: Vec<f64> = alphas.iter().map(|&a| divergence(&r, a).unwrap().value).collect();
        assert!(ds.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{ds:?}");
    }

    #[test]
    fn symmetry_on_one_dimensional_inputs() {
        for f in [gaussian_scale(0.5).unwrap(), translation(vec![0.7])] {
            let r = rd(f);
            for a in [0.2, 0.5, 0.8] {
                let s = symmetry_check(&r, a).unwrap();
                assert!((s.forward - s.reverse_scaled).abs() < 1e-9, "{s:?}");
            }
        }
    }

    #[test]
    fn monte_carlo_above_three_dimensions() {
        let a = vec![0.5; 4];
        let r = RelativeDensity::new(translation(a), McConfig { samples: 400_000, stream: SeededStream::new(2) })
            .unwrap();
        assert_eq!(r.method(), Method::Mc);
        let d = renyi_divergence(&r, 2.0).unwrap();
        let se = d.stderr.unwrap();
        assert!((d.value - 1.0).abs() < 4.0 * se, "{d:?}");
        let kl = kl_divergence(&r).unwrap();
        assert!((kl.value - 0.5).abs() < 4.0 * kl.stderr.unwrap(), "{kl:?}");
        let c = comparison_check(&r, 1.0, 2.0).unwrap();
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn rejects_non_concave() {
        let convex = crate::oracle::builtin::square();
        assert!(matches!(RelativeDensity::new(convex, McConfig::default()), Err(Error::Contract(_))));
        let lying = ConvexFunctionOracle::scalar("x^2", Shape::Concave, |x| x * x);
        assert!(matches!(RelativeDensity::new(lying, McConfig::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn affine_screen() {
        assert!(affine_deviation(&translation(vec![1.0, 2.0]), 500, SeededStream::new(1), 3.0) < 1e-12);
        assert!(affine_deviation(&gaussian_scale(0.5).unwrap(), 500, SeededStream::new(1), 3.0) > 1e-3);
    }
}
