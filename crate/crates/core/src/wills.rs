//! Convex bodies, the Wills functional W(K) = 𝔼e^{f_K(Z)}, the intrinsic
//! volume V₁ through the Gaussian mean width, McMullen's inequality
//! W ≤ e^{V₁} and its variance-strengthened reversal.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gauss::SeededStream;
use crate::mgf::MIN_SAMPLES;

/// √(2π), the scale of the body inside f_K.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

type ProjFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type SuppFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum BodyKind {
    Ball { center: Vec<f64>, radius: f64 },
    /// ∏[loᵢ, hiᵢ].
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polytope { vertices: Vec<Vec<f64>> },
    Oracle { name: String, projection: Arc<ProjFn>, support: Arc<SuppFn> },
}

impl fmt::Debug for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyKind::Ball { center, radius } => write!(f, "Ball {{ center: {center:?}, radius: {radius} }}"),
            BodyKind::Box { lo, hi } => write!(f, "Box {{ lo: {lo:?}, hi: {hi:?} }}"),
            BodyKind::Polytope { vertices } => write!(f, "Polytope {{ vertices: {vertices:?} }}"),
            BodyKind::Oracle { name, .. } => write!(f, "Oracle({name})"),
        }
    }
}

/// A compact convex set K ⊆ rB in ℝⁿ.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    n: usize,
    kind: BodyKind,
    r: f64,
}

/// Body description as read from JSON. `r` is the declared bounding
/// radius; when absent the tightest origin-centred one is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Either side lengths `a` (the centred box) or explicit `lo`/`hi`.
    Box {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<Vec<f64>>,
    },
    Polytope {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        vertices: Vec<Vec<f64>>,
    },
}

fn check_vec(v: &[f64], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(invalid(format!("{what} has length {}, expected {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!("{what} has a non-finite entry")));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl ConvexBody {
    fn with_radius(n: usize, kind: BodyKind, declared: Option<f64>) -> Result<Self> {
        let natural = match &kind {
            BodyKind::Ball { center, radius } => norm(center) + radius,
            BodyKind::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt()
            }
            BodyKind::Polytope { vertices } => vertices.iter().map(|v| norm(v)).fold(0.0, f64::max),
            BodyKind::Oracle { .. } => declared.ok_or_else(|| invalid("oracle bodies need a declared radius"))?,
        };
        let r = match declared {
            Some(r) if !(r.is_finite() && r >= 0.0) => return Err(invalid(format!("radius must be finite and >= 0, got {r}"))),
            Some(r) if r + 1e-9 < natural => {
                return Err(invalid(format!("declared radius {r} does not contain the body (needs {natural})")))
            }
            Some(r) => r,
            None => natural,
        };
        Ok(ConvexBody { n, kind, r })
    }

    /// Euclidean ball of the given radius about `center`.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        check_vec(&center, n, "center")?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(invalid(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Self::with_radius(n, BodyKind::Ball { center, radius }, None)
    }

    /// Ball of radius `radius` about the origin of ℝⁿ.
    pub fn centered_ball(n: usize, radius: f64) -> Result<Self> {
        Self::ball(vec![0.0; n], radius)
    }

    /// The point {0} in ℝⁿ.
    pub fn origin(n: usize) -> Result<Self> {
        Self::centered_ball(n, 0.0)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let n = lo.len();
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        check_vec(&lo, n, "lo")?;
        check_vec(&hi, n, "hi")?;
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(invalid("box needs lo <= hi"));
        }
        Self::with_radius(n, BodyKind::Box { lo, hi }, None)
    }

    /// The origin-centred box ∏[−aᵢ/2, aᵢ/2]. Centring keeps r, and with it
    /// the variance of the Monte Carlo estimates, as small as possible.
    pub fn box_sides(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|&v| !(v >= 0.0)) {
            return Err(invalid("box side lengths must be >= 0"));
        }
        Self::boxed(a.iter().map(|v| -0.5 * v).collect(), a.iter().map(|v| 0.5 * v).collect())
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(invalid("polytope needs at least one vertex"));
        };
        let n = first.len();
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        for (i, v) in vertices.iter().enumerate() {
            check_vec(v, n, &format!("vertex {i}"))?;
        }
        Self::with_radius(n, BodyKind::Polytope { vertices }, None)
    }

    /// A body known only through its projection and support oracles.
    pub fn from_oracles<P, S>(n: usize, name: impl Into<String>, r: f64, projection: P, support: S) -> Result<Self>
    where
        P: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        S: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let kind = BodyKind::Oracle { name: name.into(), projection: Arc::new(projection), support: Arc::new(support) };
        Self::with_radius(n, kind, Some(r))
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        let (n, r, body) = match spec {
            BodySpec::Ball { n, r, radius, center } => {
                (*n, *r, Self::ball(center.clone().unwrap_or_else(|| vec![0.0; *n]), *radius)?)
            }
            BodySpec::Box { n, r, a: Some(a), lo: None, hi: None } => (*n, *r, Self::box_sides(a.clone())?),
            BodySpec::Box { n, r, a: None, lo: Some(lo), hi: Some(hi) } => {
                (*n, *r, Self::boxed(lo.clone(), hi.clone())?)
            }
            BodySpec::Box { .. } => return Err(invalid("box needs either `a` or both `lo` and `hi`")),
            BodySpec::Polytope { n, r, vertices } => (*n, *r, Self::polytope(vertices.clone())?),
        };
        if body.n != n {
            return Err(invalid(format!("body parameters have dimension {}, but n = {n}", body.n)));
        }
        Self::with_radius(n, body.kind, r)
    }

    pub fn to_spec(&self) -> Result<BodySpec> {
        let (n, r) = (self.n, Some(self.r));
        Ok(match &self.kind {
            BodyKind::Ball { center, radius } => BodySpec::Ball { n, r, radius: *radius, center: Some(center.clone()) },
            BodyKind::Box { lo, hi } => BodySpec::Box { n, r, a: None, lo: Some(lo.clone()), hi: Some(hi.clone()) },
            BodyKind::Polytope { vertices } => BodySpec::Polytope { n, r, vertices: vertices.clone() },
            BodyKind::Oracle { .. } => return Err(Error::Unsupported("serializing an oracle body".into())),
        })
    }

    /// K + c.
    pub fn translated(&self, c: &[f64]) -> Result<Self> {
        check_vec(c, self.n, "translation")?;
        let add = |v: &[f64]| v.iter().zip(c).map(|(a, b)| a + b).collect::<Vec<f64>>();
        match &self.kind {
            BodyKind::Ball { center, radius } => Self::ball(add(center), *radius),
            BodyKind::Box { lo, hi } => Self::boxed(add(lo), add(hi)),
            BodyKind::Polytope { vertices } => Self::polytope(vertices.iter().map(|v| add(v)).collect()),
            BodyKind::Oracle { .. } => Err(Error::Unsupported("translating an oracle body".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &str {
        match &self.kind {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Box { .. } => "box",
            BodyKind::Polytope { .. } => "polytope",
            BodyKind::Oracle { name, .. } => name,
        }
    }

    /// Nearest point of K.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_vec(x, self.n, "point")?;
        Ok(match &self.kind {
            BodyKind::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let len = norm(&d);
                if len <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / len;
                    center.iter().zip(&d).map(|(c, v)| c + s * v).collect()
                }
            }
            BodyKind::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| v.clamp(*a, *b)).collect(),
            BodyKind::Polytope { vertices } => hull_projection(vertices, x)?,
            BodyKind::Oracle { projection, .. } => {
                let p = projection(x);
                check_vec(&p, self.n, "oracle projection")?;
                p
            }
        })
    }

    /// h_K(θ) = sup{⟨θ, y⟩ : y ∈ K}.
    pub fn support(&self, theta: &[f64]) -> Result<f64> {
        check_vec(theta, self.n, "direction")?;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        Ok(match &self.kind {
            BodyKind::Ball { center, radius } => dot(theta, center) + radius * norm(theta),
            BodyKind::Box { lo, hi } => theta.iter().zip(lo.iter().zip(hi)).map(|(t, (a, b))| (t * a).max(t * b)).sum(),
            BodyKind::Polytope { vertices } => vertices.iter().map(|v| dot(theta, v)).fold(f64::NEG_INFINITY, f64::max),
            BodyKind::Oracle { support, .. } => support(theta),
        })
    }

    /// Random checks that projections lie in rB and respect the support
    /// function; returns the largest violation found.
    pub fn validate(&self, probes: usize, stream: SeededStream) -> Result<f64> {
        let mut rng = stream.rng();
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let x: Vec<f64> = (0..self.n).map(|_| 3.0 * (self.r + 1.0) * rng.sample::<f64, _>(StandardNormal)).collect();
            let th: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
            let p = self.project(&x)?;
            worst = worst.max(norm(&p) - self.r);
            let inner: f64 = th.iter().zip(&p).map(|(a, b)| a * b).sum();
            worst = worst.max(inner - self.support(&th)?);
        }
        Ok(worst)
    }

    /// f_K(z) = |z|²/2 − d²(z, √(2π)K)/2.
    pub fn f_k(&self, z: &[f64]) -> Result<f64> {
        let scaled: Vec<f64> = z.iter().map(|v| v / SQRT_2PI).collect();
        let p = self.project(&scaled)?;
        let d2 = z.iter().zip(&p).map(|(a, b)| (a - SQRT_2PI * b).powi(2)).sum::<f64>();
        Ok(0.5 * z.iter().map(|v| v * v).sum::<f64>() - 0.5 * d2)
    }
}

/// Nearest point of conv(vertices) to x by Wolfe's minimum-norm-point
/// algorithm on the translated points vᵢ − x.
fn hull_projection(vertices: &[Vec<f64>], x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let pts: Vec<DVector<f64>> = vertices
        .iter()
        .map(|v| DVector::from_iterator(n, v.iter().zip(x).map(|(a, b)| a - b)))
        .collect();
    let scale = pts.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(1e-300);
    let first = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_squared().total_cmp(&pts[b].norm_squared()))
        .expect("nonempty vertex list");
    let mut set = vec![first];
    let mut lambda = vec![1.0];
    let mut y = pts[first].clone();
    let cap = 50 * pts.len() + 50;
    let mut iterations = 0;
    loop {
        let yy = y.norm_squared();
        let (j, best) = (0..pts.len())
            .map(|i| (i, y.dot(&pts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty vertex list");
        if best >= yy - 1e-14 * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        lambda.push(0.0);
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::NumericalFailure(format!("hull projection did not converge in {cap} steps")));
            }
            // affine minimum-norm point of the current set, as least squares
            // on the edge vectors pⱼ − p₀ to avoid squaring the condition
            let k = set.len();
            let p0 = &pts[set[0]];
            let edges = DMatrix::from_fn(n, k - 1, |r, c| pts[set[c + 1]][r] - p0[r]);
            let mu = edges
                .clone()
                .svd(true, true)
                .solve(&(-p0), 1e-13 * scale.sqrt())
                .map_err(|e| Error::NumericalFailure(format!("hull projection: {e}")))?;
            let mut alpha = Vec::with_capacity(k);
            alpha.push(1.0 - mu.sum());
            alpha.extend(mu.iter().copied());
            if alpha.iter().all(|&a| a > 1e-15) {
                lambda = alpha;
                break;
            }
            let mut theta: f64 = 1.0;
            for i in 0..k {
                if alpha[i] <= 1e-15 {
                    let d = lambda[i] - alpha[i];
                    if d > 0.0 {
                        theta = theta.min(lambda[i] / d);
                    }
                }
            }
            for i in 0..k {
                lambda[i] += theta * (alpha[i] - lambda[i]);
            }
            let mut i = 0;
            while i < set.len() {
                if lambda[i] <= 1e-15 {
                    set.remove(i);
                    lambda.remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        y = set.iter().zip(&lambda).fold(DVector::zeros(n), |acc, (&i, &l)| acc + l * &pts[i]);
    }
    Ok(y.iter().zip(x).map(|(a, b)| a + b).collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Volume of the unit ball in ℝᵏ.
pub fn unit_ball_volume(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    (h * PI.ln() - libm::lgamma(h + 1.0)).exp()
}

/// Exact V₀..Vₙ for balls and boxes.
pub fn intrinsic_volumes_closed(body: &ConvexBody) -> Result<Vec<f64>> {
    let n = body.n;
    match &body.kind {
        BodyKind::Ball { radius, .. } => Ok((0..=n)
            .map(|j| binomial(n, j) * unit_ball_volume(n) * radius.powi(j as i32) / unit_ball_volume(n - j))
            .collect()),
        BodyKind::Box { lo, hi } => {
            // elementary symmetric polynomials of the side lengths
            let mut e = vec![0.0; n + 1];
            e[0] = 1.0;
            for (a, b) in lo.iter().zip(hi) {
                let s = b - a;
                for k in (1..=n).rev() {
                    e[k] += s * e[k - 1];
                }
            }
            Ok(e)
        }
        _ => Err(Error::Unsupported(format!("closed-form intrinsic volumes of a {}", body.kind_name()))),
    }
}

/// Everything estimated from one batch of Gaussian draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WillsReport {
    pub w_estimate: f64,
    pub w_stderr: f64,
    pub v1_estimate: f64,
    pub v1_stderr: f64,
    pub mean_f: f64,
    pub var_f: f64,
    /// e^{V₁} − W
    pub mcmullen_slack: f64,
    pub mcmullen_stderr: f64,
    /// log W
    pub log_w: f64,
    /// var(f)/2 + 𝔼f
    pub rhs_main: f64,
    /// var(f)/2 + V₁ − r²/2
    pub rhs_cor: f64,
    /// var(f)/2 + V₁ − πr², the bound that follows from |y|² ≤ 2πr² on √(2π)K
    pub rhs_cor_scaled: f64,
    /// log W − rhs_main
    pub reversal_slack: f64,
    pub reversal_stderr: f64,
    pub r: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Plain Monte Carlo over Z ~ γₙ for W, V₁ and the moments of f_K(Z).
pub fn wills_mc(body: &ConvexBody, samples: usize, stream: SeededStream) -> Result<WillsReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: samples, needed: MIN_SAMPLES });
    }
    let draws = stream.map_gaussian(body.n, samples, |z| -> Result<(f64, f64)> {
        Ok((body.f_k(z)?, body.support(z)?))
    });
    let mut f = Vec::with_capacity(samples);
    let mut h = Vec::with_capacity(samples);
    for d in draws {
        let (a, b) = d?;
        f.push(a);
        h.push(b);
    }
    let fmax = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if fmax > 700.0 {
        return Err(Error::Overflow(format!(
            "e^f overflows (max f = {fmax:.1}); the estimator variance grows like e^{{πr²}}, use a smaller body"
        )));
    }
    let root = (samples as f64).sqrt();
    let ef: Vec<f64> = f.iter().map(|v| v.exp()).collect();
    let (w, w_var) = mean_var(&ef);
    let (mh, h_var) = mean_var(&h);
    let (mean_f, var_f) = mean_var(&f);
    let w_stderr = (w_var).sqrt() / root;
    let v1 = SQRT_2PI * mh;
    let v1_stderr = SQRT_2PI * h_var.sqrt() / root;
    // influence of var(f)/2 + mean(f)
    let infl: Vec<f64> = f.iter().map(|v| 0.5 * (v - mean_f).powi(2) + v).collect();
    let rhs_se = mean_var(&infl).1.sqrt() / root;
    let rhs_main = 0.5 * var_f + mean_f;
    let log_w = w.ln();
    let r = body.r;
    Ok(WillsReport {
        w_estimate: w,
        w_stderr,
        v1_estimate: v1,
        v1_stderr,
        mean_f,
        var_f,
        mcmullen_slack: v1.exp() - w,
        mcmullen_stderr: ((v1.exp() * v1_stderr).powi(2) + w_stderr.powi(2)).sqrt(),
        log_w,
        rhs_main,
        rhs_cor: 0.5 * var_f + v1 - 0.5 * r * r,
        rhs_cor_scaled: 0.5 * var_f + v1 - PI * r * r,
        reversal_slack: log_w - rhs_main,
        reversal_stderr: ((w_stderr / w).powi(2) + rhs_se.powi(2)).sqrt(),
        r,
        n: body.n,
        samples,
        seed: stream.seed,
    })
}

/// √(2π)·𝔼h_K(Z) with its standard error.
pub fn v1_mc(body: &ConvexBody, samples: usize, stream: SeededStream) -> Result<(f64, f64)> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: samples, needed: MIN_SAMPLES });
    }
    let h: Vec<f64> = stream
        .map_gaussian(body.n, samples, |z| body.support(z))
        .into_iter()
        .collect::<Result<_>>()?;
    let (m, v) = mean_var(&h);
    Ok((SQRT_2PI * m, SQRT_2PI * v.sqrt() / (samples as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMullenReport {
    pub w: f64,
    pub v1: f64,
    pub slack: f64,
    pub stderr: f64,
    pub holds: bool,
}

/// e^{V₁} − W ≥ −3·stderr.
pub fn mcmullen_check(body: &ConvexBody, samples: usize, stream: SeededStream) -> Result<McMullenReport> {
    let r = wills_mc(body, samples, stream)?;
    Ok(McMullenReport {
        w: r.w_estimate,
        v1: r.v1_estimate,
        slack: r.mcmullen_slack,
        stderr: r.mcmullen_stderr,
        holds: r.mcmullen_slack >= -3.0 * r.mcmullen_stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversalReport {
    pub lhs: f64,
    pub rhs_main: f64,
    pub rhs_cor: f64,
    pub rhs_cor_scaled: f64,
    pub stderr: f64,
    /// log W ≥ rhs_main − 3·stderr
    pub main_holds: bool,
    /// rhs_main ≥ rhs_cor − 3·stderr
    pub cor_holds: bool,
    /// rhs_main ≥ rhs_cor_scaled − 3·stderr
    pub cor_scaled_holds: bool,
}

pub fn reversal_check(body: &ConvexBody, samples: usize, stream: SeededStream) -> Result<ReversalReport> {
    Ok(reversal_from(&wills_mc(body, samples, stream)?))
}

pub fn reversal_from(r: &WillsReport) -> ReversalReport {
    let se = r.reversal_stderr;
    let v1_se = r.v1_stderr;
    // rhs_main − rhs_cor = 𝔼f − V₁ + const, so both estimates' noise counts
    let cor_se = (se * se + v1_se * v1_se).sqrt();
    ReversalReport {
        lhs: r.log_w,
        rhs_main: r.rhs_main,
        rhs_cor: r.rhs_cor,
        rhs_cor_scaled: r.rhs_cor_scaled,
        stderr: se,
        main_holds: r.log_w >= r.rhs_main - 3.0 * se,
        cor_holds: r.rhs_main >= r.rhs_cor - 3.0 * cor_se,
        cor_scaled_holds: r.rhs_main >= r.rhs_cor_scaled - 3.0 * cor_se,
    }
}

/// Bodies with known intrinsic volumes, and nested pairs K ⊆ K′.
pub mod fixtures {
    use super::ConvexBody;

    pub fn point(n: usize) -> ConvexBody {
        ConvexBody::origin(n).expect("valid body")
    }

    /// [0, a] ⊂ ℝ¹.
    pub fn segment(a: f64) -> ConvexBody {
        ConvexBody::boxed(vec![0.0], vec![a]).expect("valid body")
    }

    pub fn disk() -> ConvexBody {
        ConvexBody::centered_ball(2, 1.0).expect("valid body")
    }

    pub fn unit_square() -> ConvexBody {
        ConvexBody::box_sides(vec![1.0, 1.0]).expect("valid body")
    }

    pub fn triangle() -> ConvexBody {
        ConvexBody::polytope(vec![vec![-0.5, -0.5], vec![0.5, -0.5], vec![-0.5, 0.5]]).expect("valid body")
    }

    pub fn nested_pairs() -> Vec<(ConvexBody, ConvexBody)> {
        vec![
            (point(2), disk()),
            (triangle(), unit_square()),
            (unit_square(), ConvexBody::centered_ball(2, 1.5).expect("valid body")),
            (segment(0.5), segment(1.0)),
            (
                ConvexBody::box_sides(vec![0.5, 0.5, 0.5]).expect("valid body"),
                ConvexBody::box_sides(vec![1.0, 1.0, 0.5]).expect("valid body"),
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(0) - 1.0).abs() < 1e-15);
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms() {
        let b = intrinsic_volumes_closed(&ConvexBody::box_sides(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(b, vec![1.0, 2.0, 1.0]);
        let z = intrinsic_volumes_closed(&ConvexBody::centered_ball(3, 0.0).unwrap()).unwrap();
        assert_eq!(z, vec![1.0, 0.0, 0.0, 0.0]);
        let v = intrinsic_volumes_closed(&ConvexBody::centered_ball(3, 1.0).unwrap()).unwrap();
        assert!((v[1] - 4.0).abs() < 1e-13 && (v[2] - 2.0 * PI).abs() < 1e-13 && (v[3] - 4.0 * PI / 3.0).abs() < 1e-13);
        let v = intrinsic_volumes_closed(&ConvexBody::centered_ball(2, 1.0).unwrap()).unwrap();
        assert!((v[1] - PI).abs() < 1e-13 && (v[2] - PI).abs() < 1e-13);
        let p = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(intrinsic_volumes_closed(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn f_k_ball_closed_form() {
        let b = ConvexBody::centered_ball(2, 1.0).unwrap();
        for z in [[0.3, -0.4], [2.0, 1.0], [-5.0, 3.0], [0.0, 2.5]] {
            let len = norm(&z);
            let want = if len >= SQRT_2PI { SQRT_2PI * len - PI } else { 0.5 * len * len };
            assert!((b.f_k(&z).unwrap() - want).abs() < 1e-12);
            // direct sup over a fine radial grid along z
            let mut best = f64::NEG_INFINITY;
            for i in 0..=200_000 {
                let t = SQRT_2PI * i as f64 / 200_000.0;
                best = best.max(t * len - 0.5 * t * t);
            }
            assert!((best - want).abs() < 1e-8);
        }
        assert_eq!(ConvexBody::origin(3).unwrap().f_k(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(ConvexBody::box_sides(vec![1.0, 2.0]).unwrap().f_k(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn hull_projection_cases() {
        let tri = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(tri.project(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);
        let p = tri.project(&[2.0, 2.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-14 && (p[1] - 1.0).abs() < 1e-14);
        let p = tri.project(&[-1.0, -3.0]).unwrap();
        assert!(p[0].abs() < 1e-14 && p[1].abs() < 1e-14);
        // square as a polytope agrees with the box projection
        let sq = ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let bx = ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mut rng = SeededStream::new(1).rng();
        for _ in 0..500 {
            let x: Vec<f64> = (0..2).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let a = sq.project(&x).unwrap();
            let b = bx.project(&x).unwrap();
            assert!(norm(&[a[0] - b[0], a[1] - b[1]]) < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn validation_probes() {
        for b in [
            ConvexBody::centered_ball(3, 1.5).unwrap(),
            ConvexBody::box_sides(vec![1.0, 0.5]).unwrap(),
            ConvexBody::polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]).unwrap(),
        ] {
            assert!(b.validate(500, SeededStream::new(2)).unwrap() <= 1e-9);
        }
        assert!(ConvexBody::from_spec(&BodySpec::Ball { n: 2, r: Some(0.5), radius: 1.0, center: None }).is_err());
    }

    #[test]
    fn segment_and_point() {
        let seg = fixtures::segment(1.0);
        let r = wills_mc(&seg, 200_000, SeededStream::new(3)).unwrap();
        assert!((r.w_estimate - 2.0).abs() <= (0.02 * 2.0f64).max(3.0 * r.w_stderr), "{r:?}");
        assert!((r.v1_estimate - 1.0).abs() <= 0.02f64.max(3.0 * r.v1_stderr));
        assert!(r.mcmullen_slack >= -3.0 * r.mcmullen_stderr);
        assert!(r.log_w >= r.rhs_main - 3.0 * r.reversal_stderr);

        let pt = ConvexBody::origin(2).unwrap();
        let r = wills_mc(&pt, 1_000, SeededStream::new(3)).unwrap();
        assert_eq!((r.w_estimate, r.v1_estimate, r.mean_f, r.var_f), (1.0, 0.0, 0.0, 0.0));
        assert_eq!(r.mcmullen_slack, 0.0);
        let rev = reversal_from(&r);
        assert!(rev.main_holds && rev.cor_holds && rev.lhs == 0.0 && rev.rhs_cor == 0.0);
    }

    #[test]
    fn translation_invariance() {
        let b = ConvexBody::box_sides(vec![1.0, 0.5]).unwrap();
        let t = b.translated(&[0.7, -0.4]).unwrap();
        let rb = wills_mc(&b, 100_000, SeededStream::new(4)).unwrap();
        let rt = wills_mc(&t, 100_000, SeededStream::new(5)).unwrap();
        let se = (rb.w_stderr.powi(2) + rt.w_stderr.powi(2)).sqrt();
        assert!((rb.w_estimate - rt.w_estimate).abs() <= 3.0 * se);
        let se = (rb.v1_stderr.powi(2) + rt.v1_stderr.powi(2)).sqrt();
        assert!((rb.v1_estimate - rt.v1_estimate).abs() <= 3.0 * se);
    }

    #[test]
    fn spec_round_trip() {
        let s: BodySpec = serde_json::from_str(r#"{"n":2,"kind":"box","a":[1,1]}"#).unwrap();
        let b = ConvexBody::from_spec(&s).unwrap();
        assert!((b.radius() - 0.5f64.sqrt()).abs() < 1e-15);
        let s: BodySpec = serde_json::from_str(r#"{"n":2,"kind":"ball","radius":1,"r":1}"#).unwrap();
        assert_eq!(ConvexBody::from_spec(&s).unwrap().kind_name(), "ball");
        assert!(serde_json::from_str::<BodySpec>(r#"{"n":2,"kind":"cube"}"#).is_err());
        assert!(serde_json::from_str::<BodySpec>(r#"{"n":2,"kind":"ball","radius":1,"colour":3}"#).is_err());
        let spec = b.to_spec().unwrap();
        let back: BodySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
