use crate::error::{Error, Result};

/// Nodes and weights integrating against the standard Gaussian measure γ₁.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussianQuadrature {
    /// ∫ h dγ₁ by the rule.
    pub fn integrate(&self, mut h: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * h(x))
            .sum()
    }

    /// log ∫ e^{g} dγ₁ by the rule, evaluated with a max shift.
    pub fn log_integrate_exp(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.nodes.iter().map(|&x| g(x)).collect();
        log_sum_exp_weighted(&vals, &self.weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub(crate) fn log_sum_exp_weighted(vals: &[f64], weights: &[f64]) -> f64 {
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = vals
        .iter()
        .zip(weights)
        .map(|(&v, &w)| w * (v - max).exp())
        .sum();
    max + s.ln()
}

const PI_M4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}

/// Gauss–Hermite rule with `m` nodes, rescaled to the probability measure γ₁.
///
/// Nodes are found by Newton iteration on orthonormal Hermite polynomials, so
/// the rule exactly integrates polynomials of degree ≤ 2m − 1.
pub fn gauss_hermite(m: usize) -> Result<GaussianQuadrature> {
    if !(1..=200).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Hermite order must be in [1, 200], got {m}"
        )));
    }
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let nf = m as f64;
    // Eigenvalues of the Jacobi matrix seed the Newton iteration.
    let jacobi = nalgebra::DMatrix::from_fn(m, m, |r, c| {
        if r.abs_diff(c) == 1 {
            (r.max(c) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(|a, b| b.total_cmp(a));
    for i in 0..m.div_ceil(2) {
        let mut z = guesses[i];
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = PI_M4;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure(format!(
                "Gauss-Hermite node {i} of {m} did not converge"
            )));
        }
        x[i] = z;
        x[m - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[m - 1 - i] = w[i];
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let nodes: Vec<f64> = x.iter().rev().map(|v| v * std::f64::consts::SQRT_2).collect();
    let mut weights: Vec<f64> = w.iter().rev().map(|v| v / sqrt_pi).collect();
    // remove the O(1e-15) drift in the total mass
    let total: f64 = weights.iter().sum();
    for v in &mut weights {
        *v /= total;
    }
    Ok(GaussianQuadrature { nodes, weights })
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let nf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre integration against γ₁ on a truncated real line.
///
/// Panels have unit-fraction width and break at every multiple of the panel
/// width (including 0), so integrands with kinks at the origin or at integers
/// are integrated panel-wise smooth. Exponential integrals are evaluated in the
/// log domain; when the integrand has not decayed by the largest admissible
/// half-width the integral is declared divergent.
#[derive(Debug, Clone)]
pub struct RealLineIntegrator {
    gl_x: Vec<f64>,
    gl_w: Vec<f64>,
    panel: f64,
    start_half_width: f64,
    max_half_width: f64,
    decay: f64,
}

impl Default for RealLineIntegrator {
    fn default() -> Self {
        let (gl_x, gl_w) = gauss_legendre(10);
        RealLineIntegrator {
            gl_x,
            gl_w,
            panel: 0.25,
            start_half_width: 16.0,
            max_half_width: 1024.0,
            decay: 60.0,
        }
    }
}

impl RealLineIntegrator {
    fn nodes(&self, half: f64) -> (Vec<f64>, Vec<f64>) {
        let panels = (2.0 * half / self.panel).round() as usize;
        let mut xs = Vec::with_capacity(panels * self.gl_x.len());
        let mut ws = Vec::with_capacity(panels * self.gl_x.len());
        let h = self.panel * 0.5;
        for k in 0..panels {
            let mid = -half + (k as f64 + 0.5) * self.panel;
            for (&x, &w) in self.gl_x.iter().zip(&self.gl_w) {
                xs.push(mid + h * x);
                ws.push(h * w);
            }
        }
        (xs, ws)
    }

    /// log ∫ e^{g(z)} γ₁(dz); `+∞` when the integral diverges.
    pub fn log_expectation_exp(&self, g: impl Fn(f64) -> f64) -> f64 {
        let log_density = |z: f64| -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let total = |z: f64| g(z) + log_density(z);
        let mut half = self.start_half_width;
        loop {
            let (xs, ws) = self.nodes(half);
            let vals: Vec<f64> = xs.iter().map(|&z| total(z)).collect();
            let peak = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if peak == f64::INFINITY || peak.is_nan() {
                return f64::INFINITY;
            }
            let edge_ok = |z: f64, inner: f64| {
                let e = total(z);
                e.is_nan() || (e < peak - self.decay && e <= total(inner))
            };
            if edge_ok(half, 0.75 * half) && edge_ok(-half, -0.75 * half) {
                return log_sum_exp_weighted(&vals, &ws);
            }
            if half >= self.max_half_width {
                return f64::INFINITY;
            }
            half *= 2.0;
        }
    }

    /// ∫ expm1(g(z)) γ₁(dz), intended for small `g` where the log-domain
    /// evaluation would lose digits to cancellation.
    pub fn expectation_expm1(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.expectation(|z| g(z).exp_m1())
    }

    /// ∫ h dγ₁ over [−40, 40] (tail mass below 1e-340).
    pub fn expectation(&self, h: impl Fn(f64) -> f64) -> f64 {
        let (xs, ws) = self.nodes(40.0);
        xs.iter()
            .zip(&ws)
            .map(|(&z, &w)| {
                let d = super::std_normal_pdf(z);
                if d == 0.0 {
                    0.0
                } else {
                    w * d * h(z)
                }
            })
            .sum()
    }
}
