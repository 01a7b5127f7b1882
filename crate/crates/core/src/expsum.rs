//! Exponential sums Ψ(x) = Σ cᵢ e^{pᵢx}: overflow-safe evaluation, zero
//! isolation, the two-zero fit and its sign structure.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Minimum gap between consecutive exponents.
pub const EXPONENT_GAP: f64 = 1e-12;
/// Width to which bracketed roots are refined.
pub const ROOT_TOL: f64 = 1e-12;
/// |Ψ| below this multiple of Σ|cᵢ|e^{pᵢx} counts as zero at a critical point.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Dominance factor of the extreme term that certifies a root-free tail.
pub const DOMINANCE: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpSumSpec", into = "ExpSumSpec")]
pub struct ExpSum {
    p: Vec<f64>,
    c: Vec<f64>,
}

/// JSON form `{"p": [...], "c": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpSumSpec {
    pub p: Vec<f64>,
    pub c: Vec<f64>,
}

impl TryFrom<ExpSumSpec> for ExpSum {
    type Error = Error;
    fn try_from(s: ExpSumSpec) -> Result<Self> {
        ExpSum::new(s.p, s.c)
    }
}

impl From<ExpSum> for ExpSumSpec {
    fn from(e: ExpSum) -> Self {
        ExpSumSpec { p: e.p, c: e.c }
    }
}

impl ExpSum {
    pub fn new(p: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.len() != c.len() {
            return Err(invalid(format!("need matching nonempty p and c, got {} and {}", p.len(), c.len())));
        }
        if p.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(invalid("exponents and coefficients must be finite"));
        }
        if let Some(w) = p.windows(2).find(|w| w[1] - w[0] < EXPONENT_GAP) {
            return Err(invalid(format!("exponents must increase by at least {EXPONENT_GAP}: {} then {}", w[0], w[1])));
        }
        if c.iter().all(|&v| v == 0.0) {
            return Err(invalid("all coefficients are zero"));
        }
        Ok(ExpSum { p, c })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.p
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Number of terms minus one, the bound on distinct real zeros.
    pub fn order(&self) -> usize {
        self.p.len() - 1
    }

    /// Drops zero coefficients.
    pub fn trimmed(&self) -> ExpSum {
        let (p, c) = self.p.iter().zip(&self.c).filter(|(_, &c)| c != 0.0).map(|(a, b)| (*a, *b)).unzip();
        ExpSum { p, c }
    }

    /// (s, m, a) with Ψ(x) = s·e^m and Σ|cᵢ|e^{pᵢx} = a·e^m; m is the
    /// log-size of the dominant term, so s and a never overflow.
    pub fn scaled(&self, x: f64) -> (f64, f64, f64) {
        let m = self
            .p
            .iter()
            .zip(&self.c)
            .filter(|(_, &c)| c != 0.0)
            .map(|(p, c)| p * x + c.abs().ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut s, mut a) = (0.0, 0.0);
        for (p, &c) in self.p.iter().zip(&self.c) {
            if c != 0.0 {
                let t = (p * x + c.abs().ln() - m).exp();
                s += c.signum() * t;
                a += t;
            }
        }
        (s, m, a)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(invalid(format!("x must be finite, got {x}")));
        }
        let (s, m, _) = self.scaled(x);
        let v = s * m.exp();
        if !v.is_finite() {
            return Err(Error::Overflow(format!("Ψ({x}) overflows: dominant term e^{m:.1}")));
        }
        Ok(v)
    }

    /// Sign of Ψ(x) ∈ {−1, 0, 1}, valid at any finite x.
    pub fn sign(&self, x: f64) -> f64 {
        let s = self.scaled(x).0;
        if s == 0.0 {
            0.0
        } else {
            s.signum()
        }
    }

    /// Ψ′, coefficients cᵢpᵢ.
    pub fn derivative(&self) -> Option<ExpSum> {
        let c: Vec<f64> = self.c.iter().zip(&self.p).map(|(c, p)| c * p).collect();
        c.iter().any(|&v| v != 0.0).then(|| ExpSum { p: self.p.clone(), c })
    }

    /// (e^{−p₀x}Ψ)′ with exponents pᵢ − p₀ and coefficients cᵢ(pᵢ − p₀); it
    /// has one term fewer and vanishes between any two zeros of Ψ.
    pub fn rolle_derivative(&self) -> Option<ExpSum> {
        let t = self.trimmed();
        if t.p.len() < 2 {
            return None;
        }
        let p0 = t.p[0];
        let p: Vec<f64> = t.p[1..].iter().map(|v| v - p0).collect();
        let c: Vec<f64> = t.c[1..].iter().zip(&p).map(|(c, d)| c * d).collect();
        Some(ExpSum { p, c })
    }

    /// An interval outside which the extreme terms dominate the rest by
    /// the factor `DOMINANCE`, so that every real zero lies inside.
    pub fn root_window(&self) -> (f64, f64) {
        let t = self.trimmed();
        let k = t.p.len();
        if k < 2 {
            return (-1.0, 1.0);
        }
        let abs: Vec<f64> = t.c.iter().map(|c| c.abs()).collect();
        let rest_hi: f64 = abs[..k - 1].iter().sum();
        let rest_lo: f64 = abs[1..].iter().sum();
        // for x ≥ 0 each lower term is at most |cᵢ|e^{p_{k−2}x}
        let hi = ((DOMINANCE * rest_hi / abs[k - 1]).ln() / (t.p[k - 1] - t.p[k - 2])).max(0.0);
        let lo = ((DOMINANCE * rest_lo / abs[0]).ln() / (t.p[1] - t.p[0])).max(0.0);
        (-lo - 1.0, hi + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub x: f64,
    /// Touches zero without changing sign; counted once.
    pub tangential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    pub interval: (f64, f64),
    pub count: usize,
    pub roots: Vec<Root>,
    pub any_tangential: bool,
    /// Roots closer together than this, or critical values smaller than
    /// `TANGENCY_TOL` relative to the term sizes, are not resolved.
    pub resolution: f64,
}

fn bisect(psi: &ExpSum, mut a: f64, mut b: f64, sa: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= ROOT_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let s = psi.sign(m);
        if s == 0.0 {
            return m;
        }
        if s == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn zeros_in(psi: &ExpSum, a: f64, b: f64) -> Vec<Root> {
    let Some(d) = psi.rolle_derivative() else {
        return Vec::new();
    };
    // between consecutive critical points Ψ is monotone, so each piece
    // holds at most one zero
    let crit: Vec<f64> = zeros_in(&d, a, b).into_iter().map(|r| r.x).collect();
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(a);
    knots.extend(crit.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);

    let near_zero = |x: f64| {
        let (s, _, mag) = psi.scaled(x);
        s.abs() <= TANGENCY_TOL * mag
    };
    let mut roots: Vec<Root> = Vec::new();
    let push = |r: Root, roots: &mut Vec<Root>| {
        if roots.last().is_none_or(|l| r.x - l.x > ROOT_TOL) {
            roots.push(r);
        }
    };
    for (i, w) in knots.windows(2).enumerate() {
        let (l, r) = (w[0], w[1]);
        let interior_l = i > 0;
        if interior_l && near_zero(l) {
            let side = psi.sign(l - 1e-6 * (l - knots[i - 1]).min(1.0)) * psi.sign(l + 1e-6 * (r - l).min(1.0));
            push(Root { x: l, tangential: side >= 0.0 }, &mut roots);
            continue;
        }
        let (sl, sr) = (psi.sign(l), psi.sign(r));
        if sl == 0.0 {
            push(Root { x: l, tangential: false }, &mut roots);
        } else if sr != 0.0 && sl != sr {
            let interior_r = i + 2 < knots.len();
            if !(interior_r && near_zero(r)) {
                push(Root { x: bisect(psi, l, r, sl), tangential: false }, &mut roots);
            }
        } else if sr == 0.0 && i + 2 == knots.len() {
            push(Root { x: r, tangential: false }, &mut roots);
        }
    }
    roots
}

/// Distinct real zeros of Ψ in [a, b].
pub fn count_zeros(psi: &ExpSum, a: f64, b: f64) -> Result<ZeroReport> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid(format!("need finite a < b, got [{a}, {b}]")));
    }
    let roots = zeros_in(&psi.trimmed(), a, b);
    if roots.len() > psi.order() {
        return Err(Error::Contract(format!(
            "{} distinct zeros found for an exponential sum of order {}",
            roots.len(),
            psi.order()
        )));
    }
    Ok(ZeroReport {
        interval: (a, b),
        count: roots.len(),
        any_tangential: roots.iter().any(|r| r.tangential),
        roots,
        resolution: ROOT_TOL,
    })
}

/// All real zeros, over the certified window.
pub fn all_zeros(psi: &ExpSum) -> Result<ZeroReport> {
    let (a, b) = psi.root_window();
    count_zeros(psi, a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoZeroFit {
    pub psi: ExpSum,
    pub x0: f64,
    pub x1: f64,
    /// 2-norm condition number of the row-scaled system.
    pub condition: f64,
    /// max |Ψ(xⱼ)| relative to the term sizes at xⱼ
    pub residual: f64,
}

/// c₀e^{p₀x} + e^{px} + c₁e^{p₁x} with zeros at x₀ and x₁.
pub fn fit_two_zeros(p0: f64, p: f64, p1: f64, x0: f64, x1: f64) -> Result<TwoZeroFit> {
    if !(p0 < p && p < p1) {
        return Err(invalid(format!("need p0 < p < p1, got {p0}, {p}, {p1}")));
    }
    if !(x0.is_finite() && x1.is_finite()) || x0 == x1 {
        return Err(invalid(format!("need distinct finite zeros, got {x0}, {x1}")));
    }
    let (x0, x1) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    // rows divided by e^{p xⱼ}: c₀e^{(p₀−p)xⱼ} + c₁e^{(p₁−p)xⱼ} = −1
    let m = nalgebra::Matrix2::new(
        ((p0 - p) * x0).exp(),
        ((p1 - p) * x0).exp(),
        ((p0 - p) * x1).exp(),
        ((p1 - p) * x1).exp(),
    );
    if m.iter().any(|v| !v.is_finite() || *v == 0.0) {
        return Err(Error::Overflow(format!("fit at x = ({x0}, {x1}) leaves the floating range")));
    }
    let sv = m.singular_values();
    let condition = sv[0] / sv[1];
    let c = m
        .lu()
        .solve(&nalgebra::Vector2::new(-1.0, -1.0))
        .filter(|c| c.iter().all(|v| v.is_finite()) && condition.is_finite())
        .ok_or_else(|| {
            Error::NumericalFailure(format!(
                "singular fit system (condition {condition:e}); exponentials with distinct exponents are linearly independent, so this is an internal error"
            ))
        })?;
    let psi = ExpSum::new(vec![p0, p, p1], vec![c[0], 1.0, c[1]])?;
    let residual = [x0, x1]
        .iter()
        .map(|&x| {
            let (s, _, a) = psi.scaled(x);
            s.abs() / a
        })
        .fold(0.0, f64::max);
    Ok(TwoZeroFit { psi, x0, x1, condition, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub probes: usize,
    pub violations: usize,
    pub first_violation: Option<f64>,
}

/// Probes Ψ > 0 inside (x₀, x₁) and Ψ < 0 outside on a uniform grid over
/// [x₀ − w, x₁ + w], w = x₁ − x₀, skipping points within 1e-9 of a zero.
pub fn positivity_check(fit: &TwoZeroFit, probes: usize) -> PositivityReport {
    let (x0, x1) = (fit.x0, fit.x1);
    let w = x1 - x0;
    let (a, b) = (x0 - w, x1 + w);
    let mut violations = 0;
    let mut first = None;
    let mut used = 0;
    for i in 0..probes {
        let x = a + (b - a) * (i as f64 + 0.5) / probes as f64;
        if (x - x0).abs() < 1e-9 || (x - x1).abs() < 1e-9 {
            continue;
        }
        used += 1;
        let want = if x > x0 && x < x1 { 1.0 } else { -1.0 };
        if fit.psi.sign(x) != want {
            violations += 1;
            first.get_or_insert(x);
        }
    }
    PositivityReport { probes: used, violations, first_violation: first }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignPattern {
    Checked {
        /// cᵢcᵢ₊₁ < 0 for all i
        alternating: bool,
        /// Ψ(t − s)Ψ(t + s) < 0 at every zero t
        sign_changes_at_roots: bool,
        roots: Vec<f64>,
    },
    Skipped { reason: String },
}

impl SignPattern {
    /// True when checked and both flags hold.
    pub fn passes(&self) -> bool {
        matches!(self, SignPattern::Checked { alternating: true, sign_changes_at_roots: true, .. })
    }
}

/// Sign structure of a sum with exactly as many simple zeros as its order.
pub fn sign_pattern_check(psi: &ExpSum) -> Result<SignPattern> {
    let t = psi.trimmed();
    let z = all_zeros(&t)?;
    if z.any_tangential {
        return Ok(SignPattern::Skipped { reason: "tangential zero present".into() });
    }
    if z.count != t.order() {
        return Ok(SignPattern::Skipped {
            reason: format!("{} zeros found, the check needs exactly {}", z.count, t.order()),
        });
    }
    let alternating = t.c.windows(2).all(|w| w[0] * w[1] < 0.0);
    let xs: Vec<f64> = z.roots.iter().map(|r| r.x).collect();
    let sign_changes_at_roots = xs.iter().enumerate().all(|(i, &x)| {
        let gap_l = if i > 0 { x - xs[i - 1] } else { 1.0 };
        let gap_r = if i + 1 < xs.len() { xs[i + 1] - x } else { 1.0 };
        let s = (0.25 * gap_l.min(gap_r)).clamp(1e-9, 1e-3);
        t.sign(x - s) * t.sign(x + s) < 0.0
    });
    Ok(SignPattern::Checked { alternating, sign_changes_at_roots, roots: xs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolleReport {
    pub gaps: usize,
    pub gaps_without_critical_point: usize,
}

/// Between consecutive zeros of Ψ the Rolle derivative has a zero.
pub fn rolle_check(psi: &ExpSum) -> Result<RolleReport> {
    let z = all_zeros(psi)?;
    let xs: Vec<f64> = z.roots.iter().map(|r| r.x).collect();
    let crit = match psi.rolle_derivative() {
        Some(d) if xs.len() >= 2 => count_zeros(&d, xs[0], xs[xs.len() - 1])?.roots,
        _ => Vec::new(),
    };
    let missing = xs
        .windows(2)
        .filter(|w| !crit.iter().any(|c| c.x >= w[0] - ROOT_TOL && c.x <= w[1] + ROOT_TOL))
        .count();
    Ok(RolleReport { gaps: xs.len().saturating_sub(1), gaps_without_critical_point: missing })
}
