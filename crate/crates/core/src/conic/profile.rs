use std::fmt::Write as _;

use serde::Serialize;

use super::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::gauss::SeededStream;
use crate::mgf::MIN_SAMPLES;

/// Per-draw face dimensions and squared projection norms for Z ~ γₙ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSamples {
    pub n: usize,
    /// `None` marks a draw whose rank decision was ambiguous.
    pub dims: Vec<Option<u8>>,
    /// |Π_C(Z)|² per draw.
    pub sq_norms: Vec<f64>,
    /// |Z|² per draw.
    pub z_sq_norms: Vec<f64>,
    pub stream: SeededStream,
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var, (var / n).sqrt())
}

impl ConicSamples {
    pub fn draw(cone: &PolyhedralCone, samples: usize, stream: SeededStream) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InsufficientSamples { got: samples, needed: MIN_SAMPLES });
        }
        let n = cone.dim();
        let per = stream.map_gaussian(n, samples, |z| -> Result<(Option<u8>, f64, f64)> {
            let p = cone.project(z)?;
            let f = cone.face_dimension_of(&p, z);
            let zz = z.iter().map(|v| v * v).sum();
            Ok(((!f.flagged).then_some(f.k as u8), p.point.norm_squared(), zz))
        });
        let mut dims = Vec::with_capacity(samples);
        let mut sq_norms = Vec::with_capacity(samples);
        let mut z_sq_norms = Vec::with_capacity(samples);
        for r in per {
            let (d, s, zz) = r?;
            dims.push(d);
            sq_norms.push(s);
            z_sq_norms.push(zz);
        }
        Ok(ConicSamples { n, dims, sq_norms, z_sq_norms, stream })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn flagged(&self) -> usize {
        self.dims.iter().filter(|d| d.is_none()).count()
    }

    /// (V, |Π|²) over unflagged draws.
    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
        self.dims.iter().zip(&self.sq_norms).filter_map(|(d, s)| d.map(|k| (k as f64, *s)))
    }

    pub fn profile(&self) -> ConicProfile {
        let n = self.n;
        let used = self.len() - self.flagged();
        let mut counts = vec![0usize; n + 1];
        for k in self.dims.iter().flatten() {
            counts[*k as usize] += 1;
        }
        let nu = used as f64;
        let v: Vec<f64> = counts.iter().map(|&c| c as f64 / nu).collect();
        let v_stderr = v.iter().map(|p| (p * (1.0 - p) / nu).sqrt()).collect();
        let (delta, var_v, delta_stderr) = mean_se(self.pairs().map(|(k, _)| k));
        let (delta_sq, var_sq, delta_sq_stderr) = mean_se(self.sq_norms.iter().copied());
        let (diff, _, diff_se) = mean_se(self.pairs().map(|(k, s)| k - s));
        let flagged_fraction = self.flagged() as f64 / self.len() as f64;
        let mut warnings = Vec::new();
        if flagged_fraction > 0.01 {
            warnings.push(format!("{:.2}% of draws had an ambiguous face dimension", 100.0 * flagged_fraction));
        }
        let m = n as f64;
        ConicProfile {
            n,
            v,
            v_stderr,
            delta,
            delta_stderr,
            delta_sq,
            delta_sq_stderr,
            delta_estimators_agree: diff.abs() <= 3.0 * diff_se + 1e-12,
            var_v,
            var_sq,
            sigma2_lower: var_v + 2.0 * delta,
            sigma2_upper: var_v + 2.0 * (m - delta),
            sigma2_two_sided: var_v + 2.0 * delta.max(m - delta),
            samples: self.len(),
            flagged: self.flagged(),
            flagged_fraction,
            seed: self.stream.seed,
            stream_id: self.stream.stream_id,
            warnings,
        }
    }

    /// var(V) against var(|Π|²) − 2δ, with δ = 𝔼|Π|².
    pub fn variance_identity(&self) -> VarianceIdentity {
        let (mv, _, _) = mean_se(self.pairs().map(|(k, _)| k));
        let (ms, _, _) = mean_se(self.pairs().map(|(_, s)| s));
        let nu = self.pairs().count() as f64;
        // influence of var(V) − var(S) + 2 mean(S), evaluated per draw
        let infl = self.pairs().map(|(k, s)| (k - mv).powi(2) - (s - ms).powi(2) + 2.0 * s);
        let (_, vi, _) = mean_se(infl);
        let var_v = self.pairs().map(|(k, _)| (k - mv).powi(2)).sum::<f64>() / (nu - 1.0);
        let var_sq = self.pairs().map(|(_, s)| (s - ms).powi(2)).sum::<f64>() / (nu - 1.0);
        let rhs = var_sq - 2.0 * ms;
        let stderr = (vi / nu).sqrt();
        VarianceIdentity { var_v, rhs, stderr, agree: (var_v - rhs).abs() <= 3.0 * stderr + 1e-12 }
    }

    /// 𝔼e^{ηV} against 𝔼e^{ξ|Π|²}, ξ = (1 − e^{−2η})/2.
    ///
    /// For η > 0 the direct average of e^{ξ|Π(Z)|²} has infinite variance
    /// once ξ ≥ 1/4. The right side is then estimated after the change of
    /// scale Z = W/√(1 − 2ξ), which by homogeneity of Π and Moreau gives
    /// 𝔼e^{ξ|Π(Z)|²} = e^{nη} 𝔼 exp(−(e^{2η} − 1)|Π_{C°}(W)|²/2), a bounded
    /// integrand evaluated on the same draws.
    pub fn mgf_identity(&self, etas: &[f64]) -> Vec<MgfIdentityRow> {
        let n = self.n as f64;
        let polar_sq = |i: usize| (self.z_sq_norms[i] - self.sq_norms[i]).max(0.0);
        etas.iter()
            .map(|&eta| {
                let xi = -0.5 * (-2.0 * eta).exp_m1();
                let (lhs, _, lhs_se) = mean_se(self.pairs().map(|(k, _)| (eta * k).exp()));
                let (plain, _, plain_se) = mean_se(self.sq_norms.iter().map(|s| (xi * s).exp()));
                let (rhs, rhs_se) = if eta > 0.0 {
                    let c = 0.5 * (2.0 * eta).exp_m1();
                    let scale = (n * eta).exp();
                    let (m, _, se) = mean_se((0..self.len()).map(|i| (-c * polar_sq(i)).exp()));
                    (scale * m, scale * se)
                } else {
                    (plain, plain_se)
                };
                let rel_err = (lhs - rhs).abs() / lhs.abs();
                let tol = 0.01f64.max(3.0 * (lhs_se * lhs_se + rhs_se * rhs_se).sqrt() / lhs.abs());
                MgfIdentityRow {
                    eta,
                    xi,
                    lhs,
                    lhs_stderr: lhs_se,
                    rhs,
                    rhs_stderr: rhs_se,
                    rhs_direct: plain,
                    rel_err,
                    tol,
                    holds: rel_err <= tol,
                }
            })
            .collect()
    }

    /// One- and two-sided sub-Gaussian tail bounds for V around δ.
    pub fn tail_bounds(&self, t_grid: &[f64]) -> Result<Vec<ConicTailRow>> {
        let prof = self.profile();
        let nu = self.pairs().count() as f64;
        let freq = |pred: &dyn Fn(f64) -> bool| {
            let p = self.pairs().filter(|(k, _)| pred(*k)).count() as f64 / nu;
            (p, (p * (1.0 - p) / nu).sqrt())
        };
        t_grid
            .iter()
            .map(|&t| {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(crate::error::invalid(format!("tail threshold must be >= 0, got {t}")));
                }
                let d = prof.delta;
                let (lower, lower_se) = freq(&|k| k <= d - t);
                let (upper, upper_se) = freq(&|k| k >= d + t);
                let (two, two_se) = freq(&|k| (k - d).abs() >= t);
                let lower_bound = (-t * t / (2.0 * prof.sigma2_lower)).exp();
                let upper_bound = (-t * t / (2.0 * prof.sigma2_upper)).exp();
                let two_bound = 2.0 * (-t * t / (2.0 * prof.sigma2_two_sided)).exp();
                let holds = lower <= lower_bound + 3.0 * lower_se
                    && upper <= upper_bound + 3.0 * upper_se
                    && two <= two_bound + 3.0 * two_se;
                Ok(ConicTailRow { t, lower, lower_bound, upper, upper_bound, two_sided: two, two_sided_bound: two_bound, holds })
            })
            .collect()
    }
}

/// Estimated conic intrinsic volumes and derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConicProfile {
    pub n: usize,
    pub v: Vec<f64>,
    pub v_stderr: Vec<f64>,
    /// Mean face dimension.
    pub delta: f64,
    pub delta_stderr: f64,
    /// Mean of |Π_C(Z)|².
    pub delta_sq: f64,
    pub delta_sq_stderr: f64,
    pub delta_estimators_agree: bool,
    pub var_v: f64,
    pub var_sq: f64,
    pub sigma2_lower: f64,
    pub sigma2_upper: f64,
    pub sigma2_two_sided: f64,
    pub samples: usize,
    pub flagged: usize,
    pub flagged_fraction: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub warnings: Vec<String>,
}

/// The JSON summary written next to the profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub delta: f64,
    #[serde(rename = "var_V")]
    pub var_v: f64,
    pub sigma2_lower: f64,
    pub sigma2_upper: f64,
    pub sigma2_two_sided: f64,
    pub flagged_fraction: f64,
}

impl ConicProfile {
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            delta: self.delta,
            var_v: self.var_v,
            sigma2_lower: self.sigma2_lower,
            sigma2_upper: self.sigma2_upper,
            sigma2_two_sided: self.sigma2_two_sided,
            flagged_fraction: self.flagged_fraction,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,v_k,stderr\n");
        for (k, (v, s)) in self.v.iter().zip(&self.v_stderr).enumerate() {
            let _ = writeln!(out, "{k},{v:.16e},{s:.16e}");
        }
        out
    }

    pub fn total_mass(&self) -> f64 {
        self.v.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceIdentity {
    pub var_v: f64,
    /// var(|Π|²) − 2δ
    pub rhs: f64,
    pub stderr: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfIdentityRow {
    pub eta: f64,
    pub xi: f64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// Plain average of e^{ξ|Π(Z)|²}, for comparison.
    pub rhs_direct: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConicTailRow {
    pub t: f64,
    pub lower: f64,
    pub lower_bound: f64,
    pub upper: f64,
    pub upper_bound: f64,
    pub two_sided: f64,
    pub two_sided_bound: f64,
    pub holds: bool,
}
