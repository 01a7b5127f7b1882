//! Exact active-set solvers for projections onto polyhedral cones.
//!
//! [`nnls`] is Lawson–Hanson on the generator matrix;
//! [`halfspace_projection`] is the Goldfarb–Idnani dual method for
//! min ½|y − x|² subject to ⟨aᵢ, y⟩ ≤ 0. The two share no code, so their
//! agreement through the Moreau decomposition is a genuine cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Optimality tolerance on the gradient Vᵀ(x − Vλ) at |x| = 1. On a nearly
/// degenerate face the gradient can be 1e4 times smaller than the distance
/// to the optimum, so this sits just above the rounding floor.
pub const OPT_TOL: f64 = 1e-14;
/// Constraint violation, relative to |x|, below which a halfspace counts as satisfied.
pub const VIOLATION_TOL: f64 = 1e-12;
/// A new normal whose component orthogonal to the active normals is shorter
/// than this is treated as linearly dependent on them.
pub const DEPENDENCE_TOL: f64 = 1e-10;

fn solve_spd(g: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = g.clone().cholesky() {
        return Some(ch.solve(b));
    }
    g.clone().svd(true, true).solve(b, 1e-13).ok()
}

/// Condition estimate of a symmetric positive semidefinite matrix.
fn condition(g: &DMatrix<f64>) -> f64 {
    let ev = g.clone().symmetric_eigenvalues();
    let max = ev.iter().copied().fold(0.0, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Least squares min |V_P s − x| over the columns `idx`: a Cholesky solve
/// of the normal equations, corrected twice against the residual x − V_P s.
/// Without `fallback` a singular system gives `None`; with it the solve
/// falls back to a pseudo-inverse.
fn passive_lsq(v: &DMatrix<f64>, idx: &[usize], x: &DVector<f64>, fallback: bool) -> Option<DVector<f64>> {
    let vp = v.select_columns(idx);
    let g = vp.tr_mul(&vp);
    let chol = g.clone().cholesky();
    let solve = |b: &DVector<f64>| match &chol {
        Some(ch) => Some(ch.solve(b)),
        None if fallback => g.clone().svd(true, true).solve(b, 1e-13).ok(),
        None => None,
    };
    let mut s = solve(&vp.tr_mul(x))?;
    for _ in 0..2 {
        s += solve(&vp.tr_mul(&(x - &vp * &s)))?;
    }
    Some(s)
}

/// Non-negative least squares min |Vλ − x|², λ ≥ 0. Returns λ.
///
/// The gradient is taken from the residual x − Vλ and every passive solve is
/// refined against it. Plain normal equations square the condition number,
/// which costs about 1e-7 in the residual once two generators are within
/// 1e-4 rad of antiparallel.
pub fn nnls(v: &DMatrix<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let m = v.ncols();
    let cap = 50 * m.max(1);
    let mut lambda = DVector::<f64>::zeros(m);
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; m];
    let mut rejected = vec![false; m];
    let mut iterations = 0;
    loop {
        let w = v.tr_mul(&(x - v * &lambda));
        let mut best = None;
        let mut best_w = OPT_TOL;
        for j in 0..m {
            if !in_passive[j] && !rejected[j] && w[j] > best_w {
                best_w = w[j];
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        passive.push(j);
        in_passive[j] = true;
        // Lawson–Hanson safeguard: an index whose own coefficient is not
        // positive in the enlarged passive solve only looks attractive
        // through rounding, so it is set aside until λ moves again.
        match passive_lsq(v, &passive, x, false) {
            Some(s) if s[passive.len() - 1] > 0.0 => {}
            _ => {
                passive.pop();
                in_passive[j] = false;
                rejected[j] = true;
                continue;
            }
        }
        rejected.iter_mut().for_each(|r| *r = false);
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::NumericalFailure(format!(
                    "NNLS did not converge in {cap} iterations (Gram condition {:.3e})",
                    condition(&v.tr_mul(v))
                )));
            }
            let s = passive_lsq(v, &passive, x, true).ok_or_else(|| {
                let vp = v.select_columns(&passive);
                Error::NumericalFailure(format!("singular passive system (condition {:.3e})", condition(&vp.tr_mul(&vp))))
            })?;
            if s.iter().all(|&v| v > 0.0) {
                for (k, &i) in passive.iter().enumerate() {
                    lambda[i] = s[k];
                }
                break;
            }
            // step back toward the feasible region
            let mut alpha = f64::INFINITY;
            for (k, &i) in passive.iter().enumerate() {
                if s[k] <= 0.0 {
                    let a = lambda[i] / (lambda[i] - s[k]);
                    alpha = alpha.min(a);
                }
            }
            for (k, &i) in passive.iter().enumerate() {
                lambda[i] += alpha * (s[k] - lambda[i]);
            }
            passive.retain(|&i| {
                let keep = lambda[i] > 1e-15;
                if !keep {
                    lambda[i] = 0.0;
                    in_passive[i] = false;
                }
                keep
            });
            if passive.is_empty() {
                break;
            }
        }
    }
    Ok(lambda)
}

/// Result of [`halfspace_projection`].
#[derive(Debug, Clone)]
pub struct HalfspaceSolution {
    pub point: DVector<f64>,
    /// Active constraints and their multipliers.
    pub active: Vec<(usize, f64)>,
}

/// min ½|y − x|² subject to rows aᵢ of `a` satisfying ⟨aᵢ, y⟩ ≤ 0.
/// Rows are expected to have unit norm.
pub fn halfspace_projection(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<HalfspaceSolution> {
    let (k, n) = a.shape();
    // constraints in the form ⟨nᵢ, y⟩ ≥ 0 with nᵢ = −aᵢ
    let normal = |i: usize| -> DVector<f64> { -a.row(i).transpose() };
    let mut y = x.clone();
    let mut active: Vec<usize> = Vec::new();
    // constraints dependent on the active set and satisfied to rounding
    let mut settled: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let cap = 50 * k.max(1) + 50;
    let mut iterations = 0;
    let scale = x.norm().max(1e-300);
    loop {
        // most violated constraint
        let mut p = None;
        let mut worst = -VIOLATION_TOL * scale;
        for i in 0..k {
            if active.contains(&i) || settled.contains(&i) {
                continue;
            }
            let s = normal(i).dot(&y);
            if s < worst {
                worst = s;
                p = Some(i);
            }
        }
        let Some(p) = p else { break };
        let np = normal(p);
        let mut u_new = 0.0;
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::NumericalFailure(format!(
                    "halfspace projection did not converge in {cap} iterations"
                )));
            }
            let (z, r) = if active.is_empty() {
                (np.clone(), DVector::zeros(0))
            } else {
                let nm = DMatrix::from_fn(n, active.len(), |row, c| -a[(active[c], row)]);
                let gram = nm.transpose() * &nm;
                let r = solve_spd(&gram, &(nm.transpose() * &np))
                    .ok_or_else(|| Error::NumericalFailure("dependent active constraints".into()))?;
                (&np - &nm * &r, r)
            };
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for (j, &rj) in r.iter().enumerate() {
                if rj > 1e-14 {
                    let t = (u[j] / rj).max(0.0);
                    if t < t1 {
                        t1 = t;
                        drop = Some(j);
                    }
                }
            }
            let zz = z.norm_squared();
            let sp = np.dot(&y);
            // n active normals in ℝⁿ already span, whatever rounding leaves in z
            let dependent = active.len() >= n || zz <= DEPENDENCE_TOL * DEPENDENCE_TOL;
            let t2 = if dependent { f64::INFINITY } else { (-sp / z.dot(&np)).max(0.0) };
            if t1 == f64::INFINITY && t2 == f64::INFINITY {
                // n_p is a nonpositive combination of active normals, so
                // ⟨n_p, y⟩ = 0 up to rounding
                if sp >= -1e-10 * scale {
                    settled.push(p);
                    break;
                }
                return Err(Error::NumericalFailure(format!("projection problem infeasible (slack {sp:e})")));
            }
            let t = t1.min(t2);
            if t2 < f64::INFINITY && t > 0.0 {
                y += t * &z;
                settled.clear();
            }
            for (j, rj) in r.iter().enumerate() {
                u[j] -= t * rj;
            }
            u_new += t;
            if t2 <= t1 {
                active.push(p);
                u.push(u_new);
                if active.len() == n {
                    // n independent equalities ⟨nᵢ, y⟩ = 0 pin y to the apex
                    y.fill(0.0);
                }
                break;
            }
            let j = drop.expect("partial step has a blocking multiplier");
            active.remove(j);
            u.remove(j);
        }
    }
    Ok(HalfspaceSolution { point: y, active: active.into_iter().zip(u).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_orthant() {
        let g = DMatrix::<f64>::identity(3, 3);
        let l = nnls(&g, &DVector::from_vec(vec![1.0, -2.0, 0.5])).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 0.0, 0.5]);
    }

    #[test]
    fn nnls_matches_brute_force() {
        // two generators in the plane; brute force over a fine λ grid
        let v = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.6, 0.8]);
        let x = DVector::from_vec(vec![-0.3, 1.0]);
        let l = nnls(&v, &x).unwrap();
        let obj = |a: f64, b: f64| (&v * DVector::from_vec(vec![a, b]) - &x).norm_squared();
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                best = best.min(obj(i as f64 * 0.005, j as f64 * 0.005));
            }
        }
        assert!(obj(l[0], l[1]) <= best + 1e-12);
    }

    #[test]
    fn halfspace_orthant() {
        // {y ≤ 0} componentwise
        let a = DMatrix::<f64>::identity(3, 3);
        let s = halfspace_projection(&a, &DVector::from_vec(vec![1.0, -2.0, 0.5])).unwrap();
        assert!((s.point - DVector::from_vec(vec![0.0, -2.0, 0.0])).norm() < 1e-15);
        assert_eq!(s.active.len(), 2);
    }

    #[test]
    fn halfspace_handles_redundant_rows() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, r, r, 1.0, 0.0]);
        let s = halfspace_projection(&a, &DVector::from_vec(vec![2.0, 3.0])).unwrap();
        assert!(s.point.norm() < 1e-14);
    }
}
