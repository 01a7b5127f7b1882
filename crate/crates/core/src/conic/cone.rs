use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::solver::{halfspace_projection, nnls};
use crate::error::{invalid, Error, Result};
use crate::gauss::SeededStream;

/// Active-coefficient threshold, relative to a unit-norm input.
pub const TAU_ACT: f64 = 1e-8;
/// Singular values below TAU_RANK·σ_max count as zero.
pub const TAU_RANK: f64 = 1e-8;

/// Cone description as read from JSON: generator vectors and/or halfspace
/// normals, each a list of length-n vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Vec<f64>>>,
}

/// A closed convex polyhedral cone, {Vλ : λ ≥ 0} and/or {x : Ax ≤ 0}.
#[derive(Debug, Clone)]
pub struct PolyhedralCone {
    n: usize,
    /// Unit-norm generator columns (n × m).
    generators: Option<DMatrix<f64>>,
    /// Unit-norm halfspace rows (k × n).
    halfspaces: Option<DMatrix<f64>>,
    /// Generator indices belonging to ± pairs.
    lineality: Vec<usize>,
}

/// Π_C(x) with its representation.
#[derive(Debug, Clone)]
pub struct Projection {
    pub point: DVector<f64>,
    /// Generator coefficients (scaled to unit-norm generators), when the
    /// projection came from the generator form.
    pub coefficients: Option<DVector<f64>>,
    /// Active halfspace rows, when it came from the halfspace form.
    pub active: Option<Vec<usize>>,
}

/// Face dimension of the face whose relative interior holds Π_C(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceDimension {
    pub k: usize,
    /// The rank decision fell inside the ambiguity band.
    pub flagged: bool,
}

fn unit_columns(cols: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        if c.len() != n {
            return Err(invalid(format!("{what} {j} has length {}, expected {n}", c.len())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("{what} {j} has a non-finite entry")));
        }
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid(format!("{what} {j} is zero")));
        }
        for i in 0..n {
            m[(i, j)] = c[i] / norm;
        }
    }
    Ok(m)
}

fn rank_with_flag(m: &DMatrix<f64>) -> (usize, bool) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (0, false);
    }
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return (0, false);
    }
    let cut = TAU_RANK * max;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let flagged = sv.iter().any(|&s| s >= cut / 10.0 && s <= cut * 10.0);
    (rank, flagged)
}

impl PolyhedralCone {
    pub fn new(n: usize, generators: Option<Vec<Vec<f64>>>, halfspaces: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("cone dimension must be positive"));
        }
        if generators.is_none() && halfspaces.is_none() {
            return Err(invalid("a cone needs generators or halfspaces"));
        }
        let generators = match generators {
            Some(g) if g.is_empty() => return Err(invalid("generator list is empty")),
            Some(g) => Some(unit_columns(&g, n, "generator")?),
            None => None,
        };
        let halfspaces = match halfspaces {
            Some(h) if h.is_empty() => return Err(invalid("halfspace list is empty")),
            Some(h) => Some(unit_columns(&h, n, "halfspace")?.transpose()),
            None => None,
        };
        if let (Some(v), Some(a)) = (&generators, &halfspaces) {
            let av = a * v;
            for j in 0..av.ncols() {
                for i in 0..av.nrows() {
                    if av[(i, j)] > 1e-10 {
                        return Err(invalid(format!("generator {j} violates halfspace {i} by {:e}", av[(i, j)])));
                    }
                }
            }
        }
        let mut lineality = Vec::new();
        if let Some(v) = &generators {
            for i in 0..v.ncols() {
                for j in 0..v.ncols() {
                    if i != j && (v.column(i) + v.column(j)).norm() <= 1e-10 {
                        lineality.push(i);
                        break;
                    }
                }
            }
        }
        Ok(PolyhedralCone { n, generators, halfspaces, lineality })
    }

    pub fn from_spec(spec: &ConeSpec) -> Result<Self> {
        Self::new(spec.n, spec.generators.clone(), spec.halfspaces.clone())
    }

    pub fn to_spec(&self) -> ConeSpec {
        let cols = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
        };
        ConeSpec {
            n: self.n,
            generators: self.generators.as_ref().map(cols),
            halfspaces: self.halfspaces.as_ref().map(|a| cols(&a.transpose())),
        }
    }

    pub fn from_generators(n: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(n, Some(generators), None)
    }

    pub fn from_halfspaces(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(n, None, Some(rows))
    }

    /// ℝ₊ⁿ.
    pub fn orthant(n: usize) -> Result<Self> {
        let e = |i: usize| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        let gens = (0..n).map(e).collect();
        let halfs = (0..n).map(|i| e(i).iter().map(|v| -v).collect()).collect();
        Self::new(n, Some(gens), Some(halfs))
    }

    /// The span of `basis` as a cone generated by ±bᵢ.
    pub fn subspace(n: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        let mut gens = Vec::with_capacity(2 * basis.len());
        for b in basis {
            gens.push(b.iter().map(|v| -v).collect());
            gens.push(b);
        }
        Self::from_generators(n, gens)
    }

    /// Span of the first d coordinate axes of ℝⁿ.
    pub fn coordinate_subspace(n: usize, d: usize) -> Result<Self> {
        if d == 0 || d > n {
            return Err(invalid(format!("subspace dimension {d} outside 1..={n}")));
        }
        let basis = (0..d).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::subspace(n, basis)
    }

    /// ℝⁿ itself.
    pub fn full_space(n: usize) -> Result<Self> {
        Self::coordinate_subspace(n, n)
    }

    /// C₁ × C₂ ⊆ ℝ^{n₁+n₂}; both factors must carry generators.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let (Some(va), Some(vb)) = (&a.generators, &b.generators) else {
            return Err(Error::Unsupported("products need generator forms".into()));
        };
        let n = a.n + b.n;
        let mut gens = Vec::new();
        for j in 0..va.ncols() {
            let mut g = vec![0.0; n];
            g[..a.n].copy_from_slice(va.column(j).as_slice());
            gens.push(g);
        }
        for j in 0..vb.ncols() {
            let mut g = vec![0.0; n];
            g[a.n..].copy_from_slice(vb.column(j).as_slice());
            gens.push(g);
        }
        Self::from_generators(n, gens)
    }

    /// m Gaussian generators in ℝⁿ with the last coordinate replaced by
    /// |g| + 1/2, so the cone is pointed.
    pub fn random_pointed(n: usize, m: usize, stream: SeededStream) -> Result<Self> {
        let mut rng = stream.rng();
        let gens = (0..m)
            .map(|_| {
                let mut g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                g[n - 1] = g[n - 1].abs() + 0.5;
                g
            })
            .collect();
        Self::from_generators(n, gens)
    }

    /// m unconstrained Gaussian generators; may be the whole space.
    pub fn random_general(n: usize, m: usize, stream: SeededStream) -> Result<Self> {
        let mut rng = stream.rng();
        let gens = (0..m).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        Self::from_generators(n, gens)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn has_generators(&self) -> bool {
        self.generators.is_some()
    }

    pub fn has_halfspaces(&self) -> bool {
        self.halfspaces.is_some()
    }

    /// Dimension of the lineality space spanned by ± generator pairs.
    pub fn lineality_dim(&self) -> usize {
        match &self.generators {
            Some(v) if !self.lineality.is_empty() => {
                let cols: Vec<_> = self.lineality.iter().map(|&j| v.column(j)).collect();
                rank_with_flag(&DMatrix::from_columns(&cols)).0
            }
            _ => 0,
        }
    }

    /// C° = {x : ⟨x, y⟩ ≤ 0 for y ∈ C}, in halfspace form A = Vᵀ. When C
    /// also has halfspaces their normals become generators of C°.
    pub fn dual_cone(&self) -> Result<Self> {
        let Some(v) = &self.generators else {
            return Err(Error::Unsupported("dual of a halfspace-only cone needs generator enumeration".into()));
        };
        let rows = (0..v.ncols()).map(|j| v.column(j).iter().copied().collect()).collect();
        let gens = self
            .halfspaces
            .as_ref()
            .map(|a| (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect());
        Self::new(self.n, gens, Some(rows))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(invalid(format!("point has length {}, expected {}", x.len(), self.n)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("point has a non-finite entry"));
        }
        Ok(())
    }

    /// Π_C(x): NNLS on the generators when present, otherwise the
    /// halfspace solver. The input is scaled to unit norm internally.
    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        self.check_point(x)?;
        let xv = DVector::from_column_slice(x);
        let norm = xv.norm();
        if norm == 0.0 {
            return Ok(Projection {
                point: xv,
                coefficients: self.generators.as_ref().map(|v| DVector::zeros(v.ncols())),
                active: None,
            });
        }
        let unit = &xv / norm;
        if let Some(v) = &self.generators {
            let lambda = nnls(v, &unit)?;
            let point = v * &lambda * norm;
            Ok(Projection { point, coefficients: Some(lambda), active: None })
        } else {
            let a = self.halfspaces.as_ref().expect("halfspace form present");
            let s = halfspace_projection(a, &unit)?;
            let active = s.active.iter().map(|&(i, _)| i).collect();
            Ok(Projection { point: s.point * norm, coefficients: None, active: Some(active) })
        }
    }

    /// Π_{C°}(x), computed by the solver not used for Π_C.
    pub fn project_polar(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        let xv = DVector::from_column_slice(x);
        let norm = xv.norm();
        if norm == 0.0 {
            return Ok(xv);
        }
        let unit = &xv / norm;
        if let Some(v) = &self.generators {
            // C° = {y : Vᵀy ≤ 0}
            let s = halfspace_projection(&v.transpose(), &unit)?;
            Ok(s.point * norm)
        } else {
            // C° = cone(Aᵀ)
            let a = self.halfspaces.as_ref().expect("halfspace form present");
            let at = a.transpose();
            let lambda = nnls(&at, &unit)?;
            Ok(at * lambda * norm)
        }
    }

    /// Dimension of the face containing Π_C(x) in its relative interior.
    pub fn face_dimension(&self, x: &[f64]) -> Result<FaceDimension> {
        let proj = self.project(x)?;
        Ok(self.face_dimension_of(&proj, x))
    }

    pub(crate) fn face_dimension_of(&self, proj: &Projection, x: &[f64]) -> FaceDimension {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if let (Some(v), Some(lambda)) = (&self.generators, &proj.coefficients) {
            let mut flagged = false;
            let mut cols = Vec::new();
            for j in 0..v.ncols() {
                let l = lambda[j];
                if (TAU_ACT / 10.0..=TAU_ACT * 10.0).contains(&l) {
                    flagged = true;
                }
                if l > TAU_ACT || self.lineality.contains(&j) {
                    cols.push(v.column(j));
                }
            }
            if cols.is_empty() {
                return FaceDimension { k: 0, flagged };
            }
            let (k, f) = rank_with_flag(&DMatrix::from_columns(&cols));
            FaceDimension { k, flagged: flagged || f }
        } else {
            let a = self.halfspaces.as_ref().expect("halfspace form present");
            let p = &proj.point / norm.max(1e-300);
            let mut flagged = false;
            let mut rows = Vec::new();
            for i in 0..a.nrows() {
                let s = a.row(i).dot(&p.transpose()).abs();
                if (TAU_ACT / 10.0..=TAU_ACT * 10.0).contains(&s) {
                    flagged = true;
                }
                if s <= TAU_ACT {
                    rows.push(a.row(i));
                }
            }
            if rows.is_empty() {
                return FaceDimension { k: self.n, flagged };
            }
            let (r, f) = rank_with_flag(&DMatrix::from_rows(&rows));
            FaceDimension { k: self.n - r, flagged: flagged || f }
        }
    }

    /// Largest violation of membership in C for a point y.
    pub fn feasibility_residual(&self, y: &[f64]) -> Result<f64> {
        self.check_point(y)?;
        let yv = DVector::from_column_slice(y);
        if let Some(a) = &self.halfspaces {
            Ok((a * &yv).iter().copied().fold(0.0, f64::max))
        } else {
            let p = self.project(y)?;
            Ok((p.point - yv).norm())
        }
    }
}
